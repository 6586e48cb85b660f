#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace texp {

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Comma-separated training data: header row with column names, one numeric
// column per feature.  A trailing non-feature column (the label) is allowed
// and ignored by everything that consumes the dataset.
struct Dataset {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::size_t num_rows() const { return rows.size(); }
    int column_index(const std::string& name) const;  // -1 when absent
};

Dataset parse_dataset(const std::string& text);
Dataset load_dataset(const std::string& path);

}  // namespace texp
