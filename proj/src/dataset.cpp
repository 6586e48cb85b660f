#include "texp/dataset.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace texp {

int Dataset::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return static_cast<int>(i);
    return -1;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) {
        std::size_t a = cell.find_first_not_of(" \t\r");
        std::size_t b = cell.find_last_not_of(" \t\r");
        out.push_back(a == std::string::npos ? "" : cell.substr(a, b - a + 1));
    }
    return out;
}

}  // namespace

Dataset parse_dataset(const std::string& text) {
    Dataset d;
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line)) throw DataError("dataset: empty document");
    d.columns = split_csv(line);
    if (d.columns.empty()) throw DataError("dataset: empty header");
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::vector<std::string> cells = split_csv(line);
        if (cells.size() != d.columns.size())
            throw DataError("dataset: row " + std::to_string(lineno) +
                            " has wrong arity");
        std::vector<double> row(cells.size());
        for (std::size_t i = 0; i < cells.size(); ++i) {
            try {
                row[i] = std::stod(cells[i]);
            } catch (const std::exception&) {
                // non-numeric cells are only legal in the label column
                if (i + 1 == cells.size()) {
                    row[i] = 0.0;
                    continue;
                }
                throw DataError("dataset: non-numeric value '" + cells[i] +
                                "' at row " + std::to_string(lineno));
            }
        }
        d.rows.push_back(std::move(row));
    }
    if (d.rows.empty()) throw DataError("dataset: no data rows");
    return d;
}

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("dataset: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_dataset(buf.str());
}

}  // namespace texp
