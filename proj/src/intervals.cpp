#include "texp/intervals.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace texp {

IntervalTable build_interval_table(const TreeEnsemble& te) {
    IntervalTable table;
    table.splits.resize(te.num_features());
    table.domains = te.feature_space.domains;
    for (const DecisionTree& t : te.trees)
        for (const TreeNode& n : t.nodes)
            if (!n.leaf) table.splits[n.feature].push_back(n.threshold);
    for (auto& s : table.splits) {
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
    }
    return table;
}

int locate(const IntervalTable& table, int feature, double value) {
    const FeatureDomain& d = table.domains[feature];
    if (!(value >= d.lo && value <= d.hi))
        throw DataError("locate: value outside the feature domain");
    const auto& s = table.splits[feature];
    return static_cast<int>(std::upper_bound(s.begin(), s.end(), value) - s.begin()) + 1;
}

SizeMeasure SizeMeasure::proportion(const IntervalTable& table) {
    SizeMeasure m;
    m.kind_ = MeasureKind::Proportion;
    m.sizes_.resize(table.num_features());
    for (int i = 0; i < table.num_features(); ++i) {
        double width = table.domains[i].hi - table.domains[i].lo;
        for (int j = 1; j <= table.num_intervals(i); ++j)
            m.sizes_[i].push_back(
                (table.interval_hi(i, j) - table.interval_lo(i, j)) / width);
    }
    return m;
}

SizeMeasure SizeMeasure::data_proportion(const IntervalTable& table,
                                         const FeatureSpace& fs, const Dataset& data) {
    SizeMeasure m;
    m.kind_ = MeasureKind::DataProportion;
    m.sizes_.resize(table.num_features());
    for (int i = 0; i < table.num_features(); ++i) {
        int col = data.column_index(fs.names[i]);
        if (col < 0)
            throw DataError("measure: dataset has no column '" + fs.names[i] + "'");
        int n = table.num_intervals(i);
        std::vector<std::size_t> counts(n, 0);
        for (const auto& row : data.rows) {
            double v = row[col];
            const auto& s = table.splits[i];
            int j = static_cast<int>(std::upper_bound(s.begin(), s.end(), v) - s.begin());
            ++counts[j];  // clamp-free: out-of-domain rows still land in an edge bin
        }
        double denom = static_cast<double>(data.num_rows() + n);
        for (int j = 0; j < n; ++j)
            m.sizes_[i].push_back((static_cast<double>(counts[j]) + 1.0) / denom);
    }
    return m;
}

double SizeMeasure::run_size(int feature, int lo, int hi) const {
    assert(lo >= 1 && lo <= hi &&
           hi <= static_cast<int>(sizes_[feature].size()));
    if (lo == 1 && hi == static_cast<int>(sizes_[feature].size())) return 1.0;
    double s = 0.0;
    for (int j = lo; j <= hi; ++j) s += sizes_[feature][j - 1];
    return s;
}

Region Region::all_free(const IntervalTable& table) {
    Region r;
    for (int i = 0; i < table.num_features(); ++i)
        r.ranges.push_back(IdxRange{1, table.num_intervals(i)});
    return r;
}

double interval_weight(const IntervalTable& table, const SizeMeasure& measure,
                       int feature, int lo, int hi) {
    if (lo == 1 && hi == table.num_intervals(feature)) return 0.0;
    return std::log(measure.run_size(feature, lo, hi));
}

double fsc(const Region& region, const IntervalTable& table, const SizeMeasure& measure) {
    double total = 0.0;
    for (int i = 0; i < table.num_features(); ++i)
        total += interval_weight(table, measure, i, region.ranges[i].lo,
                                 region.ranges[i].hi);
    return total;
}

double coverage_percent(double fsc_value) { return 100.0 * std::exp(fsc_value); }

}  // namespace texp
