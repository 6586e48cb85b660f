#pragma once

#include <string>
#include <vector>

#include "texp/dataset.hpp"
#include "texp/model.hpp"

namespace texp {

// Per-feature sorted split points and the induced half-open intervals
// I_1 = [lo, s_1), ..., I_{k+1} = [s_k, hi].  Interval indices are 1-based.
struct IntervalTable {
    std::vector<std::vector<double>> splits;  // strictly increasing per feature
    std::vector<FeatureDomain> domains;

    int num_features() const { return static_cast<int>(splits.size()); }
    int num_intervals(int feature) const {
        return static_cast<int>(splits[feature].size()) + 1;
    }
    double interval_lo(int feature, int j) const {
        return j == 1 ? domains[feature].lo : splits[feature][j - 2];
    }
    double interval_hi(int feature, int j) const {
        return j == num_intervals(feature) ? domains[feature].hi
                                           : splits[feature][j - 1];
    }
    // closed upper end only on the last interval
    bool hi_closed(int feature, int j) const { return j == num_intervals(feature); }
};

IntervalTable build_interval_table(const TreeEnsemble& te);

// Index of the unique interval containing the value.
int locate(const IntervalTable& table, int feature, double value);

enum class MeasureKind { Proportion, DataProportion };

// Per-interval sizes in (0, 1], summing to 1 per feature.  The data
// measure uses additive smoothing (count+1)/(rows+intervals) so no
// interval ever gets size zero.
class SizeMeasure {
public:
    static SizeMeasure proportion(const IntervalTable& table);
    static SizeMeasure data_proportion(const IntervalTable& table,
                                       const FeatureSpace& fs, const Dataset& data);

    MeasureKind kind() const { return kind_; }
    double interval_size(int feature, int j) const { return sizes_[feature][j - 1]; }
    // size of the contiguous union I_lo..I_hi; exactly 1 for the full domain
    double run_size(int feature, int lo, int hi) const;

private:
    MeasureKind kind_ = MeasureKind::Proportion;
    std::vector<std::vector<double>> sizes_;
};

struct IdxRange {
    int lo = 0, hi = 0;  // 1-based inclusive interval indices
    friend bool operator==(IdxRange, IdxRange) = default;
    bool contains(int j) const { return lo <= j && j <= hi; }
};

// Per-feature contiguous interval unions; candidate and inflated
// explanation regions always contain the instance's interval.
struct Region {
    std::vector<IdxRange> ranges;

    static Region all_free(const IntervalTable& table);
    bool is_free(int feature, const IntervalTable& table) const {
        return ranges[feature].lo == 1 &&
               ranges[feature].hi == table.num_intervals(feature);
    }
    friend bool operator==(const Region&, const Region&) = default;
};

// w^i_{l,u} = log(sum of interval sizes); <= 0, exactly 0 for the full domain.
double interval_weight(const IntervalTable& table, const SizeMeasure& measure,
                       int feature, int lo, int hi);

// Feature space coverage: sum over features of log of region size.
double fsc(const Region& region, const IntervalTable& table, const SizeMeasure& measure);

double coverage_percent(double fsc_value);

}  // namespace texp
