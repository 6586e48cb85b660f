#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "texp/intervals.hpp"
#include "texp/model.hpp"
#include "texp/te_encoding.hpp"

namespace texp {

// Everything one explanation query needs: the model, its interval
// decomposition, a size measure, and the instance with its box.
struct ExplanationProblem {
    const TreeEnsemble* te = nullptr;
    const IntervalTable* table = nullptr;
    const SizeMeasure* measure = nullptr;
    Instance instance;
    std::vector<int> inst_box;  // e_i per feature, 1-based

    int num_features() const { return te->num_features(); }
    int target() const { return instance.predicted_class; }
};

ExplanationProblem make_problem(const TreeEnsemble& te, const IntervalTable& table,
                                const SizeMeasure& measure, Instance instance);

// Region fixing the listed features to the instance's intervals and
// leaving every other feature free.
Region region_fixing(const ExplanationProblem& p, std::span<const int> features);

// Inflated contrastive explanation: feature set plus one box per feature;
// non-members sit at the instance's interval.
struct Icxp {
    std::vector<int> features;
    std::vector<IdxRange> box;
    friend bool operator==(const Icxp&, const Icxp&) = default;
};

struct InflatedExplanation {
    std::vector<int> features;
    Region region;
    double fsc_value = 0.0;
};

// True iff fixing the subset to the instance's intervals entails the
// prediction everywhere.
bool is_weak_axp(const ExplanationProblem& p, TeEncoding& enc,
                 std::span<const int> subset);

// Deletion-based subset-minimal abductive explanation, ascending feature order.
std::vector<int> compute_axp(const ExplanationProblem& p, TeEncoding& enc);

// Deletion-based subset-minimal contrastive explanation, ascending feature order.
std::vector<int> compute_cxp(const ExplanationProblem& p, TeEncoding& enc);

// Greedy interval inflation of a weak AXp: per feature in ascending order,
// extend upward one interval at a time, then downward; features whose range
// reaches the full domain drop out.
InflatedExplanation inflate_axp(const ExplanationProblem& p, TeEncoding& enc,
                                std::span<const int> weak_axp);

// Y = features whose counterexample box excludes the instance's interval.
Icxp reduce_counterexample_to_icxp(const ExplanationProblem& p,
                                   const Counterexample& cex);

}  // namespace texp
