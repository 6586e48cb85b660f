#include "texp/explain.hpp"

#include <algorithm>
#include <cassert>

namespace texp {

ExplanationProblem make_problem(const TreeEnsemble& te, const IntervalTable& table,
                                const SizeMeasure& measure, Instance instance) {
    ExplanationProblem p;
    p.te = &te;
    p.table = &table;
    p.measure = &measure;
    for (int i = 0; i < te.num_features(); ++i)
        p.inst_box.push_back(locate(table, i, instance.values[i]));
    p.instance = std::move(instance);
    return p;
}

Region region_fixing(const ExplanationProblem& p, std::span<const int> features) {
    Region r = Region::all_free(*p.table);
    for (int i : features) r.ranges[i] = IdxRange{p.inst_box[i], p.inst_box[i]};
    return r;
}

bool is_weak_axp(const ExplanationProblem& p, TeEncoding& enc,
                 std::span<const int> subset) {
    return !enc.find_counterexample(region_fixing(p, subset)).has_value();
}

std::vector<int> compute_axp(const ExplanationProblem& p, TeEncoding& enc) {
    std::vector<int> axp(p.num_features());
    for (int i = 0; i < p.num_features(); ++i) axp[i] = i;
    for (int i = 0; i < p.num_features(); ++i) {
        std::vector<int> trial;
        for (int f : axp)
            if (f != i) trial.push_back(f);
        if (is_weak_axp(p, enc, trial)) axp = std::move(trial);
    }
    return axp;
}

std::vector<int> compute_cxp(const ExplanationProblem& p, TeEncoding& enc) {
    // Dropping feature i from Y re-fixes it to the instance's interval; the
    // drop stands whenever a counterexample stays reachable.
    std::vector<int> fixed;  // complement of Y
    std::vector<int> cxp(p.num_features());
    for (int i = 0; i < p.num_features(); ++i) cxp[i] = i;
    for (int i = 0; i < p.num_features(); ++i) {
        std::vector<int> trial_fixed = fixed;
        trial_fixed.push_back(i);
        if (enc.find_counterexample(region_fixing(p, trial_fixed)).has_value()) {
            fixed = std::move(trial_fixed);
            std::erase(cxp, i);
        }
    }
    return cxp;
}

InflatedExplanation inflate_axp(const ExplanationProblem& p, TeEncoding& enc,
                                std::span<const int> weak_axp) {
    Region region = region_fixing(p, weak_axp);
    for (int i : weak_axp) {
        int n = p.table->num_intervals(i);
        while (region.ranges[i].hi < n) {
            Region trial = region;
            ++trial.ranges[i].hi;
            if (enc.find_counterexample(trial).has_value()) break;
            region = std::move(trial);
        }
        while (region.ranges[i].lo > 1) {
            Region trial = region;
            --trial.ranges[i].lo;
            if (enc.find_counterexample(trial).has_value()) break;
            region = std::move(trial);
        }
    }
    InflatedExplanation out;
    out.region = region;
    for (int i : weak_axp)
        if (!region.is_free(i, *p.table)) out.features.push_back(i);
    out.fsc_value = fsc(region, *p.table, *p.measure);
    return out;
}

Icxp reduce_counterexample_to_icxp(const ExplanationProblem& p,
                                   const Counterexample& cex) {
    Icxp out;
    out.box.resize(p.num_features());
    for (int i = 0; i < p.num_features(); ++i) {
        if (cex.box[i].contains(p.inst_box[i])) {
            out.box[i] = IdxRange{p.inst_box[i], p.inst_box[i]};
        } else {
            out.features.push_back(i);
            out.box[i] = cex.box[i];
        }
    }
    if (out.features.empty())
        throw InternalError("icxp: counterexample indistinguishable from the instance");
    return out;
}

}  // namespace texp
