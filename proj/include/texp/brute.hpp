#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "texp/explain.hpp"
#include "texp/wcnf.hpp"

namespace texp {

struct CapExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Exact, exponential-time reference implementations.  Test-only quality:
// everything enumerates.
//
// The prediction is constant on every interval box, so the whole classifier
// reduces to a finite grid labeled once at each box's midpoint.
class BruteOracle {
public:
    explicit BruteOracle(const ExplanationProblem& problem,
                         std::uint64_t box_cap = 1'000'000);

    std::uint64_t num_boxes() const { return num_boxes_; }
    int box_label(std::span<const int> box) const;  // 1-based indices
    std::vector<double> box_midpoint(std::span<const int> box) const;
    bool kappa_constant() const;

    // Eq-(3) check: every box inside the region is labeled with the target.
    bool is_weak_iaxp(const Region& region) const;

    // Exhaustive maximum-FSC valid region containing the instance's box.
    std::pair<Region, double> max_iaxp(std::uint64_t region_cap = 1'000'000) const;

    struct ExplanationSets {
        std::vector<Region> iaxps;  // expansion-maximal valid regions
        std::vector<Icxp> icxps;    // shrink-minimal adversarial boxes
    };
    ExplanationSets enumerate_explanations(std::uint64_t region_cap = 1'000'000) const;

private:
    std::uint64_t adversarial_in(const Region& region) const;
    bool region_enum(std::uint64_t cap, const std::function<void(const Region&)>& fn) const;

    const ExplanationProblem* p_;
    std::vector<int> radices_;
    std::vector<int> labels_;
    std::vector<std::uint64_t> prefix_;        // adversarial prefix counts
    std::vector<std::uint64_t> prefix_stride_;  // dims radices_[i] + 1
    std::uint64_t num_boxes_ = 1;
};

// Grid labels in mixed-radix order (last feature fastest).
std::vector<int> classify_grid(const TreeEnsemble& te, const IntervalTable& table,
                               std::uint64_t box_cap = 1'000'000);

// Exact optimum by full enumeration; nullopt when the hard clauses are
// unsatisfiable.
std::optional<Cost> maxsat_brute(const Wcnf& formula, int max_vars = 20);

}  // namespace texp
