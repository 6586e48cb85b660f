#pragma once

#include <cstdint>
#include <vector>

#include "texp/explain.hpp"
#include "texp/hitting_set.hpp"

namespace texp {

struct MaxIaxpOptions {
    OracleEncoding encoding = OracleEncoding::Bounds;
    bool seed_singletons = false;
    std::uint64_t max_iterations = 100000;
    double timeout_s = 0.0;  // 0 = none
};

struct MaxIaxpResult {
    std::vector<int> features;
    Region region;
    double fsc_value = 0.0;
    bool maximum = false;  // false when the budget ran out (greedy fallback)
    std::uint64_t iterations = 0;  // candidate-oracle calls
    std::uint64_t checker_calls = 0;
    std::uint64_t seed_blocks = 0;
    std::vector<Icxp> blocked;
    std::vector<double> fsc_trace;  // per-iteration optimal candidate FSC
    double wall_ms = 0.0;
};

// Blocks one size-1 iCXp per adversarial interval found by per-feature
// outward scans with every other feature pinned to the instance's interval.
// The final Max-iAXp is unchanged; iterations usually drop.
std::uint64_t seed_singleton_icxps(const ExplanationProblem& p, TeEncoding& enc,
                                   CandidateOracle& oracle);

// Alternates the FSC-maximal candidate oracle with the counterexample
// checker until the candidate is a valid inflated AXp; by duality that
// candidate maximizes FSC over all inflated weak AXps.
MaxIaxpResult compute_max_iaxp(const ExplanationProblem& p, TeEncoding& enc,
                               const MaxIaxpOptions& options = {});

}  // namespace texp
