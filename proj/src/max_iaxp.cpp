#include "texp/max_iaxp.hpp"

#include <algorithm>
#include <chrono>

namespace texp {

std::uint64_t seed_singleton_icxps(const ExplanationProblem& p, TeEncoding& enc,
                                   CandidateOracle& oracle) {
    std::uint64_t added = 0;
    Region probe;  // the instance's own box
    for (int i = 0; i < p.num_features(); ++i)
        probe.ranges.push_back(IdxRange{p.inst_box[i], p.inst_box[i]});
    auto scan = [&](int feature, int j) {
        Region box = probe;
        box.ranges[feature] = IdxRange{j, j};
        if (!enc.find_counterexample(box).has_value()) return;
        Icxp icxp;
        icxp.features = {feature};
        icxp.box = probe.ranges;
        icxp.box[feature] = IdxRange{j, j};
        oracle.block(icxp);
        ++added;
    };
    for (int i = 0; i < p.num_features(); ++i) {
        int e = p.inst_box[i];
        for (int j = e - 1; j >= 1; --j) scan(i, j);
        for (int j = e + 1; j <= p.table->num_intervals(i); ++j) scan(i, j);
    }
    return added;
}

MaxIaxpResult compute_max_iaxp(const ExplanationProblem& p, TeEncoding& enc,
                               const MaxIaxpOptions& options) {
    using clock = std::chrono::steady_clock;
    auto started = clock::now();
    auto elapsed_s = [&] {
        return std::chrono::duration<double>(clock::now() - started).count();
    };

    MaxIaxpResult result;
    std::uint64_t checker_before = enc.oracle_calls();
    CandidateOracle oracle(p, options.encoding);
    if (options.seed_singletons)
        result.seed_blocks = seed_singleton_icxps(p, enc, oracle);

    for (;;) {
        if (result.iterations >= options.max_iterations ||
            (options.timeout_s > 0 && elapsed_s() > options.timeout_s)) {
            // The loop has no anytime solution; fall back to the greedy iAXp.
            InflatedExplanation greedy = inflate_axp(p, enc, compute_axp(p, enc));
            result.features = std::move(greedy.features);
            result.region = std::move(greedy.region);
            result.fsc_value = greedy.fsc_value;
            result.maximum = false;
            break;
        }
        Region candidate = oracle.next_candidate();
        ++result.iterations;
        result.fsc_trace.push_back(oracle.last_fsc());

        std::optional<Counterexample> cex = enc.find_counterexample(candidate);
        if (!cex) {
            result.region = candidate;
            for (int i = 0; i < p.num_features(); ++i)
                if (!candidate.is_free(i, *p.table)) result.features.push_back(i);
            result.fsc_value = fsc(candidate, *p.table, *p.measure);
            result.maximum = true;
            break;
        }
        Icxp icxp = reduce_counterexample_to_icxp(p, *cex);
        for (int i : icxp.features)
            if (icxp.box[i].lo < candidate.ranges[i].lo ||
                icxp.box[i].hi > candidate.ranges[i].hi)
                throw InternalError("max_iaxp: blocked box not covered by candidate");
        if (std::find(result.blocked.begin(), result.blocked.end(), icxp) !=
            result.blocked.end())
            throw InternalError("max_iaxp: iCXp blocked twice");
        oracle.block(icxp);
        result.blocked.push_back(std::move(icxp));
    }
    result.checker_calls = enc.oracle_calls() - checker_before;
    result.wall_ms = elapsed_s() * 1000.0;
    return result;
}

}  // namespace texp
