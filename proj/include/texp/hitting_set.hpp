#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "texp/explain.hpp"
#include "texp/wcnf.hpp"

namespace texp {

enum class OracleEncoding { Naive, Bounds };

// Candidate-generation side of the implicit hitting-set loop: a MaxSAT
// formula whose optimal models are the FSC-maximal regions hitting every
// blocked iCXp.  Two encodings share the interval-choice variables
// y^i_{l,u}; the naive one constrains them with exactly-one groups and
// blocks through on-demand "does not cover" literals, the bounds one
// derives them from monotone lower/upper bound literals and blocks with a
// single bound literal per feature.
class CandidateOracle {
public:
    CandidateOracle(const ExplanationProblem& problem, OracleEncoding encoding);

    OracleEncoding encoding() const { return encoding_; }

    // FSC-maximal region hitting all blocks; ties broken canonically
    // (ascending feature, then lowest lower index, then widest).
    Region next_candidate();
    double last_fsc() const { return last_fsc_; }

    // Adds the blocking clause for an inflated CXp; returns the clause.
    std::vector<sat::Lit> block(const Icxp& icxp);
    int num_blocks() const { return num_blocks_; }

    std::uint64_t maxsat_calls() const { return calls_; }
    MaxSatEngine& engine() { return engine_; }

    // Introspection and exports.
    sat::Lit choice_lit(int feature, int lo, int hi) const;
    std::optional<sat::Lit> lower_bound_lit(int feature, int j) const;  // [l_i >= s_j]
    std::optional<sat::Lit> upper_bound_lit(int feature, int j) const;  // [u_i < s_j]
    bool choice_feasible(int feature, int lo, int hi);  // vs. hard clauses
    bool feasible(std::vector<sat::Lit> assumptions);
    const Wcnf& formula() const { return mirror_; }
    std::string export_lp() const;  // bounds encoding only

private:
    sat::Var fresh_var();
    void add_hard(std::vector<sat::Lit> lits);
    void add_soft_choice(int feature, int lo, int hi);
    void add_exactly_one(const std::vector<sat::Lit>& lits);
    void build_naive();
    void build_bounds();
    sat::Lit not_covering(int feature, int a, int b);  // naive aux, memoized

    const ExplanationProblem* p_;
    OracleEncoding encoding_;
    MaxSatEngine engine_;
    Wcnf mirror_;
    double last_fsc_ = 0.0;
    Cost prev_optimum_;
    int num_blocks_ = 0;
    std::uint64_t calls_ = 0;

    // y^i_{l,u} in a per-feature triangle: index (lo-1)*span + (hi-e)
    std::vector<std::vector<sat::Var>> choice_;
    std::vector<std::vector<double>> choice_weight_;
    std::vector<std::vector<sat::Var>> lower_;  // [l_i >= s_j], j = 1..e-1
    std::vector<std::vector<sat::Var>> upper_;  // [u_i < s_j],  j = e..|S|
    std::map<std::tuple<int, int, int>, sat::Var> covering_aux_;

    // structured rows for the LP rewrite
    struct YDef {
        int feature, lo, hi;
        std::vector<sat::Lit> terms;
    };
    std::vector<std::pair<sat::Lit, sat::Lit>> chains_;  // a -> b
    std::vector<YDef> ydefs_;
    std::vector<std::vector<sat::Lit>> block_rows_;
    std::map<int, std::string> var_names_;
};

}  // namespace texp
