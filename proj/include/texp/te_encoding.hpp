#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "texp/intervals.hpp"
#include "texp/model.hpp"
#include "texp/wcnf.hpp"

namespace texp {

// An interval box, classified differently from the target class, realized
// from a model of the TE encoding.
struct Counterexample {
    std::vector<IdxRange> box;  // a_i..b_i per feature
    int witness_class = -1;
};

struct PathInfo {
    int tree = -1;
    int leaf = -1;  // node index within the tree
    int cls = -1;
    std::int64_t weight_raw = 0;
    sat::Var var = -1;
};

// Propositional encoding of the ensemble's prediction: split literals
// [x_i < d] with ordering clauses, defined path literals, and one signed
// path-weight objective per opponent class.  The counterexample check asks,
// per opponent, for a model whose opponent-vs-target score beats the
// target under the documented argmax tie rule (smallest class index wins).
class TeEncoding {
public:
    TeEncoding(const TreeEnsemble& te, const IntervalTable& table, int target_class);

    int target() const { return target_; }
    int num_opponents() const { return static_cast<int>(opps_.size()); }
    int num_split_vars() const;
    int num_path_vars() const { return static_cast<int>(paths_.size()); }
    const std::vector<PathInfo>& paths() const { return paths_; }
    sat::Lit split_lit(int feature, int j) const;  // j is 1-based

    // none iff every point of the candidate region is classified target.
    std::optional<Counterexample> find_counterexample(const Region& candidate);

    std::vector<sat::Lit> candidate_assumptions(const Region& candidate) const;
    std::vector<IdxRange> extract_box(const sat::Solver& solver) const;

    // hard clauses only, budget-free; for property probes
    sat::Solver& probe() { return probe_; }
    const Wcnf& hard_formula() const { return hard_; }
    // hard clauses plus the soft objective of one opponent class
    Wcnf objective_formula(int opponent_class) const;
    Cost opponent_offset(int opponent_class) const;

    std::uint64_t oracle_calls() const { return oracle_calls_; }

private:
    struct Opponent {
        int cls = -1;
        Cost offset;
        std::vector<sat::BudgetItem> items;
        std::unique_ptr<sat::Solver> solver;
    };

    const Opponent& opponent(int cls) const;
    void build_structure(sat::Solver& solver, bool mirror);

    const TreeEnsemble* te_;
    const IntervalTable* table_;
    int target_;
    std::vector<std::vector<sat::Var>> split_vars_;
    std::vector<PathInfo> paths_;
    Wcnf hard_;
    std::vector<Opponent> opps_;
    sat::Solver probe_;
    std::uint64_t oracle_calls_ = 0;
};

}  // namespace texp
