#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "texp/cost.hpp"
#include "texp/sat.hpp"

namespace texp {

struct SoftClause {
    std::vector<sat::Lit> lits;
    Cost cost;  // paid when the clause is falsified; strictly positive
};

// Weighted partial MaxSAT formula <hard, soft>.
struct Wcnf {
    int num_vars = 0;
    std::vector<std::vector<sat::Lit>> hard;
    std::vector<SoftClause> soft;

    sat::Var new_var() { return num_vars++; }
    void add_hard(std::vector<sat::Lit> lits) { hard.push_back(std::move(lits)); }
    void add_soft(std::vector<sat::Lit> lits, Cost cost);
};

struct MaxSatModel {
    std::vector<bool> values;
    Cost cost;

    bool lit(sat::Lit l) const { return values[l.var()] != l.sign(); }
};

enum class MaxSatStatus { Optimal, HardUnsat };

struct MaxSatResult {
    MaxSatStatus status = MaxSatStatus::HardUnsat;
    MaxSatModel model;  // valid when Optimal
};

// Incremental weighted partial MaxSAT over one owned SAT solver.  Hard
// clauses, soft clauses and variables may be added between solves
// (monotone additions only).  Optimization runs a linear cost-bound
// descent: solve, forbid anything at least as costly, re-solve.
class MaxSatEngine {
public:
    sat::Var new_var() { return solver_.new_var(); }
    int num_vars() const { return solver_.num_vars(); }
    void add_hard(std::vector<sat::Lit> lits);
    void add_soft(std::vector<sat::Lit> lits, Cost cost);

    // known_lower_bound, when the caller can prove one, lets the search stop
    // without an optimality certificate once it is reached.
    MaxSatResult solve(std::span<const sat::Lit> assumptions = {},
                       Cost known_lower_bound = {});
    // Any model with soft cost <= bound, or nullopt.
    std::optional<MaxSatModel> solve_under(Cost bound,
                                           std::span<const sat::Lit> assumptions = {});

    std::uint64_t sat_calls() const { return sat_calls_; }
    sat::Solver& solver() { return solver_; }

private:
    MaxSatModel snapshot_model();
    Cost model_cost() const;

    sat::Solver solver_;
    std::vector<SoftClause> softs_;
    std::vector<sat::BudgetItem> items_;  // one entry per soft clause
    std::uint64_t sat_calls_ = 0;
};

// One-shot optimum of a formula.
MaxSatResult solve_maxsat(const Wcnf& formula);

// Standard weighted-CNF text ("h" marker for hard clauses, integer
// weights round(cost * scale) for soft ones, variables numbered from 1).
std::string export_wcnf(const Wcnf& formula, std::int64_t scale);

}  // namespace texp
