#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace texp::sat {

using Var = int;  // 0-based, dense, allocated by the solver

// Literal encoded minisat-style: 2*var for the positive literal,
// 2*var+1 for the negation.
struct Lit {
    int x = -2;

    static constexpr Lit make(Var v, bool positive = true) {
        return Lit{v + v + (positive ? 0 : 1)};
    }
    constexpr Lit operator~() const { return Lit{x ^ 1}; }
    constexpr bool sign() const { return x & 1; }  // true == negated
    constexpr Var var() const { return x >> 1; }
    constexpr int index() const { return x; }
    friend constexpr bool operator==(Lit a, Lit b) = default;
    friend constexpr bool operator<(Lit a, Lit b) { return a.x < b.x; }
};

constexpr Lit lit_undef{-2};

enum class Value : std::uint8_t { False = 0, True = 1, Undef = 2 };

inline Value value_of(bool b) { return b ? Value::True : Value::False; }

// A weighted literal for the budget constraint: the literal "pays" its
// weight whenever it is assigned true.
struct BudgetItem {
    Lit lit;
    std::int64_t weight = 0;
};

// CDCL solver with incremental clause addition, solving under assumptions
// with unsat-core extraction, and one optional budget constraint
// sum{ w_j : item j true } <= bound.
//
// The budget is query-scoped: each set_budget() call replaces the previous
// constraint and allocates a fresh guard variable that is assumed during
// solve(), so clauses learned under one budget stay sound after the budget
// changes.
class Solver {
public:
    enum class Status { Sat, Unsat };

    Var new_var();
    int num_vars() const { return static_cast<int>(assign_.size()); }

    // Returns false if the clause makes the formula trivially unsatisfiable.
    bool add_clause(std::vector<Lit> lits);
    bool okay() const { return ok_; }

    void set_budget(std::vector<BudgetItem> items, std::int64_t bound);
    void clear_budget();

    Status solve(std::span<const Lit> assumptions = {});

    // Minimizes the budget sum: one continuous search that tightens the
    // bound in place each time a model is found (sound: bounds only ever
    // tighten within a call).  Returns Sat with a minimum-sum model, or
    // Unsat when no model satisfies the initial bound at all.  A model at
    // or below known_lower_bound is returned without an optimality proof.
    Status solve_minimize(std::span<const Lit> assumptions = {},
                          std::int64_t known_lower_bound = 0);

    Value model_value(Var v) const { return model_[v]; }
    bool model_lit(Lit l) const {
        return model_[l.var()] == (l.sign() ? Value::False : Value::True);
    }
    // After Unsat: a subset of the assumptions sufficient for
    // unsatisfiability (the budget guard is filtered out).
    const std::vector<Lit>& core() const { return core_; }

    std::uint64_t conflicts() const { return conflicts_; }
    std::uint64_t decisions() const { return decisions_; }
    std::uint64_t propagations() const { return propagations_; }

private:
    struct Clause {
        std::vector<Lit> lits;
        double act = 0.0;
        bool attached = false;
        bool learnt = false;
        bool dead = false;
    };

    // reason_ / propagate() markers besides clause indices
    static constexpr int reason_none = -1;
    static constexpr int reason_budget = -2;    // budget-propagated literal
    static constexpr int conflict_budget = -3;  // budget sum exceeded

    Value value(Lit l) const {
        Value v = assign_[l.var()];
        if (v == Value::Undef) return Value::Undef;
        return l.sign() ? (v == Value::True ? Value::False : Value::True) : v;
    }
    int level(Var v) const { return level_[v]; }
    int decision_level() const { return static_cast<int>(trail_lim_.size()); }

    void attach(int ci);
    void new_decision_level() { trail_lim_.push_back(static_cast<int>(trail_.size())); }
    void unchecked_enqueue(Lit p, int reason);
    int propagate();
    int propagate_watches();
    int budget_step(bool& progressed);
    // Reason of a budget propagation (or, with lit_undef, the conflict form):
    // the guard and every item true at the time, negated.
    const std::vector<Lit>& budget_reason(Lit forced);
    void cancel_until(int lvl);
    void analyze(int confl, std::vector<Lit>& learnt, int& bt_level);
    void analyze_final(Lit p);
    Lit pick_branch();
    void bump(Var v);
    void bump_clause(int ci);
    void decay();
    void reduce_learnts();
    bool budget_enforced() const;
    Status search(std::span<const Lit> assumptions);

    std::vector<Clause> clauses_;
    std::vector<std::vector<int>> watches_;  // per literal index
    std::vector<Value> assign_;
    std::vector<int> level_;
    std::vector<int> reason_;  // clause index or a marker
    std::vector<int> pos_;     // trail position while assigned
    std::vector<double> activity_;
    std::vector<bool> phase_;
    std::vector<char> seen_;
    std::vector<Lit> trail_;
    std::vector<int> trail_lim_;
    std::vector<Lit> core_;
    std::vector<Value> model_;
    std::vector<int> learnts_;
    int qhead_ = 0;
    bool ok_ = true;
    double var_inc_ = 1.0;
    double cla_inc_ = 1.0;
    std::size_t reduce_limit_ = 4000;

    // budget state
    std::vector<std::int64_t> lit_weight_;  // per literal index
    std::vector<Lit> budget_lits_;
    std::int64_t budget_bound_ = 0;
    std::int64_t budget_sum_ = 0;
    Var budget_guard_ = -1;
    bool budget_dirty_ = false;
    std::vector<Lit> budget_reason_tmp_;

    std::uint64_t conflicts_ = 0, decisions_ = 0, propagations_ = 0;
};

}  // namespace texp::sat
