#include "texp/sat.hpp"

#include <algorithm>
#include <cassert>

namespace texp::sat {

Var Solver::new_var() {
    Var v = static_cast<int>(assign_.size());
    assign_.push_back(Value::Undef);
    level_.push_back(-1);
    reason_.push_back(reason_none);
    pos_.push_back(-1);
    activity_.push_back(0.0);
    phase_.push_back(false);
    seen_.push_back(0);
    watches_.emplace_back();
    watches_.emplace_back();
    lit_weight_.push_back(0);
    lit_weight_.push_back(0);
    return v;
}

bool Solver::add_clause(std::vector<Lit> lits) {
    if (!ok_) return false;
    cancel_until(0);
    std::sort(lits.begin(), lits.end());
    std::vector<Lit> cl;
    Lit prev = lit_undef;
    for (Lit l : lits) {
        assert(l.var() >= 0 && l.var() < num_vars());
        if (l == prev) continue;
        if (l == ~prev) return true;  // tautology
        if (value(l) == Value::True && level(l.var()) == 0) return true;
        if (value(l) == Value::False && level(l.var()) == 0) continue;
        cl.push_back(l);
        prev = l;
    }
    if (cl.empty()) {
        ok_ = false;
        return false;
    }
    if (cl.size() == 1) {
        if (value(cl[0]) == Value::True) return true;
        unchecked_enqueue(cl[0], reason_none);
        ok_ = propagate() == reason_none;
        return ok_;
    }
    Clause c;
    c.lits = std::move(cl);
    clauses_.push_back(std::move(c));
    attach(static_cast<int>(clauses_.size()) - 1);
    return true;
}

void Solver::attach(int ci) {
    Clause& c = clauses_[ci];
    assert(c.lits.size() >= 2);
    watches_[(~c.lits[0]).index()].push_back(ci);
    watches_[(~c.lits[1]).index()].push_back(ci);
    c.attached = true;
}

void Solver::set_budget(std::vector<BudgetItem> items, std::int64_t bound) {
    cancel_until(0);
    for (Lit l : budget_lits_) lit_weight_[l.index()] = 0;
    budget_lits_.clear();
    // per-literal weights; both polarities of a variable may carry items
    for (const BudgetItem& it : items) {
        if (it.weight <= 0) continue;
        if (lit_weight_[it.lit.index()] == 0) budget_lits_.push_back(it.lit);
        lit_weight_[it.lit.index()] += it.weight;
    }
    budget_bound_ = bound;
    budget_guard_ = new_var();
    budget_sum_ = 0;
    for (Lit p : trail_)
        budget_sum_ += lit_weight_[p.index()];
    budget_dirty_ = true;
}

void Solver::clear_budget() {
    cancel_until(0);
    for (Lit l : budget_lits_) lit_weight_[l.index()] = 0;
    budget_lits_.clear();
    budget_guard_ = -1;
    budget_sum_ = 0;
    budget_dirty_ = false;
}

bool Solver::budget_enforced() const {
    return budget_guard_ >= 0 && assign_[budget_guard_] == Value::True;
}

void Solver::unchecked_enqueue(Lit p, int reason) {
    assert(value(p) == Value::Undef);
    assign_[p.var()] = p.sign() ? Value::False : Value::True;
    level_[p.var()] = decision_level();
    reason_[p.var()] = reason;
    pos_[p.var()] = static_cast<int>(trail_.size());
    phase_[p.var()] = !p.sign();
    trail_.push_back(p);
    budget_sum_ += lit_weight_[p.index()];
    if (lit_weight_[p.index()] > 0 || p.var() == budget_guard_) budget_dirty_ = true;
    ++propagations_;
}

int Solver::propagate_watches() {
    while (qhead_ < static_cast<int>(trail_.size())) {
        Lit p = trail_[qhead_++];
        std::vector<int>& ws = watches_[p.index()];
        std::size_t keep = 0;
        for (std::size_t k = 0; k < ws.size(); ++k) {
            int ci = ws[k];
            Clause& c = clauses_[ci];
            if (c.dead) continue;  // lazily unhooked
            Lit false_lit = ~p;
            if (c.lits[0] == false_lit) std::swap(c.lits[0], c.lits[1]);
            assert(c.lits[1] == false_lit);
            if (value(c.lits[0]) == Value::True) {
                ws[keep++] = ci;
                continue;
            }
            bool moved = false;
            for (std::size_t j = 2; j < c.lits.size(); ++j) {
                if (value(c.lits[j]) != Value::False) {
                    std::swap(c.lits[1], c.lits[j]);
                    watches_[(~c.lits[1]).index()].push_back(ci);
                    moved = true;
                    break;
                }
            }
            if (moved) continue;
            // unit or conflicting
            ws[keep++] = ci;
            if (value(c.lits[0]) == Value::False) {
                for (std::size_t k2 = k + 1; k2 < ws.size(); ++k2) ws[keep++] = ws[k2];
                ws.resize(keep);
                qhead_ = static_cast<int>(trail_.size());
                return ci;
            }
            unchecked_enqueue(c.lits[0], ci);
        }
        ws.resize(keep);
    }
    return reason_none;
}

// Rebuilt on demand: for a forced literal only items assigned before it may
// appear (the implication-graph order), for the conflict form all of them.
const std::vector<Lit>& Solver::budget_reason(Lit forced) {
    budget_reason_tmp_.clear();
    int before = forced == lit_undef ? INT32_MAX : pos_[forced.var()];
    if (forced != lit_undef) budget_reason_tmp_.push_back(forced);
    budget_reason_tmp_.push_back(Lit::make(budget_guard_, false));
    for (Lit l : budget_lits_)
        if (value(l) == Value::True && pos_[l.var()] < before)
            budget_reason_tmp_.push_back(~l);
    return budget_reason_tmp_;
}

int Solver::budget_step(bool& progressed) {
    progressed = false;
    budget_dirty_ = false;
    if (!budget_enforced()) return reason_none;
    if (budget_sum_ > budget_bound_) return conflict_budget;
    std::int64_t slack = budget_bound_ - budget_sum_;
    for (Lit l : budget_lits_) {
        if (value(l) != Value::Undef) continue;
        if (lit_weight_[l.index()] > slack) {
            unchecked_enqueue(~l, reason_budget);
            progressed = true;
        }
    }
    return reason_none;
}

int Solver::propagate() {
    for (;;) {
        int confl = propagate_watches();
        if (confl != reason_none) return confl;
        if (!budget_dirty_) return reason_none;
        bool progressed;
        confl = budget_step(progressed);
        if (confl != reason_none) return confl;
        if (!progressed && qhead_ == static_cast<int>(trail_.size()))
            return reason_none;
    }
}

void Solver::cancel_until(int lvl) {
    if (decision_level() <= lvl) return;
    int bound = trail_lim_[lvl];
    for (int i = static_cast<int>(trail_.size()) - 1; i >= bound; --i) {
        Lit p = trail_[i];
        budget_sum_ -= lit_weight_[p.index()];
        assign_[p.var()] = Value::Undef;
        reason_[p.var()] = reason_none;
        pos_[p.var()] = -1;
    }
    trail_.resize(bound);
    trail_lim_.resize(lvl);
    qhead_ = bound;
    budget_dirty_ = true;
}

void Solver::bump(Var v) {
    activity_[v] += var_inc_;
    if (activity_[v] > 1e100) {
        for (double& a : activity_) a *= 1e-100;
        var_inc_ *= 1e-100;
    }
}

void Solver::bump_clause(int ci) {
    Clause& c = clauses_[ci];
    if (!c.learnt) return;
    c.act += cla_inc_;
    if (c.act > 1e20) {
        for (int li : learnts_) clauses_[li].act *= 1e-20;
        cla_inc_ *= 1e-20;
    }
}

void Solver::decay() {
    var_inc_ /= 0.95;
    cla_inc_ /= 0.999;
}

// Drops the less active half of the learnt clauses.  Runs at decision
// level 0, so only reasons of root-level assignments need protecting.
void Solver::reduce_learnts() {
    assert(decision_level() == 0);
    std::vector<char> is_reason(clauses_.size(), 0);
    for (Lit p : trail_)
        if (reason_[p.var()] >= 0) is_reason[reason_[p.var()]] = 1;
    std::vector<int> sorted = learnts_;
    std::sort(sorted.begin(), sorted.end(), [&](int a, int b) {
        return clauses_[a].act < clauses_[b].act;
    });
    std::size_t limit = sorted.size() / 2;
    for (std::size_t k = 0; k < limit; ++k) {
        Clause& c = clauses_[sorted[k]];
        if (c.lits.size() <= 2 || is_reason[sorted[k]]) continue;
        c.dead = true;
        c.lits.clear();
        c.lits.shrink_to_fit();
    }
    std::erase_if(learnts_, [&](int ci) { return clauses_[ci].dead; });
}

// First-UIP conflict analysis.
void Solver::analyze(int confl, std::vector<Lit>& learnt, int& bt_level) {
    learnt.clear();
    learnt.push_back(lit_undef);  // slot for the asserting literal
    int counter = 0;
    Lit p = lit_undef;
    int index = static_cast<int>(trail_.size()) - 1;
    do {
        assert(confl != reason_none);
        bool from_budget = confl == conflict_budget || confl == reason_budget;
        if (!from_budget) bump_clause(confl);
        const std::vector<Lit>& lits =
            from_budget ? budget_reason(p) : clauses_[confl].lits;
        for (std::size_t j = (p == lit_undef ? 0 : 1); j < lits.size(); ++j) {
            Lit q = lits[j];
            if (!seen_[q.var()] && level(q.var()) > 0) {
                seen_[q.var()] = 1;
                bump(q.var());
                if (level(q.var()) >= decision_level())
                    ++counter;
                else
                    learnt.push_back(q);
            }
        }
        while (!seen_[trail_[index].var()]) --index;
        p = trail_[index];
        confl = reason_[p.var()];
        seen_[p.var()] = 0;
        --counter;
        --index;
    } while (counter > 0);
    learnt[0] = ~p;

    if (learnt.size() == 1) {
        bt_level = 0;
    } else {
        std::size_t max_i = 1;
        for (std::size_t i = 2; i < learnt.size(); ++i)
            if (level(learnt[i].var()) > level(learnt[max_i].var())) max_i = i;
        std::swap(learnt[1], learnt[max_i]);
        bt_level = level(learnt[1].var());
    }
    for (std::size_t i = 1; i < learnt.size(); ++i) seen_[learnt[i].var()] = 0;
}

// Collects the assumptions responsible for forcing ~p; p is a failing
// assumption.
void Solver::analyze_final(Lit p) {
    core_.clear();
    core_.push_back(p);
    if (decision_level() == 0) return;
    seen_[p.var()] = 1;
    for (int i = static_cast<int>(trail_.size()) - 1; i >= trail_lim_[0]; --i) {
        Var x = trail_[i].var();
        if (!seen_[x]) continue;
        if (reason_[x] == reason_none) {
            assert(level(x) > 0);
            core_.push_back(trail_[i]);
        } else {
            const std::vector<Lit>& lits = reason_[x] == reason_budget
                                               ? budget_reason(trail_[i])
                                               : clauses_[reason_[x]].lits;
            for (std::size_t j = 1; j < lits.size(); ++j)
                if (level(lits[j].var()) > 0) seen_[lits[j].var()] = 1;
        }
        seen_[x] = 0;
    }
    seen_[p.var()] = 0;
    // de-duplicate (p may also appear as a decision)
    std::sort(core_.begin(), core_.end());
    core_.erase(std::unique(core_.begin(), core_.end()), core_.end());
}

Lit Solver::pick_branch() {
    Var best = -1;
    for (Var v = 0; v < num_vars(); ++v) {
        if (assign_[v] != Value::Undef) continue;
        if (best == -1 || activity_[v] > activity_[best]) best = v;
    }
    if (best == -1) return lit_undef;
    return Lit::make(best, phase_[best]);
}

Solver::Status Solver::search(std::span<const Lit> assumptions) {
    std::vector<Lit> learnt;
    std::uint64_t restart_limit = 100;
    std::uint64_t conflicts_here = 0;
    for (;;) {
        int confl = propagate();
        if (confl != reason_none) {
            ++conflicts_;
            ++conflicts_here;
            if (decision_level() == 0) {
                core_.clear();
                return Status::Unsat;
            }
            int bt;
            analyze(confl, learnt, bt);
            cancel_until(bt);
            if (learnt.size() == 1) {
                unchecked_enqueue(learnt[0], reason_none);
            } else {
                Clause c;
                c.lits = learnt;
                c.learnt = true;
                c.act = cla_inc_;
                clauses_.push_back(std::move(c));
                int ci = static_cast<int>(clauses_.size()) - 1;
                learnts_.push_back(ci);
                attach(ci);
                unchecked_enqueue(learnt[0], ci);
            }
            decay();
            if (conflicts_here >= restart_limit) {
                conflicts_here = 0;
                restart_limit += restart_limit / 2;
                cancel_until(0);
                if (learnts_.size() >= reduce_limit_) {
                    reduce_learnts();
                    reduce_limit_ += reduce_limit_ / 10;
                }
            }
            continue;
        }
        Lit next = lit_undef;
        while (decision_level() < static_cast<int>(assumptions.size())) {
            Lit a = assumptions[decision_level()];
            if (value(a) == Value::True) {
                new_decision_level();  // empty level keeps indices aligned
            } else if (value(a) == Value::False) {
                analyze_final(a);
                return Status::Unsat;
            } else {
                next = a;
                break;
            }
        }
        if (next == lit_undef) {
            next = pick_branch();
            if (next == lit_undef) {
                model_.assign(assign_.begin(), assign_.end());
                return Status::Sat;
            }
            ++decisions_;
        }
        new_decision_level();
        unchecked_enqueue(next, reason_none);
    }
}

Solver::Status Solver::solve(std::span<const Lit> assumptions) {
    core_.clear();
    if (!ok_) return Status::Unsat;
    cancel_until(0);
    std::vector<Lit> assumed;
    if (budget_guard_ >= 0) assumed.push_back(Lit::make(budget_guard_));
    assumed.insert(assumed.end(), assumptions.begin(), assumptions.end());
    Status st = search(assumed);
    if (st == Status::Unsat && budget_guard_ >= 0) {
        Lit g = Lit::make(budget_guard_);
        std::erase(core_, g);
    }
    cancel_until(0);
    return st;
}

Solver::Status Solver::solve_minimize(std::span<const Lit> assumptions,
                                      std::int64_t known_lower_bound) {
    core_.clear();
    if (!ok_) return Status::Unsat;
    cancel_until(0);
    std::vector<Lit> assumed;
    if (budget_guard_ >= 0) assumed.push_back(Lit::make(budget_guard_));
    assumed.insert(assumed.end(), assumptions.begin(), assumptions.end());
    bool have_model = false;
    std::vector<Value> best;
    for (;;) {
        if (search(assumed) == Status::Unsat) break;
        have_model = true;
        best = model_;
        std::int64_t cost = budget_sum_;  // total assignment: exact item sum
        cancel_until(0);
        if (cost <= known_lower_bound) break;
        budget_bound_ = cost - 1;
    }
    cancel_until(0);
    if (!have_model) {
        if (budget_guard_ >= 0) std::erase(core_, Lit::make(budget_guard_));
        return Status::Unsat;
    }
    model_ = std::move(best);
    return Status::Sat;
}

}  // namespace texp::sat
