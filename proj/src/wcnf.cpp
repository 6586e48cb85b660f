#include "texp/wcnf.hpp"

#include <cassert>
#include <sstream>
#include <stdexcept>

namespace texp {

void Wcnf::add_soft(std::vector<sat::Lit> lits, Cost cost) {
    if (!cost.is_positive())
        throw std::invalid_argument("soft clause cost must be positive");
    soft.push_back(SoftClause{std::move(lits), cost});
}

void MaxSatEngine::add_hard(std::vector<sat::Lit> lits) {
    solver_.add_clause(std::move(lits));
}

void MaxSatEngine::add_soft(std::vector<sat::Lit> lits, Cost cost) {
    if (!cost.is_positive())
        throw std::invalid_argument("soft clause cost must be positive");
    sat::Lit pay;
    if (lits.size() == 1) {
        pay = ~lits[0];  // falsified exactly when the negation holds
    } else {
        sat::Var r = solver_.new_var();
        pay = sat::Lit::make(r);
        std::vector<sat::Lit> relaxed = lits;
        relaxed.push_back(pay);
        solver_.add_clause(std::move(relaxed));
    }
    softs_.push_back(SoftClause{std::move(lits), cost});
    items_.push_back(sat::BudgetItem{pay, cost.raw()});
}

Cost MaxSatEngine::model_cost() const {
    Cost total;
    for (const SoftClause& s : softs_) {
        bool satisfied = false;
        for (sat::Lit l : s.lits)
            if (solver_.model_lit(l)) {
                satisfied = true;
                break;
            }
        if (!satisfied) total += s.cost;
    }
    return total;
}

MaxSatModel MaxSatEngine::snapshot_model() {
    MaxSatModel m;
    m.values.resize(solver_.num_vars());
    for (sat::Var v = 0; v < solver_.num_vars(); ++v)
        m.values[v] = solver_.model_value(v) == sat::Value::True;
    m.cost = model_cost();
    return m;
}

MaxSatResult MaxSatEngine::solve(std::span<const sat::Lit> assumptions,
                                 Cost known_lower_bound) {
    std::int64_t total = 0;
    for (const sat::BudgetItem& it : items_) total += it.weight;
    solver_.set_budget(items_, total);
    ++sat_calls_;
    if (solver_.solve_minimize(assumptions, known_lower_bound.raw()) ==
        sat::Solver::Status::Unsat) {
        solver_.clear_budget();
        return MaxSatResult{MaxSatStatus::HardUnsat, {}};
    }
    MaxSatModel best = snapshot_model();
    solver_.clear_budget();
    return MaxSatResult{MaxSatStatus::Optimal, std::move(best)};
}

std::optional<MaxSatModel> MaxSatEngine::solve_under(Cost bound,
                                                     std::span<const sat::Lit> assumptions) {
    solver_.set_budget(items_, bound.raw());
    ++sat_calls_;
    sat::Solver::Status st = solver_.solve(assumptions);
    if (st == sat::Solver::Status::Unsat) {
        solver_.clear_budget();
        return std::nullopt;
    }
    MaxSatModel m = snapshot_model();
    solver_.clear_budget();
    return m;
}

MaxSatResult solve_maxsat(const Wcnf& formula) {
    MaxSatEngine engine;
    for (int i = 0; i < formula.num_vars; ++i) engine.new_var();
    for (const auto& c : formula.hard) engine.add_hard(c);
    for (const auto& s : formula.soft) engine.add_soft(s.lits, s.cost);
    MaxSatResult res = engine.solve();
    if (res.status == MaxSatStatus::Optimal)
        res.model.values.resize(formula.num_vars);  // drop relaxation vars
    return res;
}

namespace {

std::int64_t scaled_weight(Cost cost, std::int64_t scale) {
    __int128 num = static_cast<__int128>(cost.raw()) * scale;
    __int128 den = Cost::denominator;
    __int128 w = (num + den / 2) / den;
    if (w > INT64_MAX || w < 0)
        throw std::overflow_error("soft weight overflow after scaling");
    return static_cast<std::int64_t>(w);
}

void put_clause(std::ostringstream& out, const std::vector<sat::Lit>& lits) {
    for (sat::Lit l : lits) out << (l.sign() ? -(l.var() + 1) : (l.var() + 1)) << ' ';
    out << "0\n";
}

}  // namespace

std::string export_wcnf(const Wcnf& formula, std::int64_t scale) {
    if (scale < 1) throw std::invalid_argument("scale must be >= 1");
    std::ostringstream out;
    out << "c weighted partial CNF\n";
    out << "c vars numbered 1.." << formula.num_vars
        << " in solver allocation order\n";
    out << "c soft weights = round(cost * " << scale << ")\n";
    for (const auto& c : formula.hard) {
        out << "h ";
        put_clause(out, c);
    }
    for (const auto& s : formula.soft) {
        out << scaled_weight(s.cost, scale) << ' ';
        put_clause(out, s.lits);
    }
    return out.str();
}

}  // namespace texp
