#include "texp/hitting_set.hpp"

#include <cassert>
#include <cmath>
#include <sstream>

namespace texp {

namespace {

std::string lp_num(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

}  // namespace

CandidateOracle::CandidateOracle(const ExplanationProblem& problem,
                                 OracleEncoding encoding)
    : p_(&problem), encoding_(encoding) {
    choice_.resize(p_->num_features());
    choice_weight_.resize(p_->num_features());
    lower_.resize(p_->num_features());
    upper_.resize(p_->num_features());
    if (encoding_ == OracleEncoding::Naive)
        build_naive();
    else
        build_bounds();
}

sat::Var CandidateOracle::fresh_var() {
    // the engine also allocates internal budget-guard variables during
    // solves; pad the mirror so literal ids stay in range
    sat::Var v = engine_.new_var();
    while (mirror_.num_vars <= v) mirror_.new_var();
    return v;
}

void CandidateOracle::add_hard(std::vector<sat::Lit> lits) {
    mirror_.add_hard(lits);
    engine_.add_hard(std::move(lits));
}

sat::Lit CandidateOracle::choice_lit(int feature, int lo, int hi) const {
    int e = p_->inst_box[feature];
    int n = p_->table->num_intervals(feature);
    assert(lo >= 1 && lo <= e && hi >= e && hi <= n);
    return sat::Lit::make(choice_[feature][(lo - 1) * (n - e + 1) + (hi - e)]);
}

std::optional<sat::Lit> CandidateOracle::lower_bound_lit(int feature, int j) const {
    if (j < 1 || j > static_cast<int>(lower_[feature].size())) return std::nullopt;
    return sat::Lit::make(lower_[feature][j - 1]);
}

std::optional<sat::Lit> CandidateOracle::upper_bound_lit(int feature, int j) const {
    int e = p_->inst_box[feature];
    if (j < e || j - e >= static_cast<int>(upper_[feature].size())) return std::nullopt;
    return sat::Lit::make(upper_[feature][j - e]);
}

void CandidateOracle::add_soft_choice(int feature, int lo, int hi) {
    double w = interval_weight(*p_->table, *p_->measure, feature, lo, hi);
    choice_weight_[feature].push_back(w);
    if (w >= 0.0) return;  // full-domain choice carries no cost
    Cost cost = Cost::from_double(-w);
    if (!cost.is_positive()) return;
    std::vector<sat::Lit> cl{~choice_lit(feature, lo, hi)};
    mirror_.add_soft(cl, cost);
    engine_.add_soft(std::move(cl), cost);
}

void CandidateOracle::add_exactly_one(const std::vector<sat::Lit>& lits) {
    add_hard(lits);
    if (lits.size() <= 8) {
        for (std::size_t a = 0; a < lits.size(); ++a)
            for (std::size_t b = a + 1; b < lits.size(); ++b)
                add_hard({~lits[a], ~lits[b]});
        return;
    }
    // sequential ladder (Sinz)
    std::size_t n = lits.size();
    std::vector<sat::Lit> s;
    for (std::size_t j = 0; j + 1 < n; ++j) s.push_back(sat::Lit::make(fresh_var()));
    add_hard({~lits[0], s[0]});
    for (std::size_t j = 1; j + 1 < n; ++j) {
        add_hard({~s[j - 1], s[j]});
        add_hard({~lits[j], s[j]});
    }
    for (std::size_t j = 1; j < n; ++j) add_hard({~lits[j], ~s[j - 1]});
}

void CandidateOracle::build_naive() {
    for (int i = 0; i < p_->num_features(); ++i) {
        int e = p_->inst_box[i];
        int n = p_->table->num_intervals(i);
        std::vector<sat::Lit> group;
        for (int lo = 1; lo <= e; ++lo)
            for (int hi = e; hi <= n; ++hi) {
                sat::Var v = fresh_var();
                var_names_[v] = "y" + std::to_string(i + 1) + "_" + std::to_string(lo) +
                                "_" + std::to_string(hi);
                choice_[i].push_back(v);
                group.push_back(sat::Lit::make(v));
            }
        for (int lo = 1; lo <= e; ++lo)
            for (int hi = e; hi <= n; ++hi) add_soft_choice(i, lo, hi);
        add_exactly_one(group);
    }
}

void CandidateOracle::build_bounds() {
    for (int i = 0; i < p_->num_features(); ++i) {
        int e = p_->inst_box[i];
        int n = p_->table->num_intervals(i);
        int k = n - 1;  // split points
        for (int j = 1; j <= e - 1; ++j) {
            sat::Var v = fresh_var();
            var_names_[v] = "L" + std::to_string(i + 1) + "_" + std::to_string(j);
            lower_[i].push_back(v);
        }
        for (int j = e; j <= k; ++j) {
            sat::Var v = fresh_var();
            var_names_[v] = "U" + std::to_string(i + 1) + "_" + std::to_string(j);
            upper_[i].push_back(v);
        }
        for (int j = 1; j + 1 <= e - 1; ++j) {
            chains_.push_back({*lower_bound_lit(i, j + 1), *lower_bound_lit(i, j)});
            add_hard({~*lower_bound_lit(i, j + 1), *lower_bound_lit(i, j)});
        }
        for (int j = e; j + 1 <= k; ++j) {
            chains_.push_back({*upper_bound_lit(i, j), *upper_bound_lit(i, j + 1)});
            add_hard({~*upper_bound_lit(i, j), *upper_bound_lit(i, j + 1)});
        }
        for (int lo = 1; lo <= e; ++lo)
            for (int hi = e; hi <= n; ++hi) {
                sat::Var v = fresh_var();
                var_names_[v] = "y" + std::to_string(i + 1) + "_" + std::to_string(lo) +
                                "_" + std::to_string(hi);
                choice_[i].push_back(v);
            }
        for (int lo = 1; lo <= e; ++lo)
            for (int hi = e; hi <= n; ++hi) {
                add_soft_choice(i, lo, hi);
                sat::Lit y = choice_lit(i, lo, hi);
                std::vector<sat::Lit> terms;
                if (lo >= 2) terms.push_back(*lower_bound_lit(i, lo - 1));
                if (lo <= e - 1) terms.push_back(~*lower_bound_lit(i, lo));
                if (hi - 1 >= e) terms.push_back(~*upper_bound_lit(i, hi - 1));
                if (hi <= k) terms.push_back(*upper_bound_lit(i, hi));
                ydefs_.push_back(YDef{i, lo, hi, terms});
                if (terms.empty()) {
                    add_hard({y});
                    continue;
                }
                std::vector<sat::Lit> closing{y};
                for (sat::Lit t : terms) {
                    add_hard({~y, t});
                    closing.push_back(~t);
                }
                add_hard(std::move(closing));
            }
    }
}

sat::Lit CandidateOracle::not_covering(int feature, int a, int b) {
    auto key = std::make_tuple(feature, a, b);
    auto it = covering_aux_.find(key);
    if (it != covering_aux_.end()) return sat::Lit::make(it->second);
    int e = p_->inst_box[feature];
    int n = p_->table->num_intervals(feature);
    sat::Var aux = fresh_var();
    var_names_[aux] = "nc" + std::to_string(feature + 1) + "_" + std::to_string(a) +
                      "_" + std::to_string(b);
    covering_aux_[key] = aux;
    sat::Lit al = sat::Lit::make(aux);
    std::vector<sat::Lit> closing{al};
    for (int lo = 1; lo <= std::min(a, e); ++lo)
        for (int hi = std::max(b, e); hi <= n; ++hi) {
            sat::Lit y = choice_lit(feature, lo, hi);
            add_hard({~al, ~y});
            closing.push_back(y);
        }
    add_hard(std::move(closing));
    return al;
}

std::vector<sat::Lit> CandidateOracle::block(const Icxp& icxp) {
    if (icxp.features.empty())
        throw InternalError("block: empty feature set would wipe out every candidate");
    std::vector<sat::Lit> clause;
    for (int i : icxp.features) {
        const IdxRange& g = icxp.box[i];
        int e = p_->inst_box[i];
        if (g.contains(e))
            throw InternalError("block: box does not exclude the instance");
        if (encoding_ == OracleEncoding::Naive) {
            clause.push_back(not_covering(i, g.lo, g.hi));
        } else {
            // disjointness literal: everything below the box or above it
            clause.push_back(e < g.lo ? *upper_bound_lit(i, g.lo - 1)
                                      : *lower_bound_lit(i, g.hi));
        }
    }
    if (encoding_ == OracleEncoding::Bounds) block_rows_.push_back(clause);
    add_hard(clause);
    ++num_blocks_;
    return clause;
}

Region CandidateOracle::next_candidate() {
    // blocking only shrinks the feasible set, so the previous optimum is a
    // sound lower bound: reaching it again needs no optimality certificate
    MaxSatResult res = engine_.solve({}, prev_optimum_);
    if (res.status != MaxSatStatus::Optimal)
        throw InternalError("candidate oracle: hard clauses unsatisfiable");
    ++calls_;
    Cost optimum = res.model.cost;
    if (optimum < prev_optimum_)
        throw InternalError("candidate oracle: objective went backwards");
    prev_optimum_ = optimum;

    // Canonical optimal model: ascending feature, lowest lower index,
    // widest range first.  The incumbent model already witnesses its own
    // choice, so reaching it needs no solver call.
    std::vector<sat::Lit> fixed;
    MaxSatModel model = res.model;
    for (int i = 0; i < p_->num_features(); ++i) {
        int e = p_->inst_box[i];
        int n = p_->table->num_intervals(i);
        bool found = false;
        for (int lo = 1; lo <= e && !found; ++lo)
            for (int hi = n; hi >= e && !found; --hi) {
                sat::Lit y = choice_lit(i, lo, hi);
                if (model.lit(y)) {
                    fixed.push_back(y);
                    found = true;
                    break;
                }
                std::vector<sat::Lit> trial = fixed;
                trial.push_back(y);
                if (auto m = engine_.solve_under(optimum, trial)) {
                    fixed = std::move(trial);
                    model = std::move(*m);
                    found = true;
                }
            }
        if (!found) throw InternalError("candidate oracle: no feasible choice");
    }

    Region region;
    region.ranges.resize(p_->num_features());
    for (int i = 0; i < p_->num_features(); ++i) {
        int e = p_->inst_box[i];
        int n = p_->table->num_intervals(i);
        int count = 0;
        for (int lo = 1; lo <= e; ++lo)
            for (int hi = e; hi <= n; ++hi)
                if (model.lit(choice_lit(i, lo, hi))) {
                    region.ranges[i] = IdxRange{lo, hi};
                    ++count;
                }
        if (count != 1)
            throw InternalError("candidate oracle: choice group not exactly-one");
    }
    last_fsc_ = -optimum.to_double();
    return region;
}

bool CandidateOracle::choice_feasible(int feature, int lo, int hi) {
    return feasible({choice_lit(feature, lo, hi)});
}

bool CandidateOracle::feasible(std::vector<sat::Lit> assumptions) {
    return engine_.solver().solve(assumptions) == sat::Solver::Status::Sat;
}

std::string CandidateOracle::export_lp() const {
    if (encoding_ != OracleEncoding::Bounds)
        throw InternalError("export_lp: only the bounds encoding has an LP rewrite");
    std::ostringstream os;
    os << "\\ 0-1 rewrite of the bounds-based candidate oracle\n";
    os << "\\ y<f>_<l>_<u>: feature f covers intervals l..u (1-based)\n";
    os << "\\ L<f>_<j>: lower bound at or above split j; U<f>_<j>: upper bound below split j\n";
    auto name = [&](sat::Lit l) { return var_names_.at(l.var()); };
    os << "Maximize\n obj:";
    bool any = false;
    for (int i = 0; i < p_->num_features(); ++i) {
        int e = p_->inst_box[i];
        int n = p_->table->num_intervals(i);
        int idx = 0;
        for (int lo = 1; lo <= e; ++lo)
            for (int hi = e; hi <= n; ++hi, ++idx) {
                double w = choice_weight_[i][idx];
                if (w == 0.0) continue;
                os << (w < 0 ? " - " : " + ") << lp_num(std::abs(w)) << ' '
                   << name(choice_lit(i, lo, hi));
                any = true;
            }
    }
    if (!any) os << " 0 " << name(choice_lit(0, 1, p_->inst_box[0]));
    os << "\nSubject To\n";
    int row = 0;
    for (const auto& [a, b] : chains_)
        os << " chain" << ++row << ": " << name(a) << " - " << name(b) << " <= 0\n";
    for (const YDef& d : ydefs_) {
        std::string y = var_names_.at(choice_lit(d.feature, d.lo, d.hi).var());
        if (d.terms.empty()) {
            os << ' ' << y << "_fix: " << y << " = 1\n";
            continue;
        }
        int negated = 0, t = 0;
        for (sat::Lit term : d.terms) {
            if (term.sign()) {
                os << ' ' << y << "_d" << ++t << ": " << y << " + " << name(term)
                   << " <= 1\n";
                ++negated;
            } else {
                os << ' ' << y << "_d" << ++t << ": " << y << " - " << name(term)
                   << " <= 0\n";
            }
        }
        os << ' ' << y << "_z: " << y;
        for (sat::Lit term : d.terms)
            os << (term.sign() ? " + " : " - ") << name(term);
        os << " >= " << negated - static_cast<int>(d.terms.size()) + 1 << "\n";
    }
    row = 0;
    for (const auto& cl : block_rows_) {
        os << " block" << ++row << ":";
        int shift = 0;
        for (std::size_t j = 0; j < cl.size(); ++j) {
            if (cl[j].sign()) {
                os << (j ? " - " : " -") << name(cl[j]);
                ++shift;
            } else {
                os << (j ? " + " : " ") << name(cl[j]);
            }
        }
        os << " >= " << 1 - shift << "\n";
    }
    os << "Binaries\n";
    for (const auto& [v, nm] : var_names_) os << ' ' << nm << "\n";
    os << "End\n";
    return os.str();
}

}  // namespace texp
