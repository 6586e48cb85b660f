#include "texp/te_encoding.hpp"

#include <algorithm>
#include <cassert>

namespace texp {

namespace {

int split_index(const std::vector<double>& splits, double threshold) {
    auto it = std::lower_bound(splits.begin(), splits.end(), threshold);
    assert(it != splits.end() && *it == threshold);
    return static_cast<int>(it - splits.begin()) + 1;  // 1-based
}

}  // namespace

TeEncoding::TeEncoding(const TreeEnsemble& te, const IntervalTable& table,
                       int target_class)
    : te_(&te), table_(&table), target_(target_class) {
    assert(target_ >= 0 && target_ < te.num_classes());

    // Identical variable layout in every solver: split vars per feature in
    // split order, then one var per root-to-leaf path in tree/DFS order.
    build_structure(probe_, true);
    for (int c = 0; c < te.num_classes(); ++c) {
        if (c == target_) continue;
        Opponent opp;
        opp.cls = c;
        opp.solver = std::make_unique<sat::Solver>();
        build_structure(*opp.solver, false);
        for (const PathInfo& p : paths_) {
            sat::Lit pl = sat::Lit::make(p.var);
            if (p.cls == c) {
                if (p.weight_raw > 0) {
                    opp.items.push_back({~pl, p.weight_raw});
                    opp.offset += Cost::from_raw(p.weight_raw);
                } else if (p.weight_raw < 0) {
                    opp.items.push_back({pl, -p.weight_raw});
                }
            } else if (p.cls == target_) {
                if (p.weight_raw > 0) {
                    opp.items.push_back({pl, p.weight_raw});
                } else if (p.weight_raw < 0) {
                    opp.items.push_back({~pl, -p.weight_raw});
                    opp.offset += Cost::from_raw(-p.weight_raw);
                }
            }
        }
        // S_{c,c'} = offset - cost.  Lower-index opponents already win the
        // argmax on a tie, so they only need S >= 0; higher ones need S > 0.
        std::int64_t bound = opp.offset.raw() - (c > target_ ? 1 : 0);
        opp.solver->set_budget(opp.items, bound);
        opps_.push_back(std::move(opp));
    }
}

void TeEncoding::build_structure(sat::Solver& solver, bool mirror) {
    const TreeEnsemble& te = *te_;
    const IntervalTable& table = *table_;

    if (mirror) split_vars_.assign(te.num_features(), {});
    auto add = [&](std::vector<sat::Lit> cl) {
        if (mirror) hard_.add_hard(cl);
        solver.add_clause(std::move(cl));
    };

    for (int i = 0; i < te.num_features(); ++i) {
        int k = static_cast<int>(table.splits[i].size());
        for (int j = 0; j < k; ++j) {
            sat::Var v = solver.new_var();
            if (mirror) {
                split_vars_[i].push_back(v);
                hard_.new_var();
            }
        }
        // ordering: [x_i < s_j] -> [x_i < s_{j+1}]
        for (int j = 1; j < k; ++j)
            add({~split_lit(i, j), split_lit(i, j + 1)});
    }

    std::size_t path_idx = 0;
    for (int t = 0; t < static_cast<int>(te.trees.size()); ++t) {
        const DecisionTree& tree = te.trees[t];
        // DFS, left first; collects the split conditions along the path
        struct Frame {
            int node;
            std::vector<sat::Lit> conds;
        };
        std::vector<Frame> stack{{tree.root, {}}};
        while (!stack.empty()) {
            Frame f = std::move(stack.back());
            stack.pop_back();
            const TreeNode& n = tree.nodes[f.node];
            if (!n.leaf) {
                sat::Lit cond = split_lit(
                    n.feature, split_index(table.splits[n.feature], n.threshold));
                auto right = f.conds;
                right.push_back(~cond);
                auto left = std::move(f.conds);
                left.push_back(cond);
                stack.push_back({n.right, std::move(right)});
                stack.push_back({n.left, std::move(left)});
                continue;
            }
            sat::Var pv = solver.new_var();
            if (mirror) {
                hard_.new_var();
                paths_.push_back(PathInfo{t, f.node, n.cls, n.weight_raw, pv});
            } else {
                assert(path_idx < paths_.size() && paths_[path_idx].var == pv);
            }
            ++path_idx;
            sat::Lit pl = sat::Lit::make(pv);
            // dedup conditions; opposite polarities make the path infeasible
            std::sort(f.conds.begin(), f.conds.end());
            f.conds.erase(std::unique(f.conds.begin(), f.conds.end()), f.conds.end());
            bool infeasible = false;
            for (std::size_t j = 1; j < f.conds.size(); ++j)
                if (f.conds[j].var() == f.conds[j - 1].var()) infeasible = true;
            if (infeasible) {
                add({~pl});
                continue;
            }
            std::vector<sat::Lit> closing{pl};
            for (sat::Lit c : f.conds) {
                add({~pl, c});
                closing.push_back(~c);
            }
            add(std::move(closing));
        }
    }
}

int TeEncoding::num_split_vars() const {
    int n = 0;
    for (const auto& v : split_vars_) n += static_cast<int>(v.size());
    return n;
}

sat::Lit TeEncoding::split_lit(int feature, int j) const {
    return sat::Lit::make(split_vars_[feature][j - 1]);
}

std::vector<sat::Lit> TeEncoding::candidate_assumptions(const Region& cand) const {
    std::vector<sat::Lit> out;
    for (int i = 0; i < table_->num_features(); ++i) {
        int k = static_cast<int>(table_->splits[i].size());
        const IdxRange& r = cand.ranges[i];
        // d <= inf(E_i): cannot hold inside the region
        for (int j = 1; j <= r.lo - 1; ++j) out.push_back(~split_lit(i, j));
        // d >= sup(E_i): holds everywhere inside the region
        for (int j = r.hi; j <= k; ++j) out.push_back(split_lit(i, j));
    }
    return out;
}

std::vector<IdxRange> TeEncoding::extract_box(const sat::Solver& solver) const {
    std::vector<IdxRange> box;
    for (int i = 0; i < table_->num_features(); ++i) {
        int k = static_cast<int>(table_->splits[i].size());
        int a = 1, b = k + 1;
        for (int j = 1; j <= k; ++j) {
            if (solver.model_lit(split_lit(i, j))) {
                b = std::min(b, j);
            } else {
                a = std::max(a, j + 1);
            }
        }
        if (a > b) throw InternalError("te_encoding: assignment violates ordering");
        box.push_back(IdxRange{a, b});
    }
    return box;
}

std::optional<Counterexample> TeEncoding::find_counterexample(const Region& cand) {
    std::vector<sat::Lit> assumptions = candidate_assumptions(cand);
    for (Opponent& opp : opps_) {
        ++oracle_calls_;
        if (opp.solver->solve(assumptions) == sat::Solver::Status::Sat) {
            Counterexample cex;
            cex.box = extract_box(*opp.solver);
            cex.witness_class = opp.cls;
            for (int i = 0; i < table_->num_features(); ++i)
                if (cex.box[i].lo < cand.ranges[i].lo ||
                    cex.box[i].hi > cand.ranges[i].hi)
                    throw InternalError("te_encoding: counterexample escapes candidate");
            return cex;
        }
    }
    return std::nullopt;
}

const TeEncoding::Opponent& TeEncoding::opponent(int cls) const {
    for (const Opponent& o : opps_)
        if (o.cls == cls) return o;
    throw InternalError("te_encoding: no such opponent class");
}

Cost TeEncoding::opponent_offset(int opponent_class) const {
    return opponent(opponent_class).offset;
}

Wcnf TeEncoding::objective_formula(int opponent_class) const {
    Wcnf f = hard_;
    for (const sat::BudgetItem& it : opponent(opponent_class).items)
        f.add_soft({~it.lit}, Cost::from_raw(it.weight));
    return f;
}

}  // namespace texp
