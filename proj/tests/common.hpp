#pragma once

#include <algorithm>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "texp/brute.hpp"
#include "texp/explain.hpp"
#include "texp/hitting_set.hpp"
#include "texp/intervals.hpp"
#include "texp/max_iaxp.hpp"
#include "texp/model.hpp"
#include "texp/te_encoding.hpp"
#include "texp/wcnf.hpp"

namespace texptest {

using namespace texp;

inline std::string fixture_path(const std::string& name) {
    return std::string(TEXP_FIXTURE_DIR) + "/" + name;
}

inline TreeEnsemble load_fixture(const std::string& name) {
    return load_model(fixture_path(name));
}

using Rng = std::mt19937_64;

inline int rand_int(Rng& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline double rand_real(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Everything a query needs, owning its parts.
struct ProblemSetup {
    TreeEnsemble te;
    IntervalTable table;
    SizeMeasure measure;
    ExplanationProblem problem;

    ProblemSetup(TreeEnsemble ensemble, std::vector<double> point)
        : te(std::move(ensemble)),
          table(build_interval_table(te)),
          measure(SizeMeasure::proportion(table)) {
        problem = make_problem(te, table, measure, make_instance(te, std::move(point)));
    }
};

// Tiny ensembles: <= 4 features, <= 3 trees, depth <= 3, <= 4 split points
// per feature, <= 3 classes, cycling through RFmv / RFwv / BT kinds.
// Guaranteed non-constant on the interval grid.
inline TreeEnsemble random_ensemble(Rng& rng) {
    for (;;) {
        TreeEnsemble te;
        int m = rand_int(rng, 1, 4);
        int num_classes = rand_int(rng, 2, 3);
        switch (rand_int(rng, 0, 2)) {
            case 0: te.kind = EnsembleKind::RfMajority; break;
            case 1: te.kind = EnsembleKind::RfWeighted; break;
            default: te.kind = EnsembleKind::Boosted; break;
        }
        for (int c = 0; c < num_classes; ++c)
            te.classes.push_back("c" + std::to_string(c + 1));
        std::vector<std::vector<double>> pools(m);
        for (int i = 0; i < m; ++i) {
            te.feature_space.names.push_back("x" + std::to_string(i + 1));
            te.feature_space.domains.push_back(FeatureDomain{0.0, 10.0});
            std::vector<double> grid;
            for (int g = 1; g <= 19; ++g) grid.push_back(0.5 * g);
            std::shuffle(grid.begin(), grid.end(), rng);
            grid.resize(rand_int(rng, 1, 4));
            std::sort(grid.begin(), grid.end());
            pools[i] = grid;
        }
        int n_trees = rand_int(rng, 1, 3);
        bool any_internal = false;
        for (int t = 0; t < n_trees; ++t) {
            DecisionTree tree;
            int tag = t % num_classes;  // BT: one class per tree
            std::function<int(int)> grow = [&](int depth) {
                int at = static_cast<int>(tree.nodes.size());
                tree.nodes.emplace_back();
                if (depth >= 3 || rand_int(rng, 0, 99) < 35) {
                    TreeNode& leaf = tree.nodes[at];
                    leaf.leaf = true;
                    leaf.cls = te.kind == EnsembleKind::Boosted
                                   ? tag
                                   : rand_int(rng, 0, num_classes - 1);
                    switch (te.kind) {
                        case EnsembleKind::RfMajority: leaf.weight = 1.0; break;
                        case EnsembleKind::RfWeighted:
                            leaf.weight = rand_int(rng, 1, 8) / 4.0;
                            break;
                        case EnsembleKind::Boosted:
                            leaf.weight = rand_int(rng, -100, 100) / 100.0;
                            break;
                    }
                    leaf.weight_raw = Cost::from_double(leaf.weight).raw();
                    return at;
                }
                any_internal = true;
                int feature = rand_int(rng, 0, m - 1);
                double threshold =
                    pools[feature][rand_int(rng, 0, static_cast<int>(pools[feature].size()) - 1)];
                int left = grow(depth + 1);
                int right = grow(depth + 1);
                TreeNode& n = tree.nodes[at];
                n.feature = feature;
                n.threshold = threshold;
                n.left = left;
                n.right = right;
                return at;
            };
            grow(0);
            te.trees.push_back(std::move(tree));
        }
        if (!any_internal) continue;
        IntervalTable table = build_interval_table(te);
        std::vector<int> labels = classify_grid(te, table);
        bool constant = true;
        for (int l : labels)
            if (l != labels[0]) constant = false;
        if (constant) continue;
        return te;
    }
}

inline std::vector<double> random_point(Rng& rng, const TreeEnsemble& te) {
    std::vector<double> v;
    for (const FeatureDomain& d : te.feature_space.domains)
        v.push_back(rand_real(rng, d.lo, d.hi));
    return v;
}

inline Region random_region(Rng& rng, const ExplanationProblem& p) {
    Region r;
    for (int i = 0; i < p.num_features(); ++i) {
        int e = p.inst_box[i];
        int n = p.table->num_intervals(i);
        r.ranges.push_back(IdxRange{rand_int(rng, 1, e), rand_int(rng, e, n)});
    }
    return r;
}

// <= 12 vars, <= 20 soft clauses, occasionally hard-unsatisfiable.
inline Wcnf random_wcnf(Rng& rng) {
    Wcnf f;
    int nv = rand_int(rng, 2, 12);
    for (int i = 0; i < nv; ++i) f.new_var();
    auto rand_lit = [&] {
        return sat::Lit::make(rand_int(rng, 0, nv - 1), rand_int(rng, 0, 1) == 0);
    };
    int nh = rand_int(rng, 0, nv);
    for (int i = 0; i < nh; ++i) {
        std::vector<sat::Lit> cl;
        int k = rand_int(rng, 1, 3);
        for (int j = 0; j < k; ++j) cl.push_back(rand_lit());
        f.add_hard(std::move(cl));
    }
    int ns = rand_int(rng, 1, 20);
    for (int i = 0; i < ns; ++i) {
        std::vector<sat::Lit> cl;
        int k = rand_int(rng, 1, 2);
        for (int j = 0; j < k; ++j) cl.push_back(rand_lit());
        f.add_soft(std::move(cl), Cost::from_double(rand_int(rng, 1, 1000) / 100.0));
    }
    return f;
}

}  // namespace texptest
