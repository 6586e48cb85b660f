#include "texp/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "texp/cost.hpp"

namespace texp {

using nlohmann::json;

bool FeatureSpace::contains(std::span<const double> point) const {
    if (static_cast<int>(point.size()) != size()) return false;
    for (int i = 0; i < size(); ++i)
        if (!(point[i] >= domains[i].lo && point[i] <= domains[i].hi)) return false;
    return true;
}

int TreeEnsemble::class_index(const std::string& name) const {
    for (int i = 0; i < num_classes(); ++i)
        if (classes[i] == name) return i;
    return -1;
}

const char* kind_name(EnsembleKind k) {
    switch (k) {
        case EnsembleKind::RfMajority: return "rf_majority";
        case EnsembleKind::RfWeighted: return "rf_weighted";
        case EnsembleKind::Boosted: return "boosted";
    }
    return "?";
}

namespace {

constexpr double kMaxLeafWeight = 1e6;

EnsembleKind parse_kind(const std::string& s) {
    if (s == "rf_majority") return EnsembleKind::RfMajority;
    if (s == "rf_weighted") return EnsembleKind::RfWeighted;
    if (s == "boosted") return EnsembleKind::Boosted;
    throw ModelError("model: unknown kind '" + s + "'");
}

double get_number(const json& j, const char* field) {
    if (!j.contains(field) || !j[field].is_number())
        throw ModelError(std::string("model: missing numeric field '") + field + "'");
    return j[field].get<double>();
}

int resolve_feature(const json& v, const FeatureSpace& fs) {
    if (v.is_number_integer()) {
        int i = v.get<int>();
        if (i < 0 || i >= fs.size()) throw ModelError("model: feature index out of range");
        return i;
    }
    if (v.is_string()) {
        const std::string name = v.get<std::string>();
        for (int i = 0; i < fs.size(); ++i)
            if (fs.names[i] == name) return i;
        throw ModelError("model: unknown feature '" + name + "'");
    }
    throw ModelError("model: feature must be an index or a name");
}

int resolve_class(const json& v, const std::vector<std::string>& classes) {
    if (v.is_number_integer()) {
        int i = v.get<int>();
        if (i < 0 || i >= static_cast<int>(classes.size()))
            throw ModelError("model: class index out of range");
        return i;
    }
    if (v.is_string()) {
        const std::string name = v.get<std::string>();
        for (std::size_t i = 0; i < classes.size(); ++i)
            if (classes[i] == name) return static_cast<int>(i);
        throw ModelError("model: unknown class '" + name + "'");
    }
    throw ModelError("model: leaf_class must be an index or a name");
}

DecisionTree parse_tree(const json& jt, const TreeEnsemble& te) {
    if (!jt.is_array() || jt.empty()) throw ModelError("model: tree must be a non-empty array");
    DecisionTree tree;
    std::unordered_map<int, int> id_to_index;
    std::vector<int> ids;
    for (const json& jn : jt) {
        if (!jn.is_object() || !jn.contains("id") || !jn["id"].is_number_integer())
            throw ModelError("model: node without integer id");
        int id = jn["id"].get<int>();
        if (id_to_index.count(id)) throw ModelError("model: duplicate node id");
        id_to_index[id] = static_cast<int>(tree.nodes.size());
        ids.push_back(id);
        TreeNode n;
        if (jn.contains("leaf_class")) {
            n.leaf = true;
            n.cls = resolve_class(jn["leaf_class"], te.classes);
            n.weight = jn.contains("weight") ? get_number(jn, "weight") : 1.0;
            if (!std::isfinite(n.weight) || std::abs(n.weight) > kMaxLeafWeight)
                throw ModelError("model: leaf weight out of range");
            if (te.kind == EnsembleKind::RfMajority && n.weight != 1.0)
                throw ModelError("model: rf_majority leaves must have weight 1");
            n.weight_raw = Cost::from_double(n.weight).raw();
        } else {
            n.feature = resolve_feature(jn.contains("feature") ? jn["feature"] : json(),
                                        te.feature_space);
            n.threshold = get_number(jn, "threshold");
            if (!jn.contains("left") || !jn["left"].is_number_integer() ||
                !jn.contains("right") || !jn["right"].is_number_integer())
                throw ModelError("model: internal node needs integer left and right");
            n.left = jn["left"].get<int>();
            n.right = jn["right"].get<int>();
        }
        tree.nodes.push_back(n);
    }
    // resolve child ids, count parents
    std::vector<int> parents(tree.nodes.size(), 0);
    for (TreeNode& n : tree.nodes) {
        if (n.leaf) continue;
        auto li = id_to_index.find(n.left);
        auto ri = id_to_index.find(n.right);
        if (li == id_to_index.end() || ri == id_to_index.end())
            throw ModelError("model: child id not found");
        n.left = li->second;
        n.right = ri->second;
        ++parents[n.left];
        ++parents[n.right];
    }
    int root = -1;
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
        if (parents[i] == 0) {
            if (root != -1) throw ModelError("model: tree has two roots");
            root = static_cast<int>(i);
        } else if (parents[i] != 1) {
            throw ModelError("model: node " + std::to_string(ids[i]) +
                             " has two parents");
        }
    }
    if (root == -1) throw ModelError("model: tree has a cycle");
    tree.root = root;
    // reachability: with unique parents and one root, reachable == all
    std::vector<int> stack{root};
    std::size_t visited = 0;
    while (!stack.empty()) {
        int x = stack.back();
        stack.pop_back();
        ++visited;
        const TreeNode& n = tree.nodes[x];
        if (!n.leaf) {
            stack.push_back(n.left);
            stack.push_back(n.right);
        }
    }
    if (visited != tree.nodes.size()) throw ModelError("model: unreachable nodes");
    return tree;
}

void derive_domains(FeatureSpace& fs, const Dataset* data) {
    bool all_declared = true;
    for (const FeatureDomain& d : fs.domains)
        if (std::isnan(d.lo)) all_declared = false;
    if (all_declared) return;
    if (!data)
        throw ModelError("model: feature domains not declared and no dataset given");
    fs.domain_source = DomainSource::TrainingMinMax;
    for (int i = 0; i < fs.size(); ++i) {
        if (!std::isnan(fs.domains[i].lo)) continue;
        int col = data->column_index(fs.names[i]);
        if (col < 0)
            throw ModelError("model: dataset has no column '" + fs.names[i] + "'");
        double lo = data->rows[0][col], hi = lo;
        for (const auto& row : data->rows) {
            lo = std::min(lo, row[col]);
            hi = std::max(hi, row[col]);
        }
        fs.domains[i] = FeatureDomain{lo, hi};
    }
}

}  // namespace

namespace {

TreeEnsemble parse_model_checked(const std::string& text, const Dataset* domains_from) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ModelError(std::string("model: bad document: ") + e.what());
    }
    if (!doc.is_object()) throw ModelError("model: document must be an object");

    TreeEnsemble te;
    if (!doc.contains("kind") || !doc["kind"].is_string())
        throw ModelError("model: missing kind");
    te.kind = parse_kind(doc["kind"].get<std::string>());

    if (!doc.contains("classes") || !doc["classes"].is_array())
        throw ModelError("model: missing classes");
    for (const json& c : doc["classes"]) {
        if (!c.is_string()) throw ModelError("model: class names must be strings");
        te.classes.push_back(c.get<std::string>());
    }
    if (te.num_classes() < 2) throw ModelError("model: need at least 2 classes");
    if (std::set<std::string>(te.classes.begin(), te.classes.end()).size() !=
        te.classes.size())
        throw ModelError("model: duplicate class names");

    if (!doc.contains("features") || !doc["features"].is_array() ||
        doc["features"].empty())
        throw ModelError("model: missing features");
    for (const json& f : doc["features"]) {
        if (!f.is_object() || !f.contains("name") || !f["name"].is_string())
            throw ModelError("model: feature needs a name");
        te.feature_space.names.push_back(f["name"].get<std::string>());
        if (f.contains("lo") || f.contains("hi")) {
            double lo = get_number(f, "lo");
            double hi = get_number(f, "hi");
            if (!(lo < hi)) throw ModelError("model: degenerate domain for feature '" +
                                             te.feature_space.names.back() + "'");
            te.feature_space.domains.push_back(FeatureDomain{lo, hi});
        } else {
            te.feature_space.domains.push_back(
                FeatureDomain{std::nan(""), std::nan("")});
        }
    }
    {
        auto names = te.feature_space.names;
        std::sort(names.begin(), names.end());
        if (std::adjacent_find(names.begin(), names.end()) != names.end())
            throw ModelError("model: duplicate feature names");
    }
    derive_domains(te.feature_space, domains_from);

    if (!doc.contains("trees") || !doc["trees"].is_array() || doc["trees"].empty())
        throw ModelError("model: missing trees");
    for (const json& jt : doc["trees"]) te.trees.push_back(parse_tree(jt, te));

    int num_internal = 0;
    for (const DecisionTree& t : te.trees) {
        int leaf_class = -1;
        for (const TreeNode& n : t.nodes) {
            if (n.leaf) {
                if (te.kind == EnsembleKind::Boosted) {
                    if (leaf_class == -1)
                        leaf_class = n.cls;
                    else if (leaf_class != n.cls)
                        throw ModelError("model: boosted tree with mixed leaf classes");
                }
                continue;
            }
            ++num_internal;
            const FeatureDomain& d = te.feature_space.domains[n.feature];
            if (!(n.threshold > d.lo && n.threshold < d.hi))
                throw ModelError("model: threshold " + std::to_string(n.threshold) +
                                 " outside the open domain of feature '" +
                                 te.feature_space.names[n.feature] + "'");
        }
    }
    if (num_internal == 0)
        throw ModelError("model: no split conditions (constant classifier)");
    return te;
}

}  // namespace

TreeEnsemble parse_model(const std::string& text, const Dataset* domains_from) {
    try {
        return parse_model_checked(text, domains_from);
    } catch (const json::exception& e) {
        // any unchecked shape mismatch surfaces as a model error
        throw ModelError(std::string("model: bad document: ") + e.what());
    }
}

TreeEnsemble load_model(const std::string& path, const Dataset* domains_from) {
    std::ifstream in(path);
    if (!in) throw ModelError("model: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model(buf.str(), domains_from);
}

int consistent_path(const DecisionTree& tree, std::span<const double> point) {
    int x = tree.root;
    while (!tree.nodes[x].leaf) {
        const TreeNode& n = tree.nodes[x];
        x = point[n.feature] < n.threshold ? n.left : n.right;
    }
    return x;
}

std::vector<std::int64_t> class_weights_raw(const TreeEnsemble& te,
                                            std::span<const double> point) {
    std::vector<std::int64_t> w(te.num_classes(), 0);
    for (const DecisionTree& t : te.trees) {
        const TreeNode& leaf = t.nodes[consistent_path(t, point)];
        w[leaf.cls] += leaf.weight_raw;
    }
    return w;
}

std::vector<double> class_weights(const TreeEnsemble& te, std::span<const double> point) {
    std::vector<std::int64_t> raw = class_weights_raw(te, point);
    std::vector<double> w(raw.size());
    for (std::size_t c = 0; c < raw.size(); ++c) w[c] = Cost::from_raw(raw[c]).to_double();
    return w;
}

int predict(const TreeEnsemble& te, std::span<const double> point) {
    std::vector<std::int64_t> w = class_weights_raw(te, point);
    int best = 0;
    for (int c = 1; c < static_cast<int>(w.size()); ++c)
        if (w[c] > w[best]) best = c;
    return best;
}

TreeEnsemble rf_majority_to_weighted(const TreeEnsemble& te) {
    if (te.kind != EnsembleKind::RfMajority)
        throw ModelError("rf_majority_to_weighted: ensemble is not rf_majority");
    TreeEnsemble out = te;
    out.kind = EnsembleKind::RfWeighted;
    for (DecisionTree& t : out.trees)
        for (TreeNode& n : t.nodes)
            if (n.leaf) {
                n.weight = 1.0;
                n.weight_raw = Cost::from_double(1.0).raw();
            }
    return out;
}

Instance make_instance(const TreeEnsemble& te, std::vector<double> values) {
    if (static_cast<int>(values.size()) != te.num_features())
        throw DataError("instance: expected " + std::to_string(te.num_features()) +
                        " values, got " + std::to_string(values.size()));
    if (!te.feature_space.contains(values))
        throw DataError("instance: point outside the feature space");
    Instance inst;
    inst.predicted_class = predict(te, values);
    inst.values = std::move(values);
    return inst;
}

}  // namespace texp
