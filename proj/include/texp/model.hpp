#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "texp/dataset.hpp"

namespace texp {

struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when the implementation breaks one of its own invariants; the
// CLI maps it to a dedicated exit code.
struct InternalError : std::logic_error {
    using std::logic_error::logic_error;
};

enum class EnsembleKind { RfMajority, RfWeighted, Boosted };
enum class DomainSource { Declared, TrainingMinMax };

struct FeatureDomain {
    double lo = 0.0, hi = 0.0;
    double width() const { return hi - lo; }
};

struct FeatureSpace {
    std::vector<std::string> names;
    std::vector<FeatureDomain> domains;
    DomainSource domain_source = DomainSource::Declared;

    int size() const { return static_cast<int>(names.size()); }
    bool contains(std::span<const double> point) const;
};

struct TreeNode {
    bool leaf = false;
    // internal
    int feature = -1;
    double threshold = 0.0;
    int left = -1, right = -1;  // left = branch where x_i < threshold holds
    // leaf
    int cls = -1;
    double weight = 1.0;
    std::int64_t weight_raw = 0;  // weight scaled by Cost::denominator
};

struct DecisionTree {
    std::vector<TreeNode> nodes;
    int root = 0;
};

// Unified tree-ensemble model: every path carries a class and a weight,
// prediction is argmax of summed path weights.
struct TreeEnsemble {
    FeatureSpace feature_space;
    std::vector<std::string> classes;
    std::vector<DecisionTree> trees;
    EnsembleKind kind = EnsembleKind::RfWeighted;

    int num_features() const { return feature_space.size(); }
    int num_classes() const { return static_cast<int>(classes.size()); }
    int class_index(const std::string& name) const;  // -1 when absent
};

struct Instance {
    std::vector<double> values;
    int predicted_class = -1;
};

const char* kind_name(EnsembleKind k);

TreeEnsemble parse_model(const std::string& text, const Dataset* domains_from = nullptr);
TreeEnsemble load_model(const std::string& path, const Dataset* domains_from = nullptr);

// Index of the unique leaf whose root-to-leaf path is consistent with the
// point; branch x_i < d taken iff point[i] < d (strict).
int consistent_path(const DecisionTree& tree, std::span<const double> point);

// W(c, v): per-class sums of the weights of the consistent paths.
std::vector<std::int64_t> class_weights_raw(const TreeEnsemble& te,
                                            std::span<const double> point);
std::vector<double> class_weights(const TreeEnsemble& te, std::span<const double> point);

// argmax_c W(c, v); ties break to the smallest class index.
int predict(const TreeEnsemble& te, std::span<const double> point);

// RFmv -> RFwv: same trees, weights all 1, predictions unchanged.
TreeEnsemble rf_majority_to_weighted(const TreeEnsemble& te);

// Validates the point against the feature space and predicts its class.
Instance make_instance(const TreeEnsemble& te, std::vector<double> values);

}  // namespace texp
