#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "forge/features.hpp"

namespace forge {

enum class Label { Generated = 0, Human = 1 };

const char* to_string(Label l);

struct ForestParams {
  int n_trees = 100;
  int max_depth = 8;
  int min_samples_split = 2;
  int features_per_split = 0;  // 0: ceil(sqrt(d)) resolved at fit time
  bool bootstrap = true;
  uint64_t seed = 0;

  bool operator==(const ForestParams&) const = default;
};

struct Dataset {
  FeatureSchema schema;  // vectorization metadata, carried into the model
  int n_features = 0;    // set by the first add
  std::vector<std::vector<double>> rows;
  std::vector<Label> labels;

  explicit Dataset(FeatureSchema s = {}) : schema(s) {}
  // Throws SchemaMismatch when the row length differs from earlier rows.
  void add(std::vector<double> row, Label label);
  size_t size() const { return rows.size(); }
};

// Axis-aligned binary decision node. Internal nodes route x[feature] <=
// threshold to `left`, else `right`; leaves carry the label.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  Label label = Label::Generated;

  bool is_leaf() const { return feature < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;

  Label predict(const std::vector<double>& x) const;
};

struct Forest {
  ForestParams params;
  FeatureSchema schema;
  int n_features = 0;
  std::vector<Tree> trees;
};

// Grows params.n_trees trees on Gini-minimizing splits over
// features_per_split uniformly sampled candidates, each tree on its own
// bootstrap resample and sub-seed. Throws SingleClassDataset unless both
// labels are present.
Forest fit(const Dataset& dataset, const ForestParams& params);

// Fraction of trees voting Human, in [0,1] with denominator n_trees.
// Throws SchemaMismatch when the vector length does not match n_features.
double predict_proba(const Forest& forest, const std::vector<double>& x);

// One 0/1 entry per tree (1 = Human), in tree order.
std::vector<int> per_tree_votes(const Forest& forest, const std::vector<double>& x);

uint64_t schema_hash(const FeatureSchema& schema);

// Guards a loaded model against use under a different vectorization.
// Throws SchemaMismatch when the model's schema differs from `expected`.
void require_schema(const Forest& forest, const FeatureSchema& expected);

// Line-based text format with a schema hash header; thresholds stored as
// hexfloats so round trips are exact. load throws CorruptModel on any
// structural damage.
std::string serialize_forest(const Forest& forest);
Forest deserialize_forest(const std::string& text);
void save_forest(const Forest& forest, const std::string& path);
Forest load_forest(const std::string& path);

}  // namespace forge
