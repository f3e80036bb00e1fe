#include "forge/forest.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "forge/errors.hpp"
#include "forge/rng.hpp"
#include "forge/util.hpp"

namespace forge {

namespace {

struct Counts {
  int generated = 0;
  int human = 0;

  int total() const { return generated + human; }
  void add(Label l) { (l == Label::Human ? human : generated) += 1; }
  void remove(Label l) { (l == Label::Human ? human : generated) -= 1; }
  bool pure() const { return generated == 0 || human == 0; }
  // majority label, tie -> Generated (conservative class)
  Label majority() const { return human > generated ? Label::Human : Label::Generated; }
  double gini() const {
    if (total() == 0) return 0.0;
    double pg = static_cast<double>(generated) / total();
    double ph = static_cast<double>(human) / total();
    return 1.0 - pg * pg - ph * ph;
  }
};

struct TreeBuilder {
  const Dataset& data;
  int d;
  int features_per_split;
  const ForestParams& params;
  Rng rng;
  Tree tree;

  int build(std::vector<size_t>& samples, int depth) {
    Counts counts;
    for (size_t s : samples) counts.add(data.labels[s]);

    int node_index = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();

    if (counts.pure() || depth >= params.max_depth ||
        counts.total() < params.min_samples_split) {
      tree.nodes[node_index].label = counts.majority();
      return node_index;
    }

    auto candidates = rng.sample_indices(d, features_per_split);
    std::sort(candidates.begin(), candidates.end());

    // Best split: lowest weighted Gini; ties resolve to the lowest feature
    // index, then the lowest threshold (candidates scanned in that order
    // with strict improvement required).
    int best_feature = -1;
    double best_threshold = 0.0;
    double best_impurity = counts.gini();
    std::vector<std::pair<double, Label>> column(samples.size());
    for (size_t f : candidates) {
      for (size_t i = 0; i < samples.size(); ++i) {
        column[i] = {data.rows[samples[i]][f], data.labels[samples[i]]};
      }
      std::sort(column.begin(), column.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      Counts left, right = counts;
      for (size_t i = 0; i + 1 < column.size(); ++i) {
        left.add(column[i].second);
        right.remove(column[i].second);
        if (column[i].first == column[i + 1].first) continue;
        double threshold = column[i].first + (column[i + 1].first - column[i].first) / 2.0;
        double impurity = (left.total() * left.gini() + right.total() * right.gini()) /
                          counts.total();
        if (impurity < best_impurity) {
          best_impurity = impurity;
          best_feature = static_cast<int>(f);
          best_threshold = threshold;
        }
      }
    }

    if (best_feature < 0) {
      tree.nodes[node_index].label = counts.majority();
      return node_index;
    }

    std::vector<size_t> left_samples, right_samples;
    for (size_t s : samples) {
      (data.rows[s][best_feature] <= best_threshold ? left_samples : right_samples)
          .push_back(s);
    }
    int left = build(left_samples, depth + 1);
    int right = build(right_samples, depth + 1);
    tree.nodes[node_index].feature = best_feature;
    tree.nodes[node_index].threshold = best_threshold;
    tree.nodes[node_index].left = left;
    tree.nodes[node_index].right = right;
    return node_index;
  }
};

}  // namespace

const char* to_string(Label l) { return l == Label::Human ? "Human" : "Generated"; }

void Dataset::add(std::vector<double> row, Label label) {
  if (rows.empty()) {
    n_features = static_cast<int>(row.size());
  } else if (static_cast<int>(row.size()) != n_features) {
    throw SchemaMismatch("row length " + std::to_string(row.size()) +
                         " does not match dataset width " + std::to_string(n_features));
  }
  rows.push_back(std::move(row));
  labels.push_back(label);
}

Label Tree::predict(const std::vector<double>& x) const {
  int at = 0;
  while (!nodes[at].is_leaf()) {
    at = x[nodes[at].feature] <= nodes[at].threshold ? nodes[at].left : nodes[at].right;
  }
  return nodes[at].label;
}

Forest fit(const Dataset& dataset, const ForestParams& params) {
  bool has_generated = false, has_human = false;
  for (Label l : dataset.labels) (l == Label::Human ? has_human : has_generated) = true;
  if (!has_generated || !has_human) {
    throw SingleClassDataset("fit requires at least one row of each label");
  }

  int d = dataset.n_features;
  int fps = params.features_per_split > 0
                ? params.features_per_split
                : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(d))));
  if (fps > d) {
    throw SchemaMismatch("features_per_split " + std::to_string(fps) + " exceeds " +
                         std::to_string(d) + " features");
  }

  Forest forest;
  forest.params = params;
  forest.schema = dataset.schema;
  forest.n_features = d;
  forest.trees.resize(params.n_trees);
  size_t n = dataset.size();
  parallel_for(params.n_trees, [&](size_t t) {
    TreeBuilder builder{dataset, d, fps, params, Rng(derive_seed(params.seed, "tree", t)), {}};
    std::vector<size_t> samples(n);
    if (params.bootstrap) {
      for (size_t i = 0; i < n; ++i) samples[i] = builder.rng.index(n);
    } else {
      for (size_t i = 0; i < n; ++i) samples[i] = i;
    }
    builder.build(samples, 0);
    forest.trees[t] = std::move(builder.tree);
  });
  return forest;
}

std::vector<int> per_tree_votes(const Forest& forest, const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != forest.n_features) {
    throw SchemaMismatch("vector length " + std::to_string(x.size()) +
                         " does not match model width " + std::to_string(forest.n_features));
  }
  std::vector<int> votes(forest.trees.size());
  for (size_t t = 0; t < forest.trees.size(); ++t) {
    votes[t] = forest.trees[t].predict(x) == Label::Human ? 1 : 0;
  }
  return votes;
}

double predict_proba(const Forest& forest, const std::vector<double>& x) {
  auto votes = per_tree_votes(forest, x);
  int human = 0;
  for (int v : votes) human += v;
  return static_cast<double>(human) / static_cast<double>(votes.size());
}

uint64_t schema_hash(const FeatureSchema& schema) {
  std::string repr = std::string("schema/") +
                     (schema.include_termination ? "term" : "noterm") + "/" +
                     std::to_string(schema.max_cells);
  return fnv1a64(repr);
}

void require_schema(const Forest& forest, const FeatureSchema& expected) {
  if (forest.schema != expected || forest.n_features != expected.total_length()) {
    throw SchemaMismatch("model was trained under a different feature schema");
  }
}

std::string serialize_forest(const Forest& forest) {
  std::ostringstream out;
  out << "forest v1\n";
  out << "schema " << (forest.schema.include_termination ? "term" : "noterm") << " "
      << forest.schema.max_cells << " " << schema_hash(forest.schema) << " "
      << forest.n_features << "\n";
  out << "params " << forest.params.n_trees << " " << forest.params.max_depth << " "
      << forest.params.min_samples_split << " " << forest.params.features_per_split << " "
      << (forest.params.bootstrap ? 1 : 0) << " " << forest.params.seed << "\n";
  out << "trees " << forest.trees.size() << "\n";
  for (size_t t = 0; t < forest.trees.size(); ++t) {
    out << "tree " << t << " " << forest.trees[t].nodes.size() << "\n";
    for (const TreeNode& n : forest.trees[t].nodes) {
      if (n.is_leaf()) {
        out << "leaf " << (n.label == Label::Human ? 1 : 0) << "\n";
      } else {
        out << "split " << n.feature << " " << format_exact(n.threshold) << " " << n.left
            << " " << n.right << "\n";
      }
    }
  }
  out << "end\n";
  return out.str();
}

namespace {

std::vector<std::string> next_record(const std::vector<std::string>& lines, size_t& at,
                                     const char* expected) {
  if (at >= lines.size()) {
    throw CorruptModel(std::string("unexpected end of model, expected '") + expected + "'");
  }
  auto fields = split_ws(lines[at]);
  if (fields.empty() || fields[0] != expected) {
    throw CorruptModel("expected '" + std::string(expected) + "' record, got: " + lines[at]);
  }
  ++at;
  return fields;
}

long long record_int(const std::vector<std::string>& fields, size_t i) {
  if (i >= fields.size()) throw CorruptModel("truncated model record");
  auto v = parse_int(fields[i]);
  if (!v) throw CorruptModel("bad integer in model record: " + fields[i]);
  return *v;
}

uint64_t record_u64(const std::vector<std::string>& fields, size_t i) {
  if (i >= fields.size()) throw CorruptModel("truncated model record");
  const std::string& s = fields[i];
  char* end = nullptr;
  errno = 0;
  uint64_t v = std::strtoull(s.c_str(), &end, 10);
  if (errno != 0 || end != s.c_str() + s.size() || s.empty()) {
    throw CorruptModel("bad unsigned integer in model record: " + s);
  }
  return v;
}

}  // namespace

Forest deserialize_forest(const std::string& text) {
  auto lines = split_lines(text);
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  size_t at = 0;

  auto header = next_record(lines, at, "forest");
  if (header.size() != 2 || header[1] != "v1") throw CorruptModel("unsupported model version");

  auto schema_rec = next_record(lines, at, "schema");
  if (schema_rec.size() != 5) throw CorruptModel("bad schema record");
  Forest forest;
  if (schema_rec[1] == "term") {
    forest.schema.include_termination = true;
  } else if (schema_rec[1] == "noterm") {
    forest.schema.include_termination = false;
  } else {
    throw CorruptModel("bad schema variant: " + schema_rec[1]);
  }
  forest.schema.max_cells = static_cast<int>(record_int(schema_rec, 2));
  if (record_u64(schema_rec, 3) != schema_hash(forest.schema)) {
    throw CorruptModel("schema hash does not match schema fields");
  }
  forest.n_features = static_cast<int>(record_int(schema_rec, 4));
  if (forest.n_features <= 0) throw CorruptModel("bad feature count");

  auto params_rec = next_record(lines, at, "params");
  if (params_rec.size() != 7) throw CorruptModel("bad params record");
  forest.params.n_trees = static_cast<int>(record_int(params_rec, 1));
  forest.params.max_depth = static_cast<int>(record_int(params_rec, 2));
  forest.params.min_samples_split = static_cast<int>(record_int(params_rec, 3));
  forest.params.features_per_split = static_cast<int>(record_int(params_rec, 4));
  forest.params.bootstrap = record_int(params_rec, 5) != 0;
  forest.params.seed = record_u64(params_rec, 6);

  auto trees_rec = next_record(lines, at, "trees");
  long long n_trees = record_int(trees_rec, 1);
  if (n_trees < 0) throw CorruptModel("negative tree count");
  forest.trees.resize(n_trees);
  for (long long t = 0; t < n_trees; ++t) {
    auto tree_rec = next_record(lines, at, "tree");
    if (record_int(tree_rec, 1) != t) throw CorruptModel("tree records out of order");
    long long n_nodes = record_int(tree_rec, 2);
    if (n_nodes <= 0) throw CorruptModel("tree with no nodes");
    Tree& tree = forest.trees[t];
    tree.nodes.resize(n_nodes);
    for (long long n = 0; n < n_nodes; ++n) {
      if (at >= lines.size()) throw CorruptModel("unexpected end of model in tree body");
      auto fields = split_ws(lines[at++]);
      if (fields.size() == 2 && fields[0] == "leaf") {
        tree.nodes[n].label = record_int(fields, 1) != 0 ? Label::Human : Label::Generated;
      } else if (fields.size() == 5 && fields[0] == "split") {
        tree.nodes[n].feature = static_cast<int>(record_int(fields, 1));
        auto threshold = parse_exact(fields[2]);
        if (!threshold) throw CorruptModel("bad threshold: " + fields[2]);
        tree.nodes[n].threshold = *threshold;
        tree.nodes[n].left = static_cast<int>(record_int(fields, 3));
        tree.nodes[n].right = static_cast<int>(record_int(fields, 4));
        if (tree.nodes[n].feature < 0 || tree.nodes[n].feature >= forest.n_features ||
            tree.nodes[n].left < 0 || tree.nodes[n].left >= n_nodes || tree.nodes[n].right < 0 ||
            tree.nodes[n].right >= n_nodes) {
          throw CorruptModel("split record references out of range");
        }
      } else {
        throw CorruptModel("bad node record: " + lines[at - 1]);
      }
    }
  }
  next_record(lines, at, "end");
  return forest;
}

void save_forest(const Forest& forest, const std::string& path) {
  write_file(path, serialize_forest(forest));
}

Forest load_forest(const std::string& path) { return deserialize_forest(read_file(path)); }

}  // namespace forge
