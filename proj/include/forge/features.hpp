#pragma once

#include <string>
#include <vector>

#include "forge/vgdl.hpp"

namespace forge {

// Fixed-length numeric layout for a Game. With terminations included the
// rule prefix is 53 wide and the whole vector 413; without, 40 and 400.
// The full index map lives in docs/schema.md and index_map() below.
struct FeatureSchema {
  bool include_termination = true;
  int max_cells = 358;

  // four (class id, limit) tuple slots for the first terminations
  static constexpr int kTerminationTuples = 4;

  int rule_length() const;
  int level_length() const { return 2 + max_cells; }
  int total_length() const { return rule_length() + level_length(); }

  bool operator==(const FeatureSchema&) const = default;
};

FeatureSchema schema_default(bool include_termination);

// Row-major cell encoding: blank/padding 0, sprite classes 1..11 in
// SpriteClass declaration order. Cells mapped to several sprites take the
// first mapped sprite's class.
int class_id(SpriteClass cls);

// Throws LevelTooLarge when the grid exceeds schema.max_cells.
std::vector<double> vectorize(const Game& game, const FeatureSchema& schema);

// One human-readable name per index, length == schema.total_length().
std::vector<std::string> index_map(const FeatureSchema& schema);

}  // namespace forge
