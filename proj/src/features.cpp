#include "forge/features.hpp"

#include "forge/errors.hpp"
#include "forge/util.hpp"

namespace forge {

namespace {

constexpr int kTerminationFeatures =
    2 + 2 * FeatureSchema::kTerminationTuples + 3;  // kind counts, tuples, win/loss/min-limit

int other_slot(const GameSpec& spec, const std::string& other) {
  if (other == kEosToken) return kSpriteClassCount;
  int idx = spec.sprite_index(other);
  return class_id(spec.sprites[idx].cls) - 1;
}

}  // namespace

int FeatureSchema::rule_length() const {
  // class counts + effect counts + actor histogram + other histogram (with
  // an EOS slot) + optional termination block
  int n = kSpriteClassCount + kEffectCount + kSpriteClassCount + (kSpriteClassCount + 1);
  if (include_termination) n += kTerminationFeatures;
  return n;
}

FeatureSchema schema_default(bool include_termination) {
  FeatureSchema s;
  s.include_termination = include_termination;
  return s;
}

int class_id(SpriteClass cls) { return static_cast<int>(cls) + 1; }

std::vector<double> vectorize(const Game& game, const FeatureSchema& schema) {
  const GameSpec& spec = game.spec;
  const Level& lvl = game.level;
  if (lvl.width * lvl.height > schema.max_cells) {
    throw LevelTooLarge("level has " + std::to_string(lvl.width * lvl.height) +
                        " cells, schema capacity is " + std::to_string(schema.max_cells));
  }

  std::vector<double> v(schema.total_length(), 0.0);
  int at = 0;

  for (const auto& s : spec.sprites) v[at + class_id(s.cls) - 1] += 1;
  at += kSpriteClassCount;

  for (const auto& i : spec.interactions) v[at + static_cast<int>(i.effect)] += 1;
  at += kEffectCount;

  for (const auto& i : spec.interactions) {
    int actor_idx = spec.sprite_index(i.actor);
    v[at + class_id(spec.sprites[actor_idx].cls) - 1] += 1;
    v[at + kSpriteClassCount + other_slot(spec, i.other)] += 1;
  }
  at += kSpriteClassCount + (kSpriteClassCount + 1);

  if (schema.include_termination) {
    double min_limit = 0.0;
    bool first = true;
    for (size_t t = 0; t < spec.terminations.size(); ++t) {
      const TerminationDef& term = spec.terminations[t];
      bool counter = term.kind == TerminationKind::SpriteCounter;
      v[at + (counter ? 0 : 1)] += 1;
      if (t < FeatureSchema::kTerminationTuples) {
        int cid = 0;
        if (counter) {
          int idx = spec.sprite_index(*term.sprite);
          cid = class_id(spec.sprites[idx].cls);
        }
        v[at + 2 + 2 * t] = cid;
        v[at + 2 + 2 * t + 1] = term.limit;
      }
      v[at + 2 + 2 * FeatureSchema::kTerminationTuples + (term.win ? 0 : 1)] += 1;
      if (first || term.limit < min_limit) min_limit = term.limit;
      first = false;
    }
    v[at + kTerminationFeatures - 1] = min_limit;
    at += kTerminationFeatures;
  }

  v[at++] = lvl.width;
  v[at++] = lvl.height;
  for (int r = 0; r < lvl.height; ++r) {
    for (int c = 0; c < lvl.width; ++c) {
      char ch = lvl.at(c, r);
      int cid = 0;
      if (ch != kBlankChar) {
        const auto& names = spec.level_mapping.at(ch);
        int idx = spec.sprite_index(names.front());
        cid = class_id(spec.sprites[idx].cls);
      }
      v[at + r * lvl.width + c] = cid;
    }
  }
  return v;
}

std::vector<std::string> index_map(const FeatureSchema& schema) {
  std::vector<std::string> names;
  names.reserve(schema.total_length());
  for (int c = 0; c < kSpriteClassCount; ++c) {
    names.push_back(std::string("count.sprite_class.") + to_string(static_cast<SpriteClass>(c)));
  }
  for (int e = 0; e < kEffectCount; ++e) {
    names.push_back(std::string("count.effect.") + to_string(static_cast<EffectKind>(e)));
  }
  for (int c = 0; c < kSpriteClassCount; ++c) {
    names.push_back(std::string("histogram.actor_class.") +
                    to_string(static_cast<SpriteClass>(c)));
  }
  for (int c = 0; c < kSpriteClassCount; ++c) {
    names.push_back(std::string("histogram.other_class.") +
                    to_string(static_cast<SpriteClass>(c)));
  }
  names.push_back("histogram.other_class.EOS");
  if (schema.include_termination) {
    names.push_back("count.termination.SpriteCounter");
    names.push_back("count.termination.Timeout");
    for (int t = 0; t < FeatureSchema::kTerminationTuples; ++t) {
      names.push_back("termination." + std::to_string(t) + ".class_id");
      names.push_back("termination." + std::to_string(t) + ".limit");
    }
    names.push_back("count.termination.win");
    names.push_back("count.termination.loss");
    names.push_back("termination.min_limit");
  }
  names.push_back("level.width");
  names.push_back("level.height");
  for (int i = 0; i < schema.max_cells; ++i) {
    names.push_back("level.cell." + std::to_string(i));
  }
  return names;
}

}  // namespace forge
