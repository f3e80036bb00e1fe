#include "forge/generator.hpp"

#include <algorithm>
#include <sstream>

#include "forge/engine.hpp"
#include "forge/errors.hpp"
#include "forge/util.hpp"

namespace forge {

namespace {

constexpr int kBuildRetries = 100;
constexpr int kResampleRetries = 200;

constexpr SpriteClass kAvatarClasses[] = {SpriteClass::MovingAvatar, SpriteClass::ShootAvatar};
constexpr SpriteClass kNonAvatarClasses[] = {
    SpriteClass::Immovable, SpriteClass::Passive,  SpriteClass::Missile,
    SpriteClass::RandomNPC, SpriteClass::Chaser,   SpriteClass::Fleeing,
    SpriteClass::SpawnPoint, SpriteClass::Portal,  SpriteClass::Resource};

bool needs_spawn_target(SpriteClass cls) {
  return cls == SpriteClass::SpawnPoint || cls == SpriteClass::ShootAvatar;
}

std::vector<std::string> spawn_candidates(const GameSpec& spec, const std::string& self) {
  std::vector<std::string> out;
  for (const auto& s : spec.sprites) {
    if (s.name == self || is_avatar_class(s.cls)) continue;
    out.push_back(s.name);
  }
  return out;
}

void attach_sprite_modifier(SpriteDef& def, Rng& rng) {
  enum Mod { Speed, Cooldown, Limit, Orient };
  std::vector<Mod> applicable;
  switch (def.cls) {
    case SpriteClass::Missile:
      applicable = {Speed, Cooldown, Orient};
      break;
    case SpriteClass::MovingAvatar:
    case SpriteClass::RandomNPC:
    case SpriteClass::Chaser:
    case SpriteClass::Fleeing:
      applicable = {Speed, Cooldown};
      break;
    case SpriteClass::ShootAvatar:
      applicable = {Speed, Cooldown, Limit};
      break;
    case SpriteClass::SpawnPoint:
      applicable = {Cooldown, Limit};
      break;
    default:
      applicable = {Cooldown};
      break;
  }
  switch (rng.choice(applicable)) {
    case Speed:
      def.speed = rng.bernoulli(0.5) ? 2.0 : 0.5;
      break;
    case Cooldown:
      def.cooldown = static_cast<int>(rng.uniform_int(1, 3));
      break;
    case Limit:
      def.limit = static_cast<int>(rng.uniform_int(1, 5));
      break;
    case Orient:
      def.orientation = static_cast<Orientation>(rng.index(4));
      break;
  }
}

// Draws a replacement body for the named slot: class (avatar slots stay
// avatar-classed), spawn target, and a Bernoulli(p) modifier.
SpriteDef random_sprite(const std::string& name, bool avatar_slot, const GameSpec& spec,
                        const GenConfig& config, Rng& rng) {
  SpriteDef def;
  def.name = name;
  if (avatar_slot) {
    def.cls = kAvatarClasses[rng.index(std::size(kAvatarClasses))];
  } else {
    def.cls = kNonAvatarClasses[rng.index(std::size(kNonAvatarClasses))];
  }
  if (needs_spawn_target(def.cls)) {
    auto candidates = spawn_candidates(spec, name);
    if (candidates.empty()) {
      def.cls = avatar_slot ? SpriteClass::MovingAvatar : SpriteClass::Passive;
    } else {
      def.spawn_target = rng.choice(candidates);
    }
  }
  if (rng.bernoulli(config.modifier_probability)) attach_sprite_modifier(def, rng);
  return def;
}

InteractionDef random_interaction(const GameSpec& spec, const GenConfig& config, Rng& rng) {
  InteractionDef def;
  def.actor = spec.sprites[rng.index(spec.sprites.size())].name;
  size_t other = rng.index(spec.sprites.size() + 1);
  def.other = other == spec.sprites.size() ? std::string(kEosToken) : spec.sprites[other].name;
  def.effect = static_cast<EffectKind>(rng.index(kEffectCount));
  if (def.effect == EffectKind::TransformTo || def.effect == EffectKind::SpawnBehind) {
    def.effect_target = spec.sprites[rng.index(spec.sprites.size())].name;
  }
  if (rng.bernoulli(config.modifier_probability)) {
    static constexpr int kScores[] = {-2, -1, 1, 2};
    def.score_change = kScores[rng.index(4)];
  }
  return def;
}

// want_win: std::nullopt leaves the flag to the coin; a value forces it
// (used to keep win/loss coverage intact).
TerminationDef random_termination(const GameSpec& spec, std::optional<bool> want_win, Rng& rng) {
  TerminationDef def;
  if (rng.bernoulli(0.5)) {
    def.kind = TerminationKind::SpriteCounter;
    def.sprite = spec.sprites[rng.index(spec.sprites.size())].name;
    def.limit = static_cast<int>(rng.uniform_int(0, 2));
  } else {
    def.kind = TerminationKind::Timeout;
    def.limit = static_cast<int>(rng.uniform_int(50, 700));
  }
  def.win = want_win ? *want_win : rng.bernoulli(0.5);
  return def;
}

char sprite_char(size_t index) {
  return index == 0 ? 'A' : static_cast<char>('a' + index - 1);
}

Game build_candidate(const GenConfig& config, Rng& rng) {
  Game g;
  int k = static_cast<int>(rng.uniform_int(config.min_sprites, config.max_sprites));

  // slot 0 is the avatar; names are stable, bodies are drawn afterwards so
  // spawn targets can reference the full roster
  for (int i = 0; i < k; ++i) {
    SpriteDef def;
    def.name = i == 0 ? "avatar" : "s" + std::to_string(i);
    def.cls = i == 0 ? SpriteClass::MovingAvatar : SpriteClass::Passive;
    g.spec.sprites.push_back(def);
    g.spec.level_mapping[sprite_char(i)] = {def.name};
  }
  for (int i = 0; i < k; ++i) {
    g.spec.sprites[i] = random_sprite(g.spec.sprites[i].name, i == 0, g.spec, config, rng);
  }

  int m = static_cast<int>(rng.uniform_int(config.min_interactions, config.max_interactions));
  for (int i = 0; i < m; ++i) g.spec.interactions.push_back(random_interaction(g.spec, config, rng));

  int t = static_cast<int>(rng.uniform_int(config.min_terminations, config.max_terminations));
  for (int i = 0; i < t; ++i) {
    std::optional<bool> want;
    if (i == 0) want = true;
    if (i == 1) want = false;
    g.spec.terminations.push_back(random_termination(g.spec, want, rng));
  }
  rng.shuffle(g.spec.terminations);

  g.level = Level::blank(config.level_width, config.level_height);
  for (char& cell : g.level.cells) {
    size_t pick = rng.index(static_cast<size_t>(k));  // k-1 sprite chars + blank
    cell = pick + 1 == static_cast<size_t>(k) ? kBlankChar : sprite_char(pick + 1);
  }
  size_t avatar_cell = rng.index(g.level.cells.size());
  g.level.cells[avatar_cell] = 'A';
  return g;
}

// Non-avatar symbols a level cell may take, blank included.
std::vector<char> cell_symbols(const Game& game) {
  std::vector<char> symbols;
  char avatar_ch = game.spec.avatar_char();
  for (const auto& [ch, names] : game.spec.level_mapping) {
    if (ch != avatar_ch) symbols.push_back(ch);
  }
  symbols.push_back(kBlankChar);
  return symbols;
}

size_t avatar_cell_index(const Game& game) {
  char avatar_ch = game.spec.avatar_char();
  for (size_t i = 0; i < game.level.cells.size(); ++i) {
    if (game.level.cells[i] == avatar_ch) return i;
  }
  throw EngineError("level has no avatar cell");
}

void retile(Game& g, const std::vector<char>& symbols, Rng& rng) {
  size_t n = g.level.cells.size();
  size_t avatar_at = avatar_cell_index(g);
  size_t t_max = std::min<size_t>(10, n - 1);
  size_t t = static_cast<size_t>(rng.uniform_int(1, static_cast<int64_t>(t_max)));

  std::vector<size_t> positions;
  positions.reserve(n - 1);
  for (size_t i = 0; i < n; ++i) {
    if (i != avatar_at) positions.push_back(i);
  }
  for (size_t pick : rng.sample_indices(positions.size(), t)) {
    size_t cell = positions[pick];
    std::vector<char> options;
    for (char s : symbols) {
      if (s != g.level.cells[cell]) options.push_back(s);
    }
    g.level.cells[cell] = options[rng.index(options.size())];
  }
}

void resize_grid(Game& g, const GenConfig& config, const std::vector<char>& symbols, Rng& rng) {
  enum Op { InsRow, DelRow, InsCol, DelCol };
  Level& lvl = g.level;
  std::vector<Op> feasible;
  if ((lvl.height + 1) * lvl.width <= config.level_capacity) feasible.push_back(InsRow);
  if (lvl.height >= 2) feasible.push_back(DelRow);
  if (lvl.height * (lvl.width + 1) <= config.level_capacity) feasible.push_back(InsCol);
  if (lvl.width >= 2) feasible.push_back(DelCol);
  if (feasible.empty()) {
    retile(g, symbols, rng);
    return;
  }

  auto random_fill = [&](char& cell) { cell = symbols[rng.index(symbols.size())]; };
  Op op = feasible[rng.index(feasible.size())];
  Level next;
  switch (op) {
    case InsRow: {
      int at = static_cast<int>(rng.uniform_int(0, lvl.height));
      next = Level::blank(lvl.width, lvl.height + 1);
      for (int r = 0; r < next.height; ++r) {
        for (int c = 0; c < next.width; ++c) {
          if (r == at) {
            random_fill(next.at(c, r));
          } else {
            next.at(c, r) = lvl.at(c, r < at ? r : r - 1);
          }
        }
      }
      break;
    }
    case DelRow: {
      int at = static_cast<int>(rng.uniform_int(0, lvl.height - 1));
      next = Level::blank(lvl.width, lvl.height - 1);
      for (int r = 0; r < next.height; ++r) {
        for (int c = 0; c < next.width; ++c) next.at(c, r) = lvl.at(c, r < at ? r : r + 1);
      }
      break;
    }
    case InsCol: {
      int at = static_cast<int>(rng.uniform_int(0, lvl.width));
      next = Level::blank(lvl.width + 1, lvl.height);
      for (int r = 0; r < next.height; ++r) {
        for (int c = 0; c < next.width; ++c) {
          if (c == at) {
            random_fill(next.at(c, r));
          } else {
            next.at(c, r) = lvl.at(c < at ? c : c - 1, r);
          }
        }
      }
      break;
    }
    case DelCol: {
      int at = static_cast<int>(rng.uniform_int(0, lvl.width - 1));
      next = Level::blank(lvl.width - 1, lvl.height);
      for (int r = 0; r < next.height; ++r) {
        for (int c = 0; c < next.width; ++c) next.at(c, r) = lvl.at(c < at ? c : c + 1, r);
      }
      break;
    }
  }
  lvl = std::move(next);

  // avatar repair: deletions may have removed it
  char avatar_ch = g.spec.avatar_char();
  size_t avatars = std::count(lvl.cells.begin(), lvl.cells.end(), avatar_ch);
  if (avatars == 0) {
    std::vector<size_t> blanks;
    for (size_t i = 0; i < lvl.cells.size(); ++i) {
      if (lvl.cells[i] == kBlankChar) blanks.push_back(i);
    }
    size_t at = blanks.empty() ? rng.index(lvl.cells.size()) : blanks[rng.index(blanks.size())];
    lvl.cells[at] = avatar_ch;
  }
}

}  // namespace

void check_config(const GenConfig& config) {
  auto bad = [](const std::string& why) { throw ConfigInfeasible(why); };
  if (config.min_sprites < 2 || config.max_sprites < config.min_sprites) {
    bad("sprite count range must be non-empty with at least 2 sprites");
  }
  if (config.min_interactions < 0 || config.max_interactions < config.min_interactions) {
    bad("interaction count range must be non-empty and non-negative");
  }
  if (config.min_terminations < 2 || config.max_terminations < config.min_terminations) {
    bad("termination count range must be non-empty with at least 2 terminations");
  }
  if (config.level_width < 1 || config.level_height < 1) bad("level dimensions must be positive");
  if (config.level_width * config.level_height > config.level_capacity) {
    bad("level does not fit capacity of " + std::to_string(config.level_capacity) + " cells");
  }
  if (config.modifier_probability < 0.0 || config.modifier_probability > 1.0) {
    bad("modifier probability must be in [0,1]");
  }
  if (config.sanity_moves < 1) bad("sanity_moves must be positive");
}

std::string serialize_gen_config(const GenConfig& c) {
  std::ostringstream out;
  out << "sprites " << c.min_sprites << " " << c.max_sprites << "\n";
  out << "interactions " << c.min_interactions << " " << c.max_interactions << "\n";
  out << "terminations " << c.min_terminations << " " << c.max_terminations << "\n";
  out << "level " << c.level_width << " " << c.level_height << "\n";
  out << "modifier_probability " << format_number(c.modifier_probability) << "\n";
  out << "sanity_moves " << c.sanity_moves << "\n";
  out << "level_capacity " << c.level_capacity << "\n";
  return out.str();
}

GenConfig parse_gen_config(const std::string& text) {
  GenConfig c;
  auto want_int = [](const std::string& tok, const std::string& line) {
    auto v = parse_int(tok);
    if (!v) throw ConfigInfeasible("bad integer in config line: " + line);
    return static_cast<int>(*v);
  };
  for (const std::string& raw : split_lines(text)) {
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    auto tok = split_ws(line);
    if (tok[0] == "sprites" && tok.size() == 3) {
      c.min_sprites = want_int(tok[1], line);
      c.max_sprites = want_int(tok[2], line);
    } else if (tok[0] == "interactions" && tok.size() == 3) {
      c.min_interactions = want_int(tok[1], line);
      c.max_interactions = want_int(tok[2], line);
    } else if (tok[0] == "terminations" && tok.size() == 3) {
      c.min_terminations = want_int(tok[1], line);
      c.max_terminations = want_int(tok[2], line);
    } else if (tok[0] == "level" && tok.size() == 3) {
      c.level_width = want_int(tok[1], line);
      c.level_height = want_int(tok[2], line);
    } else if (tok[0] == "modifier_probability" && tok.size() == 2) {
      auto v = parse_double(tok[1]);
      if (!v) throw ConfigInfeasible("bad number in config line: " + line);
      c.modifier_probability = *v;
    } else if (tok[0] == "sanity_moves" && tok.size() == 2) {
      c.sanity_moves = want_int(tok[1], line);
    } else if (tok[0] == "level_capacity" && tok.size() == 2) {
      c.level_capacity = want_int(tok[1], line);
    } else {
      throw ConfigInfeasible("unknown config line: " + line);
    }
  }
  check_config(c);
  return c;
}

Game random_game(const GenConfig& config, Rng& rng) {
  check_config(config);
  for (int attempt = 0; attempt < kBuildRetries; ++attempt) {
    Game g = build_candidate(config, rng);
    try {
      validate_game(g);
    } catch (const Error&) {
      continue;
    }
    return g;
  }
  throw ConfigInfeasible("no structurally valid game within " +
                         std::to_string(kBuildRetries) + " attempts");
}

bool sanity_check(const Game& game, int sanity_moves, Rng& rng) {
  try {
    GameState state = init_state(game, rng.next_u64());
    for (int i = 0; i < sanity_moves && state.outcome == Outcome::Ongoing; ++i) {
      auto actions = legal_actions(state);
      step(state, actions[rng.index(actions.size())]);
    }
    return true;
  } catch (const Error&) {
    return false;
  }
}

Game rule_neighbor(const Game& game, const GenConfig& config, Rng& rng) {
  Game g = game;
  GameSpec& spec = g.spec;
  size_t s_count = spec.sprites.size();
  size_t i_count = spec.interactions.size();
  size_t t_count = spec.terminations.size();
  size_t pick = rng.index(s_count + i_count + t_count);

  if (pick < s_count) {
    const SpriteDef old = spec.sprites[pick];
    bool avatar_slot = is_avatar_class(old.cls);
    for (int tries = 0; tries < kResampleRetries; ++tries) {
      SpriteDef candidate = random_sprite(old.name, avatar_slot, spec, config, rng);
      if (!(candidate == old)) {
        spec.sprites[pick] = candidate;
        break;
      }
    }
  } else if (pick < s_count + i_count) {
    size_t at = pick - s_count;
    const InteractionDef old = spec.interactions[at];
    for (int tries = 0; tries < kResampleRetries; ++tries) {
      InteractionDef candidate = random_interaction(spec, config, rng);
      if (!(candidate == old)) {
        spec.interactions[at] = candidate;
        break;
      }
    }
  } else {
    size_t at = pick - s_count - i_count;
    const TerminationDef old = spec.terminations[at];
    int other_wins = 0, other_losses = 0;
    for (size_t i = 0; i < spec.terminations.size(); ++i) {
      if (i == at) continue;
      (spec.terminations[i].win ? other_wins : other_losses) += 1;
    }
    std::optional<bool> want;
    if (other_wins == 0) want = true;
    if (other_losses == 0) want = false;
    for (int tries = 0; tries < kResampleRetries; ++tries) {
      TerminationDef candidate = random_termination(spec, want, rng);
      if (!(candidate == old)) {
        spec.terminations[at] = candidate;
        break;
      }
    }
  }
  return g;
}

Game level_neighbor(const Game& game, const GenConfig& config, Rng& rng) {
  Game g = game;
  std::vector<char> symbols = cell_symbols(g);
  if (rng.bernoulli(0.5) && symbols.size() >= 2) {
    retile(g, symbols, rng);
  } else {
    resize_grid(g, config, symbols, rng);
  }
  return g;
}

Game neighbor(const Game& game, const GenConfig& config, Rng& rng) {
  return rng.bernoulli(0.5) ? rule_neighbor(game, config, rng)
                            : level_neighbor(game, config, rng);
}

bool has_random_modifier(const Game& game) {
  for (const auto& s : game.spec.sprites) {
    if (s.has_any_modifier()) return true;
  }
  for (const auto& i : game.spec.interactions) {
    if (i.score_change != 0) return true;
  }
  return false;
}

}  // namespace forge
