#include "forge/vgdl.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "forge/util.hpp"

namespace forge {

namespace {

constexpr const char* kSpriteClassNames[kSpriteClassCount] = {
    "Immovable", "Passive",  "Missile",  "RandomNPC",   "Chaser",      "Fleeing",
    "SpawnPoint", "Portal",  "Resource", "MovingAvatar", "ShootAvatar",
};

constexpr const char* kOrientationNames[4] = {"Up", "Down", "Left", "Right"};

constexpr const char* kEffectNames[kEffectCount] = {
    "KillSprite", "KillBoth", "StepBack", "TransformTo", "CollectResource", "SpawnBehind",
};

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  for (char c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  }
  return true;
}

}  // namespace

const char* to_string(SpriteClass c) { return kSpriteClassNames[static_cast<int>(c)]; }
const char* to_string(Orientation o) { return kOrientationNames[static_cast<int>(o)]; }
const char* to_string(EffectKind e) { return kEffectNames[static_cast<int>(e)]; }

const char* to_string(ParseErrorKind kind) {
  switch (kind) {
    case ParseErrorKind::MissingSection: return "MissingSection";
    case ParseErrorKind::UnknownSpriteClass: return "UnknownSpriteClass";
    case ParseErrorKind::UnresolvedIdentifier: return "UnresolvedIdentifier";
    case ParseErrorKind::NonRectangularLevel: return "NonRectangularLevel";
    case ParseErrorKind::NoAvatar: return "NoAvatar";
    case ParseErrorKind::DuplicateAvatar: return "DuplicateAvatar";
    case ParseErrorKind::DuplicateName: return "DuplicateName";
    case ParseErrorKind::UnknownCharacter: return "UnknownCharacter";
    case ParseErrorKind::MissingTermination: return "MissingTermination";
    case ParseErrorKind::InvalidModifier: return "InvalidModifier";
    case ParseErrorKind::BadSyntax: return "BadSyntax";
  }
  return "ParseError";
}

std::optional<SpriteClass> sprite_class_from(std::string_view s) {
  for (int i = 0; i < kSpriteClassCount; ++i) {
    if (s == kSpriteClassNames[i]) return static_cast<SpriteClass>(i);
  }
  return std::nullopt;
}

std::optional<Orientation> orientation_from(std::string_view s) {
  for (int i = 0; i < 4; ++i) {
    if (s == kOrientationNames[i]) return static_cast<Orientation>(i);
  }
  return std::nullopt;
}

std::optional<EffectKind> effect_from(std::string_view s) {
  for (int i = 0; i < kEffectCount; ++i) {
    if (s == kEffectNames[i]) return static_cast<EffectKind>(i);
  }
  return std::nullopt;
}

bool is_avatar_class(SpriteClass c) {
  return c == SpriteClass::MovingAvatar || c == SpriteClass::ShootAvatar;
}

int GameSpec::sprite_index(std::string_view name) const {
  for (size_t i = 0; i < sprites.size(); ++i) {
    if (sprites[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

const SpriteDef* GameSpec::find_sprite(std::string_view name) const {
  int i = sprite_index(name);
  return i < 0 ? nullptr : &sprites[i];
}

int GameSpec::avatar_index() const {
  for (size_t i = 0; i < sprites.size(); ++i) {
    if (is_avatar_class(sprites[i].cls)) return static_cast<int>(i);
  }
  return -1;
}

char GameSpec::avatar_char() const {
  int av = avatar_index();
  if (av < 0) return '\0';
  const std::string& name = sprites[av].name;
  for (const auto& [ch, names] : level_mapping) {
    for (const auto& n : names) {
      if (n == name) return ch;
    }
  }
  return '\0';
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace {

struct RawLine {
  int number;  // 1-based
  std::string text;
  bool indented;
};

// key=value pairs after the fixed part of a line
struct KvPairs {
  std::vector<std::pair<std::string, std::string>> items;
  int line;

  const std::string* get(const std::string& key) const {
    for (const auto& [k, v] : items) {
      if (k == key) return &v;
    }
    return nullptr;
  }
};

KvPairs parse_kv(const std::vector<std::string>& tokens, size_t start, int line) {
  KvPairs kv;
  kv.line = line;
  for (size_t i = start; i < tokens.size(); ++i) {
    size_t eq = tokens[i].find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 >= tokens[i].size()) {
      throw ParseError(ParseErrorKind::BadSyntax, line, "expected key=value, got '" + tokens[i] + "'");
    }
    std::string key = tokens[i].substr(0, eq);
    std::string val = tokens[i].substr(eq + 1);
    if (kv.get(key)) {
      throw ParseError(ParseErrorKind::BadSyntax, line, "duplicate key '" + key + "'");
    }
    kv.items.emplace_back(key, val);
  }
  return kv;
}

int require_nonneg_int(const KvPairs& kv, const std::string& key, const std::string& context) {
  const std::string* v = kv.get(key);
  if (!v) {
    throw ParseError(ParseErrorKind::BadSyntax, kv.line, context + " requires " + key + "=");
  }
  auto out = parse_int(*v);
  if (!out || *out < 0) {
    throw ParseError(ParseErrorKind::BadSyntax, kv.line, "bad " + key + " value '" + *v + "'");
  }
  return static_cast<int>(*out);
}

bool require_bool(const KvPairs& kv, const std::string& key, const std::string& context) {
  const std::string* v = kv.get(key);
  if (!v) {
    throw ParseError(ParseErrorKind::BadSyntax, kv.line, context + " requires " + key + "=");
  }
  if (*v == "True" || *v == "true") return true;
  if (*v == "False" || *v == "false") return false;
  throw ParseError(ParseErrorKind::BadSyntax, kv.line, "bad " + key + " value '" + *v + "'");
}

SpriteDef parse_sprite_line(const std::vector<std::string>& tokens, int line) {
  // name > Class [key=value ...]
  if (tokens.size() < 3 || tokens[1] != ">") {
    throw ParseError(ParseErrorKind::BadSyntax, line, "expected 'name > Class ...'");
  }
  SpriteDef def;
  def.name = tokens[0];
  if (!is_identifier(def.name)) {
    throw ParseError(ParseErrorKind::BadSyntax, line, "bad sprite name '" + def.name + "'");
  }
  if (def.name == kEosToken) {
    throw ParseError(ParseErrorKind::BadSyntax, line, "EOS is reserved");
  }
  auto cls = sprite_class_from(tokens[2]);
  if (!cls) {
    throw ParseError(ParseErrorKind::UnknownSpriteClass, line, "unknown sprite class '" + tokens[2] + "'");
  }
  def.cls = *cls;
  KvPairs kv = parse_kv(tokens, 3, line);
  for (const auto& [key, val] : kv.items) {
    if (key == "speed") {
      auto d = parse_double(val);
      if (!d || *d < 0) {
        throw ParseError(ParseErrorKind::InvalidModifier, line, "bad speed '" + val + "'");
      }
      def.speed = *d;
    } else if (key == "cooldown") {
      auto v = parse_int(val);
      if (!v || *v < 0) {
        throw ParseError(ParseErrorKind::InvalidModifier, line, "bad cooldown '" + val + "'");
      }
      def.cooldown = static_cast<int>(*v);
    } else if (key == "limit") {
      auto v = parse_int(val);
      if (!v || *v < 0) {
        throw ParseError(ParseErrorKind::InvalidModifier, line, "bad limit '" + val + "'");
      }
      def.limit = static_cast<int>(*v);
    } else if (key == "orientation") {
      auto o = orientation_from(val);
      if (!o) throw ParseError(ParseErrorKind::InvalidModifier, line, "bad orientation '" + val + "'");
      def.orientation = *o;
    } else if (key == "spawn") {
      if (!is_identifier(val)) {
        throw ParseError(ParseErrorKind::InvalidModifier, line, "bad spawn target '" + val + "'");
      }
      def.spawn_target = val;
    } else {
      throw ParseError(ParseErrorKind::InvalidModifier, line, "unknown modifier '" + key + "'");
    }
  }
  return def;
}

InteractionDef parse_interaction_line(const std::vector<std::string>& tokens, int line) {
  // actor other > Effect [target=id] [scoreChange=N]
  if (tokens.size() < 4 || tokens[2] != ">") {
    throw ParseError(ParseErrorKind::BadSyntax, line, "expected 'actor other > Effect ...'");
  }
  InteractionDef def;
  def.actor = tokens[0];
  def.other = tokens[1];
  if (!is_identifier(def.actor) || def.actor == kEosToken) {
    throw ParseError(ParseErrorKind::BadSyntax, line, "bad actor '" + def.actor + "'");
  }
  if (!is_identifier(def.other)) {
    throw ParseError(ParseErrorKind::BadSyntax, line, "bad other '" + def.other + "'");
  }
  auto eff = effect_from(tokens[3]);
  if (!eff) {
    throw ParseError(ParseErrorKind::BadSyntax, line, "unknown effect '" + tokens[3] + "'");
  }
  def.effect = *eff;
  KvPairs kv = parse_kv(tokens, 4, line);
  for (const auto& [key, val] : kv.items) {
    if (key == "target") {
      if (!is_identifier(val) || val == kEosToken) {
        throw ParseError(ParseErrorKind::BadSyntax, line, "bad target '" + val + "'");
      }
      def.effect_target = val;
    } else if (key == "scoreChange") {
      auto v = parse_int(val);
      if (!v) {
        throw ParseError(ParseErrorKind::BadSyntax, line, "bad scoreChange '" + val + "'");
      }
      def.score_change = static_cast<int>(*v);
    } else {
      throw ParseError(ParseErrorKind::InvalidModifier, line, "unknown modifier '" + key + "'");
    }
  }
  return def;
}

TerminationDef parse_termination_line(const std::vector<std::string>& tokens, int line) {
  // SpriteCounter sprite=id limit=N win=B  |  Timeout limit=N win=B
  TerminationDef def;
  KvPairs kv = parse_kv(tokens, 1, line);
  if (tokens[0] == "SpriteCounter") {
    def.kind = TerminationKind::SpriteCounter;
    const std::string* sp = kv.get("sprite");
    if (!sp || !is_identifier(*sp) || *sp == kEosToken) {
      throw ParseError(ParseErrorKind::BadSyntax, line, "SpriteCounter requires sprite=<name>");
    }
    def.sprite = *sp;
    if (kv.items.size() != 3) {
      throw ParseError(ParseErrorKind::BadSyntax, line, "SpriteCounter takes sprite=, limit=, win=");
    }
  } else if (tokens[0] == "Timeout") {
    def.kind = TerminationKind::Timeout;
    if (kv.items.size() != 2) {
      throw ParseError(ParseErrorKind::BadSyntax, line, "Timeout takes limit=, win=");
    }
  } else {
    throw ParseError(ParseErrorKind::BadSyntax, line, "unknown termination kind '" + tokens[0] + "'");
  }
  def.limit = require_nonneg_int(kv, "limit", tokens[0]);
  def.win = require_bool(kv, "win", tokens[0]);
  return def;
}

std::pair<char, std::vector<std::string>> parse_mapping_line(const std::vector<std::string>& tokens,
                                                             int line) {
  // c > name [name ...]
  if (tokens.size() < 3 || tokens[1] != ">" || tokens[0].size() != 1) {
    throw ParseError(ParseErrorKind::BadSyntax, line, "expected '<char> > name [name ...]'");
  }
  char ch = tokens[0][0];
  if (ch == kBlankChar) {
    throw ParseError(ParseErrorKind::BadSyntax, line, "'.' is the reserved blank character");
  }
  std::vector<std::string> names;
  for (size_t i = 2; i < tokens.size(); ++i) {
    if (!is_identifier(tokens[i]) || tokens[i] == kEosToken) {
      throw ParseError(ParseErrorKind::BadSyntax, line, "bad sprite name '" + tokens[i] + "'");
    }
    names.push_back(tokens[i]);
  }
  return {ch, names};
}

}  // namespace

Game parse_game(const std::string& description_text, const std::string& level_text,
                const std::string& name) {
  Game game;
  game.name = name;

  // --- description ---
  std::vector<std::string> lines = split_lines(description_text);
  enum Section { None, Sprites, Interactions, Terminations, Mapping };
  Section current = None;
  bool seen[5] = {false, false, false, false, false};
  std::vector<int> sprite_lines;
  std::vector<int> mapping_lines;

  for (size_t li = 0; li < lines.size(); ++li) {
    int line_no = static_cast<int>(li) + 1;
    const std::string& raw = lines[li];
    std::string text = trim(raw);
    if (text.empty() || text[0] == '#') continue;
    bool indented = raw[0] == ' ' || raw[0] == '\t';

    if (!indented) {
      if (text == "SpriteSet") current = Sprites;
      else if (text == "InteractionSet") current = Interactions;
      else if (text == "TerminationSet") current = Terminations;
      else if (text == "LevelMapping") current = Mapping;
      else {
        throw ParseError(ParseErrorKind::BadSyntax, line_no, "unknown section '" + text + "'");
      }
      if (seen[current]) {
        throw ParseError(ParseErrorKind::BadSyntax, line_no, "duplicate section '" + text + "'");
      }
      seen[current] = true;
      continue;
    }

    if (current == None) {
      throw ParseError(ParseErrorKind::BadSyntax, line_no, "entry before any section header");
    }
    std::vector<std::string> tokens = split_ws(text);
    switch (current) {
      case Sprites:
        game.spec.sprites.push_back(parse_sprite_line(tokens, line_no));
        sprite_lines.push_back(line_no);
        break;
      case Interactions:
        game.spec.interactions.push_back(parse_interaction_line(tokens, line_no));
        break;
      case Terminations:
        game.spec.terminations.push_back(parse_termination_line(tokens, line_no));
        break;
      case Mapping: {
        auto [ch, names] = parse_mapping_line(tokens, line_no);
        if (game.spec.level_mapping.count(ch)) {
          throw ParseError(ParseErrorKind::DuplicateName, line_no,
                           std::string("duplicate mapping for '") + ch + "'");
        }
        game.spec.level_mapping[ch] = std::move(names);
        mapping_lines.push_back(line_no);
        break;
      }
      case None: break;
    }
  }

  const char* section_names[5] = {"", "SpriteSet", "InteractionSet", "TerminationSet", "LevelMapping"};
  for (int s = Sprites; s <= Mapping; ++s) {
    if (!seen[s]) {
      throw ParseError(ParseErrorKind::MissingSection, 0,
                       std::string("missing section ") + section_names[s]);
    }
  }

  // duplicate sprite names, reported at the second definition's line
  for (size_t i = 0; i < game.spec.sprites.size(); ++i) {
    for (size_t j = 0; j < i; ++j) {
      if (game.spec.sprites[i].name == game.spec.sprites[j].name) {
        throw ParseError(ParseErrorKind::DuplicateName, sprite_lines[i],
                         "duplicate sprite '" + game.spec.sprites[i].name + "'");
      }
    }
  }

  // --- level ---
  std::vector<std::string> level_lines = split_lines(level_text);
  // trailing whitespace per row and trailing blank lines are not content
  std::vector<std::pair<int, std::string>> rows;
  for (size_t li = 0; li < level_lines.size(); ++li) {
    std::string row = level_lines[li];
    size_t end = row.find_last_not_of(" \t");
    row = (end == std::string::npos) ? "" : row.substr(0, end + 1);
    if (!row.empty()) rows.emplace_back(static_cast<int>(li) + 1, row);
  }
  // blank lines between rows would make the grid ambiguous
  for (size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].first != rows[i - 1].first + 1) {
      throw ParseError(ParseErrorKind::NonRectangularLevel, rows[i].first,
                       "blank line inside the level grid");
    }
  }
  if (rows.empty()) {
    throw ParseError(ParseErrorKind::NonRectangularLevel, 0, "empty level");
  }
  game.level.height = static_cast<int>(rows.size());
  game.level.width = static_cast<int>(rows[0].second.size());
  for (const auto& [line_no, row] : rows) {
    if (static_cast<int>(row.size()) != game.level.width) {
      throw ParseError(ParseErrorKind::NonRectangularLevel, line_no,
                       "row length " + std::to_string(row.size()) + " != " +
                           std::to_string(game.level.width));
    }
    for (char c : row) game.level.cells.push_back(c);
  }

  validate_game(game);
  return game;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

void validate_game(const Game& game) {
  const GameSpec& spec = game.spec;

  std::set<std::string> names;
  for (const auto& s : spec.sprites) {
    if (!names.insert(s.name).second) {
      throw ParseError(ParseErrorKind::DuplicateName, 0, "duplicate sprite '" + s.name + "'");
    }
  }

  int avatars = 0;
  for (const auto& s : spec.sprites) {
    if (is_avatar_class(s.cls)) ++avatars;
  }
  if (avatars == 0) throw ParseError(ParseErrorKind::NoAvatar, 0, "no avatar sprite defined");
  if (avatars > 1) throw ParseError(ParseErrorKind::DuplicateAvatar, 0, "more than one avatar sprite");

  for (const auto& s : spec.sprites) {
    if (s.spawn_target) {
      if (s.cls != SpriteClass::SpawnPoint && s.cls != SpriteClass::ShootAvatar) {
        throw ParseError(ParseErrorKind::InvalidModifier, 0,
                         "spawn= only valid on SpawnPoint/ShootAvatar ('" + s.name + "')");
      }
      if (!names.count(*s.spawn_target)) {
        throw ParseError(ParseErrorKind::UnresolvedIdentifier, 0,
                         "spawn target '" + *s.spawn_target + "' of '" + s.name + "'");
      }
    }
  }

  for (const auto& i : spec.interactions) {
    if (!names.count(i.actor)) {
      throw ParseError(ParseErrorKind::UnresolvedIdentifier, 0, "interaction actor '" + i.actor + "'");
    }
    if (i.other != kEosToken && !names.count(i.other)) {
      throw ParseError(ParseErrorKind::UnresolvedIdentifier, 0, "interaction other '" + i.other + "'");
    }
    bool needs_target =
        i.effect == EffectKind::TransformTo || i.effect == EffectKind::SpawnBehind;
    if (needs_target != i.effect_target.has_value()) {
      throw ParseError(ParseErrorKind::BadSyntax, 0,
                       std::string("effect ") + to_string(i.effect) +
                           (needs_target ? " requires target=" : " takes no target="));
    }
    if (i.effect_target && !names.count(*i.effect_target)) {
      throw ParseError(ParseErrorKind::UnresolvedIdentifier, 0,
                       "effect target '" + *i.effect_target + "'");
    }
  }

  bool any_win = false, any_loss = false;
  for (const auto& t : spec.terminations) {
    if (t.kind == TerminationKind::SpriteCounter) {
      if (!t.sprite || !names.count(*t.sprite)) {
        throw ParseError(ParseErrorKind::UnresolvedIdentifier, 0,
                         "termination sprite '" + t.sprite.value_or("?") + "'");
      }
    }
    (t.win ? any_win : any_loss) = true;
  }
  if (!any_win) throw ParseError(ParseErrorKind::MissingTermination, 0, "no win termination");
  if (!any_loss) throw ParseError(ParseErrorKind::MissingTermination, 0, "no loss termination");

  // mapping references resolve; the avatar appears under exactly one char
  int avatar_mapped = 0;
  int av = spec.avatar_index();
  for (const auto& [ch, mapped] : spec.level_mapping) {
    if (mapped.empty()) {
      throw ParseError(ParseErrorKind::BadSyntax, 0, std::string("empty mapping for '") + ch + "'");
    }
    for (const auto& n : mapped) {
      if (!names.count(n)) {
        throw ParseError(ParseErrorKind::UnresolvedIdentifier, 0, "mapped sprite '" + n + "'");
      }
      if (n == spec.sprites[av].name) ++avatar_mapped;
    }
  }
  if (avatar_mapped == 0) {
    throw ParseError(ParseErrorKind::NoAvatar, 0, "avatar missing from level mapping");
  }
  if (avatar_mapped > 1) {
    throw ParseError(ParseErrorKind::DuplicateAvatar, 0, "avatar mapped more than once");
  }

  // level grid
  const Level& lvl = game.level;
  if (lvl.width <= 0 || lvl.height <= 0 ||
      lvl.cells.size() != static_cast<size_t>(lvl.width) * lvl.height) {
    throw ParseError(ParseErrorKind::NonRectangularLevel, 0, "malformed level grid");
  }
  char avatar_ch = spec.avatar_char();
  int avatar_cells = 0;
  for (int r = 0; r < lvl.height; ++r) {
    for (int c = 0; c < lvl.width; ++c) {
      char ch = lvl.at(c, r);
      if (ch == kBlankChar) continue;
      if (!spec.level_mapping.count(ch)) {
        throw ParseError(ParseErrorKind::UnknownCharacter, r + 1,
                         std::string("unmapped character '") + ch + "'");
      }
      if (ch == avatar_ch) ++avatar_cells;
    }
  }
  if (avatar_cells == 0) throw ParseError(ParseErrorKind::NoAvatar, 0, "no avatar in level");
  if (avatar_cells > 1) {
    throw ParseError(ParseErrorKind::DuplicateAvatar, 0, "more than one avatar in level");
  }
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

std::pair<std::string, std::string> serialize_game(const Game& game) {
  std::ostringstream desc;
  desc << "SpriteSet\n";
  for (const auto& s : game.spec.sprites) {
    desc << "    " << s.name << " > " << to_string(s.cls);
    if (s.speed) desc << " speed=" << format_number(*s.speed);
    if (s.cooldown) desc << " cooldown=" << *s.cooldown;
    if (s.limit) desc << " limit=" << *s.limit;
    if (s.orientation) desc << " orientation=" << to_string(*s.orientation);
    if (s.spawn_target) desc << " spawn=" << *s.spawn_target;
    desc << "\n";
  }
  desc << "InteractionSet\n";
  for (const auto& i : game.spec.interactions) {
    desc << "    " << i.actor << " " << i.other << " > " << to_string(i.effect);
    if (i.effect_target) desc << " target=" << *i.effect_target;
    if (i.score_change != 0) desc << " scoreChange=" << i.score_change;
    desc << "\n";
  }
  desc << "TerminationSet\n";
  for (const auto& t : game.spec.terminations) {
    if (t.kind == TerminationKind::SpriteCounter) {
      desc << "    SpriteCounter sprite=" << *t.sprite;
    } else {
      desc << "    Timeout";
    }
    desc << " limit=" << t.limit << " win=" << (t.win ? "True" : "False") << "\n";
  }
  desc << "LevelMapping\n";
  for (const auto& [ch, names] : game.spec.level_mapping) {
    desc << "    " << ch << " >";
    for (const auto& n : names) desc << " " << n;
    desc << "\n";
  }

  std::ostringstream lvl;
  for (int r = 0; r < game.level.height; ++r) {
    for (int c = 0; c < game.level.width; ++c) lvl << game.level.at(c, r);
    lvl << "\n";
  }
  return {desc.str(), lvl.str()};
}

}  // namespace forge
