#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "forge/errors.hpp"
#include "forge/features.hpp"
#include "forge/vgdl.hpp"
#include "helpers.hpp"

using namespace forge;

TEST_SUITE("features") {

TEST_CASE("the two schema variants have the documented lengths") {
  FeatureSchema term = schema_default(true);
  CHECK(term.rule_length() == 53);
  CHECK(term.level_length() == 360);
  CHECK(term.total_length() == 413);

  FeatureSchema noterm = schema_default(false);
  CHECK(noterm.rule_length() == 40);
  CHECK(noterm.total_length() == 400);

  CHECK(vectorize(testutil::ring_game(), term).size() == 413);
  CHECK(vectorize(testutil::ring_game(), noterm).size() == 400);
}

TEST_CASE("class ids follow declaration order, one-based") {
  CHECK(class_id(SpriteClass::Immovable) == 1);
  CHECK(class_id(SpriteClass::Passive) == 2);
  CHECK(class_id(SpriteClass::Missile) == 3);
  CHECK(class_id(SpriteClass::RandomNPC) == 4);
  CHECK(class_id(SpriteClass::Chaser) == 5);
  CHECK(class_id(SpriteClass::Fleeing) == 6);
  CHECK(class_id(SpriteClass::SpawnPoint) == 7);
  CHECK(class_id(SpriteClass::Portal) == 8);
  CHECK(class_id(SpriteClass::Resource) == 9);
  CHECK(class_id(SpriteClass::MovingAvatar) == 10);
  CHECK(class_id(SpriteClass::ShootAvatar) == 11);
}

TEST_CASE("a tiny game vectorizes to a fully hand-computed vector") {
  Game g = testutil::ring_game();  // avatar + wall ring, StepBack, two terminations
  std::vector<double> v = vectorize(g, schema_default(true));
  REQUIRE(v.size() == 413);

  std::vector<double> expected(413, 0.0);
  expected[0] = 1;   // one Immovable (wall)
  expected[9] = 1;   // one MovingAvatar
  expected[13] = 1;  // one StepBack interaction
  expected[26] = 1;  // actor histogram: MovingAvatar
  expected[28] = 1;  // other histogram: Immovable
  expected[40] = 1;  // one SpriteCounter termination
  expected[41] = 1;  // one Timeout termination
  // tuple 0: the Timeout (declared first) has no sprite class, limit 100
  expected[42] = 0;
  expected[43] = 100;
  // tuple 1: SpriteCounter on the avatar, limit 0
  expected[44] = 10;
  expected[45] = 0;
  expected[50] = 1;  // one winning termination
  expected[51] = 1;  // one losing termination
  expected[52] = 0;  // smallest limit across terminations
  expected[53] = 3;  // width
  expected[54] = 3;  // height
  // 3x3 grid row-major: walls (class 1) ringing the avatar (class 10)
  for (int i = 0; i < 9; ++i) expected[55 + i] = 1;
  expected[55 + 4] = 10;
  // cells beyond the grid stay zero padding

  for (size_t i = 0; i < expected.size(); ++i) {
    INFO("index ", i);
    CHECK(v[i] == expected[i]);
  }
}

TEST_CASE("dropping terminations removes exactly that block") {
  Game g = testutil::ring_game();
  std::vector<double> term = vectorize(g, schema_default(true));
  std::vector<double> noterm = vectorize(g, schema_default(false));
  REQUIRE(term.size() == 413);
  REQUIRE(noterm.size() == 400);
  for (int i = 0; i < 40; ++i) CHECK(noterm[i] == term[i]);
  for (int i = 40; i < 400; ++i) CHECK(noterm[i] == term[i + 13]);
}

TEST_CASE("a blank level contributes only its dimensions") {
  Game g = testutil::ring_game();
  g.level = Level::blank(4, 2);  // hand-surgery: vectorize trusts its input
  std::vector<double> v = vectorize(g, schema_default(true));
  CHECK(v[53] == 4);
  CHECK(v[54] == 2);
  for (int i = 55; i < 413; ++i) CHECK(v[i] == 0.0);
}

TEST_CASE("stacked mapping characters encode the first sprite's class") {
  Game g = parse_game(
      "SpriteSet\n"
      "    avatar > MovingAvatar\n"
      "    gem > Resource\n"
      "    pad > Portal\n"
      "InteractionSet\n"
      "    gem avatar > CollectResource scoreChange=1\n"
      "TerminationSet\n"
      "    SpriteCounter sprite=gem limit=0 win=True\n"
      "    Timeout limit=40 win=False\n"
      "LevelMapping\n"
      "    A > avatar\n"
      "    x > gem pad\n",
      "A.x\n");
  std::vector<double> v = vectorize(g, schema_default(true));
  // cells start at 55: 'A' -> 10, '.' -> 0, 'x' -> Resource (9), not Portal
  CHECK(v[55] == 10);
  CHECK(v[56] == 0);
  CHECK(v[57] == 9);
}

TEST_CASE("only the first four terminations get tuple slots, all still counted") {
  Game g = parse_game(
      "SpriteSet\n"
      "    avatar > MovingAvatar\n"
      "InteractionSet\n"
      "TerminationSet\n"
      "    Timeout limit=10 win=True\n"
      "    Timeout limit=20 win=False\n"
      "    Timeout limit=30 win=False\n"
      "    Timeout limit=40 win=True\n"
      "    Timeout limit=5 win=False\n"
      "LevelMapping\n"
      "    A > avatar\n",
      "A\n");
  std::vector<double> v = vectorize(g, schema_default(true));
  CHECK(v[41] == 5);   // all five timeouts counted
  CHECK(v[43] == 10);  // tuple limits hold the first four only
  CHECK(v[45] == 20);
  CHECK(v[47] == 30);
  CHECK(v[49] == 40);
  CHECK(v[50] == 2);  // win count sees all five
  CHECK(v[51] == 3);
  CHECK(v[52] == 5);  // min limit scans the full list, fifth included
}

TEST_CASE("levels beyond the cell capacity are rejected") {
  Game g = testutil::ring_game();
  g.level = Level::blank(60, 6);  // 360 cells > 358
  CHECK_THROWS_AS(vectorize(g, schema_default(true)), LevelTooLarge);
  g.level = Level::blank(2, 179);  // exactly 358 fits
  CHECK(vectorize(g, schema_default(true)).size() == 413);
}

TEST_CASE("the index map names every slot uniquely and in layout order") {
  for (bool with_term : {true, false}) {
    FeatureSchema schema = schema_default(with_term);
    std::vector<std::string> names = index_map(schema);
    REQUIRE(static_cast<int>(names.size()) == schema.total_length());
    std::set<std::string> uniq(names.begin(), names.end());
    CHECK(uniq.size() == names.size());
  }

  std::vector<std::string> term = index_map(schema_default(true));
  CHECK(term[0] == "count.sprite_class.Immovable");
  CHECK(term[10] == "count.sprite_class.ShootAvatar");
  CHECK(term[11] == "count.effect.KillSprite");
  CHECK(term[17] == "histogram.actor_class.Immovable");
  CHECK(term[28] == "histogram.other_class.Immovable");
  CHECK(term[39] == "histogram.other_class.EOS");
  CHECK(term[40] == "count.termination.SpriteCounter");
  CHECK(term[42] == "termination.0.class_id");
  CHECK(term[52] == "termination.min_limit");
  CHECK(term[53] == "level.width");
  CHECK(term[54] == "level.height");
  CHECK(term[55] == "level.cell.0");
  CHECK(term[412] == "level.cell.357");

  std::vector<std::string> noterm = index_map(schema_default(false));
  CHECK(noterm[39] == "histogram.other_class.EOS");
  CHECK(noterm[40] == "level.width");
}

TEST_CASE("EOS interactions land in the dedicated histogram slot") {
  Game g = parse_game(
      "SpriteSet\n"
      "    avatar > MovingAvatar\n"
      "    m > Missile\n"
      "InteractionSet\n"
      "    m EOS > KillSprite\n"
      "    m avatar > KillBoth\n"
      "TerminationSet\n"
      "    Timeout limit=9 win=True\n"
      "    SpriteCounter sprite=avatar limit=0 win=False\n"
      "LevelMapping\n"
      "    A > avatar\n"
      "    m > m\n",
      "A.m\n");
  std::vector<double> v = vectorize(g, schema_default(true));
  CHECK(v[39] == 1);       // one EOS other
  CHECK(v[28 + 9] == 1);   // one MovingAvatar other
  CHECK(v[17 + 2] == 2);   // the missile is the actor twice
}

TEST_CASE("vectorization is deterministic and purely structural") {
  Game g = testutil::ring_game();
  CHECK(vectorize(g, schema_default(true)) == vectorize(g, schema_default(true)));
  Game renamed = g;
  renamed.name = "other-name";
  CHECK(vectorize(renamed, schema_default(true)) == vectorize(g, schema_default(true)));
}

}  // TEST_SUITE
