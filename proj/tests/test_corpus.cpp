#include <catch_amalgamated.hpp>

#include <random>

#include "endgraph/corpus.hpp"

using namespace endgraph;

TEST_CASE("the corpus is reproducible from its seed") {
  auto a = generate_corpus({});
  auto b = generate_corpus({});
  REQUIRE(a.presentations.size() == 104);
  REQUIRE(a.schemes.size() == 104);
  for (std::size_t i = 0; i < a.presentations.size(); ++i) CHECK(a.presentations[i].value == b.presentations[i].value);
  for (std::size_t i = 0; i < a.schemes.size(); ++i) CHECK(a.schemes[i].value == b.schemes[i].value);
  auto c = generate_corpus({.seed = 8});
  std::size_t same = 0;
  for (std::size_t i = 4; i < c.presentations.size(); ++i) same += c.presentations[i].value == a.presentations[i].value;
  CHECK(same < 50);
}

TEST_CASE("fixtures lead the corpus and can be left out") {
  auto a = generate_corpus({.seed = 7, .presentations = 3, .schemes = 2});
  CHECK(a.presentations[0].name == "fig1");
  CHECK(a.presentations[4].name == "p0");
  CHECK(a.schemes[3].name == "binary_tree");
  CHECK(a.schemes[4].name == "t0");
  auto bare = generate_corpus({.seed = 7, .presentations = 3, .schemes = 2, .fixtures = false});
  CHECK(bare.presentations.size() == 3);
  CHECK(bare.presentations[0].value == a.presentations[4].value);
}

TEST_CASE("generated members respect their bounds") {
  auto c = generate_corpus({.seed = 71, .presentations = 200, .schemes = 200, .fixtures = false});
  for (const auto& [name, p] : c.presentations) {
    INFO(name);
    CHECK(validate(p).ok());
    CHECK(p.generators.size() <= 6);
    CHECK(p.core.size() <= 6);
  }
  for (const auto& [name, t] : c.schemes) {
    INFO(name);
    CHECK_NOTHROW(validate_scheme(t));
    CHECK(nesting_depth(t) <= 2);
    CHECK(t.segments.size() <= 6);
    CHECK_FALSE(hat_subtree(t).empty());
  }
}

TEST_CASE("truncations of the binary tree") {
  for (std::size_t d = 1; d <= 10; ++d) {
    auto t = binary_tree_truncation(d);
    CHECK(branch_count(t) == (std::size_t{1} << d));
    CHECK(high_rays(t).size() == (std::size_t{1} << (d + 1)));
  }
  CHECK_THROWS_AS(binary_tree_truncation(0), Error);
  CHECK_THROWS_AS(binary_tree_truncation(11), Error);
}

TEST_CASE("random special grounds are laminar and small") {
  std::mt19937 rng(73);
  for (int k = 0; k < 200; ++k) {
    auto s = random_special_ground(rng);
    CHECK(s.points.size() <= 12);
    CHECK(s.ids[0] == "X");
    CHECK(s.sets[0] == s.whole());
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t j = 0; j < s.size(); ++j) {
        Mask a = s.sets[i], b = s.sets[j];
        CHECK(((a & b) == 0 || (a & ~b) == 0 || (b & ~a) == 0));
      }
  }
}
