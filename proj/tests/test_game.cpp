#include <catch_amalgamated.hpp>

#include <filesystem>
#include <random>

#include "endgraph/corpus.hpp"
#include "endgraph/game.hpp"
#include "tree_oracle.hpp"

using namespace endgraph;

namespace {

constexpr std::size_t kRayCut = 3;   // copies per family checked by the oracle
constexpr std::size_t kWalkCut = 64; // chain prefix walked below a top

std::string illegal_reason(const std::function<void()>& f) {
  try {
    f();
  } catch (const IllegalMove& e) {
    return e.reason;
  }
  return "";
}

// Random [t, F] with t and F drawn from the sampled nodes.
BasicOpen random_target(const TreeScheme& t, const std::vector<Node>& nodes, std::mt19937& rng) {
  auto pick = [&] { return nodes[std::uniform_int_distribution<std::size_t>(0, nodes.size() - 1)(rng)]; };
  Node anchor = pick();
  std::vector<Node> ex;
  for (int k = std::uniform_int_distribution<int>(0, 3)(rng); k > 0; --k) {
    Node m = pick();
    if (order_lt(t, anchor, m)) ex.push_back(m);
  }
  return BasicOpen::make(anchor, ex);
}

}  // namespace

TEST_CASE("canonical covers partition the target, checked ray by ray") {
  auto corpus = generate_corpus({.seed = 37, .presentations = 0, .schemes = 60});
  std::mt19937 rng(41);
  std::size_t covers = 0, expected = 12 * corpus.schemes.size();
  for (const auto& [name, t] : corpus.schemes) {
    RaySpace space(t);
    auto nodes = sample_nodes(t, kRayCut);
    auto rays = tree_oracle::rays(t, kRayCut);
    for (int trial = 0; trial < 12; ++trial) {
      auto v = random_target(t, nodes, rng);
      auto c = canonical_cover(space, v);
      INFO(name << " target " << to_string(t, v));
      CHECK_NOTHROW(Referee::validate_cover(space, c, v));
      CHECK(c.kinds.size() == c.parts.size());
      for (const auto& r : rays) {
        INFO("ray " << space.ray_id({r.scope, r.segment}));
        bool in_target = tree_oracle::in_basic(t, v.anchor, v.excluded, r, kWalkCut);
        std::size_t hits = 0;
        for (const auto& p : c.parts) hits += tree_oracle::in_basic(t, p.anchor, p.excluded, r, kWalkCut);
        CHECK(hits == (in_target ? 1u : 0u));
      }
      ++covers;
    }
  }
  CHECK(covers == expected);
}

TEST_CASE("empty cover parts are dropped") {
  auto t = parse_ots(fixture_text::omega2);
  RaySpace space(t);
  auto c = canonical_cover(space, parse_basic_open(t, "s0[0] : s1[2]"));
  // type1 [s0[1], {s0[1]}] and type3 [top(s0), {s1[2]}] are empty
  REQUIRE(c.parts.size() == 1);
  CHECK(c.kinds == std::vector<std::string>{"type2"});
  CHECK(to_string(t, c.parts[0]) == "[s0[1], {top(s0), s1[2]}]");
  CHECK(canonical_cover(space, parse_basic_open(t, "s1[3] : s1[3]")).parts.empty());
}

TEST_CASE("referee rejects illegal moves and covers") {
  auto t = parse_ots(fixture_text::omega2);
  RaySpace space(t);
  auto whole = parse_basic_open(t, "s0[0]");
  auto low = parse_basic_open(t, "s0[0] : s1[0]");

  Referee ref(space);
  CHECK(illegal_reason([&] { ref.move(BasicOpen::make(Node{{}, "zz", 0, {}}, {})); }) == "not-basic");
  ref.move(low);
  CHECK_THROWS_AS(ref.move(low), Error);
  CHECK(illegal_reason([&] { ref.answer({whole, {low}, {"type1"}}); }) == "not-covering");
  CHECK(illegal_reason([&] { ref.answer({low, {}, {}}); }) == "not-covering");
  CHECK(illegal_reason([&] { ref.answer({low, {low, parse_basic_open(t, "s0[2] : s1[0]")}, {"a", "b"}}); }) == "overlap");
  CHECK(illegal_reason([&] { ref.answer({low, {BasicOpen::make(Node{{}, "s0", 0, {}}, {Node{{}, "s9", 0, {}}})}, {"a"}}); }) ==
        "not-basic");
  CHECK(illegal_reason([&] { ref.answer({low, {whole}, {"a"}}); }) == "not-covering");
  ref.answer(canonical_cover(space, low));
  CHECK(illegal_reason([&] { ref.move(whole); }) == "not-contained");
  CHECK_NOTHROW(ref.move(parse_basic_open(t, "s0[4] : s1[0]")));
}

TEST_CASE("adjudication") {
  auto c = fixture_schemes()[2].value;  // comb tree
  RaySpace space(c);
  auto none = adjudicate(space, RaySet{}, std::nullopt);
  CHECK(none.winner == Winner::PlayerI);
  CHECK(none.empty_intersection);

  CHECK(adjudicate(space, space.all(), std::nullopt).reason == "no unique point");
  auto all = adjudicate(space, space.all(), RayRef{{}, "b"});
  CHECK(all.resolved_by_anchor);
  CHECK(all.winner == Winner::PlayerII);
  REQUIRE(all.capture);
  CHECK(all.capture->point == "b");

  auto point = adjudicate(space, space.singleton({{}, "b"}), std::nullopt);
  CHECK(point.winner == Winner::PlayerII);
  CHECK(point.capture->remainder == "{}");

  auto fork = parse_ots(fixture_text::fork);
  RaySpace fs(fork);
  auto two = adjudicate(fs, fs.all(), std::nullopt);
  CHECK(two.winner == Winner::PlayerI);
  CHECK(two.reason == "no unique point");
}

TEST_CASE("Player II wins every corpus match") {
  auto corpus = generate_corpus({.seed = 7, .presentations = 0, .schemes = 100});
  std::size_t matches = 0;
  for (const auto& [name, t] : corpus.schemes) {
    RaySpace space(t);
    std::vector<PlayerIPolicy> policies;
    for (std::uint64_t seed = 0; seed < 50; ++seed) policies.push_back(PlayerIPolicy::random(seed));
    for (std::size_t k = 0; k < 10; ++k) policies.push_back(PlayerIPolicy::oscillate({k % 3, (k + 1) % 2, k}));
    std::vector<RayRef> targets;
    for (const auto& r : tree_oracle::rays(t, 2)) targets.push_back({r.scope, r.segment});
    for (const auto& r : targets) policies.push_back(PlayerIPolicy::descend(r));
    for (auto& p : policies) {
      INFO(name << " " << p.name(space));
      auto m = run_match(space, p, 8);
      REQUIRE(m.result);
      CHECK(m.result->winner == Winner::PlayerII);
      CHECK(m.rounds.size() >= 8);
      if (p.kind() == PlayerIPolicy::Kind::Descend) {
        CHECK(m.limit_ray);
        CHECK(m.result->capture->point == space.ray_id(*m.limit_ray));
      }
      ++matches;
    }
  }
  CHECK(matches > 6000);
}

TEST_CASE("captures on the small fixtures") {
  auto fork = parse_ots(fixture_text::fork);
  RaySpace fs(fork);
  auto left = run_match(fs, PlayerIPolicy::descend({{}, "L"}), 8);
  CHECK(left.result->capture->point == "L");
  CHECK(left.result->capture->remainder == "{}");

  // Anchors climb the bottom chain; the rays above its top stay in the remainder.
  auto t = parse_ots(fixture_text::omega2);
  RaySpace space(t);
  auto bottom = run_match(space, PlayerIPolicy::descend({{}, "s0"}), 8);
  CHECK(bottom.result->capture->point == "s0");
  CHECK(bottom.result->capture->remainder == "{s1}");
  CHECK(bottom.result->capture->k_a == std::vector<std::string>{"[top(s0), {}]"});
}

TEST_CASE("remainders are nested with every subbasic set") {
  auto corpus = generate_corpus({.seed = 7, .presentations = 0, .schemes = 100});
  for (const auto& [name, t] : corpus.schemes) {
    RaySpace space(t);
    auto nodes = sample_nodes(t, 4);
    for (const auto& r : high_rays(t)) {
      if (!r.families.empty()) continue;
      auto m = run_match(space, PlayerIPolicy::descend({{}, r.segment}), 8);
      const auto& a = m.result->remainder_rays;
      for (const auto& n : nodes) {
        auto u = space.up(n);
        INFO(name << " " << r.id << " " << to_string(t, n));
        CHECK((a.disjoint(u) || u.subset_of(a) || a.subset_of(u)));
      }
    }
  }
}

TEST_CASE("descending matches capture the target ray") {
  auto t = binary_tree_truncation(3);
  RaySpace space(t);
  for (const auto& r : tree_oracle::rays(t, 1)) {
    RayRef ref{r.scope, r.segment};
    auto m = run_match(space, PlayerIPolicy::descend(ref), 6);
    INFO(space.ray_id(ref));
    CHECK(m.result->winner == Winner::PlayerII);
    CHECK(m.limit_ray == ref);
  }
}

TEST_CASE("transcripts") {
  auto steps = parse_transcript("part 0\nshrink s1[0]\n\npart 2\nquit\npart 9\n");
  REQUIRE(steps.size() == 2);
  CHECK(steps[0].shrink == "s1[0]");
  CHECK(steps[1].part == 2);
  CHECK_THROWS_AS(parse_transcript("jump 3\n"), Error);
  CHECK_THROWS_AS(parse_transcript("shrink s0[0]\n"), Error);

  auto t = parse_ots(fixture_text::omega2);
  RaySpace space(t);
  auto file = parse_transcript(read_file(std::filesystem::path(FIXTURE_DIR) / "transcripts" / "omega2.play"));
  auto a = run_match(space, PlayerIPolicy::scripted(file), 8);
  auto b = run_match(space, PlayerIPolicy::scripted(file), 8);
  CHECK(a.result->winner == Winner::PlayerII);
  CHECK(a.continuation == "descend-least");
  REQUIRE(a.rounds.size() == b.rounds.size());
  for (std::size_t i = 0; i < a.rounds.size(); ++i) CHECK(a.rounds[i].move == b.rounds[i].move);
  CHECK(a.rounds[1].move == parse_basic_open(t, "s1[0]"));

  auto bad = parse_transcript("part 7\n");
  CHECK_THROWS_AS(run_match(space, PlayerIPolicy::scripted(bad), 4), IllegalMove);
}

TEST_CASE("policy parsing") {
  auto t = parse_ots(fixture_text::omega2);
  RaySpace space(t);
  CHECK(PlayerIPolicy::parse(space, "descend:s1").name(space) == "descend:s1");
  CHECK(PlayerIPolicy::parse(space, "oscillate:1,0.2").name(space) == "oscillate:1.0.2");
  CHECK(PlayerIPolicy::parse(space, "random:5").kind() == PlayerIPolicy::Kind::Random);
  CHECK_THROWS_AS(PlayerIPolicy::parse(space, "descend"), Error);
  CHECK_THROWS_AS(PlayerIPolicy::parse(space, "teleport:1"), Error);
  CHECK_THROWS_AS(PlayerIPolicy::oscillate({}), Error);
  CHECK_THROWS_AS(run_match(space, PlayerIPolicy::random(1), 0), Error);
}
