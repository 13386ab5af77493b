#include <catch_amalgamated.hpp>

#include <filesystem>
#include <random>

#include "endgraph/corpus.hpp"
#include "endgraph/reconstruct.hpp"

using namespace endgraph;
namespace fs = std::filesystem;

namespace {

FiniteSpace ground(const std::string& name) {
  return parse_ground(read_file(fs::path(FIXTURE_DIR) / "grounds" / (name + ".ground")));
}

// Every subset Y (closed, the grounds are discrete) and every subfamily G:
// traces of G on Y pairwise meeting but with empty common trace is a failure.
bool brute_hereditarily_complete(const FiniteSpace& f) {
  const std::size_t n = f.points.size(), m = f.size();
  for (Mask y = 0; y < (Mask{1} << n); ++y)
    for (Mask g = 1; g < (Mask{1} << m); ++g) {
      Mask meet = y;
      bool pairwise = true;
      for (std::size_t i = 0; i < m && pairwise; ++i) {
        if (!(g >> i & 1)) continue;
        meet &= f.sets[i];
        for (std::size_t j = i + 1; j < m; ++j)
          if ((g >> j & 1) && (f.sets[i] & f.sets[j] & y) == 0) pairwise = false;
        if ((f.sets[i] & y) == 0) pairwise = false;
      }
      if (pairwise && meet == 0) return false;
    }
  return true;
}

FiniteSpace random_family(std::mt19937& rng, bool laminar) {
  if (laminar) return random_special_ground(rng, 7);
  std::size_t n = std::uniform_int_distribution<std::size_t>(2, 6)(rng);
  std::vector<std::string> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back("p" + std::to_string(i));
  auto s = make_space(pts);
  std::size_t m = std::uniform_int_distribution<std::size_t>(1, 7)(rng);
  for (std::size_t i = 0; i < m; ++i)
    s.add("S" + std::to_string(i), std::uniform_int_distribution<Mask>(1, s.whole())(rng));
  return s;
}

Mask masks_union(const FiniteSpace& s, const std::vector<FiniteBasic>& parts, bool& disjoint) {
  Mask uni = 0;
  disjoint = true;
  for (const auto& p : parts) {
    Mask m = s.sets[p.base];
    for (auto e : p.excluded) m &= ~s.sets[e];
    disjoint = disjoint && (uni & m) == 0;
    uni |= m;
  }
  return uni;
}

}  // namespace

TEST_CASE("ground parsing") {
  auto g = ground("kprime_item4");
  CHECK(g.points == std::vector<std::string>{"a", "b", "c"});
  CHECK(g.sets[g.set_index("A")] == 1);
  CHECK_THROWS_AS(parse_ground("[points]\na a\n"), Error);
  CHECK_THROWS_AS(parse_ground("[points]\na\n[sets]\nS b\n"), Error);
  CHECK_THROWS_AS(parse_ground("[points]\na\n[sets]\nS a\nS a\n"), Error);
  auto lam = ground("laminar4");
  lam.topology = parse_topology(lam, read_file(fs::path(FIXTURE_DIR) / "grounds" / "laminar4.topology"));
  CHECK(lam.topology->size() > 0);
}

TEST_CASE("specialness of finite families") {
  CHECK(check_special(ground("chain3")).pass());
  CHECK(check_special(ground("laminar4")).pass());
  auto tri = check_special(ground("triangle"));
  CHECK_FALSE(tri.pass());
  CHECK_FALSE(tri.nested.pass);
  CHECK(tri.nested.witness == "AB BC");
  auto lam = check_special(ground("laminar4"));
  CHECK(lam.layers.size() == 3);
}

TEST_CASE("small explicit families") {
  auto two = make_space({"a", "b"});
  two.add("A", 1);
  two.add("AB", 3);
  two.add("B", 2);
  auto r = check_special(two);
  CHECK(r.pass());
  CHECK(r.layers.size() == 2);
  auto bc = make_space({"a", "b", "c"});
  bc.add("AB", 3);
  bc.add("BC", 6);
  CHECK(check_special(bc).nested.witness == "AB BC");
  auto one = make_space({"a", "b"});
  one.add("A", 1);
  CHECK(check_hereditary_completeness(one).pass);
}

TEST_CASE("declared topologies make clopen a real check") {
  auto s = make_space({"a", "b"});
  s.add("A", 1);
  s.topology = std::vector<Mask>{0, 1, 3};  // Sierpinski: {b} is not open
  CHECK_FALSE(check_special(s).clopen.pass);
  s.topology = std::vector<Mask>{0, 1, 2, 3};
  CHECK(check_special(s).clopen.pass);
}

TEST_CASE("specialness of tree grounds") {
  for (const auto& [name, t] : fixture_schemes()) {
    INFO(name);
    CHECK(check_special(t).pass());
  }
  auto corpus = generate_corpus({.seed = 43, .presentations = 0, .schemes = 40});
  for (const auto& [name, t] : corpus.schemes) {
    INFO(name);
    CHECK(check_special(t, 4).pass());
  }
}

TEST_CASE("random laminar grounds are special") {
  std::mt19937 rng(47);
  for (int k = 0; k < 100; ++k) {
    auto s = random_special_ground(rng);
    INFO(s.str(s.whole()));
    CHECK(check_special(s).pass());
    CHECK(s.points.size() <= 12);
  }
}

TEST_CASE("hereditary completeness agrees with exhaustive search") {
  std::mt19937 rng(53);
  std::size_t failing = 0;
  for (int k = 0; k < 300; ++k) {
    auto f = random_family(rng, k % 3 == 0);
    auto r = check_hereditary_completeness(f);
    bool brute = brute_hereditarily_complete(f);
    INFO(k);
    CHECK(r.pass == brute);
    if (!r.pass) {
      ++failing;
      Mask meet = r.witness_ground;
      for (const auto& id : r.witness_family) {
        Mask a = f.sets[f.set_index(id)] & r.witness_ground;
        CHECK(a != 0);
        for (const auto& other : r.witness_family) CHECK((a & f.sets[f.set_index(other)]) != 0);
        meet &= a;
      }
      CHECK(meet == 0);
    }
    if (k % 3 == 0) CHECK(r.pass);
  }
  CHECK(failing > 10);
  CHECK_FALSE(check_hereditary_completeness(ground("triangle")).pass);
  CHECK_THROWS_AS(check_hereditary_completeness(make_space({"a", "b", "c"}), 2), Error);
}

TEST_CASE("basis elements keep the maximal excluded sets") {
  auto g = ground("chain3");
  auto b = basis_elements(g, g.set_index("X"), {g.set_index("BC"), g.set_index("B")});
  CHECK(b.normalized.excluded.size() == 1);
  CHECK(g.ids[b.normalized.excluded[0]] == "BC");
  CHECK_THROWS_AS(basis_elements(g, 99, {}), Error);
  auto k = ground("kprime_item4");
  CHECK(basis_elements(k, k.set_index("U"), {k.set_index("A")}).set == k.mask_of({"b", "c"}));
}

TEST_CASE("basis elements agree with set difference") {
  std::mt19937 rng(67);
  for (int k = 0; k < 100; ++k) {
    auto s = random_special_ground(rng, 8);
    for (std::size_t u = 0; u < s.size(); ++u)
      for (Mask pick = 0; pick < (Mask{1} << std::min<std::size_t>(s.size(), 6)); ++pick) {
        std::vector<std::size_t> f;
        Mask diff = s.sets[u];
        for (std::size_t j = 0; j < s.size() && j < 6; ++j)
          if (pick >> j & 1) f.push_back(j), diff &= ~s.sets[j];
        auto b = basis_elements(s, u, f);
        CHECK(b.set == diff);
        CHECK(b.empty == (diff == 0));
        CHECK(b.normalized.mask(s) == diff);
      }
  }
}

TEST_CASE("K' on the item-4 ground") {
  auto g = ground("kprime_item4");
  auto c = kprime_partition(g, FiniteBasic::make(g.set_index("U"), {g.set_index("A")}));
  CHECK(c.item == 4);
  REQUIRE(c.x);
  CHECK(g.points[*c.x] == "c");
  bool disjoint = false;
  CHECK(masks_union(g, c.parts, disjoint) == g.mask_of({"b", "c"}));
  CHECK(disjoint);
  REQUIRE(c.parts.size() == 2);
  CHECK(to_string(g, c.parts[0]) == "[B, {}]");
  // Whole target: c has no smaller set, so this is the item-4 split as well.
  auto whole = kprime_partition(g, FiniteBasic::make(g.set_index("U"), {}));
  CHECK(whole.item == 4);
  CHECK(masks_union(g, whole.parts, disjoint) == g.whole());
  CHECK(disjoint);
  CHECK(whole.parts.size() == 2);
  auto single = kprime_partition(g, FiniteBasic::make(g.set_index("A"), {}));
  CHECK(single.item == 3);
  CHECK(kprime_partition(g, FiniteBasic::make(g.set_index("A"), {g.set_index("U")})).parts.empty());
}

TEST_CASE("K' partitions random special grounds") {
  std::mt19937 rng(59);
  std::size_t covers = 0;
  for (int k = 0; k < 200; ++k) {
    auto s = random_special_ground(rng);
    for (std::size_t base = 0; base < s.size(); ++base) {
      std::vector<std::size_t> ex;
      for (std::size_t j = 0; j < s.size(); ++j)
        if (j != base && std::bernoulli_distribution(0.3)(rng)) ex.push_back(j);
      auto target = FiniteBasic::make(base, ex);
      auto c = kprime_partition(s, target);
      INFO(to_string(s, target));
      bool disjoint = false;
      CHECK(masks_union(s, c.parts, disjoint) == target.mask(s));
      CHECK(disjoint);
      CHECK(c.item >= 0);
      CHECK(c.item <= 4);
      for (const auto& p : c.parts) CHECK(p.mask(s) != 0);
      ++covers;
    }
  }
  CHECK(covers > 500);
}

TEST_CASE("strategy tree on a discrete three-point ground") {
  auto s = make_space({"a", "b", "c"});
  s.add("A", 1);
  s.add("B", 2);
  s.add("C", 4);
  auto tc = build_tc(s, 4);
  CHECK(tc.complete);
  REQUIRE(tc.nodes.size() == 4);
  CHECK(tc.nodes[0].children.size() == 3);
  for (std::size_t k = 1; k < 4; ++k) {
    CHECK(popcount(tc.nodes[k].mask) == 1);
    CHECK(tc.nodes[k].stable);
  }
  CHECK(homeomorphic(rayspace_descriptor(tc.scheme), discrete_descriptor(s.points)));
  CHECK(check_special(tc.scheme).pass());
  CHECK_THROWS_AS(build_tc(s, 0), Error);
}

TEST_CASE("strategy trees on random special grounds") {
  std::mt19937 rng(61);
  for (int k = 0; k < 100; ++k) {
    auto s = random_special_ground(rng, 8);
    auto tc = build_tc(s, 12);
    INFO(k);
    CHECK(tc.complete);
    std::size_t stable = 0;
    for (const auto& n : tc.nodes) stable += n.stable;
    CHECK(stable == s.points.size());
    CHECK(check_special(tc.scheme).pass());
    CHECK(check_hereditary_completeness(tc.family()).pass);
    CHECK(homeomorphic(rayspace_descriptor(tc.scheme), discrete_descriptor(s.points)));
    // local basis: the singleton of every point is a node
    for (std::size_t p = 0; p < s.points.size(); ++p)
      CHECK(std::any_of(tc.nodes.begin(), tc.nodes.end(), [&](const TcNode& n) { return n.mask == Mask{1} << p; }));
  }
}

TEST_CASE("strategy tree on the fork's ray space") {
  auto fork = parse_ots(fixture_text::fork);
  auto tc = build_tc(cut_context(fork).space, 6);
  CHECK(tc.complete);
  CHECK(tc.nodes.size() == 3);
  CHECK(homeomorphic(rayspace_descriptor(tc.scheme), rayspace_descriptor(fork)));
}

TEST_CASE("cut contexts of tree grounds") {
  auto comb = fixture_schemes()[2].value;
  auto ctx = cut_context(comb, 3);
  CHECK(ctx.rays.size() == 4);
  CHECK(check_special(ctx.space).pass());
  auto fin = to_finite(ctx, comb, parse_basic_open(comb, "b[0] : b[2]"));
  CHECK(popcount(fin.mask(ctx.space)) == 2);
  CHECK(cut_context(parse_ots("[segments]\nr finite 2\n[root]\nr\n")).rays.empty());
}
