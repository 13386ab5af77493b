#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "endgraph/error.hpp"
#include "endgraph/ordertree.hpp"
#include "endgraph/presentation.hpp"
#include "endgraph/subbase.hpp"

namespace endgraph {

template <class T>
struct Named {
  std::string name;
  T value;
};

struct CorpusSpec {
  std::uint64_t seed = 7;
  std::size_t presentations = 100;
  std::size_t schemes = 100;
  bool fixtures = true;
};

struct Corpus {
  std::vector<Named<GraphPresentation>> presentations;
  std::vector<Named<TreeScheme>> schemes;
};

namespace fixture_text {

inline constexpr const char* fig1 =
    "[core]\nv0\nvinf\n[generators]\nr+ ray\nr- ray\n[edges]\nv0 r+[0]\nv0 r-[0]\n[fans]\nvinf r+ omega\nvinf r- omega\n";
inline constexpr const char* ray = "[generators]\nr ray\n";
inline constexpr const char* ladder_pair = "[generators]\nr ray\ns ray\n[ladders]\nr s\n";
inline constexpr const char* comb = "[generators]\nb ray\n[combs]\nb p\n";

inline constexpr const char* fork = "[segments]\nr finite 2\nL omega\nR omega\n[attach]\nL at r[1]\nR at r[1]\n[root]\nr\n";
inline constexpr const char* omega2 = "[segments]\ns0 omega\ns1 omega\n[attach]\ns1 at top(s0)\n[root]\ns0\n";
inline constexpr const char* comb_tree = "[segments]\nb omega\n[families]\nb tooth.ots\n[root]\nb\n";
inline constexpr const char* tooth = "[segments]\nq omega\n[root]\nq\n";

}  // namespace fixture_text

// Binary splitting to `depth` levels; each leaf continues as an omega chain
// with a second chain above its top.  Depth d has 2^d branches.
inline TreeScheme binary_tree_truncation(std::size_t depth = 1) {
  if (depth < 1 || depth > 10) throw Error(ErrorKind::BoundTooLarge, "truncation depth must lie in 1..10");
  TreeScheme t;
  t.root = "e";
  t.segments.emplace("e", Segment{"e", 1});
  std::vector<std::string> level{""};
  for (std::size_t d = 1; d <= depth; ++d) {
    std::vector<std::string> next;
    for (const auto& w : level)
      for (const char* bit : {"0", "1"}) {
        auto word = w + bit;
        auto id = (d == depth ? "b" : "e") + word;
        t.segments.emplace(id, Segment{id, d == depth ? std::nullopt : std::optional<std::size_t>{1}});
        t.attach.emplace(id, AttachPoint{"e" + w, 0, {}});
        next.push_back(word);
      }
    level = std::move(next);
  }
  for (const auto& w : level) {
    t.segments.emplace("u" + w, Segment{"u" + w, std::nullopt});
    t.attach.emplace("u" + w, AttachPoint{"b" + w, std::nullopt, {}});
  }
  validate_scheme(t);
  return t;
}

// High-rays carrying a top: the truncated branches.
inline std::size_t branch_count(const TreeScheme& t) {
  std::size_t n = 0;
  for (const auto& r : high_rays(t)) n += !tops_of(t, r).empty();
  return n;
}

inline std::vector<Named<GraphPresentation>> fixture_presentations() {
  return {{"fig1", parse_egp(fixture_text::fig1)},
          {"ray", parse_egp(fixture_text::ray)},
          {"ladder_pair", parse_egp(fixture_text::ladder_pair)},
          {"comb", parse_egp(fixture_text::comb)}};
}

inline std::vector<Named<TreeScheme>> fixture_schemes() {
  auto loader = memory_loader({{"tooth.ots", fixture_text::tooth}});
  return {{"fork", parse_ots(fixture_text::fork)},
          {"omega2", parse_ots(fixture_text::omega2)},
          {"comb_tree", parse_ots(fixture_text::comb_tree, loader)},
          {"binary_tree", binary_tree_truncation(1)}};
}

namespace detail {

inline GraphPresentation random_presentation(std::mt19937& rng) {
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  auto coin = [&](double p) { return std::bernoulli_distribution(p)(rng); };
  GraphPresentation p;
  std::size_t ng = 1 + pick(6), nc = pick(7);
  std::vector<std::string> gens, core;
  for (std::size_t i = 0; i < ng; ++i) {
    gens.push_back("g" + std::to_string(i));
    p.generators.emplace(gens.back(), coin(0.15) ? GenKind::Clique : GenKind::Ray);
  }
  for (std::size_t i = 0; i < nc; ++i) {
    core.push_back("c" + std::to_string(i));
    p.core.insert(core.back());
  }
  auto token = [&]() -> VertexToken {
    if (!core.empty() && coin(0.5)) return {core[pick(core.size())], std::nullopt};
    return {gens[pick(ng)], pick(3)};
  };
  std::size_t omega_hubs = std::min<std::size_t>(nc, pick(4));
  for (std::size_t h = 0; h < omega_hubs; ++h)
    for (std::size_t k = 1 + pick(3); k > 0; --k) p.fans.insert({core[h], gens[pick(ng)], Omega{}});
  for (std::size_t k = nc ? pick(3) : 0; k > 0; --k) {
    IndexSet idx;
    for (std::size_t i = 0; i < 3; ++i)
      if (coin(0.5)) idx.push_back(i);
    if (idx.empty()) idx.push_back(pick(3));
    Fan f{core[pick(nc)], gens[pick(ng)], idx};
    bool clash = std::any_of(p.fans.begin(), p.fans.end(),
                             [&](const Fan& g) { return g.vertex == f.vertex && g.generator == f.generator; });
    if (!clash) p.fans.insert(std::move(f));
  }
  for (std::size_t k = pick(4); k > 0; --k) {
    auto a = token(), b = token();
    if (a != b) p.edges.insert(FiniteEdge::make(a, b));
  }
  if (ng > 1)
    for (std::size_t k = pick(3); k > 0; --k) {
      auto a = gens[pick(ng)], b = gens[pick(ng)];
      if (a != b) p.ladders.insert(Ladder::make(a, b));
    }
  std::size_t fam = 0;
  for (const auto& g : gens)
    if (p.is_ray(g) && coin(0.2)) p.combs.insert({g, "p" + std::to_string(fam++)});
  return p;
}

inline TreeScheme random_fragment(std::mt19937& rng, std::size_t budget) {
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  TreeScheme f;
  f.root = "q0";
  bool omega = pick(3) != 0;
  f.segments.emplace("q0", Segment{"q0", omega ? std::nullopt : std::optional<std::size_t>{1 + pick(2)}});
  if (budget > 1 && pick(2) == 0) {
    f.segments.emplace("q1", Segment{"q1", std::nullopt});
    f.attach.emplace("q1", AttachPoint{"q0", omega ? pick(3) : 0, {}});
  }
  return f;
}

inline TreeScheme random_scheme(std::mt19937& rng) {
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  for (;;) {
    TreeScheme t;
    std::size_t total = 1 + pick(6);
    t.root = "s0";
    t.segments.emplace("s0", Segment{"s0", pick(3) == 0 ? std::optional<std::size_t>{1 + pick(3)} : std::nullopt});
    std::size_t used = 1;
    bool family = total > 1 && pick(3) == 0;
    std::size_t top_level = family ? total - 1 - (total > 2 ? pick(2) : 0) : total;
    for (std::size_t k = 1; k < top_level; ++k) {
      auto id = "s" + std::to_string(k);
      auto parent = std::next(t.segments.begin(), static_cast<std::ptrdiff_t>(pick(t.segments.size())))->second;
      AttachPoint at{parent.id, 0, {}};
      if (parent.omega() && pick(2) == 0) at = {parent.id, std::nullopt, pick(3) == 0 ? "a" : ""};
      else at.index = parent.omega() ? pick(4) : pick(*parent.length);
      t.segments.emplace(id, Segment{id, pick(4) == 0 ? std::optional<std::size_t>{1 + pick(2)} : std::nullopt});
      t.attach.emplace(id, at);
      ++used;
    }
    if (family) {
      std::vector<std::string> bases;
      for (const auto& [id, s] : t.segments)
        if (s.omega()) bases.push_back(id);
      if (!bases.empty()) {
        auto frag = random_fragment(rng, total - used);
        t.families.push_back({bases[pick(bases.size())], std::make_shared<const TreeScheme>(std::move(frag)), "frag.ots"});
      }
    }
    validate_scheme(t);
    if (!has_omega_chain(t) || nesting_depth(t) > 2) continue;
    std::size_t segs = t.segments.size();
    for (const auto& f : t.families) segs += f.fragment->segments.size();
    if (segs > 6) continue;
    return t;
  }
}

}  // namespace detail

// Laminar family on at most `max_points` points, the whole ground included.
// Each set owns at most one point outside its children; leaves own exactly one.
inline FiniteSpace random_special_ground(std::mt19937& rng, std::size_t max_points = 12) {
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  for (;;) {
    std::size_t n = 1 + pick(10);
    std::vector<std::size_t> parent(n, 0);
    std::vector<std::size_t> kids(n, 0);
    for (std::size_t i = 1; i < n; ++i) ++kids[parent[i] = pick(i)];
    std::vector<bool> owns(n);
    std::size_t points = 0;
    for (std::size_t i = 0; i < n; ++i) {
      owns[i] = kids[i] <= 1 || pick(2) == 0;
      points += owns[i];
    }
    if (points > max_points) continue;
    std::vector<std::string> names;
    std::vector<Mask> masks(n, 0);
    for (std::size_t i = 0; i < n; ++i)
      if (owns[i]) {
        masks[i] |= Mask{1} << names.size();
        names.push_back("p" + std::to_string(names.size()));
      }
    for (std::size_t i = n; i-- > 1;) masks[parent[i]] |= masks[i];
    auto s = make_space(names);
    s.add("X", masks[0]);
    for (std::size_t i = 1; i < n; ++i) s.add("A" + std::to_string(i), masks[i]);
    return s;
  }
}

// Fixtures first (when asked), then seeded random members; every member validates.
inline Corpus generate_corpus(const CorpusSpec& spec) {
  Corpus c;
  if (spec.fixtures) {
    c.presentations = fixture_presentations();
    c.schemes = fixture_schemes();
  }
  std::mt19937 rng(static_cast<std::mt19937::result_type>(spec.seed));
  for (std::size_t i = 0; i < spec.presentations; ++i) {
    auto p = detail::random_presentation(rng);
    if (!validate(p).ok()) throw Error(ErrorKind::Invalid, "generated presentation fails validation");
    c.presentations.push_back({"p" + std::to_string(i), std::move(p)});
  }
  std::mt19937 srng(static_cast<std::mt19937::result_type>(spec.seed ^ 0x9e3779b9u));
  for (std::size_t i = 0; i < spec.schemes; ++i) c.schemes.push_back({"t" + std::to_string(i), detail::random_scheme(srng)});
  return c;
}

}  // namespace endgraph
