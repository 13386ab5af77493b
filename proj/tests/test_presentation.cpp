#include <catch_amalgamated.hpp>

#include "endgraph/corpus.hpp"
#include "endgraph/presentation.hpp"

using namespace endgraph;

namespace {

ErrorKind kind_of(std::string_view text) {
  try {
    parse_egp(text);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("parse succeeded");
  return ErrorKind::Invalid;
}

}  // namespace

TEST_CASE("fig1 presentation parses") {
  auto p = parse_egp(fixture_text::fig1);
  CHECK(p.core == std::set<std::string>{"v0", "vinf"});
  CHECK(p.generators.size() == 2);
  CHECK(p.is_ray("r+"));
  CHECK(p.edges.size() == 2);
  CHECK(p.fans.size() == 2);
  CHECK(p.has_omega_fan("vinf"));
  CHECK_FALSE(p.has_omega_fan("v0"));
  CHECK(validate(p).ok());
}

TEST_CASE("comments, blank lines and index sets") {
  auto p = parse_egp(
      "# header\n[core]\nc d   # two\n\n[generators]\ng ray\nk clique\n[fans]\nc g 2,0,2\nd k omega\n[edges]\nc g[4]\n");
  REQUIRE(p.fans.size() == 2);
  const auto& f = *p.fans.begin();
  CHECK(f.vertex == "c");
  CHECK(std::get<IndexSet>(f.support) == IndexSet{0, 2});
  CHECK(validate(p).ok());
}

TEST_CASE("syntax errors") {
  CHECK(kind_of("[nodes]\nx\n") == ErrorKind::Syntax);
  CHECK(kind_of("x\n") == ErrorKind::Syntax);
  CHECK(kind_of("[generators]\ng tree\n") == ErrorKind::Syntax);
  CHECK(kind_of("[generators]\ng ray extra\n") == ErrorKind::Syntax);
  CHECK(kind_of("[core]\na(b\n") == ErrorKind::Syntax);
  CHECK(kind_of("[core]\na/b\n") == ErrorKind::Syntax);
  CHECK(kind_of("[core]\nv\n[generators]\ng ray\n[edges]\nv g[x]\n") == ErrorKind::Syntax);
  CHECK(kind_of("[core]\nv\n[generators]\ng ray\n[fans]\nv g 1,,2\n") == ErrorKind::Syntax);
  CHECK(kind_of("[core]\nv\n[generators]\nv ray\n") == ErrorKind::DuplicateId);
  CHECK(kind_of("[generators]\nb ray\n[combs]\nb p\nb p\n") == ErrorKind::DuplicateId);
}

TEST_CASE("validation reports every violation kind") {
  auto p = parse_egp(
      "[core]\nv\n[generators]\ng ray\nk clique\n[edges]\nv w\nv v\ng v\n[fans]\nv p omega\n[ladders]\ng g\n"
      "[combs]\nk q\ng p\n");
  auto r = validate(p);
  CHECK(r.count("dangling-reference") == 2);
  CHECK(r.count("self-loop") == 1);
  CHECK(r.count("comb-pendant-fan") == 1);
  CHECK(r.count("self-ladder") == 1);
  CHECK(r.count("comb-base-not-ray") == 1);

  GraphPresentation q;
  q.core = {"v"};
  q.generators = {{"g", GenKind::Ray}};
  q.fans.insert({"v", "g", IndexSet{}});
  q.combs = {{"g", "p"}, {"g", "p2"}};
  CHECK(validate(q).count("empty-fan-set") == 1);
  q.combs.insert({"h", "p"});
  CHECK(validate(q).count("duplicate-family") == 1);
}

TEST_CASE("truncation sizes") {
  // counts worked out by hand for each shape
  auto size = [](const char* text, std::size_t n) {
    auto g = truncate(parse_egp(text), n);
    return std::pair{g.vertices.size(), g.edges.size()};
  };
  CHECK(size(fixture_text::ray, 5) == std::pair<std::size_t, std::size_t>{5, 4});
  CHECK(size(fixture_text::ladder_pair, 4) == std::pair<std::size_t, std::size_t>{8, 10});
  CHECK(size(fixture_text::comb, 4) == std::pair<std::size_t, std::size_t>{20, 19});
  CHECK(size(fixture_text::fig1, 3) == std::pair<std::size_t, std::size_t>{8, 12});
  CHECK(size("[generators]\nk clique\n", 4) == std::pair<std::size_t, std::size_t>{4, 6});

  auto g = truncate(parse_egp(fixture_text::fig1), 3);
  CHECK(g.has_edge("vinf", "r+[2]"));
  CHECK(g.has_edge("v0", "r-[0]"));
  CHECK_FALSE(g.has_edge("v0", "r-[1]"));
  CHECK_THROWS_AS(truncate(parse_egp(fixture_text::fig1), 0), Error);
  CHECK_THROWS_AS(truncate(parse_egp("[core]\nv\n[generators]\ng ray\n[edges]\nv g[7]\n"), 3), Error);
}

TEST_CASE("annotated truncation keeps edge origins") {
  auto t = truncate_annotated(parse_egp(fixture_text::fig1), 3);
  std::map<EdgeOrigin, int> count;
  for (const auto& [e, o] : t.origin) ++count[o];
  CHECK(count[EdgeOrigin::Path] == 4);
  CHECK(count[EdgeOrigin::OmegaFan] == 6);
  CHECK(count[EdgeOrigin::Declared] == 2);
}

TEST_CASE("serialize then parse is the identity on the corpus") {
  auto c = generate_corpus({.seed = 3, .presentations = 60, .schemes = 0});
  for (const auto& [name, p] : c.presentations) {
    INFO(name);
    CHECK(parse_egp(serialize_egp(p)) == p);
  }
}

TEST_CASE("truncation vertex count matches its definition on the corpus") {
  auto c = generate_corpus({.seed = 5, .presentations = 60, .schemes = 0});
  for (const auto& [name, p] : c.presentations) {
    for (std::size_t n : {3u, 6u}) {
      std::size_t expect = p.core.size() + p.generators.size() * n + p.combs.size() * n * n;
      INFO(name << " depth " << n);
      CHECK(truncate(p, n).vertices.size() == expect);
    }
  }
}
