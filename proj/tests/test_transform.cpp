#include <catch_amalgamated.hpp>

#include "endgraph/corpus.hpp"
#include "endgraph/transform.hpp"
#include "flow_oracle.hpp"

using namespace endgraph;

namespace {

// Generators g, h of p lie in one class of q (same generator ids) per the flow oracle.
bool flow_together(const GraphPresentation& q, const std::string& g, const std::string& h, Mode mode) {
  return flow::min_separator(q, g, h, mode, 12, 3) > 3;
}

}  // namespace

TEST_CASE("clique expansion of the fig1 fixture") {
  auto p = parse_egp(fixture_text::fig1);
  auto x = expand_cliques(p);
  REQUIRE(x.map.replaced.size() == 1);
  const auto& k = x.map.replaced.at("vinf");
  CHECK(k == "vinf.k");
  CHECK(x.result.generators.at(k) == GenKind::Clique);
  CHECK_FALSE(x.result.is_core("vinf"));
  CHECK(x.result.ladders.size() == 2);
  CHECK(x.result.fans.empty());
  CHECK(validate(x.result).ok());
  CHECK(end_space(x.result).isolated.size() == 1);

  auto r = verify_correspondence(p, Direction::Rho);
  CHECK(r.pass);
  CHECK(r.single_end_domination);
}

TEST_CASE("expansion spreads finite attachments over distinct clique vertices") {
  auto p = parse_egp("[core]\nc\nd\n[generators]\nr ray\n[fans]\nc r omega\n[edges]\nc d\nc r[5]\n");
  auto x = expand_cliques(p);
  CHECK(x.result.edges.count(FiniteEdge::make({"c.k", 0}, {"d", std::nullopt})));
  CHECK(x.result.edges.count(FiniteEdge::make({"c.k", 1}, {"r", 5})));
  CHECK(x.map.edge_map.size() == 3);
}

TEST_CASE("fresh ids avoid collisions") {
  auto p = parse_egp("[core]\nc\n[generators]\nr ray\nc.k ray\n[fans]\nc r omega\n");
  CHECK(expand_cliques(p).map.replaced.at("c") == "c.k2");
}

TEST_CASE("dominator duplication rejects the fig1 fixture") {
  auto p = parse_egp(fixture_text::fig1);
  try {
    duplicate_dominators(p);
    FAIL("expected a precondition violation");
  } catch (const PreconditionViolation& e) {
    CHECK(e.kind() == ErrorKind::PreconditionViolated);
    CHECK(e.vertex == "vinf");
    CHECK(e.first == "[r+]");
    CHECK(e.second == "[r-]");
  }
  auto r = verify_correspondence(p, Direction::Tau);
  CHECK_FALSE(r.pass);
  CHECK(r.error.find("precondition-violated") == 0);
}

TEST_CASE("dominator duplication splits off the foreign attachments") {
  auto p = parse_egp("[core]\nc\n[generators]\nr ray\ns ray\n[fans]\nc r omega\nc s 0\n[edges]\nc s[3]\n");
  CHECK(end_space(p).isolated.size() == 2);
  auto x = duplicate_dominators(p);
  REQUIRE(x.map.split.size() == 1);
  CHECK(x.map.split[0].vertex == "c");
  CHECK(x.map.split[0].end == "[r]");
  const auto& prime = x.map.split[0].prime;
  CHECK(x.result.edges.count(FiniteEdge::make({"c", std::nullopt}, {prime, std::nullopt})));
  CHECK(x.result.edges.count(FiniteEdge::make({prime, std::nullopt}, {"s", 3})));
  CHECK(x.result.fans.count({prime, "s", IndexSet{0}}));
  CHECK(x.result.fans.count({"c", "r", Omega{}}));
  CHECK(verify_correspondence(p, Direction::Tau).pass);
}

TEST_CASE("envelope of a fanned end") {
  auto p = parse_egp(fixture_text::fig1);
  auto e = compute_envelope(p, "[r+]");
  CHECK(e.dominators == std::set<std::string>{"vinf"});
  CHECK(e.rays == std::vector<std::string>{"r+"});
  CHECK(e.contains({"vinf", std::nullopt}));
  CHECK(e.contains({"r+", 4}));
  CHECK_FALSE(e.contains({"r-", 0}));
  CHECK_THROWS_AS(compute_envelope(p, "[zz]"), Error);
}

TEST_CASE("expansion turns edge-end classes into end classes") {
  auto c = generate_corpus({.seed = 17, .presentations = 40, .schemes = 0});
  for (const auto& [name, p] : c.presentations) {
    auto r = verify_correspondence(p, Direction::Rho);
    INFO(name);
    CHECK(r.pass);
    auto q = expand_cliques(p).result;
    auto edge = edge_end_classes(p);
    auto g = p.generator_ids();
    for (std::size_t i = 0; i < g.size(); ++i)
      for (std::size_t j = i + 1; j < g.size(); ++j) {
        INFO(g[i] << " " << g[j]);
        CHECK(flow_together(q, g[i], g[j], Mode::Vertex) == (edge.point_of.at(g[i]) == edge.point_of.at(g[j])));
      }
  }
}

TEST_CASE("duplication turns end classes into edge-end classes") {
  auto c = generate_corpus({.seed = 19, .presentations = 60, .schemes = 0});
  std::size_t applied = 0;
  for (const auto& [name, p] : c.presentations) {
    INFO(name);
    bool violates = false;
    for (const auto& v : p.core) violates = violates || edge_dominated_ends(p, v).size() > 1;
    auto r = verify_correspondence(p, Direction::Tau);
    CHECK(r.error.empty() == !violates);
    if (violates) continue;
    ++applied;
    CHECK(r.pass);
    auto q = duplicate_dominators(p).result;
    CHECK(validate(q).ok());
    auto g = p.generator_ids();
    for (std::size_t i = 0; i < g.size(); ++i)
      for (std::size_t j = i + 1; j < g.size(); ++j) {
        INFO(g[i] << " " << g[j]);
        CHECK(flow_together(q, g[i], g[j], Mode::Edge) == flow_together(p, g[i], g[j], Mode::Vertex));
      }
  }
  CHECK(applied >= 20);
}
