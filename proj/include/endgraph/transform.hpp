#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "endgraph/endspace.hpp"
#include "endgraph/presentation.hpp"

namespace endgraph {

struct Envelope {
  std::string end;
  std::set<std::string> dominators;  // core names and all-vertices-of(k) tokens
  std::vector<std::string> rays;     // every generator of the end's class

  // Membership of a presented vertex in D ∪ V(r) over r in rays.
  bool contains(const VertexToken& t) const {
    if (!t.index) return dominators.count(t.name) > 0;
    return std::find(rays.begin(), rays.end(), t.name) != rays.end();
  }
  bool contains_generator(const std::string& g) const {
    return std::find(rays.begin(), rays.end(), g) != rays.end();
  }
};

inline Envelope compute_envelope(const GraphPresentation& p, const std::string& end) {
  auto classes = end_classes(p);
  auto it = classes.members.find(end);
  if (it == classes.members.end()) throw Error(ErrorKind::UnknownEndpoint, end);
  return {end, dominators(p, end, Mode::Vertex), it->second};
}

namespace detail {

inline std::string fresh_id(const GraphPresentation& p, const std::string& stem) {
  std::set<std::string> taken(p.core.begin(), p.core.end());
  for (const auto& [g, k] : p.generators) taken.insert(g);
  for (const auto& c : p.combs) taken.insert(c.family);
  if (!taken.count(stem)) return stem;
  for (int i = 2;; ++i)
    if (auto s = stem + std::to_string(i); !taken.count(s)) return s;
}

}  // namespace detail

struct ExpansionMap {
  std::map<std::string, std::string> replaced;                      // v -> clique k_v
  std::vector<std::pair<std::string, std::string>> edge_map;        // source edge -> image edge
};

struct Expansion {
  GraphPresentation result;
  ExpansionMap map;
};

// Every core vertex with an omega fan becomes an infinite clique; its edges
// land on distinct clique vertices.
inline Expansion expand_cliques(const GraphPresentation& p) {
  Expansion out{p, {}};
  auto& q = out.result;
  std::map<std::string, std::size_t> next_index;
  for (const auto& v : p.core) {
    if (!p.has_omega_fan(v)) continue;
    auto k = detail::fresh_id(q, v + ".k");
    out.map.replaced[v] = k;
    q.core.erase(v);
    q.generators.emplace(k, GenKind::Clique);
    next_index[k] = 0;
  }
  if (out.map.replaced.empty()) return out;

  auto fresh_vertex = [&](const std::string& k) { return VertexToken{k, next_index[k]++}; };
  q.fans.clear();
  for (const auto& f : p.fans) {
    auto it = out.map.replaced.find(f.vertex);
    if (it == out.map.replaced.end()) {
      q.fans.insert(f);
      continue;
    }
    const auto& k = it->second;
    if (f.omega()) {
      q.ladders.insert(Ladder::make(k, f.generator));
      out.map.edge_map.emplace_back(f.vertex + " -- " + f.generator + "[*]", k + "[i] -- " + f.generator + "[i]");
    } else {
      for (auto i : std::get<IndexSet>(f.support)) {
        VertexToken src{f.generator, i};
        auto dst = fresh_vertex(k);
        q.edges.insert(FiniteEdge::make(dst, src));
        out.map.edge_map.emplace_back(f.vertex + " -- " + src.str(), dst.str() + " -- " + src.str());
      }
    }
  }
  q.edges.clear();
  for (const auto& e : p.edges) {
    auto image = [&](const VertexToken& t) {
      auto it = t.index ? out.map.replaced.end() : out.map.replaced.find(t.name);
      return it == out.map.replaced.end() ? t : fresh_vertex(it->second);
    };
    auto a = image(e.a);
    auto b = image(e.b);
    q.edges.insert(FiniteEdge::make(a, b));
    out.map.edge_map.emplace_back(e.a.str() + " -- " + e.b.str(), a.str() + " -- " + b.str());
  }
  return out;
}

class PreconditionViolation : public Error {
 public:
  PreconditionViolation(std::string vertex, std::string first, std::string second)
      : Error(ErrorKind::PreconditionViolated, "(" + vertex + ", " + first + ", " + second + ")"),
        vertex(std::move(vertex)),
        first(std::move(first)),
        second(std::move(second)) {}

  std::string vertex, first, second;
};

struct Split {
  std::string vertex;
  std::string prime;
  std::string end;
};

struct DuplicationMap {
  std::vector<Split> split;
};

struct Duplication {
  GraphPresentation result;
  DuplicationMap map;
};

// Throws PreconditionViolation naming the first core vertex that
// edge-dominates two ends.
inline void check_duplication_precondition(const GraphPresentation& p) {
  for (const auto& v : p.core) {
    auto ends = edge_dominated_ends(p, v);
    if (ends.size() >= 2) throw PreconditionViolation(v, ends[0], ends[1]);
  }
}

inline Duplication duplicate_dominators(const GraphPresentation& p) {
  check_duplication_precondition(p);
  Duplication out{p, {}};
  auto& q = out.result;
  std::map<std::string, std::pair<std::string, Envelope>> env;  // v -> (v', envelope)
  for (const auto& v : p.core) {
    auto ends = edge_dominated_ends(p, v);
    if (ends.empty()) continue;
    auto prime = detail::fresh_id(q, v + ".prime");
    q.core.insert(prime);
    env.emplace(v, std::pair{prime, compute_envelope(p, ends.front())});
    out.map.split.push_back({v, prime, ends.front()});
  }
  if (env.empty()) return out;

  // tau_v: attachments into the envelope stay on v, the rest move to v'.
  auto side = [&](const std::string& v, const VertexToken& other) {
    const auto& [prime, e] = env.at(v);
    return e.contains(other) ? v : prime;
  };
  q.fans.clear();
  for (const auto& f : p.fans) {
    if (!env.count(f.vertex)) {
      q.fans.insert(f);
      continue;
    }
    const auto& [prime, e] = env.at(f.vertex);
    q.fans.insert({e.contains_generator(f.generator) ? f.vertex : prime, f.generator, f.support});
  }
  q.edges.clear();
  for (const auto& e : p.edges) {
    auto a = e.a, b = e.b;
    if (!e.a.index && env.count(e.a.name)) a.name = side(e.a.name, e.b);
    if (!e.b.index && env.count(e.b.name)) b.name = side(e.b.name, e.a);
    q.edges.insert(FiniteEdge::make(a, b));
  }
  for (const auto& [v, pe] : env) q.edges.insert(FiniteEdge::make({v, std::nullopt}, {pe.first, std::nullopt}));
  return out;
}

// ---------------------------------------------------------------------------

enum class Direction { Rho, Tau };

inline const char* to_string(Direction d) { return d == Direction::Rho ? "rho" : "tau"; }

struct CorrespondenceReport {
  Direction direction = Direction::Rho;
  bool pass = false;
  SpaceDescriptor source;   // edge_end_space(p) for rho, end_space(p) for tau
  SpaceDescriptor image;    // end_space(p') for rho, edge_end_space(p') for tau
  bool single_end_domination = true;
  std::vector<std::string> violations;
  std::vector<std::string> notes;
  std::string error;
};

// Every vertex of p edge-dominates at most one end; returns offending lines.
inline std::vector<std::string> multi_end_dominators(const GraphPresentation& p) {
  std::vector<std::string> out;
  for (const auto& v : p.core)
    if (auto ends = edge_dominated_ends(p, v); ends.size() > 1) out.push_back(v + " edge-dominates " + ends[0] + " and " + ends[1]);
  auto edge = edge_end_classes(p);
  auto vert = end_classes(p);
  for (const auto& [pt, gens] : edge.members) {
    std::set<std::string> ends;
    for (const auto& g : gens) ends.insert(vert.point_of.at(g));
    if (ends.size() < 2) continue;
    for (const auto& g : gens)
      if (p.generators.at(g) == GenKind::Clique) out.push_back(all_vertices_of(g) + " edge-dominates " + std::to_string(ends.size()) + " ends");
  }
  return out;
}

inline CorrespondenceReport verify_correspondence(const GraphPresentation& p, Direction d) {
  CorrespondenceReport r;
  r.direction = d;
  if (d == Direction::Rho) {
    auto x = expand_cliques(p);
    r.source = edge_end_space(p);
    r.image = end_space(x.result);
    r.violations = multi_end_dominators(x.result);
    r.single_end_domination = r.violations.empty();
    r.pass = homeomorphic(r.source, r.image) && r.single_end_domination;
    return r;
  }
  r.source = end_space(p);
  try {
    auto x = duplicate_dominators(p);
    r.image = edge_end_space(x.result);
    r.pass = homeomorphic(r.source, r.image);
  } catch (const PreconditionViolation& e) {
    r.error = e.what();
    r.violations.push_back(e.vertex + " edge-dominates " + e.first + " and " + e.second);
    return r;
  }
  // Flag classes whose vertex- and edge-mode dominators differ on core vertices.
  auto vert = end_classes(p);
  auto edge = edge_end_classes(p);
  for (const auto& [pt, gens] : vert.members) {
    auto strip_tokens = [](std::set<std::string> s) {
      std::erase_if(s, [](const std::string& x) { return x.rfind("all-vertices-of(", 0) == 0; });
      return s;
    };
    auto a = strip_tokens(dominators(p, pt, Mode::Vertex));
    auto b = strip_tokens(dominators(p, edge.point_of.at(gens.front()), Mode::Edge));
    if (a != b) r.notes.push_back("dominator modes differ at " + pt);
  }
  return r;
}

}  // namespace endgraph
