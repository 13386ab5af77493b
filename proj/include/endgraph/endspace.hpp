#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "endgraph/error.hpp"
#include "endgraph/presentation.hpp"

namespace endgraph {

// ---------------------------------------------------------------------------
// descriptors of countable rank <= 1 spaces

struct Sequence {
  std::string family;
  std::string limit;
  auto operator<=>(const Sequence&) const = default;
  bool operator==(const Sequence&) const = default;
};

struct SpaceDescriptor {
  std::set<std::string> isolated;
  std::set<std::string> limits;
  std::set<Sequence> sequences;
  std::set<std::string> free_families;

  bool operator==(const SpaceDescriptor&) const = default;

  // invariant check; empty string when well formed
  std::string problem() const {
    for (const auto& l : limits)
      if (isolated.count(l)) return "point " + l + " is both isolated and a limit";
    for (const auto& s : sequences)
      if (!limits.count(s.limit)) return "sequence " + s.family + " has no limit " + s.limit;
    for (const auto& l : limits)
      if (std::none_of(sequences.begin(), sequences.end(), [&](const Sequence& s) { return s.limit == l; }))
        return "limit " + l + " has no sequence";
    return {};
  }
};

inline SpaceDescriptor canonicalize(const SpaceDescriptor& d) {
  SpaceDescriptor out{d.isolated, d.limits, {}, d.free_families};
  std::map<std::string, std::vector<std::string>> by_limit;
  for (const auto& s : d.sequences) by_limit[s.limit].push_back(s.family);
  for (auto& [limit, fams] : by_limit) {
    std::sort(fams.begin(), fams.end());
    std::string merged;
    for (const auto& f : fams) merged += (merged.empty() ? "" : "+") + f;
    out.sequences.insert({merged, limit});
  }
  return out;
}

struct DescriptorShape {
  std::size_t limits = 0;
  std::size_t free_families = 0;
  std::size_t isolated = 0;
  auto operator<=>(const DescriptorShape&) const = default;
  bool operator==(const DescriptorShape&) const = default;
};

inline DescriptorShape shape(const SpaceDescriptor& d) {
  auto c = canonicalize(d);
  return {c.limits.size(), c.free_families.size(), c.isolated.size()};
}

inline bool homeomorphic(const SpaceDescriptor& a, const SpaceDescriptor& b) { return shape(a) == shape(b); }

// ---------------------------------------------------------------------------

namespace detail {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace detail

struct OmegaQuotient {
  std::vector<std::string> nodes;                         // sorted
  std::set<std::pair<std::string, std::string>> omega_edges;  // first < second
  std::set<Comb> comb_edges;

  bool operator==(const OmegaQuotient&) const = default;
};

inline OmegaQuotient omega_quotient(const GraphPresentation& p) {
  OmegaQuotient q;
  std::set<std::string> nodes;
  for (const auto& [g, k] : p.generators) nodes.insert(g);
  for (const auto& f : p.fans)
    if (f.omega()) {
      nodes.insert(f.vertex);
      q.omega_edges.insert(std::minmax(f.vertex, f.generator));
    }
  for (const auto& l : p.ladders) q.omega_edges.insert({l.a, l.b});
  q.nodes.assign(nodes.begin(), nodes.end());
  q.comb_edges = p.combs;
  return q;
}

// A partition of generators into points, plus the descriptor it induces.
struct EndClasses {
  SpaceDescriptor descriptor;
  std::map<std::string, std::string> point_of;               // generator -> point id
  std::map<std::string, std::vector<std::string>> members;    // point id -> generators
  std::map<std::string, std::vector<std::string>> core_members;  // point id -> core vertices (edge mode)

  std::vector<std::string> points() const {
    std::vector<std::string> out;
    for (const auto& [pt, g] : members) out.push_back(pt);
    return out;
  }
};

namespace detail {

inline std::string point_name(const std::string& first_generator) { return "[" + first_generator + "]"; }

// Builds classes from a union-find over `names` (generators first, then extras).
inline EndClasses classes_from(const GraphPresentation& p, const std::vector<std::string>& names, DisjointSets& ds) {
  EndClasses out;
  std::map<std::size_t, std::string> root_point;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!p.is_generator(names[i])) continue;
    auto r = ds.find(i);
    if (!root_point.count(r)) root_point[r] = point_name(names[i]);  // names are sorted
    out.point_of[names[i]] = root_point[r];
    out.members[root_point[r]].push_back(names[i]);
  }
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (p.is_generator(names[i])) continue;
    auto it = root_point.find(ds.find(i));
    if (it != root_point.end()) out.core_members[it->second].push_back(names[i]);
  }
  for (const auto& [pt, g] : out.members) out.descriptor.isolated.insert(pt);
  for (const auto& c : p.combs) {
    auto it = out.point_of.find(c.base);
    if (it == out.point_of.end()) continue;
    out.descriptor.isolated.erase(it->second);
    out.descriptor.limits.insert(it->second);
    out.descriptor.sequences.insert({c.family, it->second});
  }
  out.descriptor = canonicalize(out.descriptor);
  return out;
}

}  // namespace detail

inline EndClasses edge_end_classes(const GraphPresentation& p) {
  auto q = omega_quotient(p);
  detail::DisjointSets ds(q.nodes.size());
  auto idx = [&](const std::string& s) {
    return static_cast<std::size_t>(std::lower_bound(q.nodes.begin(), q.nodes.end(), s) - q.nodes.begin());
  };
  for (const auto& [a, b] : q.omega_edges) ds.unite(idx(a), idx(b));
  return detail::classes_from(p, q.nodes, ds);
}

inline EndClasses end_classes(const GraphPresentation& p) {
  auto names = p.generator_ids();
  detail::DisjointSets ds(names.size());
  auto idx = [&](const std::string& s) {
    return static_cast<std::size_t>(std::lower_bound(names.begin(), names.end(), s) - names.begin());
  };
  // Fans never merge: the fan vertex alone separates.
  for (const auto& l : p.ladders) ds.unite(idx(l.a), idx(l.b));
  return detail::classes_from(p, names, ds);
}

inline SpaceDescriptor edge_end_space(const GraphPresentation& p) { return edge_end_classes(p).descriptor; }
inline SpaceDescriptor end_space(const GraphPresentation& p) { return end_classes(p).descriptor; }

// ---------------------------------------------------------------------------
// domination

enum class Mode { Vertex, Edge };

inline const char* to_string(Mode m) { return m == Mode::Vertex ? "vertex" : "edge"; }

inline std::string all_vertices_of(const std::string& clique) { return "all-vertices-of(" + clique + ")"; }

inline std::set<std::string> dominators(const GraphPresentation& p, const std::string& endpoint, Mode mode) {
  auto classes = mode == Mode::Vertex ? end_classes(p) : edge_end_classes(p);
  auto it = classes.members.find(endpoint);
  if (it == classes.members.end()) throw Error(ErrorKind::UnknownEndpoint, endpoint);
  std::set<std::string> gens(it->second.begin(), it->second.end());
  std::set<std::string> out;
  for (const auto& g : gens)
    if (p.generators.at(g) == GenKind::Clique) out.insert(all_vertices_of(g));
  if (mode == Mode::Vertex) {
    for (const auto& f : p.fans)
      if (f.omega() && gens.count(f.generator)) out.insert(f.vertex);
  } else if (auto c = classes.core_members.find(endpoint); c != classes.core_members.end()) {
    out.insert(c->second.begin(), c->second.end());
  }
  return out;
}

// End points (vertex classes) that core vertex v edge-dominates.
inline std::vector<std::string> edge_dominated_ends(const GraphPresentation& p, const std::string& v) {
  if (!p.has_omega_fan(v)) return {};
  auto edge = edge_end_classes(p);
  auto vert = end_classes(p);
  std::set<std::string> out;
  for (const auto& [pt, cores] : edge.core_members) {
    if (std::find(cores.begin(), cores.end(), v) == cores.end()) continue;
    for (const auto& g : edge.members.at(pt)) out.insert(vert.point_of.at(g));
  }
  return {out.begin(), out.end()};
}

// ---------------------------------------------------------------------------
// brute-force separator oracle on truncations

struct OracleBudget {
  std::size_t max_nodes = 5'000'000;
  std::optional<std::chrono::milliseconds> time_limit;
};

struct SeparatorVerdict {
  bool separates = false;
  std::vector<std::string> witness;   // removed vertices or edges ("u -- v")
  std::size_t patch_edges = 0;        // finitely supported edges removed for free
  std::size_t nodes_explored = 0;
};

inline std::size_t default_oracle_depth(std::size_t k) { return 3 * k + 3; }

namespace detail {

inline std::vector<std::string> ray_tail(const GraphPresentation& p, const std::string& ray, std::size_t n) {
  std::size_t start = n - (n + 2) / 3;
  std::vector<std::string> out;
  if (p.is_generator(ray)) {
    for (std::size_t i = start; i < n; ++i) out.push_back(generator_vertex(ray, i));
    return out;
  }
  auto slash = ray.find('/');
  if (slash != std::string::npos) {
    std::string fam = ray.substr(0, slash);
    bool known = std::any_of(p.combs.begin(), p.combs.end(), [&](const Comb& c) { return c.family == fam; });
    std::string idx = ray.substr(slash + 1);
    if (known && !idx.empty() && idx.find_first_not_of("0123456789") == std::string::npos) {
      auto i = static_cast<std::size_t>(std::stoull(idx));
      if (i >= n) throw Error(ErrorKind::IndexOutOfRange, "pendant " + ray + " lies beyond depth " + std::to_string(n));
      for (std::size_t j = start; j < n; ++j) out.push_back(pendant_vertex(fam, i, j));
      return out;
    }
  }
  throw Error(ErrorKind::UnknownEndpoint, "not a ray generator or comb pendant: " + ray);
}

class SeparatorSearch {
 public:
  SeparatorSearch(const AnnotatedTruncation& t, Mode mode, std::vector<std::size_t> src, std::vector<std::size_t> dst,
                  std::size_t k, OracleBudget budget)
      : g_(t.graph), mode_(mode), src_(std::move(src)), dst_(std::move(dst)), k_(k), budget_(budget) {
    adj_.resize(g_.vertices.size());
    for (auto [a, b] : g_.edges) {
      auto o = t.origin.at({a, b});
      if (o == EdgeOrigin::Declared || o == EdgeOrigin::FiniteFan) {
        ++patch_;
        continue;
      }
      adj_[a].push_back(b);
      adj_[b].push_back(a);
    }
    for (auto& row : adj_) std::sort(row.begin(), row.end());
    protected_.assign(g_.vertices.size(), false);
    for (auto v : src_) protected_[v] = true;
    for (auto v : dst_) protected_[v] = true;
    removed_v_.assign(g_.vertices.size(), false);
    start_ = std::chrono::steady_clock::now();
  }

  SeparatorVerdict run() {
    SeparatorVerdict out;
    out.separates = search();
    out.nodes_explored = nodes_;
    out.patch_edges = patch_;
    if (out.separates) {
      for (auto v : chosen_v_) out.witness.push_back(g_.vertices[v]);
      for (auto [a, b] : chosen_e_) out.witness.push_back(g_.vertices[a] + " -- " + g_.vertices[b]);
      std::sort(out.witness.begin(), out.witness.end());
    }
    return out;
  }

 private:
  // Shortest path from src to dst avoiding removed items; empty when none.
  std::vector<std::size_t> find_path() const {
    std::vector<std::size_t> prev(g_.vertices.size(), SIZE_MAX);
    std::vector<bool> seen(g_.vertices.size(), false), target(g_.vertices.size(), false);
    for (auto v : dst_) target[v] = true;
    std::queue<std::size_t> q;
    for (auto v : src_) {
      seen[v] = true;
      q.push(v);
    }
    while (!q.empty()) {
      auto v = q.front();
      q.pop();
      if (target[v]) {
        std::vector<std::size_t> path{v};
        while (prev[path.back()] != SIZE_MAX) path.push_back(prev[path.back()]);
        return path;
      }
      for (auto w : adj_[v]) {
        if (seen[w] || removed_v_[w] || removed_e_.count(std::minmax(v, w))) continue;
        seen[w] = true;
        prev[w] = v;
        q.push(w);
      }
    }
    return {};
  }

  void tick() {
    ++nodes_;
    if (nodes_ > budget_.max_nodes)
      throw Error(ErrorKind::BoundTooLarge, "separator search exceeded " + std::to_string(budget_.max_nodes) + " nodes");
    if (budget_.time_limit && (nodes_ & 255) == 0 &&
        std::chrono::steady_clock::now() - start_ > *budget_.time_limit)
      throw Error(ErrorKind::BoundTooLarge, "separator search exceeded its time budget");
  }

  bool search() {
    tick();
    auto path = find_path();
    if (path.empty()) return true;
    if (chosen_v_.size() + chosen_e_.size() == k_) return false;
    if (mode_ == Mode::Vertex) {
      for (auto v : path) {
        if (protected_[v]) continue;
        removed_v_[v] = true;
        chosen_v_.push_back(v);
        if (search()) return true;
        chosen_v_.pop_back();
        removed_v_[v] = false;
      }
    } else {
      for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        auto e = std::minmax(path[i], path[i + 1]);
        removed_e_.insert(e);
        chosen_e_.push_back(e);
        if (search()) return true;
        chosen_e_.pop_back();
        removed_e_.erase(e);
      }
    }
    return false;
  }

  const FiniteGraph& g_;
  Mode mode_;
  std::vector<std::size_t> src_, dst_;
  std::size_t k_;
  OracleBudget budget_;
  std::vector<std::vector<std::size_t>> adj_;
  std::vector<bool> protected_, removed_v_;
  std::set<std::pair<std::size_t, std::size_t>> removed_e_;
  std::vector<std::size_t> chosen_v_;
  std::vector<std::pair<std::size_t, std::size_t>> chosen_e_;
  std::size_t nodes_ = 0;
  std::size_t patch_ = 0;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

// Exhaustive search for at most k vertices (or edges) separating the depth-n
// tails of `a` and `b` in truncate(p, n).  Declared finite edges and finite
// fans form a free patch; vertex separators may not use tail vertices of a, b.
inline SeparatorVerdict separator_oracle(const GraphPresentation& p, const std::string& a, const std::string& b,
                                         Mode mode, std::size_t k, std::size_t n, OracleBudget budget = {}) {
  if (a == b) throw Error(ErrorKind::Invalid, "separator_oracle needs two distinct rays");
  if (n < 3 * k || n == 0) throw Error(ErrorKind::Invalid, "depth must be at least 3k");
  auto t = truncate_annotated(p, n);
  auto ids = [&](const std::vector<std::string>& names) {
    std::vector<std::size_t> out;
    for (const auto& s : names) out.push_back(*t.graph.index_of(s));
    return out;
  };
  auto src = ids(detail::ray_tail(p, a, n));
  auto dst = ids(detail::ray_tail(p, b, n));
  return detail::SeparatorSearch(t, mode, std::move(src), std::move(dst), k, budget).run();
}

inline SeparatorVerdict separator_oracle(const GraphPresentation& p, const std::string& a, const std::string& b,
                                         Mode mode, std::size_t k) {
  return separator_oracle(p, a, b, mode, k, default_oracle_depth(k));
}

// True iff some k <= max_k separates at the default depth.
inline bool oracle_separable(const GraphPresentation& p, const std::string& a, const std::string& b, Mode mode,
                             std::size_t max_k = 3, OracleBudget budget = {}) {
  for (std::size_t k = 0; k <= max_k; ++k)
    if (separator_oracle(p, a, b, mode, k, default_oracle_depth(k), budget).separates) return true;
  return false;
}

}  // namespace endgraph
