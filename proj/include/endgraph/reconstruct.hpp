#pragma once

#include <algorithm>
#include <cstddef>
#include <deque>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "endgraph/endspace.hpp"
#include "endgraph/error.hpp"
#include "endgraph/ordertree.hpp"
#include "endgraph/rayset.hpp"
#include "endgraph/subbase.hpp"

namespace endgraph {

struct FiniteCover {
  FiniteBasic target;
  std::vector<FiniteBasic> parts;
  int item = 0;                    // 1..4, or 0 for an empty target
  std::optional<std::size_t> x;    // the point whose least subbasic set is the base (items 2-4)
};

namespace detail {

// Largest set strictly inside `within` that contains point p; smallest index on ties.
inline std::optional<std::size_t> largest_inside(const FiniteSpace& s, Mask within, std::size_t p) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < s.size(); ++i) {
    Mask m = s.sets[i];
    if (!(m >> p & 1) || (m & ~within) || m == within) continue;
    if (!best || ((s.sets[*best] & ~m) == 0 && s.sets[*best] != m)) best = i;
  }
  return best;
}

// Largest set V with low ⊆ V ⊊ high (strict at the bottom when `strict_low`); nullopt if none.
inline std::optional<std::size_t> largest_between(const FiniteSpace& s, Mask low, Mask high, bool strict_low) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < s.size(); ++i) {
    Mask m = s.sets[i];
    if ((low & ~m) || (m & ~high) || m == high || m == s.whole()) continue;
    if (strict_low && m == low) continue;
    if (!best || ((s.sets[*best] & ~m) == 0 && s.sets[*best] != m)) best = i;
  }
  return best;
}

}  // namespace detail

inline bool valid_partition(const FiniteSpace& s, const FiniteCover& c) {
  Mask uni = 0;
  for (const auto& p : c.parts) {
    Mask m = p.mask(s);
    if (uni & m) return false;
    uni |= m;
  }
  return uni == c.target.mask(s);
}

// K'[U,F] on a finite space whose family is special.
inline FiniteCover kprime_partition(const FiniteSpace& s, const FiniteBasic& target) {
  auto norm = basis_elements(s, target.base, target.excluded);
  FiniteCover out{norm.normalized, {}, 0, std::nullopt};
  if (norm.empty) return out;
  const Mask u = s.sets[norm.normalized.base];
  const Mask v = norm.set;
  const auto& f = norm.normalized.excluded;

  std::vector<Mask> seen;
  auto add = [&](std::size_t base, std::vector<std::size_t> ex) {
    auto b = basis_elements(s, base, ex);
    if (b.empty || std::find(seen.begin(), seen.end(), b.set) != seen.end()) return;
    seen.push_back(b.set);
    out.parts.push_back(b.normalized);
  };
  // Corrected piece for alpha: its enlargement minus every excluded set it meets and the smaller enlargements.
  auto piece = [&](std::size_t a, const std::vector<std::size_t>& enlarged) {
    Mask ua = s.sets[enlarged[a]];
    std::vector<std::size_t> ex;
    for (std::size_t b = 0; b < f.size(); ++b) {
      if (s.sets[f[b]] & ua) ex.push_back(f[b]);
      Mask ub = s.sets[enlarged[b]];
      if ((ub & ~ua) == 0 && ub != ua) ex.push_back(enlarged[b]);
    }
    add(enlarged[a], ex);
  };

  std::vector<std::size_t> lacking;
  std::vector<std::optional<std::size_t>> ux(s.points.size());
  for (std::size_t p = 0; p < s.points.size(); ++p) {
    if (!(v >> p & 1)) continue;
    ux[p] = detail::largest_inside(s, u, p);
    if (!ux[p]) lacking.push_back(p);
  }
  if (lacking.size() > 1)
    throw Error(ErrorKind::ContextUndecidable, to_string(s, out.target) + " has several points with no smaller set: " +
                                                   s.points[lacking[0]] + ", " + s.points[lacking[1]]);

  if (lacking.empty()) {
    out.item = 1;
    std::vector<std::size_t> tops;
    for (const auto& i : ux)
      if (i && std::find(tops.begin(), tops.end(), *i) == tops.end()) tops.push_back(*i);
    std::vector<std::size_t> enlarged;
    for (auto a : f) {
      Mask ua = s.sets[a];
      auto holder = std::find_if(tops.begin(), tops.end(), [&](std::size_t w) { return (ua & ~s.sets[w]) == 0; });
      std::optional<std::size_t> e;
      if (holder != tops.end()) e = detail::largest_between(s, ua, s.sets[*holder], false);
      enlarged.push_back(e.value_or(a));
    }
    for (auto w : tops) add(w, enlarged);
    for (std::size_t a = 0; a < f.size(); ++a) piece(a, enlarged);
    return out;
  }

  out.x = lacking.front();
  std::vector<std::size_t> enlarged;
  bool any_moved = false;
  for (auto a : f) {
    auto e = detail::largest_between(s, s.sets[a], u, true);
    enlarged.push_back(e.value_or(a));
    any_moved |= e.has_value();
  }
  if (any_moved) {
    out.item = 2;
    add(norm.normalized.base, enlarged);
    for (std::size_t a = 0; a < f.size(); ++a)
      if (enlarged[a] != f[a]) piece(a, enlarged);
    return out;
  }
  if (popcount(v) == 1) {
    out.item = 3;
    out.parts.push_back(norm.normalized);
    return out;
  }
  out.item = 4;
  std::optional<std::size_t> y;
  for (std::size_t p = 0; p < s.points.size(); ++p)
    if ((v >> p & 1) && p != *out.x && (!y || s.points[p] < s.points[*y])) y = p;
  auto uy = *ux[*y];
  add(uy, {});
  auto rest = f;
  rest.push_back(uy);
  add(norm.normalized.base, rest);
  return out;
}

// ---------------------------------------------------------------------------
// T_C on finite grounds, with psi = K'

struct TcNode {
  FiniteBasic set;
  Mask mask = 0;
  std::optional<std::size_t> parent;
  std::size_t depth = 0;
  int item = 0;
  bool stable = false;  // a singleton that K' maps to itself
  std::vector<std::size_t> children;
};

struct TcResult {
  FiniteSpace context;     // the input with the whole ground added if missing
  std::vector<TcNode> nodes;
  TreeScheme scheme;
  bool complete = false;   // every branch ended in a stable node within the depth
  FiniteSpace family() const {
    auto f = make_space(context.points);
    for (std::size_t k = 0; k < nodes.size(); ++k) f.add("n" + std::to_string(k), nodes[k].mask);
    return f;
  }
};

inline SpaceDescriptor discrete_descriptor(const std::vector<std::string>& points) {
  SpaceDescriptor d;
  for (const auto& p : points) d.isolated.insert(p);
  return canonicalize(d);
}

inline TcResult build_tc(FiniteSpace ctx, std::size_t depth) {
  if (depth < 1) throw Error(ErrorKind::Invalid, "depth must be at least 1");
  TcResult out;
  auto root_set = ensure_whole(ctx);
  out.context = ctx;
  const auto& s = out.context;
  out.nodes.push_back({FiniteBasic::make(root_set, {}), s.whole(), std::nullopt, 0, 0, false, {}});
  std::deque<std::size_t> queue{0};
  while (!queue.empty()) {
    auto k = queue.front();
    queue.pop_front();
    auto own = kprime_partition(s, out.nodes[k].set);
    if (!valid_partition(s, own)) throw Error(ErrorKind::Invalid, "K' is not a partition of " + to_string(s, own.target));
    out.nodes[k].item = own.item;
    out.nodes[k].stable = own.item == 3;
    if (out.nodes[k].stable || out.nodes[k].depth >= depth) continue;
    for (const auto& w : own.parts) {
      auto inner = kprime_partition(s, w);
      if (!valid_partition(s, inner)) throw Error(ErrorKind::Invalid, "K' is not a partition of " + to_string(s, inner.target));
      for (const auto& part : inner.parts) {
        auto id = out.nodes.size();
        out.nodes.push_back({part, part.mask(s), k, out.nodes[k].depth + 1, 0, false, {}});
        out.nodes[k].children.push_back(id);
        queue.push_back(id);
      }
    }
  }
  out.complete = true;
  for (const auto& n : out.nodes)
    if (n.children.empty() && !n.stable) out.complete = false;

  // Every node is a one-point chain; a stable node stands for the ray repeating its point.
  auto seg_id = [&](std::size_t k) { return (out.nodes[k].stable ? "x" : "n") + std::to_string(k); };
  for (std::size_t k = 0; k < out.nodes.size(); ++k) {
    const auto& n = out.nodes[k];
    auto id = seg_id(k);
    out.scheme.segments.emplace(id, Segment{id, n.stable ? std::nullopt : std::optional<std::size_t>{1}});
    if (n.parent) out.scheme.attach.emplace(id, AttachPoint{seg_id(*n.parent), 0, {}});
    else out.scheme.root = id;
  }
  validate_scheme(out.scheme);
  return out;
}

// ---------------------------------------------------------------------------
// finite cut of a ray space

struct CutContext {
  FiniteSpace space;
  std::vector<RayRef> rays;   // point index -> ray
  std::vector<Node> nodes;    // set index -> subbasic node
};

// Rays with copy index below `cut`, and the distinct traces of [t,∅] over hat nodes.
inline CutContext cut_context(const TreeScheme& t, std::size_t cut = 8) {
  CutContext out;
  auto hat = hat_subtree(t);
  if (hat.empty()) {
    out.space = make_space({});
    return out;
  }
  RaySpace space(hat);
  std::vector<std::string> names;
  for (const auto& r : space.all().rays) out.rays.push_back({{}, r});
  for (const auto& [key, copies] : space.all().copies)
    for (std::size_t c = 0; c < cut; ++c) out.rays.push_back({{{key.first, c}}, key.second});
  if (out.rays.size() > 64) throw Error(ErrorKind::BoundExceeded, std::to_string(out.rays.size()) + " rays under the cut");
  for (const auto& r : out.rays) names.push_back(space.ray_id(r));
  out.space = make_space(names);
  for (const auto& n : sample_nodes(hat, cut)) {
    auto up = space.up(n);
    Mask m = 0;
    for (std::size_t i = 0; i < out.rays.size(); ++i)
      if (space.contains(up, out.rays[i])) m |= Mask{1} << i;
    if (m == 0 || std::find(out.space.sets.begin(), out.space.sets.end(), m) != out.space.sets.end()) continue;
    out.space.add(to_string(hat, n), m);
    out.nodes.push_back(n);
  }
  return out;
}

// [t,F] as a finite basic set of the cut context.
inline FiniteBasic to_finite(const CutContext& ctx, const TreeScheme& t, const BasicOpen& b) {
  auto hat = hat_subtree(t);
  RaySpace space(hat);
  auto find = [&](const Node& n) {
    auto up = space.up(n);
    Mask m = 0;
    for (std::size_t i = 0; i < ctx.rays.size(); ++i)
      if (space.contains(up, ctx.rays[i])) m |= Mask{1} << i;
    for (std::size_t i = 0; i < ctx.space.size(); ++i)
      if (ctx.space.sets[i] == m) return i;
    throw Error(ErrorKind::InvalidRef, to_string(t, n) + " has no subbasic set under the cut");
  };
  std::vector<std::size_t> ex;
  for (const auto& n : b.excluded) ex.push_back(find(n));
  return FiniteBasic::make(find(b.anchor), std::move(ex));
}

}  // namespace endgraph
