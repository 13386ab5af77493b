#pragma once

// Test-side tree order: explicit down-sets walked from the scheme text, and
// high-rays as explicit node sets, restricted to indices and copies below a cut.

#include <set>
#include <vector>

#include "endgraph/ordertree.hpp"

namespace tree_oracle {

using endgraph::Node;
using endgraph::TreeScheme;

// Nodes strictly below n (indices below `cut` on chains under a top).
inline std::set<Node> below(const TreeScheme& t, const Node& n, std::size_t cut) {
  std::set<Node> out;
  Node cur = n;
  for (;;) {
    const auto& s = endgraph::scheme_at(t, cur.scope);
    std::size_t upto = cur.index ? *cur.index : cut;
    for (std::size_t i = 0; i < upto; ++i) out.insert({cur.scope, cur.segment, i, {}});
    if (cur.segment == s.root) {
      if (cur.scope.empty()) return out;
      auto step = cur.scope.back();
      auto up = cur.scope;
      up.pop_back();
      const auto& parent = endgraph::scheme_at(t, up);
      cur = {up, parent.families[step.family].base, step.copy, {}};
    } else {
      const auto& at = s.attach.at(cur.segment);
      cur = {cur.scope, at.segment, at.index, at.label};
    }
    out.insert(cur);
  }
}

inline bool le(const TreeScheme& t, const Node& a, const Node& b, std::size_t cut) {
  return a == b || below(t, b, cut).count(a) > 0;
}

struct Ray {
  endgraph::Scope scope;
  std::string segment;
  bool operator<(const Ray& o) const { return std::tie(scope, segment) < std::tie(o.scope, o.segment); }
};

// Every high-ray with copy indices below `cut` (one level of families).
inline std::vector<Ray> rays(const TreeScheme& t, std::size_t cut) {
  std::vector<Ray> out;
  for (const auto& [id, seg] : t.segments)
    if (seg.omega()) out.push_back({{}, id});
  for (std::size_t f = 0; f < t.families.size(); ++f)
    for (std::size_t c = 0; c < cut; ++c)
      for (const auto& [id, seg] : t.families[f].fragment->segments)
        if (seg.omega()) out.push_back({{{f, c}}, id});
  return out;
}

inline bool on_ray(const TreeScheme& t, const Node& n, const Ray& r, std::size_t cut) {
  if (n.scope == r.scope && n.segment == r.segment && !n.is_top()) return true;
  return below(t, {r.scope, r.segment, 0, {}}, cut).count(n) > 0;
}

// r in [anchor, excluded]
inline bool in_basic(const TreeScheme& t, const Node& anchor, const std::vector<Node>& excluded, const Ray& r,
                     std::size_t cut) {
  if (!on_ray(t, anchor, r, cut)) return false;
  for (const auto& x : excluded)
    if (on_ray(t, x, r, cut)) return false;
  return true;
}

}  // namespace tree_oracle
