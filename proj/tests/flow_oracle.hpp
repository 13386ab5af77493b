#pragma once

// Test-side separation oracle: Menger via unit-capacity max flow on the
// depth-n truncation, with declared finite edges and finite fans removed.

#include <algorithm>
#include <climits>
#include <queue>
#include <string>
#include <vector>

#include "endgraph/endspace.hpp"
#include "endgraph/presentation.hpp"

namespace flow {

class MaxFlow {
 public:
  explicit MaxFlow(int n) : head_(n, -1) {}
  void arc(int u, int v, int cap) {
    to_.push_back(v), cap_.push_back(cap), next_.push_back(head_[u]), head_[u] = static_cast<int>(to_.size()) - 1;
    to_.push_back(u), cap_.push_back(0), next_.push_back(head_[v]), head_[v] = static_cast<int>(to_.size()) - 1;
  }
  // Flow value, stopping once it exceeds `cap`.
  int run(int s, int t, int cap) {
    int total = 0;
    while (total <= cap) {
      std::vector<int> via(head_.size(), -1);
      std::queue<int> q;
      q.push(s);
      via[s] = -2;
      while (!q.empty() && via[t] == -1) {
        int u = q.front();
        q.pop();
        for (int e = head_[u]; e != -1; e = next_[e])
          if (cap_[e] > 0 && via[to_[e]] == -1) via[to_[e]] = e, q.push(to_[e]);
      }
      if (via[t] == -1) break;
      for (int v = t; v != s; v = to_[via[v] ^ 1]) --cap_[via[v]], ++cap_[via[v] ^ 1];
      ++total;
    }
    return total;
  }

 private:
  std::vector<int> head_, to_, cap_, next_;
};

inline std::vector<std::string> tail(const std::string& g, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = n - (n + 2) / 3; i < n; ++i) out.push_back(g + "[" + std::to_string(i) + "]");
  return out;
}

// Least number of vertices (tails excluded) or edges separating the tails, capped at cap+1.
inline int min_separator(const endgraph::GraphPresentation& p, const std::string& a, const std::string& b,
                         endgraph::Mode mode, std::size_t n, int cap) {
  using endgraph::EdgeOrigin;
  auto t = endgraph::truncate_annotated(p, n);
  const auto& g = t.graph;
  int nv = static_cast<int>(g.vertices.size());
  const int inf = 1 << 20;
  int src = 2 * nv, dst = 2 * nv + 1;
  MaxFlow f(2 * nv + 2);
  std::vector<bool> pinned(nv, false);
  for (const auto& v : tail(a, n)) {
    int i = static_cast<int>(*g.index_of(v));
    pinned[i] = true;
    f.arc(src, i, inf);
  }
  for (const auto& v : tail(b, n)) {
    int i = static_cast<int>(*g.index_of(v));
    pinned[i] = true;
    f.arc(nv + i, dst, inf);
  }
  for (int v = 0; v < nv; ++v)
    f.arc(v, nv + v, mode == endgraph::Mode::Vertex && !pinned[v] ? 1 : inf);
  for (auto [u, v] : g.edges) {
    auto o = t.origin.at({u, v});
    if (o == EdgeOrigin::Declared || o == EdgeOrigin::FiniteFan) continue;
    int c = mode == endgraph::Mode::Edge ? 1 : inf;
    f.arc(nv + static_cast<int>(u), static_cast<int>(v), c);
    f.arc(nv + static_cast<int>(v), static_cast<int>(u), c);
  }
  return f.run(src, dst, cap);
}

}  // namespace flow
