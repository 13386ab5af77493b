#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "endgraph/error.hpp"
#include "endgraph/ordertree.hpp"
#include "endgraph/rayset.hpp"

namespace endgraph {

using Mask = std::uint64_t;

inline std::size_t popcount(Mask m) { return static_cast<std::size_t>(std::popcount(m)); }

// A finite ground with a named family of subsets and an optional declared
// topology (a list of open sets generating it); without one the ground is discrete.
struct FiniteSpace {
  std::vector<std::string> points;
  std::vector<std::string> ids;
  std::vector<Mask> sets;
  std::optional<std::vector<Mask>> topology;

  Mask whole() const { return points.size() == 64 ? ~Mask{0} : (Mask{1} << points.size()) - 1; }
  std::size_t size() const { return sets.size(); }

  std::size_t point_index(const std::string& name) const {
    auto it = std::find(points.begin(), points.end(), name);
    if (it == points.end()) throw Error(ErrorKind::InvalidRef, "no point " + name);
    return static_cast<std::size_t>(it - points.begin());
  }
  std::size_t set_index(const std::string& id) const {
    auto it = std::find(ids.begin(), ids.end(), id);
    if (it == ids.end()) throw Error(ErrorKind::InvalidRef, "no set " + id);
    return static_cast<std::size_t>(it - ids.begin());
  }
  Mask mask_of(const std::vector<std::string>& names) const {
    Mask m = 0;
    for (const auto& n : names) m |= Mask{1} << point_index(n);
    return m;
  }
  std::vector<std::string> names(Mask m) const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < points.size(); ++i)
      if (m >> i & 1) out.push_back(points[i]);
    return out;
  }
  std::string str(Mask m) const {
    std::string out;
    for (const auto& n : names(m)) out += (out.empty() ? "" : ",") + n;
    return "{" + out + "}";
  }
  std::size_t add(std::string id, Mask m) {
    if (std::find(ids.begin(), ids.end(), id) != ids.end()) throw Error(ErrorKind::DuplicateId, id);
    ids.push_back(std::move(id));
    sets.push_back(m);
    return sets.size() - 1;
  }

  // Open in the declared topology: each point's least neighbourhood fits inside.
  bool is_open(Mask s) const {
    if (!topology) return true;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (!(s >> i & 1)) continue;
      Mask nbhd = whole();
      for (auto o : *topology)
        if (o >> i & 1) nbhd &= o;
      if ((nbhd & ~s) != 0) return false;
    }
    return true;
  }
};

inline FiniteSpace make_space(std::vector<std::string> points) {
  if (points.size() > 64) throw Error(ErrorKind::BoundExceeded, "finite grounds hold at most 64 points");
  std::set<std::string> seen;
  for (const auto& p : points)
    if (!seen.insert(p).second) throw Error(ErrorKind::DuplicateId, p);
  FiniteSpace s;
  s.points = std::move(points);
  return s;
}

// Index of a set equal to the whole ground, adding one named "X" if missing.
inline std::size_t ensure_whole(FiniteSpace& s) {
  for (std::size_t i = 0; i < s.sets.size(); ++i)
    if (s.sets[i] == s.whole()) return i;
  std::string id = "X";
  while (std::find(s.ids.begin(), s.ids.end(), id) != s.ids.end()) id += "'";
  return s.add(id, s.whole());
}

// Ground file: [points] names..., [sets] lines "id p1 p2 ...".
inline FiniteSpace parse_ground(std::string_view text) {
  std::vector<std::string> points;
  std::vector<std::pair<std::string, std::vector<std::string>>> sets;
  std::string section;
  std::istringstream in{std::string(text)};
  std::size_t lineno = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++lineno;
    auto line = detail::strip(raw);
    if (line.empty()) continue;
    if (line == "[points]" || line == "[sets]") {
      section = line.substr(1, line.size() - 2);
      continue;
    }
    auto w = detail::words(line);
    if (section == "points") points.insert(points.end(), w.begin(), w.end());
    else if (section == "sets") sets.emplace_back(w[0], std::vector<std::string>(w.begin() + 1, w.end()));
    else throw Error(ErrorKind::Syntax, "line " + std::to_string(lineno) + ": expected [points] or [sets]");
  }
  auto s = make_space(points);
  for (const auto& [id, members] : sets) s.add(id, s.mask_of(members));
  return s;
}

// Topology file: one open set per line, as point names.
inline std::vector<Mask> parse_topology(const FiniteSpace& s, std::string_view text) {
  std::vector<Mask> out;
  std::istringstream in{std::string(text)};
  for (std::string raw; std::getline(in, raw);) {
    auto line = detail::strip(raw);
    if (!line.empty()) out.push_back(s.mask_of(detail::words(line)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// special subbase report

struct Check {
  bool pass = true;
  std::string witness;
  std::string method;  // "exhaustive", "structural", or "declared-topology"/"discrete"
};

struct SpecialReport {
  Check nested, noetherian, sigma_disjoint, clopen;
  std::vector<std::vector<std::string>> layers;         // set-disjoint antichains
  std::vector<std::vector<std::string>> order_layers;   // tree levels (scheme grounds)

  bool pass() const { return nested.pass && noetherian.pass && sigma_disjoint.pass && clopen.pass; }
};

inline SpecialReport check_special(const FiniteSpace& f) {
  SpecialReport r;
  r.nested.method = r.noetherian.method = r.sigma_disjoint.method = "exhaustive";
  for (std::size_t i = 0; i < f.size() && r.nested.pass; ++i)
    for (std::size_t j = i + 1; j < f.size(); ++j) {
      Mask a = f.sets[i], b = f.sets[j];
      if ((a & b) && (a & ~b) && (b & ~a)) {
        r.nested = {false, f.ids[i] + " " + f.ids[j], "exhaustive"};
        break;
      }
    }
  // Finite families have only finite chains, so every chain has a maximum.
  std::vector<Mask> layer_union;
  for (std::size_t i = 0; i < f.size(); ++i) {
    std::size_t k = 0;
    for (; k < r.layers.size(); ++k) {
      bool clash = false;
      for (const auto& id : r.layers[k]) clash |= (f.sets[f.set_index(id)] & f.sets[i]) != 0;
      if (!clash) break;
    }
    if (k == r.layers.size()) r.layers.emplace_back();
    r.layers[k].push_back(f.ids[i]);
  }
  r.clopen.method = f.topology ? "declared-topology" : "discrete";
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!f.is_open(f.sets[i])) {
      r.clopen = {false, f.ids[i] + " is not open", r.clopen.method};
      break;
    }
    if (!f.is_open(f.whole() & ~f.sets[i])) {
      r.clopen = {false, f.ids[i] + " is not closed", r.clopen.method};
      break;
    }
  }
  return r;
}

// {[t,∅]} over the nodes of the hat subtree (index and copy below `cut`).
inline SpecialReport check_special(const TreeScheme& t, std::size_t cut = 8) {
  SpecialReport r;
  auto hat = hat_subtree(t);
  if (hat.empty()) return r;
  RaySpace space(hat);
  auto nodes = sample_nodes(hat, cut);
  std::vector<RaySet> sets;
  for (const auto& n : nodes) sets.push_back(space.up(n));
  auto name = [&](std::size_t i) { return to_string(hat, nodes[i]); };

  r.nested.method = "exhaustive";
  for (std::size_t i = 0; i < sets.size() && r.nested.pass; ++i)
    for (std::size_t j = i + 1; j < sets.size(); ++j)
      if (!sets[i].disjoint(sets[j]) && !sets[i].subset_of(sets[j]) && !sets[j].subset_of(sets[i])) {
        r.nested = {false, name(i) + " " + name(j), "exhaustive"};
        break;
      }

  // Increasing chains of [t,∅] are decreasing node chains, which stop at the root.
  r.noetherian.method = "structural";
  for (std::size_t i = 0; i < sets.size(); ++i)
    if (sets[i].empty()) r.noetherian = {false, name(i) + " is empty", "structural"};

  r.sigma_disjoint.method = "exhaustive";
  std::map<Height, std::vector<std::size_t>> levels;
  for (std::size_t i = 0; i < nodes.size(); ++i) levels[height(hat, nodes[i])].push_back(i);
  for (const auto& [h, members] : levels) {
    std::vector<std::string> layer;
    for (std::size_t a = 0; a < members.size(); ++a) {
      layer.push_back(name(members[a]));
      for (std::size_t b = a + 1; b < members.size() && r.sigma_disjoint.pass; ++b)
        if (!sets[members[a]].disjoint(sets[members[b]]))
          r.sigma_disjoint = {false, name(members[a]) + " meets " + name(members[b]), "exhaustive"};
    }
    r.order_layers.push_back(layer);
    r.layers.push_back(std::move(layer));
  }

  r.clopen.method = "structural";
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (!space.is_open(sets[i])) {
      r.clopen = {false, name(i) + " is not open", "structural"};
      break;
    }
    if (!space.is_open(space.all() - sets[i])) {
      r.clopen = {false, "complement of " + name(i) + " is not open", "structural"};
      break;
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// basis elements [U,F] = U minus the union of F

struct FiniteBasic {
  std::size_t base = 0;
  std::vector<std::size_t> excluded;  // sorted, unique

  static FiniteBasic make(std::size_t base, std::vector<std::size_t> excluded) {
    std::sort(excluded.begin(), excluded.end());
    excluded.erase(std::unique(excluded.begin(), excluded.end()), excluded.end());
    return {base, std::move(excluded)};
  }
  Mask mask(const FiniteSpace& s) const {
    Mask m = s.sets[base];
    for (auto e : excluded) m &= ~s.sets[e];
    return m;
  }
  auto operator<=>(const FiniteBasic&) const = default;
  bool operator==(const FiniteBasic&) const = default;
};

inline std::string to_string(const FiniteSpace& s, const FiniteBasic& b) {
  std::string out = "[" + s.ids[b.base] + ", {";
  for (std::size_t i = 0; i < b.excluded.size(); ++i) out += (i ? ", " : "") + s.ids[b.excluded[i]];
  return out + "}]";
}

struct BasisElement {
  FiniteBasic normalized;
  Mask set = 0;
  bool empty = false;
};

// Drops excluded sets missing U, keeps only the maximal ones among the rest.
inline BasisElement basis_elements(const FiniteSpace& s, std::size_t u, const std::vector<std::size_t>& f) {
  if (u >= s.size()) throw Error(ErrorKind::InvalidRef, "no set with index " + std::to_string(u));
  std::vector<std::size_t> keep;
  for (auto b : f) {
    if (b >= s.size()) throw Error(ErrorKind::InvalidRef, "no set with index " + std::to_string(b));
    if (s.sets[b] & s.sets[u]) keep.push_back(b);
  }
  std::vector<std::size_t> maximal;
  for (auto b : keep) {
    bool dominated = std::any_of(keep.begin(), keep.end(), [&](std::size_t c) {
      if (c == b) return false;
      Mask sb = s.sets[b], sc = s.sets[c];
      return (sb & ~sc) == 0 && (sb != sc || c < b);
    });
    if (!dominated) maximal.push_back(b);
  }
  BasisElement out{FiniteBasic::make(u, maximal), 0, false};
  out.set = out.normalized.mask(s);
  out.empty = out.set == 0;
  return out;
}

// ---------------------------------------------------------------------------
// hereditary completeness on finite grounds

struct CompletenessReport {
  bool pass = true;
  Mask witness_ground = 0;                 // closed subspace Y
  std::vector<std::string> witness_family; // set ids whose traces are centered with empty intersection
  std::size_t subfamilies_checked = 0;
};

// Centered means pairwise intersecting.  A subfamily G fails on some closed Y
// iff every pairwise intersection leaves the total intersection, and then
// Y = X minus that intersection is a witness (grounds here are discrete).
inline CompletenessReport check_hereditary_completeness(const FiniteSpace& f, std::size_t max_points = 12,
                                                        std::size_t budget = 2'000'000) {
  if (f.points.size() > max_points)
    throw Error(ErrorKind::BoundExceeded, std::to_string(f.points.size()) + " points exceed the bound of " +
                                              std::to_string(max_points));
  std::vector<std::size_t> distinct;
  for (std::size_t i = 0; i < f.size(); ++i) {
    bool dup = false;
    for (auto j : distinct) dup |= f.sets[j] == f.sets[i];
    if (!dup) distinct.push_back(i);
  }
  CompletenessReport r;
  std::vector<std::size_t> chosen;
  auto fails = [&]() {
    Mask total = f.whole();
    for (auto i : chosen) total &= f.sets[i];
    for (std::size_t a = 0; a < chosen.size(); ++a)
      for (std::size_t b = a + 1; b < chosen.size(); ++b)
        if ((f.sets[chosen[a]] & f.sets[chosen[b]] & ~total) == 0) return false;
    r.pass = false;
    r.witness_ground = f.whole() & ~total;
    for (auto i : chosen) r.witness_family.push_back(f.ids[i]);
    return true;
  };
  std::function<bool(std::size_t)> extend = [&](std::size_t next) {
    for (std::size_t k = next; k < distinct.size(); ++k) {
      auto i = distinct[k];
      if (f.sets[i] == 0) continue;
      bool meets = std::all_of(chosen.begin(), chosen.end(), [&](std::size_t j) { return (f.sets[i] & f.sets[j]) != 0; });
      if (!meets) continue;
      if (++r.subfamilies_checked > budget) throw Error(ErrorKind::BoundExceeded, "subfamily enumeration budget");
      chosen.push_back(i);
      if (chosen.size() >= 3 && fails()) return true;
      if (extend(k + 1)) return true;
      chosen.pop_back();
    }
    return false;
  };
  extend(0);
  return r;
}

}  // namespace endgraph
