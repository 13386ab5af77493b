#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "endgraph/error.hpp"
#include "endgraph/ordertree.hpp"

namespace endgraph {

// A set of natural numbers that is finite or cofinite; `listed` holds the
// members (finite) or the non-members (cofinite), so equality is structural.
struct CopySet {
  bool cofinite = false;
  std::set<std::size_t> listed;

  static CopySet none() { return {}; }
  static CopySet all() { return {true, {}}; }
  static CopySet single(std::size_t c) { return {false, {c}}; }
  static CopySet from(std::size_t i) {
    CopySet s{true, {}};
    for (std::size_t c = 0; c < i; ++c) s.listed.insert(c);
    return s;
  }

  bool empty() const { return !cofinite && listed.empty(); }
  bool contains(std::size_t c) const { return cofinite != (listed.count(c) > 0); }
  std::optional<std::size_t> size() const {
    if (cofinite) return std::nullopt;
    return listed.size();
  }
  std::size_t smallest() const {
    if (!cofinite) return *listed.begin();
    std::size_t c = 0;
    while (listed.count(c)) ++c;
    return c;
  }
  CopySet complement() const { return {!cofinite, listed}; }

  friend CopySet operator&(const CopySet& a, const CopySet& b) {
    CopySet out;
    if (!a.cofinite && !b.cofinite) {
      std::set_intersection(a.listed.begin(), a.listed.end(), b.listed.begin(), b.listed.end(),
                            std::inserter(out.listed, out.listed.end()));
    } else if (a.cofinite && b.cofinite) {
      out.cofinite = true;
      out.listed = a.listed;
      out.listed.insert(b.listed.begin(), b.listed.end());
    } else {
      const auto& fin = a.cofinite ? b : a;
      const auto& cof = a.cofinite ? a : b;
      std::set_difference(fin.listed.begin(), fin.listed.end(), cof.listed.begin(), cof.listed.end(),
                          std::inserter(out.listed, out.listed.end()));
    }
    return out;
  }
  friend CopySet operator|(const CopySet& a, const CopySet& b) {
    return (a.complement() & b.complement()).complement();
  }
  friend CopySet operator-(const CopySet& a, const CopySet& b) { return a & b.complement(); }
  bool operator==(const CopySet&) const = default;

  std::string str() const {
    std::string out;
    if (cofinite) {
      out = "N";
      if (!listed.empty()) out += "-";
    }
    std::string items;
    for (auto c : listed) items += (items.empty() ? "" : ",") + std::to_string(c);
    if (!cofinite || !listed.empty()) out += "{" + items + "}";
    return out;
  }
};

using SchemaKey = std::pair<std::size_t, std::string>;  // family index, fragment omega chain

// Set of high-rays of a scheme with at most one level of families.
struct RaySet {
  std::set<std::string> rays;                // top-level omega chains
  std::map<SchemaKey, CopySet> copies;       // per family schema

  bool empty() const { return rays.empty() && copies.empty(); }
  void normalize() {
    for (auto it = copies.begin(); it != copies.end();) it = it->second.empty() ? copies.erase(it) : std::next(it);
  }
  CopySet copies_of(const SchemaKey& k) const {
    auto it = copies.find(k);
    return it == copies.end() ? CopySet::none() : it->second;
  }
  std::optional<std::size_t> size() const {
    std::size_t n = rays.size();
    for (const auto& [k, c] : copies) {
      auto s = c.size();
      if (!s) return std::nullopt;
      n += *s;
    }
    return n;
  }

  friend RaySet operator&(const RaySet& a, const RaySet& b) {
    RaySet out;
    std::set_intersection(a.rays.begin(), a.rays.end(), b.rays.begin(), b.rays.end(),
                          std::inserter(out.rays, out.rays.end()));
    for (const auto& [k, c] : a.copies) out.copies[k] = c & b.copies_of(k);
    out.normalize();
    return out;
  }
  friend RaySet operator|(const RaySet& a, const RaySet& b) {
    RaySet out = a;
    out.rays.insert(b.rays.begin(), b.rays.end());
    for (const auto& [k, c] : b.copies) out.copies[k] = out.copies_of(k) | c;
    out.normalize();
    return out;
  }
  friend RaySet operator-(const RaySet& a, const RaySet& b) {
    RaySet out;
    std::set_difference(a.rays.begin(), a.rays.end(), b.rays.begin(), b.rays.end(),
                        std::inserter(out.rays, out.rays.end()));
    for (const auto& [k, c] : a.copies) out.copies[k] = c - b.copies_of(k);
    out.normalize();
    return out;
  }
  bool subset_of(const RaySet& b) const { return (*this - b).empty(); }
  bool disjoint(const RaySet& b) const { return (*this & b).empty(); }
  bool operator==(const RaySet&) const = default;
};

// The high-ray space R(T) of a scheme, with the [t,F] basis.
class RaySpace {
 public:
  explicit RaySpace(TreeScheme t) : t_(std::move(t)) {
    validate_scheme(t_);
    if (t_.has_nested_families()) throw Error(ErrorKind::RankTooHigh, "families nested inside fragments");
    for (const auto& [id, seg] : t_.segments)
      if (seg.omega()) all_.rays.insert(id);
    for (std::size_t f = 0; f < t_.families.size(); ++f)
      for (const auto& [id, seg] : t_.families[f].fragment->segments)
        if (seg.omega()) {
          all_.copies[{f, id}] = CopySet::all();
          schemas_of_base_[t_.families[f].base].push_back({f, id});
        }
  }

  const TreeScheme& scheme() const { return t_; }
  const RaySet& all() const { return all_; }

  std::string ray_id(const RayRef& r) const {
    return scope_prefix(t_, r.scope) + r.segment;
  }
  std::string schema_id(const SchemaKey& k) const { return family_id(t_, k.first) + "#*/" + k.second; }

  RayRef parse_ray(const std::string& text) const {
    auto slash = text.find('/');
    if (slash == std::string::npos) {
      if (!all_.rays.count(text)) throw Error(ErrorKind::InvalidRef, "no high-ray " + text);
      return {{}, text};
    }
    auto node = parse_node(t_, text.substr(0, slash + 1) + text.substr(slash + 1) + "[0]");
    if (!t_.families[node.scope[0].family].fragment->segment(node.segment).omega())
      throw Error(ErrorKind::InvalidRef, "not an omega chain: " + text);
    return {node.scope, node.segment};
  }

  RaySet singleton(const RayRef& r) const {
    RaySet s;
    if (r.scope.empty()) s.rays.insert(r.segment);
    else s.copies[{r.scope[0].family, r.segment}] = CopySet::single(r.scope[0].copy);
    return s;
  }
  bool contains(const RaySet& s, const RayRef& r) const {
    if (r.scope.empty()) return s.rays.count(r.segment) > 0;
    return s.copies_of({r.scope[0].family, r.segment}).contains(r.scope[0].copy);
  }

  // Rays through node n.
  RaySet up(const Node& n) const {
    check_node(t_, n);
    RaySet s;
    if (n.scope.empty()) {
      for (const auto& r : all_.rays)
        if (in_ray(t_, n, {{}, r})) s.rays.insert(r);
      for (std::size_t f = 0; f < t_.families.size(); ++f) {
        const auto& base = t_.families[f].base;
        CopySet c;
        if (n.segment == base) c = n.is_top() ? CopySet::none() : CopySet::from(*n.index);
        else if (order_le(t_, n, {{}, base, 0, {}})) c = CopySet::all();
        for (const auto& [id, seg] : t_.families[f].fragment->segments)
          if (seg.omega()) s.copies[{f, id}] = c;
      }
    } else {
      auto step = n.scope[0];
      for (const auto& [id, seg] : t_.families[step.family].fragment->segments)
        if (seg.omega() && in_ray(t_, n, {n.scope, id})) s.copies[{step.family, id}] = CopySet::single(step.copy);
    }
    s.normalize();
    return s;
  }

  // Rays containing every node of r: r itself plus everything above its tops.
  RaySet above_ray(const RayRef& r) const {
    RaySet s = singleton(r);
    for (const auto& top : tops_of(t_, r)) s = s | up(top);
    return s;
  }

  // Open iff every limit ray in s keeps cofinitely many copies of each of its sequences.
  bool is_open(const RaySet& s) const { return non_interior_limits(s).empty(); }
  std::vector<std::string> non_interior_limits(const RaySet& s) const {
    std::vector<std::string> out;
    for (const auto& [base, keys] : schemas_of_base_) {
      if (!s.rays.count(base)) continue;
      if (std::any_of(keys.begin(), keys.end(), [&](const SchemaKey& k) { return !s.copies_of(k).cofinite; }))
        out.push_back(base);
    }
    return out;
  }
  const std::map<std::string, std::vector<SchemaKey>>& limit_bases() const { return schemas_of_base_; }

  // Lexicographically least ray of a nonempty set.
  RayRef least(const RaySet& s) const {
    std::vector<std::pair<std::string, RayRef>> cands;
    if (!s.rays.empty()) cands.push_back({*s.rays.begin(), {{}, *s.rays.begin()}});
    for (const auto& [k, c] : s.copies) {
      RayRef r{{{k.first, c.smallest()}}, k.second};
      cands.push_back({ray_id(r), r});
    }
    if (cands.empty()) throw Error(ErrorKind::Invalid, "least ray of an empty set");
    return std::min_element(cands.begin(), cands.end())->second;
  }

  std::string str(const RaySet& s) const {
    std::string out;
    for (const auto& r : s.rays) out += (out.empty() ? "" : ", ") + r;
    for (const auto& [k, c] : s.copies)
      out += (out.empty() ? "" : ", ") + family_id(t_, k.first) + "#" + c.str() + "/" + k.second;
    return "{" + out + "}";
  }

 private:
  TreeScheme t_;
  RaySet all_;
  std::map<std::string, std::vector<SchemaKey>> schemas_of_base_;
};

// [t,F]: rays through the anchor avoiding every excluded node.
struct BasicOpen {
  Node anchor;
  std::vector<Node> excluded;  // sorted, unique

  static BasicOpen make(Node anchor, std::vector<Node> excluded) {
    std::sort(excluded.begin(), excluded.end());
    excluded.erase(std::unique(excluded.begin(), excluded.end()), excluded.end());
    return {std::move(anchor), std::move(excluded)};
  }
  auto operator<=>(const BasicOpen&) const = default;
  bool operator==(const BasicOpen&) const = default;
};

inline std::string to_string(const TreeScheme& t, const BasicOpen& b) {
  std::string out = "[" + to_string(t, b.anchor) + ", {";
  for (std::size_t i = 0; i < b.excluded.size(); ++i) out += (i ? ", " : "") + to_string(t, b.excluded[i]);
  return out + "}]";
}

// Accepts "anchor" or "anchor : x1 x2 ..." (also "[anchor, {x1, x2}]").
inline BasicOpen parse_basic_open(const TreeScheme& t, std::string text) {
  for (char& c : text)
    if (c == ',' || c == '{' || c == '}') c = ' ';
  if (!text.empty() && text.front() == '[' && text.back() == ']') text = text.substr(1, text.size() - 2);
  auto colon = text.find(':');
  auto head = detail::words(colon == std::string::npos ? text : text.substr(0, colon));
  auto tail = colon == std::string::npos ? std::vector<std::string>{} : detail::words(text.substr(colon + 1));
  if (colon == std::string::npos && head.size() > 1) {
    tail.assign(head.begin() + 1, head.end());
    head.resize(1);
  }
  if (head.size() != 1) throw Error(ErrorKind::InvalidRef, "expected one anchor");
  std::vector<Node> ex;
  for (const auto& w : tail) ex.push_back(parse_node(t, w));
  return BasicOpen::make(parse_node(t, head[0]), std::move(ex));
}

inline RaySet evaluate(const RaySpace& space, const BasicOpen& b) {
  RaySet s = space.up(b.anchor);
  for (const auto& x : b.excluded) s = s - space.up(x);
  return s;
}

}  // namespace endgraph
