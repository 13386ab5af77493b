#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "endgraph/endspace.hpp"
#include "endgraph/error.hpp"
#include "endgraph/presentation.hpp"

namespace endgraph {

struct TreeScheme;

struct Segment {
  std::string id;
  std::optional<std::size_t> length;  // nullopt: omega chain

  bool omega() const { return !length; }
  bool operator==(const Segment&) const = default;
};

// Where a segment's first node hangs: below seg[index] or below top(seg)@label.
struct AttachPoint {
  std::string segment;
  std::optional<std::size_t> index;
  std::string label;

  bool top() const { return !index; }
  bool operator==(const AttachPoint&) const = default;
};

// One copy of `fragment` hangs below base[c] for every c.
struct Family {
  std::string base;
  std::shared_ptr<const TreeScheme> fragment;
  std::string source;  // fragment file as written in [families]
};

struct TreeScheme {
  std::map<std::string, Segment> segments;
  std::map<std::string, AttachPoint> attach;  // child segment -> point
  std::vector<Family> families;
  std::string root;

  bool empty() const { return segments.empty(); }
  const Segment& segment(const std::string& id) const {
    auto it = segments.find(id);
    if (it == segments.end()) throw Error(ErrorKind::InvalidRef, "no segment " + id);
    return it->second;
  }
  bool has_nested_families() const {
    return std::any_of(families.begin(), families.end(),
                       [](const Family& f) { return !f.fragment->families.empty(); });
  }
};

// Scheme with families compared by fragment content.
bool operator==(const TreeScheme& a, const TreeScheme& b);
inline bool operator==(const Family& a, const Family& b) {
  return a.base == b.base && *a.fragment == *b.fragment;
}
inline bool operator==(const TreeScheme& a, const TreeScheme& b) {
  return a.segments == b.segments && a.attach == b.attach && a.root == b.root && a.families == b.families;
}

inline std::string family_id(const TreeScheme& s, std::size_t f) {
  std::size_t ordinal = 0;
  for (std::size_t i = 0; i <= f; ++i) ordinal += s.families[i].base == s.families[f].base;
  return ordinal <= 1 ? s.families[f].base : s.families[f].base + "~" + std::to_string(ordinal);
}

// ---------------------------------------------------------------------------
// nodes

struct ScopeStep {
  std::size_t family;
  std::size_t copy;
  auto operator<=>(const ScopeStep&) const = default;
  bool operator==(const ScopeStep&) const = default;
};
using Scope = std::vector<ScopeStep>;

struct Node {
  Scope scope;
  std::string segment;
  std::optional<std::size_t> index;  // nullopt: the top of the segment
  std::string label;                 // top label, empty for plain top(seg)

  bool is_top() const { return !index; }
  auto operator<=>(const Node&) const = default;
  bool operator==(const Node&) const = default;
};

inline const TreeScheme& scheme_at(const TreeScheme& t, const Scope& scope) {
  const TreeScheme* s = &t;
  for (const auto& step : scope) {
    if (step.family >= s->families.size()) throw Error(ErrorKind::InvalidRef, "no such family");
    s = s->families[step.family].fragment.get();
  }
  return *s;
}

inline std::string scope_prefix(const TreeScheme& t, const Scope& scope) {
  std::string out;
  const TreeScheme* s = &t;
  for (const auto& step : scope) {
    out += family_id(*s, step.family) + "#" + std::to_string(step.copy) + "/";
    s = s->families[step.family].fragment.get();
  }
  return out;
}

inline std::string to_string(const TreeScheme& t, const Node& n) {
  std::string core = n.is_top() ? "top(" + n.segment + ")" + (n.label.empty() ? "" : "@" + n.label)
                                : n.segment + "[" + std::to_string(*n.index) + "]";
  return scope_prefix(t, n.scope) + core;
}

inline Node root_node(const TreeScheme& t) { return {{}, t.root, 0, {}}; }

// Labels of the tops that exist above `seg` (a top exists once something hangs on it).
inline std::set<std::string> top_labels(const TreeScheme& s, const std::string& seg) {
  std::set<std::string> out;
  for (const auto& [child, at] : s.attach)
    if (at.top() && at.segment == seg) out.insert(at.label);
  return out;
}

inline void check_node(const TreeScheme& t, const Node& n) {
  const auto& s = scheme_at(t, n.scope);
  auto it = s.segments.find(n.segment);
  if (it == s.segments.end()) throw Error(ErrorKind::InvalidRef, "no segment " + n.segment);
  if (n.is_top()) {
    if (!it->second.omega()) throw Error(ErrorKind::InvalidRef, "top of finite chain " + n.segment);
    if (!top_labels(s, n.segment).count(n.label)) throw Error(ErrorKind::InvalidRef, "no such top " + to_string(t, n));
  } else if (it->second.length && *n.index >= *it->second.length) {
    throw Error(ErrorKind::InvalidRef, to_string(t, n) + " beyond chain length");
  }
}

inline Node parse_node(const TreeScheme& t, const std::string& text) {
  Node n;
  std::string rest = text;
  const TreeScheme* s = &t;
  for (auto slash = rest.find('/'); slash != std::string::npos; slash = rest.find('/')) {
    auto step = rest.substr(0, slash);
    auto hash = step.find('#');
    if (hash == std::string::npos) throw Error(ErrorKind::InvalidRef, "bad scope in " + text);
    auto fam = step.substr(0, hash);
    auto copy = step.substr(hash + 1);
    if (copy.empty() || copy.find_first_not_of("0123456789") != std::string::npos)
      throw Error(ErrorKind::InvalidRef, "bad copy index in " + text);
    std::optional<std::size_t> found;
    for (std::size_t f = 0; f < s->families.size(); ++f)
      if (family_id(*s, f) == fam) found = f;
    if (!found) throw Error(ErrorKind::InvalidRef, "no family " + fam);
    n.scope.push_back({*found, static_cast<std::size_t>(std::stoull(copy))});
    s = s->families[*found].fragment.get();
    rest = rest.substr(slash + 1);
  }
  if (rest.rfind("top(", 0) == 0) {
    auto close = rest.find(')');
    if (close == std::string::npos) throw Error(ErrorKind::InvalidRef, "bad top in " + text);
    n.segment = rest.substr(4, close - 4);
    auto tail = rest.substr(close + 1);
    if (!tail.empty()) {
      if (tail[0] != '@' || tail.size() == 1) throw Error(ErrorKind::InvalidRef, "bad top label in " + text);
      n.label = tail.substr(1);
    }
  } else {
    auto open = rest.find('[');
    if (open == std::string::npos || rest.back() != ']') throw Error(ErrorKind::InvalidRef, "bad node " + text);
    n.segment = rest.substr(0, open);
    auto idx = rest.substr(open + 1, rest.size() - open - 2);
    if (idx.empty() || idx.find_first_not_of("0123456789") != std::string::npos)
      throw Error(ErrorKind::InvalidRef, "bad index in " + text);
    n.index = static_cast<std::size_t>(std::stoull(idx));
  }
  check_node(t, n);
  return n;
}

// ---------------------------------------------------------------------------
// validation and the root-ward spine

inline void validate_scheme(const TreeScheme& s) {
  auto bad = [](const std::string& what) { throw Error(ErrorKind::Invalid, what); };
  if (s.segments.empty()) {
    if (!s.root.empty() || !s.attach.empty() || !s.families.empty()) bad("empty scheme with content");
    return;
  }
  for (const auto& [id, seg] : s.segments) {
    if (!detail::valid_id(id) || id.find_first_of(".~") != std::string::npos) bad("bad segment id " + id);
    if (seg.length && *seg.length == 0) bad("empty finite chain " + id);
  }
  if (!s.segments.count(s.root)) bad("root " + s.root + " is not a segment");
  if (s.attach.count(s.root)) bad("root " + s.root + " is attached");
  for (const auto& [id, seg] : s.segments)
    if (id != s.root && !s.attach.count(id)) bad("segment " + id + " is not attached");
  for (const auto& [child, at] : s.attach) {
    if (!s.segments.count(child)) bad("attach names unknown segment " + child);
    auto it = s.segments.find(at.segment);
    if (it == s.segments.end()) bad(child + " attaches to unknown segment " + at.segment);
    if (at.top() && !it->second.omega()) bad(child + " attaches to the top of finite chain " + at.segment);
    if (!at.top() && it->second.length && *at.index >= *it->second.length) bad(child + " attaches beyond " + at.segment);
  }
  for (const auto& [id, seg] : s.segments) {
    std::string cur = id;
    for (std::size_t hops = 0; cur != s.root; ++hops) {
      if (hops > s.segments.size()) bad("attachment cycle through " + id);
      cur = s.attach.at(cur).segment;
    }
  }
  for (const auto& f : s.families) {
    auto it = s.segments.find(f.base);
    if (it == s.segments.end() || !it->second.omega()) bad("family base " + f.base + " is not an omega chain");
    if (!f.fragment || f.fragment->empty()) bad("family on " + f.base + " has an empty fragment");
    validate_scheme(*f.fragment);
  }
}

struct SpineStep {
  Scope scope;
  std::string segment;
  std::optional<std::size_t> upto;        // nullopt: the whole chain
  std::optional<std::string> via_top;     // top label passed through, if any
};

namespace detail {

inline void climb(const TreeScheme& t, SpineStep step, std::vector<SpineStep>& out) {
  for (;;) {
    out.push_back(step);
    const auto& s = scheme_at(t, step.scope);
    if (step.segment == s.root) {
      if (step.scope.empty()) return;
      auto last = step.scope.back();
      Scope up(step.scope.begin(), step.scope.end() - 1);
      const auto& parent = scheme_at(t, up);
      step = {up, parent.families[last.family].base, last.copy, std::nullopt};
      continue;
    }
    const auto& at = s.attach.at(step.segment);
    if (at.top()) step = {step.scope, at.segment, std::nullopt, at.label};
    else step = {step.scope, at.segment, at.index, std::nullopt};
  }
}

}  // namespace detail

inline std::vector<SpineStep> spine(const TreeScheme& t, const Node& n) {
  check_node(t, n);
  std::vector<SpineStep> out;
  if (n.is_top()) detail::climb(t, {n.scope, n.segment, std::nullopt, n.label}, out);
  else detail::climb(t, {n.scope, n.segment, n.index, std::nullopt}, out);
  return out;
}

inline bool on_spine(const std::vector<SpineStep>& sp, const Node& a) {
  for (const auto& st : sp) {
    if (st.scope != a.scope || st.segment != a.segment) continue;
    if (a.is_top()) return st.via_top && *st.via_top == a.label;
    return !st.upto || *a.index <= *st.upto;
  }
  return false;
}

inline bool order_le(const TreeScheme& t, const Node& a, const Node& b) {
  check_node(t, a);
  return on_spine(spine(t, b), a);
}
inline bool order_lt(const TreeScheme& t, const Node& a, const Node& b) { return a != b && order_le(t, a, b); }
inline bool comparable(const TreeScheme& t, const Node& a, const Node& b) {
  return order_le(t, a, b) || order_le(t, b, a);
}

// Immediate successors in the tree order.
inline std::vector<Node> successors(const TreeScheme& t, const Node& n) {
  check_node(t, n);
  const auto& s = scheme_at(t, n.scope);
  std::vector<Node> out;
  if (!n.is_top()) {
    const auto& seg = s.segment(n.segment);
    if (seg.omega() || *n.index + 1 < *seg.length) out.push_back({n.scope, n.segment, *n.index + 1, {}});
  }
  for (const auto& [child, at] : s.attach) {
    if (at.segment != n.segment) continue;
    if (n.is_top() ? (at.top() && at.label == n.label) : (!at.top() && at.index == n.index))
      out.push_back({n.scope, child, 0, {}});
  }
  if (!n.is_top())
    for (std::size_t f = 0; f < s.families.size(); ++f)
      if (s.families[f].base == n.segment) {
        auto scope = n.scope;
        scope.push_back({f, *n.index});
        out.push_back({scope, s.families[f].fragment->root, 0, {}});
      }
  return out;
}

// ---------------------------------------------------------------------------
// heights: omega * first + second

struct Height {
  std::size_t omega = 0;
  std::size_t finite = 0;
  auto operator<=>(const Height&) const = default;
  bool operator==(const Height&) const = default;
  std::string str() const {
    if (omega == 0) return std::to_string(finite);
    std::string w = omega == 1 ? "w" : "w*" + std::to_string(omega);
    return finite ? w + "+" + std::to_string(finite) : w;
  }
};

Height height(const TreeScheme& t, const Node& n);

inline Height segment_start(const TreeScheme& t, const Scope& scope, const std::string& seg) {
  const auto& s = scheme_at(t, scope);
  Height base;
  if (seg == s.root) {
    if (scope.empty()) return {};
    Scope up(scope.begin(), scope.end() - 1);
    base = height(t, {up, scheme_at(t, up).families[scope.back().family].base, scope.back().copy, {}});
  } else {
    const auto& at = s.attach.at(seg);
    base = height(t, {scope, at.segment, at.index, at.label});
  }
  return {base.omega, base.finite + 1};
}

inline Height height(const TreeScheme& t, const Node& n) {
  auto st = segment_start(t, n.scope, n.segment);
  if (n.is_top()) return {st.omega + 1, 0};
  return {st.omega, st.finite + *n.index};
}

// Largest omega-multiple reached by a chain, plus one: 1 for a plain ray, 2 for omega*2.
inline std::size_t nesting_depth(const TreeScheme& t) {
  std::size_t out = 0;
  std::function<void(const TreeScheme&, const Scope&)> walk = [&](const TreeScheme& s, const Scope& scope) {
    for (const auto& [id, seg] : s.segments)
      if (seg.omega()) out = std::max(out, segment_start(t, scope, id).omega + 1);
    for (std::size_t f = 0; f < s.families.size(); ++f) {
      auto inner = scope;
      inner.push_back({f, 0});
      walk(*s.families[f].fragment, inner);
    }
  };
  if (!t.empty()) walk(t, {});
  return out;
}

// ---------------------------------------------------------------------------
// high-rays

// One schema per omega chain; chains inside a family stand for all copies.
struct HighRay {
  std::vector<std::size_t> families;  // family path, copies left symbolic
  std::string segment;
  std::string id;
  bool operator==(const HighRay&) const = default;
};

inline std::vector<HighRay> high_rays(const TreeScheme& t) {
  std::vector<HighRay> out;
  std::function<void(const TreeScheme&, std::vector<std::size_t>, std::string)> walk =
      [&](const TreeScheme& s, std::vector<std::size_t> path, std::string prefix) {
        for (const auto& [id, seg] : s.segments)
          if (seg.omega()) out.push_back({path, id, prefix + id});
        for (std::size_t f = 0; f < s.families.size(); ++f) {
          auto p = path;
          p.push_back(f);
          walk(*s.families[f].fragment, p, prefix + family_id(s, f) + "#*/");
        }
      };
  if (!t.empty()) walk(t, {}, "");
  return out;
}

inline std::vector<std::string> tops_of(const TreeScheme& t, const HighRay& r) {
  const TreeScheme* s = &t;
  std::string prefix;
  for (auto f : r.families) {
    prefix += family_id(*s, f) + "#*/";
    s = s->families[f].fragment.get();
  }
  std::vector<std::string> out;
  for (const auto& l : top_labels(*s, r.segment))
    out.push_back(prefix + "top(" + r.segment + ")" + (l.empty() ? "" : "@" + l));
  return out;
}

// A concrete high-ray: the down-closure of one omega chain in one scope.
struct RayRef {
  Scope scope;
  std::string segment;
  auto operator<=>(const RayRef&) const = default;
  bool operator==(const RayRef&) const = default;
};

inline std::vector<SpineStep> ray_spine(const TreeScheme& t, const RayRef& r) {
  std::vector<SpineStep> out;
  detail::climb(t, {r.scope, r.segment, std::nullopt, std::nullopt}, out);
  return out;
}

inline bool in_ray(const TreeScheme& t, const Node& n, const RayRef& r) { return on_spine(ray_spine(t, r), n); }

inline std::vector<Node> tops_of(const TreeScheme& t, const RayRef& r) {
  std::vector<Node> out;
  for (const auto& l : top_labels(scheme_at(t, r.scope), r.segment)) out.push_back({r.scope, r.segment, std::nullopt, l});
  return out;
}

// ---------------------------------------------------------------------------
// specialness: levels by height, checked on a finite sample

struct AntichainDecomposition {
  std::map<Height, std::vector<Node>> levels;
  std::size_t pairs_checked = 0;
  std::vector<std::pair<Node, Node>> comparable_pairs;  // empty when every level is an antichain

  bool special() const { return comparable_pairs.empty(); }
};

// Nodes with index < cut on every chain, in copies < cut of every family.
inline std::vector<Node> sample_nodes(const TreeScheme& t, std::size_t cut) {
  std::vector<Node> out;
  std::function<void(const Scope&)> walk = [&](const Scope& scope) {
    const auto& s = scheme_at(t, scope);
    for (const auto& [id, seg] : s.segments) {
      std::size_t n = seg.length ? std::min(*seg.length, cut) : cut;
      for (std::size_t i = 0; i < n; ++i) out.push_back({scope, id, i, {}});
      if (seg.omega())
        for (const auto& l : top_labels(s, id)) out.push_back({scope, id, std::nullopt, l});
    }
    for (std::size_t f = 0; f < s.families.size(); ++f)
      for (std::size_t c = 0; c < cut; ++c) {
        auto inner = scope;
        inner.push_back({f, c});
        walk(inner);
      }
  };
  if (!t.empty()) walk({});
  return out;
}

inline AntichainDecomposition specialness(const TreeScheme& t, std::size_t cut = 8) {
  AntichainDecomposition out;
  for (auto& n : sample_nodes(t, cut)) out.levels[height(t, n)].push_back(std::move(n));
  for (const auto& [h, nodes] : out.levels)
    for (std::size_t i = 0; i < nodes.size(); ++i)
      for (std::size_t j = i + 1; j < nodes.size(); ++j) {
        ++out.pairs_checked;
        if (comparable(t, nodes[i], nodes[j])) out.comparable_pairs.emplace_back(nodes[i], nodes[j]);
      }
  return out;
}

// ---------------------------------------------------------------------------
// T -> T' surgery

using SuccessorMap = std::map<std::string, std::vector<std::string>>;  // successor ref -> nodes below its limit

struct SurgeryResult {
  TreeScheme scheme;
  std::vector<std::pair<std::string, std::vector<std::string>>> replaced;  // limit node -> new nodes
};

// Each top-level limit node with successors is replaced by one new node per
// distinct N value among its successors; successors sharing N share the node.
inline SurgeryResult surgery_tprime(const TreeScheme& t, const SuccessorMap& n_map) {
  validate_scheme(t);
  SurgeryResult out{t, {}};
  std::set<std::string> used_keys;
  for (const auto& [seg_id, seg] : t.segments) {
    if (!seg.omega()) continue;
    for (const auto& label : top_labels(t, seg_id)) {
      Node top{{}, seg_id, std::nullopt, label};
      auto top_name = to_string(t, top);
      std::map<std::vector<std::string>, std::vector<std::string>> groups;  // N value -> child segments
      for (const auto& s : successors(t, top)) {
        auto key = to_string(t, s);
        auto it = n_map.find(key);
        if (it == n_map.end()) throw Error(ErrorKind::MissingSuccessor, key + " (successor of " + top_name + ")");
        used_keys.insert(key);
        std::set<std::string> value;
        for (const auto& x : it->second) {
          auto node = parse_node(t, x);
          if (!order_lt(t, node, top))
            throw Error(ErrorKind::InvalidRef, "N(" + key + ") holds " + x + ", which is not below " + top_name);
          value.insert(to_string(t, node));
        }
        groups[{value.begin(), value.end()}].push_back(s.segment);
      }
      std::vector<std::string> created;
      std::size_t k = 0;
      for (const auto& [value, children] : groups) {
        auto fresh = (label.empty() ? "" : label + ".") + "v" + std::to_string(++k);
        for (const auto& c : children) out.scheme.attach[c].label = fresh;
        created.push_back(to_string(out.scheme, {{}, seg_id, std::nullopt, fresh}));
      }
      out.replaced.emplace_back(top_name, std::move(created));
    }
  }
  for (const auto& [key, value] : n_map)
    if (!used_keys.count(key)) throw Error(ErrorKind::InvalidRef, "N names " + key + ", which is not a successor of a limit node");
  return out;
}

inline SuccessorMap parse_successor_map(std::string_view text) {
  SuccessorMap out;
  std::istringstream in{std::string(text)};
  std::size_t lineno = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++lineno;
    auto line = detail::strip(raw);
    if (line.empty()) continue;
    auto colon = line.find(':');
    if (colon == std::string::npos) throw Error(ErrorKind::Syntax, "line " + std::to_string(lineno) + ": expected 'succ : nodes'");
    auto key = detail::words(line.substr(0, colon));
    if (key.size() != 1) throw Error(ErrorKind::Syntax, "line " + std::to_string(lineno) + ": one successor per line");
    if (out.count(key[0])) throw Error(ErrorKind::DuplicateId, "line " + std::to_string(lineno) + ": " + key[0]);
    out[key[0]] = detail::words(line.substr(colon + 1));
  }
  return out;
}

// ---------------------------------------------------------------------------
// hat subtree: nodes lying on some high-ray

namespace detail {

inline bool bears_rays(const TreeScheme& s, const std::string& seg) {
  if (s.segment(seg).omega()) return true;
  for (const auto& [child, at] : s.attach)
    if (at.segment == seg && bears_rays(s, child)) return true;
  return false;
}

}  // namespace detail

inline TreeScheme hat_subtree(const TreeScheme& t) {
  if (t.empty() || !detail::bears_rays(t, t.root)) return {};
  TreeScheme out;
  out.root = t.root;
  for (const auto& [id, seg] : t.segments) {
    if (!detail::bears_rays(t, id)) continue;
    Segment kept = seg;
    if (seg.length) {
      std::size_t last = 0;
      for (const auto& [child, at] : t.attach)
        if (at.segment == id && detail::bears_rays(t, child)) last = std::max(last, *at.index);
      kept.length = last + 1;
    }
    out.segments.emplace(id, kept);
    if (id != t.root) out.attach.emplace(id, t.attach.at(id));
  }
  for (const auto& f : t.families) {
    auto frag = hat_subtree(*f.fragment);
    if (frag.empty()) continue;
    out.families.push_back({f.base, std::make_shared<const TreeScheme>(std::move(frag)), f.source});
  }
  return out;
}

// ---------------------------------------------------------------------------
// ray space descriptor and uniform T-graphs

inline std::string ray_point(const std::string& schema_id) { return "[" + schema_id + "]"; }

inline bool has_omega_chain(const TreeScheme& s) {
  return std::any_of(s.segments.begin(), s.segments.end(), [](const auto& kv) { return kv.second.omega(); });
}

inline SpaceDescriptor rayspace_descriptor(const TreeScheme& t) {
  SpaceDescriptor d;
  if (t.empty()) return d;
  for (const auto& [id, seg] : t.segments)
    if (seg.omega()) d.isolated.insert(ray_point(id));
  for (std::size_t f = 0; f < t.families.size(); ++f) {
    const auto& frag = *t.families[f].fragment;
    for (const auto& g : frag.families)
      if (!high_rays(*g.fragment).empty())
        throw Error(ErrorKind::RankTooHigh, "family " + family_id(t, f) + " nests converging rays");
    if (!has_omega_chain(frag)) continue;
    auto limit = ray_point(t.families[f].base);
    d.isolated.erase(limit);
    d.limits.insert(limit);
    for (const auto& [id, seg] : frag.segments)
      if (seg.omega()) d.sequences.insert({family_id(t, f) + "#*/" + id, limit});
  }
  return canonicalize(d);
}

inline std::string tgraph_vertex(const std::string& seg, std::size_t i) { return seg + "." + std::to_string(i); }
inline std::string tgraph_top(const std::string& seg, const std::string& label) {
  return seg + ".top" + (label.empty() ? "" : "." + label);
}

inline GraphPresentation uniform_tgraph(const TreeScheme& t) {
  validate_scheme(t);
  if (t.has_nested_families()) throw Error(ErrorKind::NestingTooDeep, "families nested inside fragments");
  if (auto d = nesting_depth(t); d > 2) throw Error(ErrorKind::NestingTooDeep, "nesting depth " + std::to_string(d));
  GraphPresentation p;
  if (t.empty()) return p;
  auto vertex = [&](const std::string& seg, std::size_t i) -> VertexToken {
    if (t.segment(seg).omega()) return {seg, i};
    return {tgraph_vertex(seg, i), std::nullopt};
  };
  for (const auto& [id, seg] : t.segments) {
    if (seg.omega()) {
      p.generators.emplace(id, GenKind::Ray);
      for (const auto& l : top_labels(t, id)) {
        auto top = tgraph_top(id, l);
        p.core.insert(top);
        p.fans.insert({top, id, Omega{}});
      }
    } else {
      for (std::size_t i = 0; i < *seg.length; ++i) {
        p.core.insert(tgraph_vertex(id, i));
        if (i > 0) p.edges.insert(FiniteEdge::make(vertex(id, i - 1), vertex(id, i)));
      }
    }
  }
  for (const auto& [child, at] : t.attach) {
    VertexToken below = at.top() ? VertexToken{tgraph_top(at.segment, at.label), std::nullopt} : vertex(at.segment, *at.index);
    p.edges.insert(FiniteEdge::make(below, vertex(child, 0)));
  }
  for (std::size_t f = 0; f < t.families.size(); ++f)
    for (const auto& [id, seg] : t.families[f].fragment->segments)
      if (seg.omega()) p.combs.insert({t.families[f].base, family_id(t, f) + "." + id});
  return p;
}

// ---------------------------------------------------------------------------
// normal spanning trees of finite graphs

struct NormalTree {
  std::vector<std::string> order;                 // DFS preorder
  std::map<std::string, std::string> parent;      // roots absent
  std::vector<std::string> roots;
  std::map<std::string, std::size_t> depth;

  bool ancestor_or_equal(const std::string& a, std::string b) const {
    for (;;) {
      if (a == b) return true;
      auto it = parent.find(b);
      if (it == parent.end()) return false;
      b = it->second;
    }
  }
  bool comparable(const std::string& a, const std::string& b) const {
    return ancestor_or_equal(a, b) || ancestor_or_equal(b, a);
  }
};

// Edges of g - K whose endpoints are incomparable in the tree order.
inline std::vector<std::pair<std::string, std::string>> normality_violations(const FiniteGraph& g,
                                                                             const std::set<std::string>& removed,
                                                                             const NormalTree& tree) {
  std::vector<std::pair<std::string, std::string>> out;
  for (auto [a, b] : g.edges) {
    const auto &u = g.vertices[a], &v = g.vertices[b];
    if (removed.count(u) || removed.count(v)) continue;
    if (!tree.comparable(u, v)) out.emplace_back(u, v);
  }
  return out;
}

// Depth-first search of g - K; each component is rooted at a vertex of
// least degree (ties by name) and neighbours are visited in name order.
inline NormalTree normal_tree_search(const FiniteGraph& g, const std::set<std::string>& removed) {
  auto adj = g.adjacency();
  std::vector<bool> alive(g.vertices.size());
  std::vector<std::size_t> deg(g.vertices.size(), 0);
  for (std::size_t v = 0; v < g.vertices.size(); ++v) alive[v] = !removed.count(g.vertices[v]);
  for (std::size_t v = 0; v < g.vertices.size(); ++v)
    for (auto w : adj[v]) deg[v] += alive[v] && alive[w];
  if (std::none_of(alive.begin(), alive.end(), [](bool b) { return b; }))
    throw Error(ErrorKind::EmptyGraph, "no vertices left after removing K");

  NormalTree out;
  std::vector<bool> seen(g.vertices.size(), false);
  std::vector<std::size_t> candidates;
  for (std::size_t v = 0; v < g.vertices.size(); ++v)
    if (alive[v]) candidates.push_back(v);
  std::stable_sort(candidates.begin(), candidates.end(), [&](auto a, auto b) { return deg[a] < deg[b]; });
  for (auto r : candidates) {
    if (seen[r]) continue;
    out.roots.push_back(g.vertices[r]);
    // iterative DFS keeping (vertex, next neighbour position)
    std::vector<std::pair<std::size_t, std::size_t>> stack{{r, 0}};
    seen[r] = true;
    out.order.push_back(g.vertices[r]);
    out.depth[g.vertices[r]] = 0;
    while (!stack.empty()) {
      auto& [v, pos] = stack.back();
      if (pos == adj[v].size()) {
        stack.pop_back();
        continue;
      }
      auto w = adj[v][pos++];
      if (!alive[w] || seen[w]) continue;
      seen[w] = true;
      out.parent[g.vertices[w]] = g.vertices[v];
      out.depth[g.vertices[w]] = out.depth[g.vertices[v]] + 1;
      out.order.push_back(g.vertices[w]);
      stack.emplace_back(w, 0);
    }
  }
  if (auto bad = normality_violations(g, removed, out); !bad.empty())
    throw Error(ErrorKind::Invalid, "search tree is not normal at " + bad.front().first + " -- " + bad.front().second);
  return out;
}

// ---------------------------------------------------------------------------
// .ots text format

// Resolves a [families] entry to its parsed fragment.
using FragmentLoader = std::function<TreeScheme(const std::string&)>;

namespace detail {

inline AttachPoint parse_attach_point(const std::string& s, std::size_t line) {
  auto fail = [&] { throw Error(ErrorKind::Syntax, "line " + std::to_string(line) + ": bad attachment point '" + s + "'"); };
  AttachPoint a;
  if (s.rfind("top(", 0) == 0) {
    auto close = s.find(')');
    if (close == std::string::npos) fail();
    a.segment = s.substr(4, close - 4);
    auto tail = s.substr(close + 1);
    if (!tail.empty()) {
      if (tail[0] != '@' || tail.size() == 1) fail();
      a.label = tail.substr(1);
    }
    return a;
  }
  auto open = s.find('[');
  if (open == std::string::npos || s.back() != ']') fail();
  a.segment = s.substr(0, open);
  a.index = parse_index(s.substr(open + 1, s.size() - open - 2), line);
  return a;
}

}  // namespace detail

inline TreeScheme parse_ots(std::string_view text, const FragmentLoader& load = {}) {
  TreeScheme t;
  std::string section;
  bool root_seen = false;
  std::istringstream in{std::string(text)};
  std::size_t lineno = 0;
  auto err = [&](const std::string& what) { throw Error(ErrorKind::Syntax, "line " + std::to_string(lineno) + ": " + what); };
  for (std::string raw; std::getline(in, raw);) {
    ++lineno;
    auto line = detail::strip(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      auto close = line.find(']');
      if (close == std::string::npos) err("bad section header");
      section = line.substr(1, close - 1);
      static const std::set<std::string> known{"segments", "attach", "families", "root"};
      if (!known.count(section)) err("unknown section [" + section + "]");
      line = detail::strip(line.substr(close + 1));
      if (line.empty()) continue;
      if (section != "root") err("entries start on the line after [" + section + "]");
    }
    auto w = detail::words(line);
    if (section.empty()) {
      err("entry outside any section");
    } else if (section == "segments") {
      if (w.size() == 2 && w[1] == "omega") {
        if (!t.segments.emplace(w[0], Segment{w[0], std::nullopt}).second)
          throw Error(ErrorKind::DuplicateId, "line " + std::to_string(lineno) + ": " + w[0]);
      } else if (w.size() == 3 && w[1] == "finite") {
        auto n = detail::parse_index(w[2], lineno);
        if (!t.segments.emplace(w[0], Segment{w[0], n}).second)
          throw Error(ErrorKind::DuplicateId, "line " + std::to_string(lineno) + ": " + w[0]);
      } else {
        err("expected 'id finite N' or 'id omega'");
      }
    } else if (section == "attach") {
      if (w.size() != 3 || w[1] != "at") err("expected 'child at point'");
      if (t.attach.count(w[0])) throw Error(ErrorKind::DuplicateId, "line " + std::to_string(lineno) + ": " + w[0] + " attached twice");
      t.attach.emplace(w[0], detail::parse_attach_point(w[2], lineno));
    } else if (section == "families") {
      if (w.size() != 2) err("expected 'base fragmentfile'");
      if (!load) err("no loader for fragment " + w[1]);
      t.families.push_back({w[0], std::make_shared<const TreeScheme>(load(w[1])), w[1]});
    } else if (section == "root") {
      if (w.size() != 1 || root_seen) err("exactly one root id");
      t.root = w[0];
      root_seen = true;
    }
  }
  if (!root_seen && !t.segments.empty()) throw Error(ErrorKind::Syntax, "missing [root]");
  validate_scheme(t);
  return t;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Invalid, "cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Fragment paths resolve against the directory of the file naming them.
inline TreeScheme load_ots(const std::filesystem::path& path) {
  auto dir = path.parent_path();
  return parse_ots(read_file(path), [dir](const std::string& rel) { return load_ots(dir / rel); });
}

// Loader over in-memory texts keyed by fragment name.
inline FragmentLoader memory_loader(std::map<std::string, std::string> files) {
  auto shared = std::make_shared<const std::map<std::string, std::string>>(std::move(files));
  return [shared](const std::string& name) -> TreeScheme {
    auto it = shared->find(name);
    if (it == shared->end()) throw Error(ErrorKind::Invalid, "no fragment " + name);
    return parse_ots(it->second, memory_loader(*shared));
  };
}

inline std::string serialize_ots(const TreeScheme& t) {
  std::ostringstream out;
  out << "[segments]\n";
  for (const auto& [id, seg] : t.segments)
    out << id << (seg.omega() ? " omega" : " finite " + std::to_string(*seg.length)) << '\n';
  out << "[attach]\n";
  for (const auto& [child, at] : t.attach) {
    out << child << " at ";
    if (at.top()) out << "top(" << at.segment << ")" << (at.label.empty() ? "" : "@" + at.label);
    else out << at.segment << "[" << *at.index << "]";
    out << '\n';
  }
  out << "[families]\n";
  for (const auto& f : t.families) out << f.base << ' ' << (f.source.empty() ? "fragment.ots" : f.source) << '\n';
  out << "[root]\n" << t.root << '\n';
  return out.str();
}

}  // namespace endgraph
