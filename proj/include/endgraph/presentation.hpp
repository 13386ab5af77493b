#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "endgraph/error.hpp"

namespace endgraph {

enum class GenKind { Ray, Clique };

inline const char* to_string(GenKind k) { return k == GenKind::Ray ? "ray" : "clique"; }

// A vertex of the presented graph: a core vertex `name`, or `name[i]` on a generator.
struct VertexToken {
  std::string name;
  std::optional<std::size_t> index;

  std::string str() const {
    return index ? name + "[" + std::to_string(*index) + "]" : name;
  }
  auto operator<=>(const VertexToken&) const = default;
  bool operator==(const VertexToken&) const = default;
};

struct FiniteEdge {
  VertexToken a, b;  // a.str() <= b.str() after normalize()

  static FiniteEdge make(VertexToken x, VertexToken y) {
    if (y.str() < x.str()) std::swap(x, y);
    return {std::move(x), std::move(y)};
  }
  auto operator<=>(const FiniteEdge&) const = default;
  bool operator==(const FiniteEdge&) const = default;
};

struct Omega {
  auto operator<=>(const Omega&) const = default;
  bool operator==(const Omega&) const = default;
};
using IndexSet = std::vector<std::size_t>;  // sorted, unique
using FanSupport = std::variant<Omega, IndexSet>;

struct Fan {
  std::string vertex;
  std::string generator;
  FanSupport support;

  bool omega() const { return std::holds_alternative<Omega>(support); }
  auto operator<=>(const Fan&) const = default;
  bool operator==(const Fan&) const = default;
};

struct Ladder {
  std::string a, b;  // a <= b

  static Ladder make(std::string x, std::string y) {
    if (y < x) std::swap(x, y);
    return {std::move(x), std::move(y)};
  }
  auto operator<=>(const Ladder&) const = default;
  bool operator==(const Ladder&) const = default;
};

struct Comb {
  std::string base;
  std::string family;
  auto operator<=>(const Comb&) const = default;
  bool operator==(const Comb&) const = default;
};

struct GraphPresentation {
  std::set<std::string> core;
  std::map<std::string, GenKind> generators;
  std::set<FiniteEdge> edges;
  std::set<Fan> fans;
  std::set<Ladder> ladders;
  std::set<Comb> combs;

  bool operator==(const GraphPresentation&) const = default;

  bool is_generator(const std::string& id) const { return generators.count(id) > 0; }
  bool is_core(const std::string& id) const { return core.count(id) > 0; }
  bool is_ray(const std::string& id) const {
    auto it = generators.find(id);
    return it != generators.end() && it->second == GenKind::Ray;
  }
  bool has_omega_fan(const std::string& v) const {
    return std::any_of(fans.begin(), fans.end(),
                       [&](const Fan& f) { return f.vertex == v && f.omega(); });
  }
  std::vector<std::string> generator_ids() const {
    std::vector<std::string> out;
    for (const auto& [id, kind] : generators) out.push_back(id);
    return out;
  }
};

// ---------------------------------------------------------------------------
// validation

struct Violation {
  std::string kind;
  std::string detail;
  bool operator==(const Violation&) const = default;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  std::size_t count(std::string_view kind) const {
    return static_cast<std::size_t>(std::count_if(
        violations.begin(), violations.end(), [&](const Violation& v) { return v.kind == kind; }));
  }
};

inline ValidationReport validate(const GraphPresentation& p) {
  ValidationReport r;
  auto add = [&](std::string kind, std::string detail) {
    r.violations.push_back({std::move(kind), std::move(detail)});
  };
  std::set<std::string> families;
  for (const auto& c : p.combs) families.insert(c.family);

  auto check_token = [&](const VertexToken& t, const std::string& where) {
    if (p.is_core(t.name)) {
      if (t.index) add("dangling-reference", where + ": core vertex " + t.name + " takes no index");
    } else if (p.is_generator(t.name)) {
      if (!t.index) add("dangling-reference", where + ": generator " + t.name + " needs an index");
    } else {
      add("dangling-reference", where + ": undeclared vertex " + t.str());
    }
  };
  for (const auto& e : p.edges) {
    std::string where = "edge " + e.a.str() + " " + e.b.str();
    check_token(e.a, where);
    check_token(e.b, where);
    if (e.a == e.b) add("self-loop", where);
  }
  for (const auto& f : p.fans) {
    std::string where = "fan " + f.vertex + " " + f.generator;
    if (!p.is_core(f.vertex)) add("dangling-reference", where + ": undeclared core vertex " + f.vertex);
    if (families.count(f.generator)) {
      add("comb-pendant-fan", where + ": comb pendants may not carry fans");
    } else if (!p.is_generator(f.generator)) {
      add("dangling-reference", where + ": undeclared generator " + f.generator);
    }
    if (auto* idx = std::get_if<IndexSet>(&f.support); idx && idx->empty())
      add("empty-fan-set", where);
  }
  for (const auto& l : p.ladders) {
    std::string where = "ladder " + l.a + " " + l.b;
    if (l.a == l.b) add("self-ladder", where);
    for (const auto& g : {l.a, l.b})
      if (!p.is_generator(g)) add("dangling-reference", where + ": undeclared generator " + g);
  }
  std::map<std::string, int> family_uses;
  for (const auto& c : p.combs) {
    std::string where = "comb " + c.base + " " + c.family;
    if (!p.is_generator(c.base)) {
      add("dangling-reference", where + ": undeclared generator " + c.base);
    } else if (!p.is_ray(c.base)) {
      add("comb-base-not-ray", where);
    }
    if (c.base == c.family) add("self-ladder", where + ": comb family reuses its base id");
    if (++family_uses[c.family] == 2) add("duplicate-family", where);
  }
  return r;
}

// ---------------------------------------------------------------------------
// finite graphs and truncation

struct FiniteGraph {
  std::vector<std::string> vertices;                        // sorted
  std::set<std::pair<std::size_t, std::size_t>> edges;      // first < second

  std::optional<std::size_t> index_of(const std::string& name) const {
    auto it = std::lower_bound(vertices.begin(), vertices.end(), name);
    if (it == vertices.end() || *it != name) return std::nullopt;
    return static_cast<std::size_t>(it - vertices.begin());
  }
  bool has_edge(const std::string& a, const std::string& b) const {
    auto i = index_of(a), j = index_of(b);
    if (!i || !j) return false;
    return edges.count({std::min(*i, *j), std::max(*i, *j)}) > 0;
  }
  std::vector<std::vector<std::size_t>> adjacency() const {
    std::vector<std::vector<std::size_t>> adj(vertices.size());
    for (auto [a, b] : edges) {
      adj[a].push_back(b);
      adj[b].push_back(a);
    }
    for (auto& row : adj) std::sort(row.begin(), row.end());
    return adj;
  }
  std::size_t degree(std::size_t v) const {
    std::size_t d = 0;
    for (auto [a, b] : edges) d += (a == v) + (b == v);
    return d;
  }
};

// Name of vertex j on the i-th pendant ray of a comb family.
inline std::string pendant_vertex(const std::string& family, std::size_t i, std::size_t j) {
  return family + "/" + std::to_string(i) + "[" + std::to_string(j) + "]";
}
inline std::string generator_vertex(const std::string& g, std::size_t i) {
  return g + "[" + std::to_string(i) + "]";
}

enum class EdgeOrigin { Path, Clique, OmegaFan, FiniteFan, Ladder, CombAttach, Declared };

struct AnnotatedTruncation {
  FiniteGraph graph;
  std::map<std::pair<std::size_t, std::size_t>, EdgeOrigin> origin;
};

namespace detail {

class TruncationBuilder {
 public:
  void vertex(const std::string& v) { names_.insert(v); }
  void edge(const std::string& a, const std::string& b, EdgeOrigin o) {
    if (a == b) return;
    auto key = a < b ? std::pair{a, b} : std::pair{b, a};
    // First origin wins; infinite families are added before declared edges.
    pending_.emplace(std::move(key), o);
  }
  AnnotatedTruncation build() && {
    AnnotatedTruncation out;
    out.graph.vertices.assign(names_.begin(), names_.end());
    for (const auto& [key, o] : pending_) {
      auto i = *out.graph.index_of(key.first), j = *out.graph.index_of(key.second);
      std::pair<std::size_t, std::size_t> e{std::min(i, j), std::max(i, j)};
      out.graph.edges.insert(e);
      out.origin.emplace(e, o);
    }
    return out;
  }

 private:
  std::set<std::string> names_;
  std::map<std::pair<std::string, std::string>, EdgeOrigin> pending_;
};

}  // namespace detail

inline AnnotatedTruncation truncate_annotated(const GraphPresentation& p, std::size_t n) {
  if (n == 0) throw Error(ErrorKind::Invalid, "truncation depth must be positive");
  detail::TruncationBuilder b;
  for (const auto& v : p.core) b.vertex(v);
  for (const auto& [g, kind] : p.generators) {
    for (std::size_t i = 0; i < n; ++i) b.vertex(generator_vertex(g, i));
    if (kind == GenKind::Ray) {
      for (std::size_t i = 0; i + 1 < n; ++i)
        b.edge(generator_vertex(g, i), generator_vertex(g, i + 1), EdgeOrigin::Path);
    } else {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
          b.edge(generator_vertex(g, i), generator_vertex(g, j), EdgeOrigin::Clique);
    }
  }
  for (const auto& l : p.ladders)
    for (std::size_t i = 0; i < n; ++i)
      b.edge(generator_vertex(l.a, i), generator_vertex(l.b, i), EdgeOrigin::Ladder);
  for (const auto& c : p.combs) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) b.vertex(pendant_vertex(c.family, i, j));
      for (std::size_t j = 0; j + 1 < n; ++j)
        b.edge(pendant_vertex(c.family, i, j), pendant_vertex(c.family, i, j + 1), EdgeOrigin::Path);
      b.edge(generator_vertex(c.base, i), pendant_vertex(c.family, i, 0), EdgeOrigin::CombAttach);
    }
  }
  for (const auto& f : p.fans) {
    if (f.omega()) {
      for (std::size_t i = 0; i < n; ++i)
        b.edge(f.vertex, generator_vertex(f.generator, i), EdgeOrigin::OmegaFan);
    } else {
      for (auto i : std::get<IndexSet>(f.support))
        if (i < n) b.edge(f.vertex, generator_vertex(f.generator, i), EdgeOrigin::FiniteFan);
    }
  }
  for (const auto& e : p.edges) {
    for (const auto* t : {&e.a, &e.b})
      if (t->index && *t->index >= n)
        throw Error(ErrorKind::IndexOutOfRange,
                    "edge " + e.a.str() + " " + e.b.str() + " needs depth > " + std::to_string(*t->index));
    b.edge(e.a.str(), e.b.str(), EdgeOrigin::Declared);
  }
  return std::move(b).build();
}

inline FiniteGraph truncate(const GraphPresentation& p, std::size_t n) {
  return truncate_annotated(p, n).graph;
}

// ---------------------------------------------------------------------------
// .egp text format

namespace detail {

inline std::string strip(std::string_view s) {
  auto hash = s.find('#');
  if (hash != std::string_view::npos) s = s.substr(0, hash);
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

inline bool valid_id(std::string_view id) {
  if (id.empty()) return false;
  return id.find_first_of("[](),#/@ \t") == std::string_view::npos;
}

inline std::size_t parse_index(const std::string& s, std::size_t line) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    throw Error(ErrorKind::Syntax, "line " + std::to_string(line) + ": bad index '" + s + "'");
  return static_cast<std::size_t>(std::stoull(s));
}

inline VertexToken parse_token(const std::string& s, std::size_t line) {
  auto open = s.find('[');
  if (open == std::string::npos) {
    if (!valid_id(s)) throw Error(ErrorKind::Syntax, "line " + std::to_string(line) + ": bad vertex '" + s + "'");
    return {s, std::nullopt};
  }
  if (s.back() != ']') throw Error(ErrorKind::Syntax, "line " + std::to_string(line) + ": bad vertex '" + s + "'");
  std::string name = s.substr(0, open);
  if (!valid_id(name)) throw Error(ErrorKind::Syntax, "line " + std::to_string(line) + ": bad vertex '" + s + "'");
  return {name, parse_index(s.substr(open + 1, s.size() - open - 2), line)};
}

}  // namespace detail

inline GraphPresentation parse_egp(std::string_view text) {
  GraphPresentation p;
  std::set<std::string> ids;
  auto claim = [&](const std::string& id, std::size_t line) {
    if (!detail::valid_id(id))
      throw Error(ErrorKind::Syntax, "line " + std::to_string(line) + ": bad id '" + id + "'");
    if (!ids.insert(id).second)
      throw Error(ErrorKind::DuplicateId, "line " + std::to_string(line) + ": " + id);
  };
  std::string section;
  std::istringstream in{std::string(text)};
  std::size_t lineno = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++lineno;
    std::string line = detail::strip(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw Error(ErrorKind::Syntax, "line " + std::to_string(lineno) + ": bad section header");
      section = line.substr(1, line.size() - 2);
      static const std::set<std::string> known{"core", "generators", "edges", "fans", "ladders", "combs"};
      if (!known.count(section))
        throw Error(ErrorKind::Syntax, "line " + std::to_string(lineno) + ": unknown section [" + section + "]");
      continue;
    }
    auto w = detail::words(line);
    auto expect = [&](std::size_t k) {
      if (w.size() != k)
        throw Error(ErrorKind::Syntax, "line " + std::to_string(lineno) + ": expected " + std::to_string(k) +
                                           " fields in [" + section + "]");
    };
    if (section.empty()) {
      throw Error(ErrorKind::Syntax, "line " + std::to_string(lineno) + ": entry outside any section");
    } else if (section == "core") {
      for (const auto& id : w) {
        claim(id, lineno);
        p.core.insert(id);
      }
    } else if (section == "generators") {
      expect(2);
      GenKind k;
      if (w[1] == "ray") k = GenKind::Ray;
      else if (w[1] == "clique") k = GenKind::Clique;
      else throw Error(ErrorKind::Syntax, "line " + std::to_string(lineno) + ": kind must be ray or clique");
      claim(w[0], lineno);
      p.generators.emplace(w[0], k);
    } else if (section == "edges") {
      expect(2);
      p.edges.insert(FiniteEdge::make(detail::parse_token(w[0], lineno), detail::parse_token(w[1], lineno)));
    } else if (section == "fans") {
      expect(3);
      Fan f{w[0], w[1], Omega{}};
      if (w[2] != "omega") {
        IndexSet idx;
        std::string item;
        std::istringstream items(w[2]);
        while (std::getline(items, item, ',')) idx.push_back(detail::parse_index(item, lineno));
        std::sort(idx.begin(), idx.end());
        idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
        f.support = std::move(idx);
      }
      p.fans.insert(std::move(f));
    } else if (section == "ladders") {
      expect(2);
      p.ladders.insert(Ladder::make(w[0], w[1]));
    } else if (section == "combs") {
      expect(2);
      claim(w[1], lineno);
      p.combs.insert({w[0], w[1]});
    }
  }
  return p;
}

inline std::string serialize_egp(const GraphPresentation& p) {
  auto section = [](std::ostringstream& out, const char* name, std::vector<std::string> lines) {
    std::sort(lines.begin(), lines.end());
    out << '[' << name << "]\n";
    for (const auto& l : lines) out << l << '\n';
  };
  std::ostringstream out;
  section(out, "core", {p.core.begin(), p.core.end()});
  std::vector<std::string> lines;
  for (const auto& [id, k] : p.generators) lines.push_back(id + " " + to_string(k));
  section(out, "generators", std::move(lines));
  lines = {};
  for (const auto& e : p.edges) lines.push_back(e.a.str() + " " + e.b.str());
  section(out, "edges", std::move(lines));
  lines = {};
  for (const auto& f : p.fans) {
    std::string s = f.vertex + " " + f.generator + " ";
    if (f.omega()) {
      s += "omega";
    } else {
      const auto& idx = std::get<IndexSet>(f.support);
      for (std::size_t i = 0; i < idx.size(); ++i) s += (i ? "," : "") + std::to_string(idx[i]);
    }
    lines.push_back(std::move(s));
  }
  section(out, "fans", std::move(lines));
  lines = {};
  for (const auto& l : p.ladders) lines.push_back(l.a + " " + l.b);
  section(out, "ladders", std::move(lines));
  lines = {};
  for (const auto& c : p.combs) lines.push_back(c.base + " " + c.family);
  section(out, "combs", std::move(lines));
  return out.str();
}

}  // namespace endgraph
