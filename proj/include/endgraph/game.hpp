#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "endgraph/error.hpp"
#include "endgraph/ordertree.hpp"
#include "endgraph/rayset.hpp"

namespace endgraph {

class IllegalMove : public Error {
 public:
  IllegalMove(std::string reason, const std::string& what)
      : Error(ErrorKind::IllegalMove, reason + ": " + what), reason(std::move(reason)) {}
  std::string reason;  // not-contained, overlap, not-covering, not-basic
};

struct Cover {
  BasicOpen target;
  std::vector<BasicOpen> parts;
  std::vector<std::string> kinds;  // "type1".."type3" for strategy covers, parallel to parts
};

// ---------------------------------------------------------------------------
// limit nodes below a node and their cofinal sequences

// Nearest top at or below n, if any.
inline std::optional<Node> hat(const TreeScheme& t, const Node& n) {
  for (const auto& st : spine(t, n))
    if (st.via_top) return Node{st.scope, st.segment, std::nullopt, *st.via_top};
  return std::nullopt;
}

// The i-th member of the cofinal sequence below a top: seg[0] < seg[1] < ...
inline Node cofinal(const Node& top, std::size_t i) { return {top.scope, top.segment, i, {}}; }

// Least i with t < cofinal(top, i); requires t < top.
inline std::size_t cofinal_index(const Node& node, const Node& top) {
  if (node.scope == top.scope && node.segment == top.segment && !node.is_top()) return *node.index + 1;
  return 0;
}

// Drops excluded nodes incomparable with the anchor; nullopt if one lies at or below it.
inline std::optional<BasicOpen> normalize(const TreeScheme& t, const BasicOpen& v) {
  std::vector<Node> kept;
  for (const auto& m : v.excluded) {
    if (order_le(t, m, v.anchor)) return std::nullopt;
    if (order_le(t, v.anchor, m)) kept.push_back(m);
  }
  return BasicOpen::make(v.anchor, std::move(kept));
}

inline void check_basic(const TreeScheme& t, const BasicOpen& v, ErrorKind kind = ErrorKind::AnchorNotInTree) {
  try {
    check_node(t, v.anchor);
  } catch (const Error& e) {
    throw Error(kind, e.what());
  }
  for (const auto& m : v.excluded) {
    try {
      check_node(t, m);
    } catch (const Error& e) {
      throw Error(kind == ErrorKind::AnchorNotInTree ? ErrorKind::InvalidRef : kind, e.what());
    }
  }
}

// Player II's stationary answer to [t,F]: type-1 sets per successor of t,
// type-2 and type-3 sets per excluded node whose limit node lies above t.
// Empty parts and repeated sets are dropped.
inline Cover canonical_cover(const RaySpace& space, const BasicOpen& v) {
  const auto& t = space.scheme();
  check_basic(t, v);
  Cover out{v, {}, {}};
  auto norm = normalize(t, v);
  if (!norm) return out;
  const auto& anchor = norm->anchor;
  const auto& f = norm->excluded;

  struct Limit {
    Node top, step;  // m̂ and m̂_{i(m)}
  };
  std::vector<Limit> limits;
  for (const auto& m : f) {
    auto h = hat(t, m);
    if (!h || !order_lt(t, anchor, *h)) continue;
    limits.push_back({*h, cofinal(*h, cofinal_index(anchor, *h))});
  }
  // Limit nodes strictly above the base, plus every excluded node at or above it
  // (an excluded anchor empties the part, keeping it inside V).
  auto above = [&](const Node& base, const std::vector<Node>& nodes) {
    std::vector<Node> out;
    for (const auto& n : nodes)
      if (order_lt(t, base, n)) out.push_back(n);
    for (const auto& m : f)
      if (order_le(t, base, m)) out.push_back(m);
    return out;
  };

  std::vector<RaySet> seen;
  auto add = [&](Node a, std::vector<Node> ex, const char* kind) {
    for (const auto& m : f)
      if (order_le(t, m, a)) return;  // [a,...] would leave V
    auto b = normalize(t, BasicOpen::make(std::move(a), std::move(ex)));
    if (!b) return;
    auto set = evaluate(space, *b);
    if (set.empty() || std::find(seen.begin(), seen.end(), set) != seen.end()) return;
    seen.push_back(std::move(set));
    out.parts.push_back(std::move(*b));
    out.kinds.emplace_back(kind);
  };

  for (const auto& s : successors(t, anchor)) {
    std::vector<Node> ex = f;
    for (const auto& l : limits)
      if (order_le(t, s, l.step)) ex.push_back(l.step);  // non-strict, so [s,...] misses type-2 anchors
    add(s, std::move(ex), "type1");
  }
  for (const auto& l : limits) {
    std::vector<Node> pool;
    for (const auto& k : limits) {
      pool.push_back(k.step);
      pool.push_back(k.top);
    }
    add(l.step, above(l.step, pool), "type2");
  }
  for (const auto& l : limits) {
    std::vector<Node> pool;
    for (const auto& k : limits) pool.push_back(k.step);
    add(l.top, above(l.top, pool), "type3");
  }
  return out;
}

using Strategy = std::function<Cover(const BasicOpen&)>;

inline Strategy canonical_strategy(const RaySpace& space) {
  return [&space](const BasicOpen& v) { return canonical_cover(space, v); };
}

// ---------------------------------------------------------------------------
// referee

struct Round {
  BasicOpen move;
  std::optional<Cover> cover;
};

enum class Winner { PlayerI, PlayerII };
inline const char* to_string(Winner w) { return w == Winner::PlayerI ? "I" : "II"; }

struct Capture {
  std::string point;
  std::string remainder;
  std::vector<std::string> k_a;  // disjoint subbasic pieces of the remainder, or the remainder itself
  bool remainder_basic = false;
};

struct Adjudication {
  Winner winner = Winner::PlayerI;
  std::optional<Capture> capture;
  std::string intersection;
  bool empty_intersection = false;
  bool resolved_by_anchor = false;  // several decompositions; the point is the ray the anchors climb
  std::string reason;
  RaySet intersection_rays, remainder_rays;
};

struct MatchState {
  std::vector<Round> rounds;
  std::optional<Adjudication> result;
  std::size_t requested_rounds = 0;
  std::string continuation;  // how the policy was extended past its script, if it was
  std::optional<RayRef> limit_ray;

  bool running() const { return !result; }
  bool awaiting_move() const { return rounds.empty() || rounds.back().cover.has_value(); }
};

class Referee {
 public:
  explicit Referee(const RaySpace& space) : space_(space) {}

  const MatchState& state() const { return state_; }
  MatchState& state() { return state_; }
  const RaySpace& space() const { return space_; }

  void move(const BasicOpen& m) {
    if (!state_.running()) throw Error(ErrorKind::Invalid, "match already adjudicated");
    if (!state_.awaiting_move()) throw Error(ErrorKind::Invalid, "Player II has not answered yet");
    try {
      check_basic(space_.scheme(), m, ErrorKind::InvalidRef);
    } catch (const Error& e) {
      throw IllegalMove("not-basic", e.what());
    }
    if (!state_.rounds.empty()) {
      auto set = evaluate(space_, m);
      const auto& parts = state_.rounds.back().cover->parts;
      bool inside = std::any_of(parts.begin(), parts.end(),
                                [&](const BasicOpen& p) { return set.subset_of(evaluate(space_, p)); });
      if (!inside) throw IllegalMove("not-contained", to_string(space_.scheme(), m) + " lies in no part of the last cover");
    }
    state_.rounds.push_back({m, std::nullopt});
  }

  void answer(const Cover& c) {
    if (!state_.running()) throw Error(ErrorKind::Invalid, "match already adjudicated");
    if (state_.awaiting_move()) throw Error(ErrorKind::Invalid, "Player I has not moved yet");
    validate_cover(space_, c, state_.rounds.back().move);
    state_.rounds.back().cover = c;
  }

  static void validate_cover(const RaySpace& space, const Cover& c, const BasicOpen& target) {
    const auto& t = space.scheme();
    if (c.target != target) throw IllegalMove("not-covering", "cover answers " + to_string(t, c.target));
    std::vector<RaySet> sets;
    for (const auto& p : c.parts) {
      try {
        check_basic(t, p, ErrorKind::InvalidRef);
      } catch (const Error& e) {
        throw IllegalMove("not-basic", e.what());
      }
      sets.push_back(evaluate(space, p));
    }
    for (std::size_t i = 0; i < sets.size(); ++i)
      for (std::size_t j = i + 1; j < sets.size(); ++j)
        if (!sets[i].disjoint(sets[j]))
          throw IllegalMove("overlap", to_string(t, c.parts[i]) + " meets " + to_string(t, c.parts[j]));
    auto whole = evaluate(space, target);
    RaySet uni;
    for (const auto& s : sets) {
      if (!s.subset_of(whole)) throw IllegalMove("not-covering", "a part leaves " + to_string(t, target));
      uni = uni | s;
    }
    if (uni != whole) throw IllegalMove("not-covering", space.str(whole - uni) + " is uncovered");
  }

 private:
  const RaySpace& space_;
  MatchState state_;
};

// ---------------------------------------------------------------------------
// adjudication

// ⋂ U_n = {x} ∪ A with A open and x unique; `anchor_ray` is the ray the anchors climb.
inline Adjudication adjudicate(const RaySpace& space, const RaySet& intersection, const std::optional<RayRef>& anchor_ray,
                               const std::vector<Node>& exclusions = {}) {
  const auto& t = space.scheme();
  Adjudication out;
  out.intersection_rays = intersection;
  out.intersection = space.str(intersection);
  if (intersection.empty()) {
    out.empty_intersection = true;
    out.reason = "empty intersection";
    return out;
  }
  std::optional<RayRef> x;
  auto bad = space.non_interior_limits(intersection);
  if (bad.size() == 1) {
    x = space.parse_ray(bad.front());
  } else if (bad.size() > 1) {
    out.reason = std::to_string(bad.size()) + " limit rays are not interior";
    return out;
  } else if (auto n = intersection.size(); n && *n == 1) {
    x = space.least(intersection);
  } else if (anchor_ray && space.contains(intersection, *anchor_ray)) {
    x = anchor_ray;
    out.resolved_by_anchor = true;
  } else {
    out.reason = "no unique point";
    return out;
  }
  auto rest = intersection - space.singleton(*x);
  if (!space.is_open(rest)) {
    out.reason = "remainder is not open";
    return out;
  }
  out.winner = Winner::PlayerII;
  out.remainder_rays = rest;
  Capture cap{space.ray_id(*x), space.str(rest), {}, false};
  RaySet covered;
  for (const auto& top : tops_of(t, *x)) {
    auto piece = space.up(top) & rest;
    if (piece.empty()) continue;
    std::vector<Node> ex;
    for (const auto& f : exclusions)
      if (order_lt(t, top, f)) ex.push_back(f);
    auto b = BasicOpen::make(top, ex);
    if (evaluate(space, b) != piece) b = BasicOpen::make(top, {});
    covered = covered | evaluate(space, b);
    cap.k_a.push_back(to_string(t, b));
  }
  cap.remainder_basic = covered != rest;
  if (cap.remainder_basic) cap.k_a = {cap.remainder};
  out.capture = std::move(cap);
  return out;
}

// ---------------------------------------------------------------------------
// Player I policies

struct TranscriptStep {
  std::size_t part = 0;
  std::optional<std::string> shrink;  // "t F..." replacing the chosen part
};

// Lines "part K" each optionally followed by "shrink t F...".
inline std::vector<TranscriptStep> parse_transcript(std::string_view text) {
  std::vector<TranscriptStep> out;
  std::istringstream in{std::string(text)};
  std::size_t lineno = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++lineno;
    auto line = detail::strip(raw);
    if (line.empty()) continue;
    auto w = detail::words(line);
    if (w[0] == "part" && w.size() == 2) {
      out.push_back({detail::parse_index(w[1], lineno), std::nullopt});
    } else if (w[0] == "shrink" && w.size() >= 2 && !out.empty() && !out.back().shrink) {
      out.back().shrink = detail::strip(line.substr(6));
    } else if (w[0] == "quit") {
      break;
    } else {
      throw Error(ErrorKind::Syntax, "line " + std::to_string(lineno) + ": expected 'part K', 'shrink t F...' or 'quit'");
    }
  }
  return out;
}

class PlayerIPolicy {
 public:
  enum class Kind { Descend, Random, Oscillate, Script };

  static PlayerIPolicy descend(RayRef target) {
    PlayerIPolicy p(Kind::Descend);
    p.target_ = std::move(target);
    return p;
  }
  // Random parts for `wander` rounds (half the match when unset), then descent.
  static PlayerIPolicy random(std::uint64_t seed, std::optional<std::size_t> wander = std::nullopt) {
    PlayerIPolicy p(Kind::Random);
    p.seed_ = seed;
    p.rng_.seed(seed);
    p.wander_ = wander;
    return p;
  }
  // Part index script[round % len] modulo the number of parts, repeated forever.
  static PlayerIPolicy oscillate(std::vector<std::size_t> script) {
    if (script.empty()) throw Error(ErrorKind::Invalid, "empty oscillation script");
    PlayerIPolicy p(Kind::Oscillate);
    p.script_ = std::move(script);
    return p;
  }
  // Replays a transcript, then descends to the least ray left.
  static PlayerIPolicy scripted(std::vector<TranscriptStep> steps) {
    PlayerIPolicy p(Kind::Script);
    p.steps_ = std::move(steps);
    return p;
  }

  // descend:RAY | random:SEED | oscillate:K.K.K (also comma separated)
  static PlayerIPolicy parse(const RaySpace& space, const std::string& spec) {
    auto colon = spec.find(':');
    if (colon == std::string::npos) throw Error(ErrorKind::Syntax, "policy needs kind:argument");
    auto kind = spec.substr(0, colon), arg = spec.substr(colon + 1);
    if (kind == "descend") return descend(space.parse_ray(arg));
    if (kind == "random") return random(std::stoull(arg));
    if (kind == "oscillate") {
      std::vector<std::size_t> script;
      for (char& c : arg)
        if (c == '.' || c == ',') c = ' ';
      for (const auto& w : detail::words(arg)) script.push_back(detail::parse_index(w, 0));
      return oscillate(std::move(script));
    }
    throw Error(ErrorKind::Syntax, "unknown policy " + kind);
  }

  Kind kind() const { return kind_; }
  std::string name(const RaySpace& space) const {
    switch (kind_) {
      case Kind::Descend: return "descend:" + space.ray_id(*target_);
      case Kind::Random: return "random:" + std::to_string(seed_);
      case Kind::Oscillate: {
        std::string s;
        for (auto k : script_) s += (s.empty() ? "" : ".") + std::to_string(k);
        return "oscillate:" + s;
      }
      case Kind::Script: return "script";
    }
    return "";
  }
  void set_default_wander(std::size_t w) {
    if (!wander_) wander_ = w;
  }
  bool finite_prefix_done(std::size_t round) const {
    if (kind_ == Kind::Script) return round > steps_.size();
    if (kind_ == Kind::Random) return round > wander_.value_or(0);
    return false;
  }

  BasicOpen first_move(const RaySpace& space) const { return BasicOpen::make(root_node(space.scheme()), {}); }

  // Next move after the last cover in `state`.
  BasicOpen next(const RaySpace& space, const MatchState& state) {
    const auto& last = state.rounds.back();
    const auto& parts = last.cover->parts;
    if (parts.empty()) throw Error(ErrorKind::LimitNotComputable, "the last move is empty");
    std::size_t round = state.rounds.size();
    // The part holding r, shrunk to start at r's own chain.
    auto toward = [&](const RayRef& r) {
      for (const auto& p : parts) {
        if (!space.contains(evaluate(space, p), r)) continue;
        if (p.anchor.scope == r.scope && p.anchor.segment == r.segment) return p;
        return *normalize(space.scheme(), BasicOpen::make({r.scope, r.segment, 0, {}}, p.excluded));
      }
      throw Error(ErrorKind::Invalid, "no part holds " + space.ray_id(r));
    };
    auto settle = [&]() {
      if (!settled_) settled_ = space.least(evaluate(space, last.move));
      return toward(*settled_);
    };
    switch (kind_) {
      case Kind::Descend:
        return toward(*target_);
      case Kind::Random:
        if (round > wander_.value_or(0)) return settle();
        return parts[std::uniform_int_distribution<std::size_t>(0, parts.size() - 1)(rng_)];
      case Kind::Oscillate:
        return parts[script_[(round - 1) % script_.size()] % parts.size()];
      case Kind::Script: {
        if (round > steps_.size()) return settle();
        const auto& step = steps_[round - 1];
        if (step.part >= parts.size())
          throw IllegalMove("not-contained", "part " + std::to_string(step.part) + " of " + std::to_string(parts.size()));
        if (!step.shrink) return parts[step.part];
        return parse_basic_open(space.scheme(), *step.shrink);
      }
    }
    throw Error(ErrorKind::Invalid, "unknown policy");
  }

 private:
  explicit PlayerIPolicy(Kind k) : kind_(k) {}
  Kind kind_;
  std::optional<RayRef> target_, settled_;
  std::uint64_t seed_ = 0;
  std::mt19937_64 rng_;
  std::optional<std::size_t> wander_;
  std::vector<std::size_t> script_;
  std::vector<TranscriptStep> steps_;
};

// ---------------------------------------------------------------------------
// matches

namespace detail {

// The anchors settle on one omega chain and the part of the moves above it stops changing.
inline std::optional<RayRef> settled_limit(const RaySpace& space, const MatchState& s, std::size_t window) {
  if (s.rounds.size() < window) return std::nullopt;
  const auto& t = space.scheme();
  const auto& last = s.rounds.back().move.anchor;
  if (last.is_top() || !scheme_at(t, last.scope).segment(last.segment).omega()) return std::nullopt;
  RayRef r{last.scope, last.segment};
  auto above = space.above_ray(r);
  std::optional<RaySet> stable;
  std::optional<std::size_t> prev;
  for (std::size_t k = s.rounds.size() - window; k < s.rounds.size(); ++k) {
    const auto& a = s.rounds[k].move.anchor;
    if (a.scope != r.scope || a.segment != r.segment || a.is_top()) return std::nullopt;
    if (prev && *a.index <= *prev) return std::nullopt;
    prev = a.index;
    auto cut = evaluate(space, s.rounds[k].move) & above;
    if (stable && *stable != cut) return std::nullopt;
    stable = cut;
  }
  return r;
}

}  // namespace detail

struct MatchOptions {
  std::size_t window = 4;   // rounds of agreement before the limit is read off
  std::size_t overrun = 64; // extra rounds allowed past the requested count
};

// Plays `rounds` rounds (and more until the limit settles), then adjudicates.
inline MatchState run_match(const RaySpace& space, PlayerIPolicy policy, std::size_t rounds, MatchOptions opt = {}) {
  if (rounds < 1) throw Error(ErrorKind::Invalid, "a match needs at least one round");
  policy.set_default_wander(rounds / 2);
  Referee ref(space);
  auto strategy = canonical_strategy(space);
  ref.state().requested_rounds = rounds;
  ref.move(policy.first_move(space));
  ref.answer(strategy(ref.state().rounds.back().move));
  std::optional<RayRef> limit;
  for (std::size_t n = 1; n < rounds + opt.overrun; ++n) {
    if (n >= rounds && (limit = detail::settled_limit(space, ref.state(), opt.window))) break;
    if (ref.state().rounds.back().cover->parts.empty()) break;
    if (policy.finite_prefix_done(n) && ref.state().continuation.empty()) ref.state().continuation = "descend-least";
    ref.move(policy.next(space, ref.state()));
    ref.answer(strategy(ref.state().rounds.back().move));
  }
  auto& st = ref.state();
  if (!limit) limit = detail::settled_limit(space, st, opt.window);
  const auto& last = st.rounds.back();
  auto final_set = evaluate(space, last.move);
  if (!limit && !final_set.empty())
    throw Error(ErrorKind::LimitNotComputable, "anchors did not settle within " + std::to_string(rounds + opt.overrun) + " rounds");
  st.limit_ray = limit;
  auto meet = limit ? final_set & space.above_ray(*limit) : final_set;
  st.result = adjudicate(space, meet, limit, last.move.excluded);
  return st;
}

}  // namespace endgraph
