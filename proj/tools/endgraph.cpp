// endgraph: command-line front end for the end-space library.
// Exit codes: 0 pass, 1 check failure, 2 usage or input error.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <ranges>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "endgraph/endgraph.hpp"

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;
using namespace endgraph;

namespace {

struct Globals {
  bool human = false;
  std::optional<std::size_t> budget_ms;
  std::uint64_t seed = 7;
};

struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// output

void render_human(const json& j, const std::string& indent, std::ostream& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) {
      if (v.is_structured() && !v.empty()) {
        out << indent << k << ":\n";
        render_human(v, indent + "  ", out);
      } else {
        out << indent << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
      }
    }
  } else if (j.is_array()) {
    for (const auto& v : j) {
      if (v.is_structured()) {
        out << indent << "-\n";
        render_human(v, indent + "  ", out);
      } else {
        out << indent << "- " << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
      }
    }
  } else {
    out << indent << j.dump() << '\n';
  }
}

void emit(const Globals& g, const json& j) {
  if (g.human) render_human(j, "", std::cout);
  else std::cout << j.dump(2) << '\n';
}

void write_out(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Usage("cannot write " + path);
  out << text;
}

json descriptor_json(const SpaceDescriptor& d) {
  json limits = json::array();
  for (const auto& l : d.limits) {
    std::size_t n = 0;
    for (const auto& s : d.sequences) n += s.limit == l;
    limits.push_back({{"point", l}, {"sequences", n}});
  }
  json seqs = json::array();
  for (const auto& s : d.sequences) seqs.push_back({{"family", s.family}, {"limit", s.limit}});
  return {{"isolated", d.isolated.size()},
          {"limits", limits},
          {"free_families", d.free_families.size()},
          {"points", {{"isolated", d.isolated}, {"free_families", d.free_families}, {"sequences", seqs}}}};
}

json classes_json(const EndClasses& c) {
  json j = descriptor_json(c.descriptor);
  j["classes"] = c.members;
  if (std::any_of(c.core_members.begin(), c.core_members.end(), [](const auto& kv) { return !kv.second.empty(); }))
    j["core_classes"] = c.core_members;
  return j;
}

json check_json(const Check& c) { return {{"pass", c.pass}, {"witness", c.witness}, {"method", c.method}}; }

json special_json(const SpecialReport& r) {
  return {{"pass", r.pass()},
          {"nested", check_json(r.nested)},
          {"noetherian", check_json(r.noetherian)},
          {"sigma_disjoint", check_json(r.sigma_disjoint)},
          {"clopen", check_json(r.clopen)},
          {"layers", r.layers},
          {"order_layers", r.order_layers}};
}

json report_json(const CorrespondenceReport& r) {
  json j = {{"direction", to_string(r.direction)},
            {"pass", r.pass},
            {"source", descriptor_json(r.source)},
            {"image", descriptor_json(r.image)},
            {"single_end_domination", r.single_end_domination},
            {"violations", r.violations},
            {"notes", r.notes}};
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

json adjudication_json(const Adjudication& a) {
  json j = {{"winner", to_string(a.winner)},
            {"intersection", a.intersection},
            {"empty_intersection", a.empty_intersection},
            {"resolved_by_anchor", a.resolved_by_anchor}};
  if (!a.reason.empty()) j["reason"] = a.reason;
  if (a.capture)
    j["capture"] = {{"point", a.capture->point},
                    {"remainder", a.capture->remainder},
                    {"k_a", a.capture->k_a},
                    {"remainder_basic", a.capture->remainder_basic}};
  return j;
}

json cover_json(const TreeScheme& t, const Cover& c) {
  json parts = json::array();
  for (std::size_t i = 0; i < c.parts.size(); ++i)
    parts.push_back({{"index", i}, {"part", to_string(t, c.parts[i])}, {"kind", i < c.kinds.size() ? c.kinds[i] : ""}});
  return parts;
}

json match_json(const RaySpace& space, const std::string& policy, const MatchState& st) {
  const auto& t = space.scheme();
  json rounds = json::array();
  for (const auto& r : st.rounds) {
    json j = {{"move", to_string(t, r.move)}};
    if (r.cover) j["cover"] = cover_json(t, *r.cover);
    rounds.push_back(std::move(j));
  }
  json j = {{"policy", policy},
            {"rounds_requested", st.requested_rounds},
            {"rounds_played", st.rounds.size()},
            {"continuation", st.continuation},
            {"limit", st.limit_ray ? json(space.ray_id(*st.limit_ray)) : json(nullptr)}};
  j["result"] = adjudication_json(*st.result);
  j["rounds"] = std::move(rounds);
  return j;
}

// ---------------------------------------------------------------------------
// inputs

GraphPresentation load_egp(const std::string& path) {
  auto p = parse_egp(read_file(path));
  auto v = validate(p);
  if (!v.ok()) {
    json j = json::array();
    for (const auto& x : v.violations) j.push_back({{"kind", x.kind}, {"detail", x.detail}});
    std::cout << json{{"error", "invalid-presentation"}, {"violations", j}}.dump(2) << '\n';
    throw Usage(path + " fails validation");
  }
  return p;
}

bool is_ots(const std::string& path) { return fs::path(path).extension() == ".ots"; }

FiniteSpace load_ground(const std::string& path, const std::string& topology) {
  auto s = parse_ground(read_file(path));
  if (!topology.empty()) s.topology = parse_topology(s, read_file(topology));
  return s;
}

// Scheme trimmed to its ray-bearing part, as a ray space.
RaySpace ray_space_of(const TreeScheme& t) {
  auto hat = hat_subtree(t);
  if (hat.empty()) throw Error(ErrorKind::EmptyGraph, "the scheme has no high-ray");
  return RaySpace(std::move(hat));
}

// Rounds for a replayed transcript: every step, plus one to settle.
std::size_t script_rounds(std::size_t rounds, std::size_t steps) { return std::max(rounds, steps + 1); }

OracleBudget budget_of(const Globals& g) {
  OracleBudget b;
  if (g.budget_ms) b.time_limit = std::chrono::milliseconds(*g.budget_ms);
  return b;
}

// ---------------------------------------------------------------------------
// corpus suites

struct SuiteTally {
  std::size_t total = 0, passed = 0, skipped = 0;
  std::vector<std::string> failed;
  void record(const std::string& name, bool ok) {
    ++total;
    if (ok) ++passed;
    else failed.push_back(name);
  }
  json to_json() const { return {{"passed", passed}, {"total", total}, {"skipped", skipped}, {"failed", failed}}; }
};

bool refines(const GraphPresentation& p) {
  auto v = end_classes(p);
  auto e = edge_end_classes(p);
  for (const auto& [a, pa] : v.point_of)
    for (const auto& [b, pb] : v.point_of)
      if (pa == pb && e.point_of.at(a) != e.point_of.at(b)) return false;
  return true;
}

bool oracle_agrees(const GraphPresentation& p, const OracleBudget& budget) {
  auto v = end_classes(p);
  auto e = edge_end_classes(p);
  auto g = p.generator_ids();
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = i + 1; j < g.size(); ++j)
      for (auto mode : {Mode::Vertex, Mode::Edge}) {
        const auto& c = mode == Mode::Vertex ? v : e;
        bool apart = c.point_of.at(g[i]) != c.point_of.at(g[j]);
        if (apart != oracle_separable(p, g[i], g[j], mode, 3, budget)) return false;
      }
  return true;
}

bool matches_won(const TreeScheme& t, std::uint64_t seed) {
  auto space = ray_space_of(t);
  std::vector<PlayerIPolicy> policies;
  for (const auto& r : high_rays(space.scheme()))
    if (r.families.empty()) policies.push_back(PlayerIPolicy::descend({{}, r.segment}));
  policies.push_back(PlayerIPolicy::random(seed));
  policies.push_back(PlayerIPolicy::oscillate({0, 1, 2}));
  for (auto& p : policies)
    if (run_match(space, p, 8).result->winner != Winner::PlayerII) return false;
  return true;
}

const std::vector<std::string> kSuites = {"validate", "refinement", "rho", "tau", "oracle", "special", "tgraph", "match"};

json run_suite(const Globals& g, const std::string& suite, std::uint64_t seed, std::size_t n) {
  auto corpus = generate_corpus({seed, n, n, true});
  std::size_t nfix_p = fixture_presentations().size(), nfix_s = fixture_schemes().size();
  SuiteTally fixtures, members;
  auto tally = [&](std::size_t idx, std::size_t nfix) -> SuiteTally& { return idx < nfix ? fixtures : members; };
  bool on_presentations = suite == "validate" || suite == "refinement" || suite == "rho" || suite == "tau" || suite == "oracle";
  if (on_presentations) {
    std::vector<Named<GraphPresentation>> extra;
    if (suite == "rho")
      for (const auto& [name, t] : corpus.schemes | std::views::take(nfix_s)) extra.push_back({name + ".tgraph", uniform_tgraph(t)});
    for (std::size_t i = 0; i < corpus.presentations.size() + extra.size(); ++i) {
      bool fixture = i < nfix_p || i >= corpus.presentations.size();
      auto& tl = fixture ? fixtures : members;
      const auto& [name, p] = i < corpus.presentations.size() ? corpus.presentations[i] : extra[i - corpus.presentations.size()];
      try {
        if (suite == "validate") tl.record(name, validate(p).ok());
        else if (suite == "refinement") tl.record(name, refines(p));
        else if (suite == "rho") tl.record(name, verify_correspondence(p, Direction::Rho).pass);
        else if (suite == "oracle") tl.record(name, oracle_agrees(p, budget_of(g)));
        else {
          auto r = verify_correspondence(p, Direction::Tau);
          if (!r.error.empty()) ++tl.skipped;
          else tl.record(name, r.pass);
        }
      } catch (const std::exception& e) {
        std::cerr << name << ": " << e.what() << '\n';
        tl.record(name, false);
      }
    }
  } else {
    for (std::size_t i = 0; i < corpus.schemes.size(); ++i) {
      auto& tl = tally(i, nfix_s);
      const auto& [name, t] = corpus.schemes[i];
      try {
        if (suite == "special") tl.record(name, check_special(t).pass());
        else if (suite == "tgraph") tl.record(name, homeomorphic(rayspace_descriptor(t), end_space(uniform_tgraph(t))));
        else tl.record(name, matches_won(t, seed + i));
      } catch (const std::exception& e) {
        std::cerr << name << ": " << e.what() << '\n';
        tl.record(name, false);
      }
    }
  }
  json j = {{"suite", suite}, {"seed", seed}, {"n", n}};
  j.update(members.to_json());
  j["fixtures"] = fixtures.to_json();
  j["pass"] = members.failed.empty() && fixtures.failed.empty();
  return j;
}

// ---------------------------------------------------------------------------
// play

// Line protocol on stdin; accepted steps are replayed through run_match so the
// adjudication equals `match --script` on the same transcript.
int play(const Globals& g, const TreeScheme& t, std::size_t rounds, std::istream& in, std::ostream& out) {
  auto space = ray_space_of(t);
  const auto& hat = space.scheme();
  auto strategy = canonical_strategy(space);
  Referee ref(space);
  ref.move(BasicOpen::make(root_node(hat), {}));
  ref.answer(strategy(ref.state().rounds.back().move));
  std::vector<TranscriptStep> accepted;
  std::optional<TranscriptStep> pending;

  auto show = [&]() {
    const auto& r = ref.state().rounds.back();
    out << "round " << ref.state().rounds.size() << " move " << to_string(hat, r.move) << '\n';
    for (std::size_t i = 0; i < r.cover->parts.size(); ++i)
      out << "  " << i << "  " << to_string(hat, r.cover->parts[i]) << "  " << r.cover->kinds[i] << '\n';
    out.flush();
  };
  auto commit = [&]() {
    if (!pending) return;
    auto step = *std::exchange(pending, std::nullopt);
    try {
      const auto& parts = ref.state().rounds.back().cover->parts;
      if (step.part >= parts.size())
        throw IllegalMove("not-contained", "part " + std::to_string(step.part) + " of " + std::to_string(parts.size()));
      auto m = step.shrink ? parse_basic_open(hat, *step.shrink) : parts[step.part];
      ref.move(m);
      ref.answer(strategy(m));
      accepted.push_back(step);
      out << "ok\n";
      show();
    } catch (const IllegalMove& e) {
      out << "illegal-move " << e.reason << ": " << e.what() << '\n';
      if (!ref.state().awaiting_move()) ref.state().rounds.pop_back();
    } catch (const Error& e) {
      out << "rejected " << e.what() << '\n';
    }
  };

  show();
  for (std::string raw; std::getline(in, raw);) {
    auto line = detail::strip(raw);
    if (line.empty()) continue;
    auto w = detail::words(line);
    if (w[0] == "quit") break;
    if (w[0] == "part" && w.size() == 2) {
      commit();
      try {
        pending = TranscriptStep{detail::parse_index(w[1], 0), std::nullopt};
      } catch (const Error& e) {
        out << "rejected " << e.what() << '\n';
      }
    } else if (w[0] == "shrink" && pending && !pending->shrink && w.size() >= 2) {
      pending->shrink = detail::strip(line.substr(6));
      commit();
    } else {
      out << "rejected expected 'part K', 'shrink t F...' or 'quit'\n";
    }
    if (!pending && accepted.size() + 1 >= rounds && detail::settled_limit(space, ref.state(), MatchOptions{}.window)) break;
  }
  commit();
  auto st = run_match(space, PlayerIPolicy::scripted(accepted), script_rounds(rounds, accepted.size()));
  json j = match_json(space, "script", st);
  if (g.human) {
    out << "winner " << to_string(st.result->winner) << '\n';
    if (st.result->capture) out << "point " << st.result->capture->point << " remainder " << st.result->capture->remainder << '\n';
  } else {
    out << json{{"adjudication", j["result"]}, {"transcript_steps", accepted.size()}}.dump() << '\n';
  }
  return st.result->winner == Winner::PlayerII ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"End spaces and edge-end spaces of finitely presented graphs"};
  app.require_subcommand(1);
  Globals g;
  bool as_json = false;
  app.add_flag("--json", as_json, "JSON output (default)");
  app.add_flag("--human", g.human, "plain text output");
  app.add_option("--budget", g.budget_ms, "oracle search budget in milliseconds");
  app.add_option("--seed", g.seed, "seed for corpus generation and random play");

  std::string file, out_path, second;
  auto file_opt = [&](CLI::App* c, bool required = true) {
    auto* o = c->add_option("file", file, "input file")->check(CLI::ExistingFile);
    if (required) o->required();
  };

  auto* ends = app.add_subcommand("ends", "end space descriptor");
  file_opt(ends);
  auto* edge_ends = app.add_subcommand("edge-ends", "edge-end space descriptor");
  file_opt(edge_ends);
  auto* expand = app.add_subcommand("expand", "clique expansion");
  file_opt(expand);
  expand->add_option("-o", out_path, "output presentation");
  auto* duplicate = app.add_subcommand("duplicate", "dominator duplication");
  file_opt(duplicate);
  duplicate->add_option("-o", out_path, "output presentation");

  auto* verify = app.add_subcommand("verify", "check a transformation's homeomorphism");
  file_opt(verify);
  bool rho = false, tau = false;
  verify->add_flag("--rho", rho, "clique expansion direction");
  verify->add_flag("--tau", tau, "dominator duplication direction");

  auto* envelope = app.add_subcommand("envelope", "envelopes of ends");
  file_opt(envelope);
  std::string end_id;
  envelope->add_option("end", end_id, "end point id (all ends when omitted)");

  auto* rayspace = app.add_subcommand("rayspace", "ray space descriptor of a scheme");
  file_opt(rayspace);
  auto* tgraph = app.add_subcommand("tgraph", "uniform T-graph of a scheme");
  file_opt(tgraph);
  tgraph->add_option("-o", out_path, "output presentation");
  auto* surgery = app.add_subcommand("surgery", "replace limit nodes by their successor classes");
  file_opt(surgery);
  surgery->add_option("nmap", second, "successor map file")->required()->check(CLI::ExistingFile);
  surgery->add_option("-o", out_path, "output scheme");

  auto* check_subbase = app.add_subcommand("check-subbase", "special subbase report");
  file_opt(check_subbase, false);
  std::string ground, topology;
  check_subbase->add_option("--ground", ground, "ground file or scheme")->check(CLI::ExistingFile);
  check_subbase->add_option("--topology", topology, "open sets, one per line")->check(CLI::ExistingFile);

  auto* match = app.add_subcommand("match", "run one end-game match");
  file_opt(match);
  std::string policy_spec, script_path;
  std::size_t rounds = 8;
  match->add_option("--policy", policy_spec, "descend:RAY | random:SEED | oscillate:K.K.K");
  match->add_option("--rounds", rounds, "rounds before the limit is read off")->check(CLI::PositiveNumber);
  match->add_option("--script", script_path, "replay a play transcript")->check(CLI::ExistingFile);

  auto* play_cmd = app.add_subcommand("play", "interactive match on standard input");
  file_opt(play_cmd);
  play_cmd->add_option("--rounds", rounds, "rounds before the limit is read off")->check(CLI::PositiveNumber);

  auto* build = app.add_subcommand("build-tc", "build the strategy tree on a finite ground");
  file_opt(build);
  std::size_t depth = 4, cut = 4;
  build->add_option("--depth", depth, "tree depth")->check(CLI::PositiveNumber);
  build->add_option("--cut", cut, "copies kept per family for scheme grounds")->check(CLI::PositiveNumber);
  build->add_option("--topology", topology, "open sets, one per line")->check(CLI::ExistingFile);

  auto* corpus = app.add_subcommand("corpus", "run a property suite over the seeded corpus");
  std::size_t n = 100;
  std::string suite = "all";
  corpus->add_option("--n", n, "random members per kind")->check(CLI::PositiveNumber);
  corpus->add_option("--suite", suite, "suite name or all")
      ->check(CLI::IsMember([] {
        auto s = kSuites;
        s.push_back("all");
        return s;
      }()));
  corpus->add_option("--seed", g.seed, "corpus seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  if (as_json) g.human = false;

  try {
    if (ends->parsed() || edge_ends->parsed()) {
      auto p = load_egp(file);
      emit(g, classes_json(ends->parsed() ? end_classes(p) : edge_end_classes(p)));
      return 0;
    }
    if (expand->parsed() || duplicate->parsed()) {
      auto p = load_egp(file);
      json j;
      GraphPresentation result;
      if (expand->parsed()) {
        auto x = expand_cliques(p);
        result = x.result;
        j["replaced"] = x.map.replaced;
        json edges = json::array();
        for (const auto& [a, b] : x.map.edge_map) edges.push_back({{"source", a}, {"image", b}});
        j["edge_map"] = edges;
      } else {
        auto x = duplicate_dominators(p);
        result = x.result;
        json split = json::array();
        for (const auto& s : x.map.split) split.push_back({{"vertex", s.vertex}, {"prime", s.prime}, {"end", s.end}});
        j["split"] = split;
      }
      if (!out_path.empty()) write_out(out_path, serialize_egp(result));
      else j["result"] = serialize_egp(result);
      emit(g, j);
      return 0;
    }
    if (verify->parsed()) {
      if (rho == tau) throw Usage("verify needs exactly one of --rho, --tau");
      auto r = verify_correspondence(load_egp(file), rho ? Direction::Rho : Direction::Tau);
      emit(g, report_json(r));
      if (!r.pass) std::cerr << "verify " << to_string(r.direction) << " failed" << (r.error.empty() ? "" : ": " + r.error) << '\n';
      return r.pass ? 0 : 1;
    }
    if (envelope->parsed()) {
      auto p = load_egp(file);
      std::vector<std::string> targets;
      if (end_id.empty()) targets = end_classes(p).points();
      else targets.push_back(end_id);
      json j = json::array();
      for (const auto& e : targets) {
        auto env = compute_envelope(p, e);
        j.push_back({{"end", env.end}, {"dominators", env.dominators}, {"rays", env.rays}});
      }
      emit(g, j);
      return 0;
    }
    if (rayspace->parsed()) {
      auto t = load_ots(file);
      json rays = json::array();
      for (const auto& r : high_rays(t)) rays.push_back({{"ray", r.id}, {"tops", tops_of(t, r)}});
      json j = descriptor_json(rayspace_descriptor(t));
      j["high_rays"] = rays;
      j["nesting_depth"] = nesting_depth(t);
      emit(g, j);
      return 0;
    }
    if (tgraph->parsed()) {
      auto text = serialize_egp(uniform_tgraph(load_ots(file)));
      if (!out_path.empty()) write_out(out_path, text);
      else std::cout << text;
      return 0;
    }
    if (surgery->parsed()) {
      auto t = load_ots(file);
      auto r = surgery_tprime(t, parse_successor_map(read_file(second)));
      bool same = homeomorphic(rayspace_descriptor(r.scheme), rayspace_descriptor(t));
      json replaced = json::array();
      for (const auto& [top, nodes] : r.replaced) replaced.push_back({{"limit", top}, {"new", nodes}});
      json j = {{"replaced", replaced}, {"descriptor_preserved", same}};
      if (!out_path.empty()) write_out(out_path, serialize_ots(r.scheme));
      else j["result"] = serialize_ots(r.scheme);
      emit(g, j);
      return same ? 0 : 1;
    }
    if (check_subbase->parsed()) {
      std::string src = !ground.empty() ? ground : file;
      if (src.empty()) throw Usage("check-subbase needs FILE or --ground");
      auto r = is_ots(src) ? check_special(load_ots(src)) : check_special(load_ground(src, topology));
      emit(g, special_json(r));
      return r.pass() ? 0 : 1;
    }
    if (match->parsed()) {
      auto t = load_ots(file);
      auto space = ray_space_of(t);
      std::optional<PlayerIPolicy> policy;
      std::string name = policy_spec;
      std::size_t r = rounds;
      if (!script_path.empty()) {
        if (!policy_spec.empty()) throw Usage("--script and --policy are exclusive");
        auto steps = parse_transcript(read_file(script_path));
        r = script_rounds(rounds, steps.size());
        policy = PlayerIPolicy::scripted(std::move(steps));
        name = "script";
      } else {
        if (policy_spec.empty()) policy_spec = "random:" + std::to_string(g.seed);
        policy = PlayerIPolicy::parse(space, policy_spec);
        name = policy->name(space);
      }
      auto st = run_match(space, *policy, r);
      emit(g, match_json(space, name, st));
      return st.result->winner == Winner::PlayerII ? 0 : 1;
    }
    if (play_cmd->parsed()) return play(g, load_ots(file), rounds, std::cin, std::cout);
    if (build->parsed()) {
      FiniteSpace space;
      if (is_ots(file)) space = cut_context(load_ots(file), cut).space;
      else space = load_ground(file, topology);
      auto r = build_tc(space, depth);
      auto fam = r.family();
      auto special = check_special(fam);
      auto hc = check_hereditary_completeness(fam);
      bool same = homeomorphic(rayspace_descriptor(r.scheme), discrete_descriptor(r.context.points));
      json nodes = json::array();
      for (std::size_t k = 0; k < r.nodes.size(); ++k) {
        const auto& nd = r.nodes[k];
        nodes.push_back({{"id", k},
                         {"set", to_string(r.context, nd.set)},
                         {"points", r.context.str(nd.mask)},
                         {"parent", nd.parent ? json(*nd.parent) : json(nullptr)},
                         {"depth", nd.depth},
                         {"item", nd.item},
                         {"stable", nd.stable}});
      }
      json j = {{"complete", r.complete},
                {"special", special_json(special)},
                {"hereditary_completeness",
                 {{"pass", hc.pass},
                  {"subfamilies_checked", hc.subfamilies_checked},
                  {"witness_ground", fam.str(hc.witness_ground)},
                  {"witness_family", hc.witness_family}}},
                {"descriptor_match", same},
                {"nodes", nodes},
                {"scheme", serialize_ots(r.scheme)}};
      emit(g, j);
      bool pass = special.pass() && hc.pass && (!r.complete || same);
      return pass ? 0 : 1;
    }
    if (corpus->parsed()) {
      std::vector<std::string> suites = suite == "all" ? kSuites : std::vector<std::string>{suite};
      json j = json::array();
      bool pass = true;
      for (const auto& s : suites) {
        auto r = run_suite(g, s, g.seed, n);
        pass = pass && r["pass"].get<bool>();
        j.push_back(std::move(r));
      }
      emit(g, suites.size() == 1 ? j[0] : j);
      return pass ? 0 : 1;
    }
  } catch (const Usage& e) {
    std::cerr << "usage: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cout << json{{"error", to_string(e.kind())}, {"message", e.what()}}.dump(2) << '\n';
    std::cerr << e.what() << '\n';
    switch (e.kind()) {
      case ErrorKind::Syntax:
      case ErrorKind::DuplicateId:
      case ErrorKind::InvalidRef:
      case ErrorKind::UnknownEndpoint:
      case ErrorKind::MissingSuccessor:
      case ErrorKind::AnchorNotInTree:
        return 2;
      default:
        return 1;
    }
  }
  return 2;
}
