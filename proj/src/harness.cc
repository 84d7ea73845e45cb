#include "grpcomb/harness.hpp"

#include <chrono>
#include <cmath>
#include <set>
#include <sstream>

#include "grpcomb/approx.hpp"
#include "grpcomb/error.hpp"
#include "grpcomb/extract.hpp"
#include "grpcomb/gl.hpp"
#include "grpcomb/io.hpp"
#include "grpcomb/parallel.hpp"
#include "grpcomb/patterns.hpp"
#include "grpcomb/ramsey.hpp"
#include "grpcomb/rng.hpp"
#include "grpcomb/suites.hpp"

namespace grpcomb {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0)
{
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// stream labels, one per command
enum Label : uint64_t { kSets = 101, kExtract, kGl, kRoth };

void check_params(const ExperimentConfig &c, const std::set<std::string> &allowed)
{
  for (auto it = c.params.begin(); it != c.params.end(); ++it)
    require(allowed.count(it.key()) > 0, ErrorCode::invalid_argument,
            "command " + c.command + " does not take parameter " + it.key());
}

template <class T>
T param(const ExperimentConfig &c, const std::string &key, T dflt)
{
  if (!c.params.contains(key))
    return dflt;
  try {
    return c.params[key].get<T>();
  } catch (const nlohmann::json::exception &) {
    fail(ErrorCode::invalid_argument, "parameter " + key + " has the wrong type");
  }
}

std::vector<std::string> require_groups(const ExperimentConfig &c)
{
  require(!c.groups.empty(), ErrorCode::invalid_argument, "command " + c.command + " needs a group");
  return c.groups;
}

const std::set<std::string> kSetKeys{"set", "set_file", "random_classes"};

// the input set: explicit ids, a set file, or a seeded random centered set
GroupSubset input_set(const ExperimentConfig &c, const GroupPtr &G, uint64_t label, size_t index,
                      bool whole_by_default)
{
  if (c.params.contains("set")) {
    auto ids = param<std::vector<uint64_t>>(c, "set", {});
    std::vector<Id> v;
    for (auto x : ids) {
      require(x < G->order(), ErrorCode::invalid_argument,
              "element " + std::to_string(x) + " outside " + G->spec());
      v.push_back(Id(x));
    }
    require(!v.empty(), ErrorCode::invalid_argument, "set is empty");
    return GroupSubset(G, v);
  }
  if (c.params.contains("set_file")) {
    auto A = read_set_file(param<std::string>(c, "set_file", ""), c.cap_order);
    require(A.group()->spec() == G->spec(), ErrorCode::invalid_argument,
            "set file is over " + A.group()->spec() + ", not " + G->spec());
    return GroupSubset(G, A.ids());
  }
  if (whole_by_default && !c.params.contains("random_classes"))
    return GroupSubset::of(whole_group(G));
  Stream rng(c.seed, label, index);
  return random_centered(G, param<size_t>(c, "random_classes", 3), rng);
}

Json ineq(const Inequality &q) { return to_json(q); }

template <class Body>
std::vector<Record> per_group(const ExperimentConfig &c, Body body)
{
  auto specs = require_groups(c);
  std::vector<Record> out(specs.size());
  parallel_for(specs.size(), c.threads, [&](size_t i) {
    auto t0 = Clock::now();
    auto G = build_group(specs[i], c.cap_order);
    out[i] = body(G, i);
    out[i].inputs["group"] = specs[i];
    out[i].wall_ms = ms_since(t0);
  });
  return out;
}

// ---------------------------------------------------------------- group

Record group_record(const GroupPtr &G, bool axioms)
{
  Record r;
  r.op = "group";
  auto classes = conjugacy_classes(G);
  auto der = series(G, SeriesKind::derived);
  auto Z = center(G);
  Json ranks = Json::object();
  uint64_t n = G->order();
  for (uint64_t p = 2; p <= 7; ++p)
    if (is_prime(p) && n % p == 0) {
      auto pr = p_ranks(G, p);
      ranks[std::to_string(p)] = Json{{"subgroup_rank", pr.r}, {"sectional_rank", pr.s}};
    }
  uint64_t exponent = 1;
  for (Id o : G->orders())
    exponent = std::lcm(exponent, uint64_t(o));
  r.inputs = Json{{"axioms", axioms}};
  r.result = Json{{"order", n},
                  {"abelian", G->is_abelian()},
                  {"solvable", der.reaches_trivial},
                  {"exponent", exponent},
                  {"center_order", Z.order()},
                  {"class_count", classes.size()},
                  {"derived_series", der.factor_orders},
                  {"p_ranks", ranks}};
  if (axioms) {
    auto err = check_axioms(*G);
    r.asserts.push_back(condition("group axioms", err.empty(), err));
  }
  return r;
}

RunReport cmd_group(const ExperimentConfig &c)
{
  check_params(c, {"axioms"});
  bool axioms = param<bool>(c, "axioms", true);
  RunReport rep;
  rep.config = c;
  rep.records = per_group(c, [&](const GroupPtr &G, size_t) { return group_record(G, axioms); });
  return rep;
}

// ---------------------------------------------------------------- sets

RunReport cmd_sets(const ExperimentConfig &c)
{
  auto keys = kSetKeys;
  keys.insert("ap_mode");
  check_params(c, keys);
  auto mode = parse_ap_mode(param<std::string>(c, "ap_mode", "translational"));
  RunReport rep;
  rep.config = c;
  rep.records = per_group(c, [&](const GroupPtr &G, size_t i) {
    Record r;
    r.op = "sets";
    auto A = input_set(c, G, kSets, i, false);
    r.inputs = Json{{"set", ids_json(A.ids())}};
    auto ts = tripling_stats(A);
    auto ru = triangle_and_cover(A, A, A);
    auto ap = three_ap_check(A, mode);
    r.result = Json{{"size", ts.a},
                    {"square", ts.a2},
                    {"cube", ts.a3},
                    {"quotient", ts.aainv},
                    {"tripling", ts.k3},
                    {"K", ts.K()},
                    {"cover", ids_json(ru.cover)},
                    {"three_ap", {{"mode", ap_mode_name(mode)}, {"free", ap.free}}}};
    if (!ap.free)
      r.result["three_ap"]["witness"] = ap.witness;
    r.asserts.push_back(from_inequality(ru.triangle));
    r.asserts.push_back(from_inequality(ru.cover_size));
    r.asserts.push_back(condition("A inside Y A A^-1", ru.cover_contains));
    if (A == inverse(A)) {
      Json piv = Json::array();
      for (Id a : A.ids()) {
        auto p = pivot_split(A, a);
        piv.push_back(Json{{"a", a}, {"centralized", p.centralized.size()}, {"conjugates", p.conjugates.size()}});
        if (!p.bound.holds)
          r.asserts.push_back(from_inequality(p.bound));
        if (piv.size() >= 16)
          break;
      }
      r.result["pivot"] = piv;
    }
    if (G->is_abelian()) {
      auto d = cfpy_doubling_check(A);
      r.result["chain_free"] = Json{{"avoids", d.avoids}, {"difference_set", d.diff}};
      if (d.avoids)
        r.asserts.push_back(from_inequality(d.bound));
    }
    return r;
  });
  return rep;
}

// ---------------------------------------------------------------- extract

RunReport cmd_extract(const ExperimentConfig &c)
{
  auto keys = kSetKeys;
  keys.insert({"over_center", "strategy"});
  check_params(c, keys);
  bool over_center = param<bool>(c, "over_center", false);
  auto strategy = param<std::string>(c, "strategy", "default");
  require(strategy == "default" || strategy == "abelian", ErrorCode::invalid_argument,
          "strategy must be default or abelian");
  RunReport rep;
  rep.config = c;
  rep.records = per_group(c, [&](const GroupPtr &G, size_t i) {
    Record r;
    r.op = "extract";
    auto A = input_set(c, G, kExtract, i, false);
    r.inputs = Json{{"set", ids_json(A.ids())}, {"over_center", over_center}, {"strategy", strategy}};
    Subgroup W = whole_group(G);
    Subgroup N = over_center ? center(G) : trivial_subgroup(G);
    ExtractContext ctx{G, W, N};
    GroupSubset S = over_center ? GroupSubset::of(N) : GroupSubset(G, {0});
    auto ex = strategy == "abelian" ? abelian_extractor() : default_extractor(W);
    auto res = commutable_extract(ctx, A, S, *ex);
    auto err = verify_extraction(ctx, A, S, res.D.elems);
    Json steps = Json::array();
    for (const auto &s : res.trace.steps)
      steps.push_back(Json{{"j", s.j}, {"series_index", s.series_index}, {"D", s.d_size},
                           {"A2_in_H", s.a2_in_h}, {"S", s.s_size}});
    r.result = Json{{"D", ids_json(res.D.elems)},
                    {"K", res.trace.K},
                    {"n", res.trace.n},
                    {"claimed", double(res.trace.claimed)},
                    {"steps", steps},
                    {"bound", ineq(res.trace.bound)}};
    r.asserts.push_back(condition("extraction is commuting, dissociated and avoids S", err.empty(), err));
    if (res.trace.hard)
      r.asserts.push_back(from_inequality(res.trace.bound));
    if (!over_center && is_solvable(G)) {
      auto py = pyber_solvable_abelian(G);
      r.result["solvable_abelian"] = subgroup_json(py.I);
      r.asserts.push_back(condition("large abelian subgroup commutes", py.abelian_verified));
      r.asserts.push_back(from_inequality(py.bound));
    }
    return r;
  });
  return rep;
}

// ---------------------------------------------------------------- gl

Json flag_json(const Flag &F) { return Json{{"blocks", F.block_dims()}, {"pdim", F.pdim()}}; }

RunReport cmd_gl(const ExperimentConfig &c)
{
  auto keys = kSetKeys;
  keys.insert("pipeline");
  check_params(c, keys);
  auto pipeline = param<std::string>(c, "pipeline", "abelian-substruct");
  require(pipeline == "abelian-substruct", ErrorCode::invalid_argument,
          "unknown pipeline " + pipeline);
  RunReport rep;
  rep.config = c;
  rep.records = per_group(c, [&](const GroupPtr &G, size_t i) {
    Record r;
    r.op = "gl";
    auto A = input_set(c, G, kGl, i, true);
    r.inputs = Json{{"pipeline", pipeline}, {"set_size", A.size()}};
    GlOptions go;
    go.seed = derive_key(c.seed, kGl);
    auto res = gl_abelian_substruct(A, go);
    Json its = Json::array();
    for (const auto &it : res.iterations) {
      Json blocks = Json::array();
      for (const auto &b : it.blocks)
        blocks.push_back(Json{{"dim", b.dim}, {"case", b.label}, {"size", b.size}});
      its.push_back(Json{{"index", it.index},
                         {"branch", it.branch},
                         {"refined_block", it.refined_block},
                         {"pivot", it.a0},
                         {"blocks", blocks},
                         {"flag_before", it.flag_before},
                         {"flag_after", it.flag_after},
                         {"pdim_before", it.pdim_before},
                         {"pdim_after", it.pdim_after},
                         {"in_stabilizer", it.in_hg},
                         {"pivot_bound", ineq(it.pivot)},
                         {"declared", ineq(it.declared)}});
    }
    Json borel = nullptr;
    if (res.borel)
      borel = Json{{"group", subgroup_json(res.borel->G, 0)},
                   {"commutator", subgroup_json(res.borel->commutator, 0)},
                   {"chosen", res.borel->chosen},
                   {"H1", res.borel->in_h1},
                   {"H2", res.borel->in_h2},
                   {"bound1", ineq(res.borel->bound1)},
                   {"bound2", ineq(res.borel->bound2)}};
    r.result = Json{{"d", res.d},
                    {"K", res.K},
                    {"A", res.a},
                    {"A2", res.a2},
                    {"iterations", its},
                    {"final_flag", flag_json(res.final_flag)},
                    {"A2_in_borel", res.a2_borel},
                    {"borel", borel},
                    {"H", subgroup_json(res.H)},
                    {"A2_in_H", res.in_h},
                    {"theorem", ineq(res.theorem)}};
    r.asserts.push_back(condition("fewer than d^2 flag iterations", int(res.iterations.size()) < res.d * res.d,
                                  std::to_string(res.iterations.size()) + " iterations"));
    r.asserts.push_back(condition("final flag is complete", res.d == 1 || res.final_flag.complete()));
    r.asserts.push_back(condition("H is abelian", res.abelian));
    r.asserts.push_back(from_inequality(res.hard));
    return r;
  });
  return rep;
}

// ---------------------------------------------------------------- ramsey

RunReport cmd_ramsey(const ExperimentConfig &c)
{
  check_params(c, {"mode", "trials", "baseline", "threshold", "count_n", "count_k"});
  RamseyOptions ro;
  ro.mode = parse_pairing_mode(param<std::string>(c, "mode", "squaring"));
  ro.trials = param<int>(c, "trials", 10);
  ro.baseline = param<bool>(c, "baseline", false);
  ro.threshold = param<double>(c, "threshold", 6.0);
  ro.count_n = param<int>(c, "count_n", 0);
  ro.count_k = param<double>(c, "count_k", 2.0);
  ro.seed = c.seed;
  ro.threads = c.threads;
  ro.cap = c.cap_order;
  require(ro.trials >= 1, ErrorCode::invalid_argument, "trials must be positive");
  RunReport rep;
  rep.config = c;
  std::string csv;
  // trials run in parallel inside each experiment, groups one after another
  for (const auto &spec : require_groups(c)) {
    auto t0 = Clock::now();
    auto G = build_group(spec, c.cap_order);
    auto res = ramsey_experiment(G, ro);
    Record r;
    r.op = "ramsey";
    r.inputs = Json{{"group", spec}, {"mode", pairing_mode_name(ro.mode)}, {"trials", ro.trials},
                    {"baseline", ro.baseline}, {"threshold", ro.threshold}};
    Json trials = Json::array();
    for (const auto &t : res.trials) {
      Json tj{{"trial", t.trial}, {"seed", t.seed}, {"connection_size", t.s}, {"clique", t.clique},
              {"independence", t.independence}, {"max", t.max}, {"ratio", t.ratio}};
      if (ro.baseline)
        tj["baseline"] = Json{{"clique", t.base_clique}, {"independence", t.base_independence}};
      trials.push_back(tj);
    }
    r.result = Json{{"vertices", res.vertices}, {"edges", res.edges}, {"matched", res.matched},
                    {"worst", res.worst}, {"worst_ratio", res.worst_ratio}, {"mean_max", res.mean_max},
                    {"trials", trials}};
    if (ro.baseline)
      r.result["mean_baseline_max"] = res.mean_base_max;
    if (res.count.ran)
      r.result["small_sets"] = Json{{"n", res.count.n}, {"K", res.count.K},
                                    {"through_identity", res.count.with_identity},
                                    {"total", res.count.total.str()}, {"within_bound", res.count.within_bound}};
    r.asserts.push_back(condition("sampled connection sets are valid", res.sample_failures == 0,
                                  std::to_string(res.sample_failures) + " invalid samples"));
    r.asserts.push_back(condition("monochromatic sets avoid the chain pattern", res.avoidance_failures == 0,
                                  std::to_string(res.avoidance_failures) + " trials with a chain"));
    std::ostringstream lim;
    lim << ro.threshold << " log2 |G|";
    r.asserts.push_back(condition("max(clique, independence) <= " + lim.str(), res.threshold_failures == 0,
                                  std::to_string(res.threshold_failures) + " trials above the threshold"));
    r.wall_ms = ms_since(t0);
    rep.records.push_back(r);
    // one header for the whole table
    std::string part = ramsey_csv(res);
    if (!csv.empty())
      part = part.substr(part.find('\n') + 1);
    csv += part;
  }
  rep.csv = csv;
  return rep;
}

// ---------------------------------------------------------------- roth

RunReport cmd_roth(const ExperimentConfig &c)
{
  auto keys = kSetKeys;
  keys.insert({"ap_mode", "grow", "exact_h", "exact_b0", "node_budget"});
  keys.erase("random_classes");
  check_params(c, keys);
  auto mode = parse_ap_mode(param<std::string>(c, "ap_mode", "averaging"));
  RothOptions ro;
  ro.exact_h = param<size_t>(c, "exact_h", ro.exact_h);
  ro.exact_b0 = param<size_t>(c, "exact_b0", ro.exact_b0);
  ro.node_budget = param<uint64_t>(c, "node_budget", ro.node_budget);
  size_t grow = param<size_t>(c, "grow", 8);
  RunReport rep;
  rep.config = c;
  rep.records = per_group(c, [&](const GroupPtr &G, size_t i) {
    Record r;
    r.op = "roth";
    GroupSubset A;
    if (c.params.contains("set") || c.params.contains("set_file")) {
      A = input_set(c, G, kRoth, i, false);
    } else {
      Stream rng(c.seed, kRoth, i);
      A = grow_ap_free(G, grow, mode, rng);
    }
    r.inputs = Json{{"set", ids_json(A.ids())}, {"ap_mode", ap_mode_name(mode)}};
    auto rr = local_roth_experiment(A, mode, ro);
    r.result = Json{{"size", rr.a}, {"quotient", rr.quotient}, {"square", rr.square}, {"doubling", rr.doubling},
                    {"free", rr.pattern.free},
                    {"near", {{"H", subgroup_json(rr.near.H)}, {"g", rr.near.g}, {"piece", rr.near.piece.size()},
                              {"certified", rr.near.certified}}}};
    if (!rr.pattern.free)
      r.result["witness"] = rr.pattern.witness;
    auto extremal = [](const ExtremalSize &e) {
      return Json{{"ran", e.ran}, {"exact", e.exact}, {"points", e.points}, {"best", e.best}, {"nodes", e.nodes}};
    };
    if (mode == ApMode::translational) {
      r.result["H_order"] = rr.h_order;
      r.result["piece_density"] = double(rr.density);
      r.result["piece_free"] = rr.piece_free;
      r.result["free_max"] = extremal(rr.ap_free_max);
      if (rr.pattern.free)
        r.asserts.push_back(condition("piece is 3-AP-free", rr.piece_free));
    } else {
      r.result["B0"] = rr.b0;
      r.result["S"] = rr.S.size();
      r.result["corner_density"] = double(rr.corner_density);
      r.result["corner_free"] = rr.corner.free;
      r.result["corner_free_max"] = extremal(rr.corner_free_max);
      if (rr.pattern.free)
        r.asserts.push_back(condition("transferred set is corner-free", rr.corner.free));
    }
    return r;
  });
  return rep;
}

// ---------------------------------------------------------------- verify

RunReport cmd_verify(const ExperimentConfig &c)
{
  check_params(c, {"suite", "quick"});
  auto suite = param<std::string>(c, "suite", "lemma-checks");
  std::vector<std::string> names;
  if (suite == "lemma-checks")
    names = suite_names();
  else {
    suite_description(suite); // rejects unknown names
    names = {suite};
  }
  SuiteOptions so;
  so.seed = c.seed;
  so.threads = c.threads;
  so.quick = param<bool>(c, "quick", false);
  RunReport rep;
  rep.config = c;
  for (const auto &n : names) {
    auto t0 = Clock::now();
    auto rec = suite_record(run_suite(n, so));
    rec.inputs = Json{{"suite", n}, {"quick", so.quick}};
    rec.wall_ms = ms_since(t0);
    rep.records.push_back(rec);
  }
  return rep;
}

// ---------------------------------------------------------------- catalog

RunReport cmd_catalog(const ExperimentConfig &c)
{
  check_params(c, {"action"});
  auto action = param<std::string>(c, "action", c.groups.empty() ? "list" : "describe");
  RunReport rep;
  rep.config = c;
  if (action == "list") {
    Record r;
    r.op = "catalog.list";
    Json ctors = Json::array();
    for (const auto &e : catalog_constructors())
      ctors.push_back(Json{{"pattern", e.pattern}, {"description", e.description}});
    Json suites = Json::array();
    for (const auto &n : suite_names())
      suites.push_back(Json{{"name", n}, {"description", suite_description(n)}});
    r.result = Json{{"constructors", ctors}, {"suites", suites}, {"text", catalog_list_text()}};
    rep.records.push_back(r);
    return rep;
  }
  require(action == "describe", ErrorCode::invalid_argument, "catalog action must be list or describe");
  for (const auto &spec : require_groups(c)) {
    Record r;
    r.op = "catalog.describe";
    r.inputs = Json{{"group", spec}};
    auto G = build_group(spec, c.cap_order);
    r.result = Json{{"spec", G->spec()}, {"order", G->order()}, {"abelian", G->is_abelian()},
                    {"solvable", is_solvable(G)}, {"text", catalog_describe_text(spec, c.cap_order)}};
    rep.records.push_back(r);
  }
  return rep;
}

using CommandFn = RunReport (*)(const ExperimentConfig &);

const std::vector<std::pair<std::string, CommandFn>> &commands()
{
  static const std::vector<std::pair<std::string, CommandFn>> c{
    {"group", cmd_group}, {"sets", cmd_sets},     {"extract", cmd_extract}, {"gl", cmd_gl},
    {"ramsey", cmd_ramsey}, {"roth", cmd_roth}, {"verify", cmd_verify},   {"catalog", cmd_catalog}};
  return c;
}

} // namespace

const std::vector<std::string> &command_names()
{
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto &e : commands())
      v.push_back(e.first);
    return v;
  }();
  return names;
}

RunReport run(const ExperimentConfig &config)
{
  require(config.threads >= 1, ErrorCode::invalid_argument, "threads must be positive");
  for (const auto &e : commands())
    if (e.first == config.command) {
      auto t0 = Clock::now();
      RunReport rep = e.second(config);
      rep.config = config;
      rep.wall_ms = ms_since(t0);
      return rep;
    }
  fail(ErrorCode::invalid_argument, "unknown command " + config.command);
}

std::string catalog_list_text()
{
  std::ostringstream os;
  os << "group constructors:\n";
  for (const auto &e : catalog_constructors())
    os << "  " << e.pattern << "  " << e.description << "\n";
  os << "file formats:\n"
     << "  table:<path>  multiplication table, order on the first line, then rows\n"
     << "  set files     group spec on the first line, then one element id per line\n"
     << "verify suites:\n";
  for (const auto &n : suite_names())
    os << "  " << n << "  " << suite_description(n) << "\n";
  return os.str();
}

std::string catalog_describe_text(const std::string &spec, uint64_t cap)
{
  auto G = build_group(spec, cap);
  std::ostringstream os;
  os << "spec: " << G->spec() << "\n"
     << "order: " << G->order() << "\n"
     << "abelian: " << (G->is_abelian() ? "yes" : "no") << "\n";
  if (G->order() <= 4096) {
    os << "solvable: " << (is_solvable(G) ? "yes" : "no") << "\n"
       << "center order: " << center(G).order() << "\n"
       << "conjugacy classes: " << conjugacy_classes(G).size() << "\n";
  }
  return os.str();
}

void write_outputs(const RunReport &report)
{
  if (!report.config.out.empty())
    write_text(report.config.out, report.to_json().dump(2) + "\n");
  if (!report.config.csv.empty())
    write_text(report.config.csv, report.csv);
}

} // namespace grpcomb
