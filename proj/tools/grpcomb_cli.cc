#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "grpcomb/c_api.h"

namespace {

using Json = nlohmann::json;

constexpr int kExitError = 2;

struct Globals {
  uint64_t seed = 0;
  std::string assert_mode = "hard";
  std::string out, csv, config;
  uint64_t cap_order = 200000;
  int threads = 1;
};

// options shared by commands that take an input set
struct SetOptions {
  std::vector<std::string> groups;
  std::string set, set_file;
  int random_classes = -1;
};

void add_group_option(CLI::App *sub, SetOptions &s)
{
  sub->add_option("--group,-g", s.groups, "group spec, e.g. cyclic:12 or gl:2:3; repeatable");
}

void add_set_options(CLI::App *sub, SetOptions &s)
{
  sub->add_option("--set", s.set, "comma-separated element ids");
  sub->add_option("--set-file", s.set_file, "set file: group spec, then one id per line");
  sub->add_option("--random-classes", s.random_classes, "seeded random centered set with this many inverse pairs");
}

void put_set_params(const SetOptions &s, Json &params)
{
  if (!s.set.empty()) {
    std::vector<uint64_t> ids;
    std::stringstream ss(s.set);
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (!tok.empty())
        ids.push_back(std::stoull(tok));
    params["set"] = ids;
  }
  if (!s.set_file.empty())
    params["set_file"] = s.set_file;
  if (s.random_classes >= 0)
    params["random_classes"] = s.random_classes;
}

int fail_with(gc_status s)
{
  std::cerr << "error (" << gc_status_name(s) << "): " << gc_last_error() << "\n";
  return kExitError;
}

std::string read_file(const std::string &path)
{
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// runs the config through the library, prints results, writes files
int execute(const Json &config, bool text_output, bool csv_to_stdout)
{
  gc_report *rep = nullptr;
  gc_status s = gc_run_json(config.dump().c_str(), &rep);
  if (s != GC_OK)
    return fail_with(s);
  Json j = Json::parse(gc_report_json(rep, -1));
  bool wrote_json = config.contains("out") && !config["out"].get<std::string>().empty();
  bool wrote_csv = config.contains("csv") && !config["csv"].get<std::string>().empty();
  if (text_output) {
    for (const auto &r : j["records"])
      if (r["result"].contains("text"))
        std::cout << r["result"]["text"].get<std::string>();
  } else if (csv_to_stdout && !wrote_csv) {
    std::cout << gc_report_csv(rep);
  } else if (!wrote_json) {
    std::cout << gc_report_json(rep, 2) << "\n";
  }
  if ((s = gc_report_write(rep)) != GC_OK) {
    gc_report_free(rep);
    return fail_with(s);
  }
  if (!text_output) {
    for (const auto &r : j["records"]) {
      std::string label = r["op"].get<std::string>();
      if (r["inputs"].contains("group"))
        label += " " + r["inputs"]["group"].get<std::string>();
      if (r["inputs"].contains("suite"))
        label += " " + r["inputs"]["suite"].get<std::string>();
      std::cerr << (r["pass"].get<bool>() ? "pass  " : "FAIL  ") << label << "\n";
      for (const auto &a : r["asserts"])
        if (!a["holds"].get<bool>()) {
          std::cerr << "      " << a["name"].get<std::string>();
          if (a.contains("lhs"))
            std::cerr << ": " << a["lhs"].get<std::string>() << " > " << a["rhs"].get<std::string>();
          if (a.contains("detail"))
            std::cerr << " (" << a["detail"].get<std::string>() << ")";
          std::cerr << "\n";
        }
    }
    std::cerr << "report " << gc_report_hash(rep) << ", " << gc_report_failures(rep) << " failed assertions\n";
  }
  int code = gc_report_exit_code(rep);
  gc_report_free(rep);
  return code;
}

} // namespace

int main(int argc, char **argv)
{
  CLI::App app{"finite group combinatorics experiments"};
  app.require_subcommand(0, 1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "global seed")->capture_default_str();
  app.add_option("--assert-mode", g.assert_mode, "hard: failed assertions give exit code 1; report: record only")
    ->check(CLI::IsMember({"hard", "report"}))
    ->capture_default_str();
  app.add_option("--out", g.out, "write the JSON report here instead of stdout");
  app.add_option("--csv", g.csv, "write the CSV table here");
  app.add_option("--cap-order", g.cap_order, "largest group order to build")->capture_default_str();
  app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--config", g.config, "JSON config file; command-line flags are ignored");

  SetOptions so;
  Json params = Json::object();

  auto *group = app.add_subcommand("group", "structure summary and axiom check");
  add_group_option(group, so);
  bool no_axioms = false;
  group->add_flag("--no-axioms", no_axioms, "skip the exhaustive axiom check");

  auto *sets = app.add_subcommand("sets", "growth, covering and pattern statistics of a set");
  add_group_option(sets, so);
  add_set_options(sets, so);
  std::string ap_mode;
  sets->add_option("--ap-mode", ap_mode, "translational or averaging");

  auto *extract = app.add_subcommand("extract", "commuting dissociated extraction");
  add_group_option(extract, so);
  add_set_options(extract, so);
  bool over_center = false;
  std::string strategy;
  extract->add_flag("--over-center", over_center, "extract relative to the center");
  extract->add_option("--strategy", strategy, "default or abelian");

  auto *gl = app.add_subcommand("gl", "flag pipeline for matrix groups");
  add_group_option(gl, so);
  add_set_options(gl, so);
  std::string pipeline;
  gl->add_option("--pipeline", pipeline, "abelian-substruct");

  auto *ramsey = app.add_subcommand("ramsey", "random Cayley graph experiments");
  add_group_option(ramsey, so);
  std::string mode;
  int trials = -1, count_n = -1;
  bool baseline = false;
  double threshold = -1;
  ramsey->add_option("--mode", mode, "squaring or prime");
  ramsey->add_option("--trials", trials, "number of sampled graphs");
  ramsey->add_flag("--baseline", baseline, "also sample uniform connection sets");
  ramsey->add_option("--threshold", threshold, "flag trials above threshold * log2 |G|");
  ramsey->add_option("--count-n", count_n, "size of small sets to count, 0 to skip");

  auto *roth = app.add_subcommand("roth", "3-AP-free sets and corner transfer");
  add_group_option(roth, so);
  roth->add_option("--set", so.set, "comma-separated element ids");
  roth->add_option("--set-file", so.set_file, "set file");
  int grow = -1;
  roth->add_option("--ap-mode", ap_mode, "translational or averaging");
  roth->add_option("--grow", grow, "size of a seeded greedy 3-AP-free set");

  auto *verify = app.add_subcommand("verify", "run invariant suites");
  std::string suite = "lemma-checks";
  bool quick = false;
  verify->add_option("--suite", suite, "lemma-checks or a single suite name")->capture_default_str();
  verify->add_flag("--quick", quick, "reduced instance counts");

  auto *catalog = app.add_subcommand("catalog", "list constructors or describe a group");
  std::string action, spec;
  catalog->add_option("action", action, "list or describe")->required()->check(CLI::IsMember({"list", "describe"}));
  catalog->add_option("spec", spec, "group spec for describe");

  CLI11_PARSE(app, argc, argv);

  Json config;
  try {
    if (!g.config.empty()) {
      config = Json::parse(read_file(g.config));
    } else if (app.get_subcommands().empty()) {
      std::cerr << "a subcommand or --config is required\n" << app.help();
      return kExitError;
    } else {
      auto *sub = app.get_subcommands().front();
      std::string cmd = sub->get_name();
      if (sub == group && no_axioms)
        params["axioms"] = false;
      if (sub == sets || sub == extract || sub == gl || sub == roth)
        put_set_params(so, params);
      if ((sub == sets || sub == roth) && !ap_mode.empty())
        params["ap_mode"] = ap_mode;
      if (sub == extract) {
        if (over_center)
          params["over_center"] = true;
        if (!strategy.empty())
          params["strategy"] = strategy;
      }
      if (sub == gl && !pipeline.empty())
        params["pipeline"] = pipeline;
      if (sub == ramsey) {
        if (!mode.empty())
          params["mode"] = mode;
        if (trials >= 0)
          params["trials"] = trials;
        if (baseline)
          params["baseline"] = true;
        if (threshold >= 0)
          params["threshold"] = threshold;
        if (count_n >= 0)
          params["count_n"] = count_n;
      }
      if (sub == roth && grow >= 0)
        params["grow"] = grow;
      if (sub == verify) {
        params["suite"] = suite;
        if (quick)
          params["quick"] = true;
      }
      if (sub == catalog) {
        params["action"] = action;
        if (action == "describe") {
          if (spec.empty()) {
            std::cerr << "catalog describe needs a group spec\n";
            return kExitError;
          }
          so.groups = {spec};
        }
      }
      config = Json{{"command", cmd},        {"groups", so.groups},       {"params", params},
                    {"seed", g.seed},        {"assert_mode", g.assert_mode}, {"out", g.out},
                    {"csv", g.csv},          {"cap_order", g.cap_order},  {"threads", g.threads}};
    }
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  bool text = config.value("command", "") == "catalog";
  bool csv_out = config.value("command", "") == "ramsey";
  return execute(config, text, csv_out);
}
