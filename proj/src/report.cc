#include "grpcomb/report.hpp"

#include <iomanip>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include "grpcomb/error.hpp"

namespace grpcomb {

const char *assert_mode_name(AssertMode m) { return m == AssertMode::hard ? "hard" : "report"; }

AssertMode parse_assert_mode(const std::string &s)
{
  if (s == "hard")
    return AssertMode::hard;
  if (s == "report")
    return AssertMode::report;
  fail(ErrorCode::invalid_argument, "assert mode must be hard or report, got " + s);
}

Json config_to_json(const ExperimentConfig &c)
{
  return Json{{"command", c.command},     {"groups", c.groups},
              {"params", c.params},       {"seed", c.seed},
              {"assert_mode", assert_mode_name(c.assert_mode)},
              {"out", c.out},             {"csv", c.csv},
              {"cap_order", c.cap_order}, {"threads", c.threads}};
}

ExperimentConfig config_from_json(const Json &j)
{
  require(j.is_object(), ErrorCode::invalid_argument, "config must be a JSON object");
  static const std::set<std::string> known{"command", "groups",    "params", "seed",   "assert_mode",
                                           "out",     "csv",       "cap_order", "threads"};
  for (auto it = j.begin(); it != j.end(); ++it)
    require(known.count(it.key()) > 0, ErrorCode::invalid_argument,
            "unknown config key " + it.key());
  ExperimentConfig c;
  try {
    c.command = j.at("command").get<std::string>();
    if (j.contains("groups"))
      c.groups = j["groups"].get<std::vector<std::string>>();
    if (j.contains("params")) {
      require(j["params"].is_object(), ErrorCode::invalid_argument, "params must be an object");
      c.params = j["params"];
    }
    if (j.contains("seed"))
      c.seed = j["seed"].get<uint64_t>();
    if (j.contains("assert_mode"))
      c.assert_mode = parse_assert_mode(j["assert_mode"].get<std::string>());
    if (j.contains("out"))
      c.out = j["out"].get<std::string>();
    if (j.contains("csv"))
      c.csv = j["csv"].get<std::string>();
    if (j.contains("cap_order"))
      c.cap_order = j["cap_order"].get<uint64_t>();
    if (j.contains("threads"))
      c.threads = j["threads"].get<int>();
  } catch (const nlohmann::json::exception &e) {
    fail(ErrorCode::invalid_argument, std::string("bad config: ") + e.what());
  }
  require(c.threads >= 1, ErrorCode::invalid_argument, "threads must be positive");
  return c;
}

std::string sha256_hex(const std::string &bytes)
{
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  require(EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) == 1,
          ErrorCode::internal, "sha256 failed");
  std::ostringstream os;
  for (unsigned i = 0; i < len; ++i)
    os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

std::string config_hash(const ExperimentConfig &c)
{
  Json j = config_to_json(c);
  j.erase("threads");
  j.erase("out");
  j.erase("csv");
  return sha256_hex(j.dump());
}

Assertion from_inequality(const Inequality &q)
{
  Assertion a;
  a.name = q.name;
  a.inequality = true;
  a.lhs = q.lhs;
  a.rhs = q.rhs;
  a.holds = q.holds;
  return a;
}

Assertion condition(std::string name, bool holds, std::string detail)
{
  Assertion a;
  a.name = std::move(name);
  a.holds = holds;
  a.detail = std::move(detail);
  return a;
}

bool Record::pass() const
{
  for (const auto &a : asserts)
    if (!a.holds)
      return false;
  return true;
}

size_t RunReport::failures() const
{
  size_t n = 0;
  for (const auto &r : records)
    for (const auto &a : r.asserts)
      n += !a.holds;
  return n;
}

int RunReport::exit_code() const
{
  return config.assert_mode == AssertMode::hard && failures() > 0 ? 1 : 0;
}

Json to_json(const Inequality &q)
{
  return Json{{"name", q.name}, {"lhs", q.lhs}, {"rhs", q.rhs}, {"holds", q.holds}};
}

Json to_json(const Assertion &a)
{
  Json j{{"name", a.name}, {"holds", a.holds}};
  if (a.inequality) {
    j["lhs"] = a.lhs;
    j["rhs"] = a.rhs;
  }
  if (!a.detail.empty())
    j["detail"] = a.detail;
  return j;
}

Json ids_json(const std::vector<Id> &ids, size_t cap)
{
  Json j = Json::array();
  for (size_t i = 0; i < ids.size() && i < cap; ++i)
    j.push_back(ids[i]);
  return j;
}

Json subgroup_json(const Subgroup &H, size_t member_cap)
{
  Json j{{"order", H.order()}, {"gens", ids_json(H.gens)}};
  if (H.order() <= member_cap)
    j["members"] = ids_json(H.members, member_cap);
  return j;
}

Json RunReport::to_json() const
{
  Json recs = Json::array();
  size_t passed = 0;
  for (const auto &r : records) {
    Json a = Json::array();
    for (const auto &x : r.asserts)
      a.push_back(grpcomb::to_json(x));
    recs.push_back(Json{{"op", r.op},
                        {"inputs", r.inputs},
                        {"inputs_hash", sha256_hex(r.inputs.dump()).substr(0, 16)},
                        {"result", r.result},
                        {"asserts", a},
                        {"pass", r.pass()},
                        {"wall_ms", r.wall_ms}});
    passed += r.pass();
  }
  Json cfg = config_to_json(config);
  cfg.erase("threads");
  cfg.erase("out");
  cfg.erase("csv");
  return Json{{"config_hash", config_hash(config)},
              {"config", cfg},
              {"records", recs},
              {"summary",
               {{"records", records.size()},
                {"passed", passed},
                {"failed_asserts", failures()},
                {"assert_mode", assert_mode_name(config.assert_mode)},
                {"exit_code", exit_code()}}},
              {"execution", {{"threads", config.threads}, {"wall_ms", wall_ms}}}};
}

Json strip_wall_times(const Json &report)
{
  if (report.is_object()) {
    Json out = Json::object();
    for (auto it = report.begin(); it != report.end(); ++it)
      if (it.key() != "wall_ms" && it.key() != "execution")
        out[it.key()] = strip_wall_times(it.value());
    return out;
  }
  if (report.is_array()) {
    Json out = Json::array();
    for (const auto &v : report)
      out.push_back(strip_wall_times(v));
    return out;
  }
  return report;
}

std::string report_hash(const Json &report) { return sha256_hex(strip_wall_times(report).dump()); }

} // namespace grpcomb
