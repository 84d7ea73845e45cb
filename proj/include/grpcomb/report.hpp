#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "grpcomb/exact.hpp"
#include "grpcomb/group.hpp"
#include "grpcomb/structure.hpp"

namespace grpcomb {

using Json = nlohmann::json;

enum class AssertMode { hard, report };
const char *assert_mode_name(AssertMode m);
AssertMode parse_assert_mode(const std::string &s);

// Everything that determines a run. `threads`, `out` and `csv` only affect
// how the run executes or where it writes, so they are left out of the hash.
struct ExperimentConfig {
  std::string command;
  std::vector<std::string> groups;
  Json params = Json::object();
  uint64_t seed = 0;
  AssertMode assert_mode = AssertMode::hard;
  std::string out, csv;
  uint64_t cap_order = kDefaultOrderCap;
  int threads = 1;
};

Json config_to_json(const ExperimentConfig &c);
// unknown keys and wrong types are rejected with invalid_argument
ExperimentConfig config_from_json(const Json &j);
std::string config_hash(const ExperimentConfig &c);

std::string sha256_hex(const std::string &bytes);

// One checked claim. Inequalities carry both sides exactly; conditions carry
// a short description of what failed.
struct Assertion {
  std::string name;
  bool inequality = false;
  std::string lhs, rhs, detail;
  bool holds = true;
};
Assertion from_inequality(const Inequality &q);
Assertion condition(std::string name, bool holds, std::string detail = {});

struct Record {
  std::string op;
  Json inputs = Json::object();
  Json result = Json::object();
  std::vector<Assertion> asserts;
  double wall_ms = 0;
  bool pass() const;
};

struct RunReport {
  ExperimentConfig config;
  std::vector<Record> records;
  std::string csv; // optional table
  double wall_ms = 0;
  size_t failures() const;
  // 0 iff every assertion holds, or assert mode is report
  int exit_code() const;
  Json to_json() const;
};

// hash of the report with wall times and execution-only fields removed
std::string report_hash(const Json &report);
Json strip_wall_times(const Json &report);

Json to_json(const Inequality &q);
Json to_json(const Assertion &a);
Json subgroup_json(const Subgroup &H, size_t member_cap = 64);
Json ids_json(const std::vector<Id> &ids, size_t cap = 256);

} // namespace grpcomb
