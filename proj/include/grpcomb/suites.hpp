#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "grpcomb/exact.hpp"
#include "grpcomb/report.hpp"

namespace grpcomb {

// Seeded invariant suites. Each instance draws from its own stream keyed by
// (seed, suite, index), so results do not depend on the thread count.
struct SuiteOptions {
  uint64_t seed = 0;
  int threads = 1;
  bool quick = false; // reduced instance counts for smoke runs
};

struct SuiteResult {
  std::string name;
  uint64_t cases = 0;
  uint64_t failure_count = 0;
  std::vector<std::string> failures; // first few, in instance order
  std::vector<Inequality> violated;  // first few, in instance order
  Json details = Json::object();
  bool pass() const { return failure_count == 0; }
};

// individual suites in a fixed order; "lemma-checks" runs them all
const std::vector<std::string> &suite_names();
std::string suite_description(const std::string &name);
SuiteResult run_suite(const std::string &name, const SuiteOptions &opt);
Record suite_record(const SuiteResult &r);

} // namespace grpcomb
