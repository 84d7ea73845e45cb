#pragma once

#include <string>
#include <vector>

#include "grpcomb/report.hpp"

namespace grpcomb {

// Commands: group, sets, extract, gl, ramsey, roth, verify, catalog.
// Each command accepts a fixed set of params keys; anything else is an
// invalid_argument error. Records follow the order of config.groups.
RunReport run(const ExperimentConfig &config);

const std::vector<std::string> &command_names();

// human-readable text for catalog list / describe
std::string catalog_list_text();
std::string catalog_describe_text(const std::string &spec, uint64_t cap = kDefaultOrderCap);

// writes report JSON to config.out and the table to config.csv when set
void write_outputs(const RunReport &report);

} // namespace grpcomb
