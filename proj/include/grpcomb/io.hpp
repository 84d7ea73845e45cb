#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "grpcomb/approx.hpp"

namespace grpcomb {

// set file: group spec on the first line, then one element id per line
GroupSubset parse_set_text(const std::string &text, uint64_t cap = kDefaultOrderCap);
GroupSubset read_set_file(const std::string &path, uint64_t cap = kDefaultOrderCap);
std::string format_set(const GroupSubset &A);
void write_set_file(const std::string &path, const GroupSubset &A);

// integer-set file: one integer per line, blank lines and # comments skipped
std::vector<int64_t> parse_int_set(const std::string &text);
std::vector<int64_t> read_int_set(const std::string &path);

std::string read_text(const std::string &path);
void write_text(const std::string &path, const std::string &text);

} // namespace grpcomb
