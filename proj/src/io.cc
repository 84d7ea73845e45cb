#include "grpcomb/io.hpp"

#include <fstream>
#include <sstream>

#include "grpcomb/error.hpp"

namespace grpcomb {

namespace {

std::string strip(const std::string &s)
{
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos)
    return {};
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// lines with comments and blanks removed
std::vector<std::string> content_lines(const std::string &text)
{
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    auto h = line.find('#');
    if (h != std::string::npos)
      line.resize(h);
    line = strip(line);
    if (!line.empty())
      out.push_back(line);
  }
  return out;
}

int64_t parse_int(const std::string &s)
{
  size_t used = 0;
  int64_t v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception &) {
    fail(ErrorCode::invalid_argument, "not an integer: " + s);
  }
  require(used == s.size(), ErrorCode::invalid_argument, "not an integer: " + s);
  return v;
}

} // namespace

std::string read_text(const std::string &path)
{
  std::ifstream in(path, std::ios::binary);
  require(bool(in), ErrorCode::io, "cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const std::string &path, const std::string &text)
{
  std::ofstream out(path, std::ios::binary);
  require(bool(out), ErrorCode::io, "cannot write " + path);
  out << text;
  require(bool(out), ErrorCode::io, "write failed for " + path);
}

GroupSubset parse_set_text(const std::string &text, uint64_t cap)
{
  auto lines = content_lines(text);
  require(!lines.empty(), ErrorCode::invalid_argument, "set file has no group line");
  auto G = build_group(lines[0], cap);
  std::vector<Id> ids;
  for (size_t i = 1; i < lines.size(); ++i) {
    int64_t v = parse_int(lines[i]);
    require(v >= 0 && uint64_t(v) < G->order(), ErrorCode::invalid_argument,
            "element id out of range: " + lines[i]);
    ids.push_back(Id(v));
  }
  return GroupSubset(G, ids);
}

GroupSubset read_set_file(const std::string &path, uint64_t cap)
{
  return parse_set_text(read_text(path), cap);
}

std::string format_set(const GroupSubset &A)
{
  std::ostringstream os;
  os << A.group()->spec() << "\n";
  for (Id x : A.ids())
    os << x << "\n";
  return os.str();
}

void write_set_file(const std::string &path, const GroupSubset &A) { write_text(path, format_set(A)); }

std::vector<int64_t> parse_int_set(const std::string &text)
{
  std::vector<int64_t> out;
  for (const auto &l : content_lines(text))
    out.push_back(parse_int(l));
  return out;
}

std::vector<int64_t> read_int_set(const std::string &path) { return parse_int_set(read_text(path)); }

} // namespace grpcomb
