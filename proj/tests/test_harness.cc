#include "doctest.h"

#include <cstdio>
#include <filesystem>

#include "grpcomb/c_api.h"
#include "grpcomb/error.hpp"
#include "grpcomb/harness.hpp"
#include "grpcomb/io.hpp"
#include "grpcomb/suites.hpp"

using namespace grpcomb;

namespace {

std::string temp_path(const std::string &name)
{
  return (std::filesystem::temp_directory_path() / ("grpcomb_test_" + name)).string();
}

ExperimentConfig make(const std::string &cmd, std::vector<std::string> groups, Json params = Json::object())
{
  ExperimentConfig c;
  c.command = cmd;
  c.groups = std::move(groups);
  c.params = std::move(params);
  c.seed = 5;
  return c;
}

} // namespace

TEST_CASE("config round trip and validation")
{
  auto c = make("ramsey", {"cyclic:35"}, Json{{"trials", 3}});
  c.threads = 4;
  c.out = "x.json";
  auto back = config_from_json(config_to_json(c));
  CHECK(config_to_json(back) == config_to_json(c));
  // threads and output paths do not change the hash
  auto d = c;
  d.threads = 1;
  d.out.clear();
  CHECK(config_hash(c) == config_hash(d));
  d.seed = 6;
  CHECK(config_hash(c) != config_hash(d));

  Json bad = config_to_json(c);
  bad["extra"] = 1;
  CHECK_THROWS_AS(config_from_json(bad), Error);
  bad = config_to_json(c);
  bad["seed"] = "seven";
  CHECK_THROWS_AS(config_from_json(bad), Error);
  bad = config_to_json(c);
  bad["threads"] = 0;
  CHECK_THROWS_AS(config_from_json(bad), Error);
  CHECK_THROWS_AS(config_from_json(Json{{"groups", Json::array()}}), Error);
  CHECK_THROWS_AS(parse_assert_mode("soft"), Error);
}

TEST_CASE("sha256 known answers")
{
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("wall times are excluded from the report hash")
{
  Json a{{"x", 1}, {"wall_ms", 3.5}, {"execution", {{"threads", 4}}}, {"r", Json::array({Json{{"wall_ms", 1}}})}};
  Json b{{"x", 1}, {"wall_ms", 9.0}, {"execution", {{"threads", 1}}}, {"r", Json::array({Json{{"wall_ms", 2}}})}};
  CHECK(report_hash(a) == report_hash(b));
  b["x"] = 2;
  CHECK(report_hash(a) != report_hash(b));
}

TEST_CASE("set files")
{
  auto G = build_group("dihedral:5");
  GroupSubset A(G, {0, 3, 7});
  auto path = temp_path("set.txt");
  write_set_file(path, A);
  auto B = read_set_file(path);
  CHECK(B.group()->spec() == "dihedral:5");
  CHECK(B.ids() == A.ids());
  auto C = parse_set_text("# comment\ncyclic:10\n\n4\n2 # trailing\n");
  CHECK(C.ids() == std::vector<Id>{2, 4});
  CHECK_THROWS_AS(parse_set_text("cyclic:10\n12\n"), Error);
  CHECK(parse_int_set("3\n-1\n# x\n7\n") == std::vector<int64_t>{3, -1, 7});
  CHECK_THROWS_AS(read_set_file(temp_path("missing.txt")), Error);
  std::remove(path.c_str());
}

TEST_CASE("catalog command")
{
  auto rep = run(make("catalog", {"gl:2:3"}, Json{{"action", "describe"}}));
  REQUIRE(rep.records.size() == 1);
  CHECK(rep.records[0].result["order"] == 48);
  CHECK(rep.records[0].result["abelian"] == false);
  rep = run(make("catalog", {"cyclic:6"}, Json{{"action", "describe"}}));
  CHECK(rep.records[0].result["order"] == 6);
  CHECK(rep.records[0].result["abelian"] == true);
  rep = run(make("catalog", {}, Json{{"action", "list"}}));
  CHECK(rep.records[0].result["text"].get<std::string>().find("olshanskii") != std::string::npos);
  CHECK_THROWS_AS(run(make("catalog", {"nonsense:3"}, Json{{"action", "describe"}})), Error);
}

TEST_CASE("commands reject unknown parameters")
{
  for (const auto &cmd : command_names()) {
    auto c = make(cmd, {"cyclic:5"}, Json{{"no_such_key", 1}});
    CHECK_THROWS_AS(run(c), Error);
  }
  CHECK_THROWS_AS(run(make("unknown", {"cyclic:5"})), Error);
  CHECK_THROWS_AS(run(make("group", {})), Error);
  CHECK_THROWS_AS(run(make("ramsey", {"cyclic:5"}, Json{{"trials", "many"}})), Error);
}

TEST_CASE("cap order is enforced")
{
  auto c = make("group", {"cyclic:1000"});
  c.cap_order = 100;
  try {
    run(c);
    FAIL("expected cap error");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::cap_exceeded);
  }
}

TEST_CASE("exit code follows hard assertions")
{
  auto c = make("ramsey", {"cyclic:35"}, Json{{"trials", 3}, {"threshold", 0.01}});
  auto rep = run(c);
  CHECK(rep.failures() > 0);
  CHECK(rep.exit_code() == 1);
  c.assert_mode = AssertMode::report;
  rep = run(c);
  CHECK(rep.failures() > 0);
  CHECK(rep.exit_code() == 0);
  rep = run(make("ramsey", {"cyclic:35"}, Json{{"trials", 3}}));
  CHECK(rep.exit_code() == 0);
  CHECK(rep.csv.rfind("trial,", 0) == 0);
}

TEST_CASE("reports are identical across thread counts")
{
  std::vector<ExperimentConfig> configs{
    make("group", {"symmetric:4", "heisenberg:3", "cyclic:12"}),
    make("sets", {"dihedral:8", "abelian:3,3"}, Json{{"random_classes", 3}}),
    make("extract", {"heisenberg:3", "dicyclic:12"}, Json{{"random_classes", 3}}),
    make("gl", {"gl:2:2", "sl:2:3"}),
    make("ramsey", {"cyclic:35", "cyclic:55"}, Json{{"trials", 4}, {"mode", "prime"}}),
    make("roth", {"heisenberg:3", "dihedral:9"}, Json{{"grow", 6}}),
    make("verify", {}, Json{{"suite", "ruzsa"}, {"quick", true}}),
  };
  for (auto c : configs) {
    CAPTURE(c.command);
    c.threads = 1;
    auto one = run(c).to_json();
    c.threads = 3;
    auto three = run(c).to_json();
    CHECK(report_hash(one) == report_hash(three));
    CHECK(strip_wall_times(one).dump() == strip_wall_times(three).dump());
  }
}

TEST_CASE("different seeds give different random inputs")
{
  auto c = make("sets", {"symmetric:4"}, Json{{"random_classes", 4}});
  auto a = run(c).to_json();
  c.seed = 6;
  auto b = run(c).to_json();
  CHECK(a["records"][0]["inputs"] != b["records"][0]["inputs"]);
}

TEST_CASE("report layout")
{
  auto rep = run(make("group", {"cyclic:4"}));
  auto j = rep.to_json();
  CHECK(j["config_hash"] == config_hash(rep.config));
  CHECK(j["summary"]["records"] == 1);
  CHECK(j["summary"]["exit_code"] == 0);
  CHECK(j["records"][0]["inputs_hash"].get<std::string>().size() == 16);
  CHECK(!j["config"].contains("threads"));
}

TEST_CASE("suite registry")
{
  CHECK(suite_names().size() == 14);
  CHECK_THROWS_AS(run_suite("missing", {}), Error);
  SuiteOptions o;
  o.quick = true;
  auto r = run_suite("rank", o);
  CHECK(r.pass());
  CHECK(r.cases == 100);
  auto rec = suite_record(r);
  CHECK(rec.pass());
}

TEST_CASE("c api")
{
  gc_group *g = nullptr;
  REQUIRE(gc_group_build("symmetric:3", 0, &g) == GC_OK);
  CHECK(gc_group_order(g) == 6);
  CHECK(!gc_group_is_abelian(g));
  uint32_t x = 0, y = 0;
  CHECK(gc_group_inv(g, 1, &x) == GC_OK);
  CHECK(gc_group_mul(g, 1, x, &y) == GC_OK);
  CHECK(y == 0);
  CHECK(gc_group_mul(g, 6, 0, &y) == GC_INVALID_ARGUMENT);
  CHECK(std::string(gc_last_error()).find("out of range") != std::string::npos);
  gc_group_free(g);
  CHECK(gc_group_build("dicyclic:3", 0, &g) == GC_INVALID_ARGUMENT);
  CHECK(gc_group_build("cyclic:100000", 10, &g) == GC_CAP_EXCEEDED);

  gc_report *r = nullptr;
  CHECK(gc_run_json("{not json", &r) == GC_INVALID_ARGUMENT);
  CHECK(gc_run_json(R"({"command":"group","groups":["cyclic:3"],"oops":1})", &r) == GC_INVALID_ARGUMENT);
  REQUIRE(gc_run_json(R"({"command":"group","groups":["cyclic:3"],"seed":2})", &r) == GC_OK);
  CHECK(gc_report_exit_code(r) == 0);
  CHECK(gc_report_records(r) == 1);
  CHECK(std::string(gc_report_hash(r)).size() == 64);
  auto j = Json::parse(gc_report_json(r, -1));
  CHECK(j["records"][0]["result"]["order"] == 3);
  gc_report_free(r);

  gc_text *t = nullptr;
  REQUIRE(gc_catalog_describe("gl:2:3", 0, &t) == GC_OK);
  CHECK(std::string(gc_text_data(t)).find("order: 48") != std::string::npos);
  gc_text_free(t);
}
