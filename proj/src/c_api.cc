#include "grpcomb/c_api.h"

#include <string>

#include "grpcomb/error.hpp"
#include "grpcomb/group.hpp"
#include "grpcomb/harness.hpp"
#include "grpcomb/report.hpp"

struct gc_group {
  grpcomb::GroupPtr g;
};

struct gc_report {
  grpcomb::RunReport report;
  grpcomb::Json json;
  std::string text, hash;
};

struct gc_text {
  std::string s;
};

namespace {

thread_local std::string last_error;

// runs f, mapping exceptions to status codes
template <class F>
gc_status guarded(F f)
{
  try {
    f();
    last_error.clear();
    return GC_OK;
  } catch (const grpcomb::Error &e) {
    last_error = e.what();
    return gc_status(int(e.code()));
  } catch (const std::bad_alloc &) {
    last_error = "out of memory";
    return GC_CAP_EXCEEDED;
  } catch (const std::exception &e) {
    last_error = e.what();
    return GC_INTERNAL;
  }
}

gc_status null_arg(const char *what)
{
  last_error = std::string(what) + " is null";
  return GC_INVALID_ARGUMENT;
}

} // namespace

extern "C" {

const char *gc_version(void) { return "1.0.0"; }

const char *gc_last_error(void) { return last_error.c_str(); }

const char *gc_status_name(gc_status s)
{
  if (int(s) < 0 || int(s) > int(GC_INTERNAL))
    return "unknown";
  return grpcomb::error_name(grpcomb::ErrorCode(int(s)));
}

gc_status gc_group_build(const char *spec, uint64_t cap, gc_group **out)
{
  if (!spec || !out)
    return null_arg("argument");
  return guarded([&] {
    auto g = grpcomb::build_group(spec, cap ? cap : grpcomb::kDefaultOrderCap);
    *out = new gc_group{std::move(g)};
  });
}

void gc_group_free(gc_group *g) { delete g; }

uint64_t gc_group_order(const gc_group *g) { return g ? g->g->order() : 0; }

const char *gc_group_spec(const gc_group *g) { return g ? g->g->spec().c_str() : ""; }

int gc_group_is_abelian(const gc_group *g) { return g && g->g->is_abelian() ? 1 : 0; }

static gc_status check_element(const gc_group *g, uint32_t a)
{
  if (!g)
    return null_arg("group");
  if (a >= g->g->order()) {
    last_error = "element " + std::to_string(a) + " out of range";
    return GC_INVALID_ARGUMENT;
  }
  return GC_OK;
}

gc_status gc_group_mul(const gc_group *g, uint32_t a, uint32_t b, uint32_t *out)
{
  if (!out)
    return null_arg("out");
  if (auto s = check_element(g, a); s != GC_OK)
    return s;
  if (auto s = check_element(g, b); s != GC_OK)
    return s;
  *out = g->g->mul(a, b);
  return GC_OK;
}

gc_status gc_group_inv(const gc_group *g, uint32_t a, uint32_t *out)
{
  if (!out)
    return null_arg("out");
  if (auto s = check_element(g, a); s != GC_OK)
    return s;
  *out = g->g->inv(a);
  return GC_OK;
}

gc_status gc_group_element_order(const gc_group *g, uint32_t a, uint32_t *out)
{
  if (!out)
    return null_arg("out");
  if (auto s = check_element(g, a); s != GC_OK)
    return s;
  *out = g->g->element_order(a);
  return GC_OK;
}

const char *gc_text_data(const gc_text *t) { return t ? t->s.c_str() : ""; }

void gc_text_free(gc_text *t) { delete t; }

gc_status gc_catalog_list(gc_text **out)
{
  if (!out)
    return null_arg("out");
  return guarded([&] { *out = new gc_text{grpcomb::catalog_list_text()}; });
}

gc_status gc_catalog_describe(const char *spec, uint64_t cap, gc_text **out)
{
  if (!spec || !out)
    return null_arg("argument");
  return guarded([&] {
    *out = new gc_text{grpcomb::catalog_describe_text(spec, cap ? cap : grpcomb::kDefaultOrderCap)};
  });
}

gc_status gc_run_json(const char *config_json, gc_report **out)
{
  if (!config_json || !out)
    return null_arg("argument");
  return guarded([&] {
    grpcomb::Json j;
    try {
      j = grpcomb::Json::parse(config_json);
    } catch (const grpcomb::Json::parse_error &e) {
      grpcomb::fail(grpcomb::ErrorCode::invalid_argument, std::string("config is not JSON: ") + e.what());
    }
    auto cfg = grpcomb::config_from_json(j);
    auto r = new gc_report;
    try {
      r->report = grpcomb::run(cfg);
      r->json = r->report.to_json();
      r->hash = grpcomb::report_hash(r->json);
    } catch (...) {
      delete r;
      throw;
    }
    *out = r;
  });
}

void gc_report_free(gc_report *r) { delete r; }

const char *gc_report_json(gc_report *r, int indent)
{
  if (!r)
    return "";
  r->text = r->json.dump(indent < 0 ? -1 : indent);
  return r->text.c_str();
}

const char *gc_report_hash(gc_report *r) { return r ? r->hash.c_str() : ""; }

const char *gc_report_csv(const gc_report *r) { return r ? r->report.csv.c_str() : ""; }

int gc_report_exit_code(const gc_report *r) { return r ? r->report.exit_code() : 1; }

uint64_t gc_report_failures(const gc_report *r) { return r ? r->report.failures() : 0; }

size_t gc_report_records(const gc_report *r) { return r ? r->report.records.size() : 0; }

gc_status gc_report_write(const gc_report *r)
{
  if (!r)
    return null_arg("report");
  return guarded([&] { grpcomb::write_outputs(r->report); });
}

} // extern "C"
