#ifndef GRPCOMB_C_API_H
#define GRPCOMB_C_API_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define GC_API __attribute__((visibility("default")))
#else
#define GC_API
#endif

/* status codes; gc_last_error() holds the message of the latest failure on
   the calling thread */
typedef enum {
  GC_OK = 0,
  GC_INVALID_ARGUMENT = 1,
  GC_CAP_EXCEEDED = 2,
  GC_NOT_A_GROUP = 3,
  GC_NOT_NORMAL = 4,
  GC_PRECONDITION = 5,
  GC_NOT_SOLVABLE = 6,
  GC_NEED_EXTENSION = 7,
  GC_IO = 8,
  GC_INTERNAL = 9
} gc_status;

typedef struct gc_group gc_group;
typedef struct gc_report gc_report;
typedef struct gc_text gc_text;

GC_API const char *gc_version(void);
GC_API const char *gc_last_error(void);
GC_API const char *gc_status_name(gc_status s);

/* groups; element ids run over [0, order) with 0 the identity */
GC_API gc_status gc_group_build(const char *spec, uint64_t cap, gc_group **out);
GC_API void gc_group_free(gc_group *g);
GC_API uint64_t gc_group_order(const gc_group *g);
GC_API const char *gc_group_spec(const gc_group *g);
GC_API int gc_group_is_abelian(const gc_group *g);
GC_API gc_status gc_group_mul(const gc_group *g, uint32_t a, uint32_t b, uint32_t *out);
GC_API gc_status gc_group_inv(const gc_group *g, uint32_t a, uint32_t *out);
GC_API gc_status gc_group_element_order(const gc_group *g, uint32_t a, uint32_t *out);

/* owned strings */
GC_API const char *gc_text_data(const gc_text *t);
GC_API void gc_text_free(gc_text *t);

GC_API gc_status gc_catalog_list(gc_text **out);
GC_API gc_status gc_catalog_describe(const char *spec, uint64_t cap, gc_text **out);

/* runs one experiment config given as JSON:
   {"command", "groups", "params", "seed", "assert_mode", "out", "csv",
    "cap_order", "threads"} */
GC_API gc_status gc_run_json(const char *config_json, gc_report **out);
GC_API void gc_report_free(gc_report *r);
/* pointers stay valid until gc_report_free */
GC_API const char *gc_report_json(gc_report *r, int indent);
GC_API const char *gc_report_hash(gc_report *r);
GC_API const char *gc_report_csv(const gc_report *r);
GC_API int gc_report_exit_code(const gc_report *r);
GC_API uint64_t gc_report_failures(const gc_report *r);
GC_API size_t gc_report_records(const gc_report *r);
/* writes the JSON report and CSV table to the paths named in the config */
GC_API gc_status gc_report_write(const gc_report *r);

#ifdef __cplusplus
}
#endif

#endif
