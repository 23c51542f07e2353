#ifndef SYMBOURSE_H
#define SYMBOURSE_H

/* C interface to the symbourse library. All handles are opaque. Functions
 * return an sb_status; on failure sb_last_error() describes the problem for
 * the calling thread. Strings returned through `char **` are owned by the
 * caller and released with sb_string_free. */

#include <stddef.h>

#if defined(_WIN32)
#  if defined(SYMBOURSE_BUILDING)
#    define SB_API __declspec(dllexport)
#  else
#    define SB_API __declspec(dllimport)
#  endif
#else
#  define SB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sb_status {
    SB_OK = 0,
    SB_ERR_INVALID_ARGUMENT = 1,
    SB_ERR_IO = 2,
    SB_ERR_PARSE = 3,
    SB_ERR_VALIDATION = 4,
    SB_ERR_INSUFFICIENT_HISTORY = 5,
    SB_ERR_QUERY = 6,
    SB_ERR_INTERNAL = 7
} sb_status;

typedef struct sb_dataset sb_dataset;
typedef struct sb_table sb_table;
typedef struct sb_result sb_result;

SB_API const char *sb_version(void);
/* Message of the last failed call on this thread, "" if none. */
SB_API const char *sb_last_error(void);
SB_API const char *sb_status_name(sb_status status);
SB_API void sb_string_free(char *s);

/* Datasets */
SB_API sb_status sb_dataset_load(const char *quotes_path, const char *instruments_path,
                                 const char *taxonomy_path, sb_dataset **out);
SB_API void sb_dataset_free(sb_dataset *dataset);
/* `date` may be NULL for the last calendar date. */
SB_API sb_status sb_dataset_describe(const sb_dataset *dataset, const char *date, char **out);
SB_API sb_status sb_dataset_manifest(const sb_dataset *dataset, char **out);
SB_API sb_status sb_dataset_indicators_csv(const sb_dataset *dataset, const char *date, int with_sd_ret,
                                           char **out);
SB_API size_t sb_dataset_ticker_count(const sb_dataset *dataset);

/* Queries. Strings are borrowed for the duration of a call; NULL or "" means
 * "not set". */
typedef struct sb_query {
    const char *level;          /* global-market | market | portfolio | sector | action */
    const char *granularity;    /* market | sector-l1 | sector-l2 | sector-l3 | action | week */
    const char *scope;          /* market code, sector code or ticker */
    const char *portfolio_path; /* portfolio CSV for level=portfolio */
    const char *variables;      /* set names and/or variable names, comma separated */
    const char *method;         /* div | pca | pyramid | describe */
    const char *date;           /* YYYY-MM-DD */
    const char *dissimilarity;  /* "computed" or a dissimilarity CSV path */
    int k;
    int axis_x;
    int axis_y;
    int normalize;
} sb_query;

SB_API void sb_query_init(sb_query *query);
/* Printable execution plan (dry run). */
SB_API sb_status sb_query_plan(const sb_dataset *dataset, const sb_query *query, char **out);
/* Scope, indicators and aggregation only. */
SB_API sb_status sb_query_table(const sb_dataset *dataset, const sb_query *query, sb_table **out);
SB_API sb_status sb_run_query(const sb_dataset *dataset, const sb_query *query, sb_result **out);

/* Symbolic tables (also accepts indicator CSV). */
SB_API sb_status sb_table_parse(const char *text, sb_table **out);
SB_API sb_status sb_table_read_file(const char *path, sb_table **out);
SB_API sb_status sb_table_to_csv(const sb_table *table, char **out);
SB_API size_t sb_table_object_count(const sb_table *table);
SB_API void sb_table_free(sb_table *table);
/* Runs query->method on a table; level, granularity and scope are ignored.
 * query->variables NULL or "" keeps every column. */
SB_API sb_status sb_run_table(const sb_table *table, const sb_query *query, sb_result **out);
/* Pyramid from a dissimilarity CSV (`label,<labels...>` header). */
SB_API sb_status sb_run_dissimilarity(const char *csv_text, sb_result **out);

/* Results: named text artifacts, the manifest last. */
SB_API size_t sb_result_artifact_count(const sb_result *result);
SB_API const char *sb_result_artifact_name(const sb_result *result, size_t index);
SB_API const char *sb_result_artifact_content(const sb_result *result, size_t index);
/* NULL when absent. */
SB_API const char *sb_result_find(const sb_result *result, const char *name);
SB_API size_t sb_result_warning_count(const sb_result *result);
SB_API const char *sb_result_warning(const sb_result *result, size_t index);
SB_API sb_status sb_result_write(const sb_result *result, const char *out_dir);
SB_API void sb_result_free(sb_result *result);

#ifdef __cplusplus
}
#endif

#endif /* SYMBOURSE_H */
