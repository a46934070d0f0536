/* C interface to the object-graph query engine.
 *
 * Handles are opaque. Every fallible call returns an ogo_status; on failure
 * ogo_last_error_message() and ogo_last_error_stage() describe the error
 * (thread-local, valid until the next failing call on the same thread).
 * Strings returned through char** are heap-allocated and must be released
 * with ogo_string_free().
 */
#ifndef OGO_OGO_H
#define OGO_OGO_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define OGO_API __attribute__((visibility("default")))
#else
#define OGO_API
#endif

typedef enum ogo_status {
    OGO_OK = 0,
    OGO_ERR_INVALID_ARGUMENT,
    OGO_ERR_INVALID_LABEL,
    OGO_ERR_RESERVED_LABEL,
    OGO_ERR_ENDPOINT_NOT_FOUND,
    OGO_ERR_UNKNOWN_NODE,
    OGO_ERR_SIZE_LIMIT,
    OGO_ERR_SYNTAX,
    OGO_ERR_UNKNOWN_TYPE,
    OGO_ERR_UNKNOWN_CLASS,
    OGO_ERR_NO_SUCH_METHOD,
    OGO_ERR_ARITY,
    OGO_ERR_UNBOUND_VARIABLE,
    OGO_ERR_SCHEMA,
    OGO_ERR_DANGLING_REFERENCE,
    OGO_ERR_DUPLICATE_ID,
    OGO_ERR_UNKNOWN_ROOT,
    OGO_ERR_CONFIG_CONFLICT,
    OGO_ERR_NOT_SNAPSHOT_SHAPED,
    OGO_ERR_MALFORMED_CSV,
    OGO_ERR_IO,
    OGO_ERR_POSITIONAL_INDEX,
    OGO_ERR_POSITIONAL_KIND,
    OGO_ERR_UNSUPPORTED,
    OGO_ERR_VALIDATION,
    OGO_ERR_TYPE_MISMATCH,
    OGO_ERR_CAST,
    OGO_ERR_SHAPE,
    OGO_ERR_CURSOR,
    OGO_ERR_UNKNOWN_COLUMN,
    OGO_ERR_INTERNAL = 100
} ogo_status;

typedef struct ogo_context ogo_context;
typedef struct ogo_result ogo_result;
typedef struct ogo_session ogo_session;

typedef enum ogo_arg_kind {
    OGO_ARG_UID = 0,      /* $k */
    OGO_ARG_CLASS = 1,    /* @k */
    OGO_ARG_UID_LIST = 2  /* []k */
} ogo_arg_kind;

typedef struct ogo_arg {
    ogo_arg_kind kind;
    int64_t uid;             /* OGO_ARG_UID */
    const char* class_name;  /* OGO_ARG_CLASS */
    const int64_t* uids;     /* OGO_ARG_UID_LIST */
    size_t uid_count;
} ogo_arg;

typedef enum ogo_cell_kind {
    OGO_CELL_NULL = 0,
    OGO_CELL_INTEGER,
    OGO_CELL_FLOAT,
    OGO_CELL_BOOLEAN,
    OGO_CELL_STRING,
    OGO_CELL_LIST,
    OGO_CELL_NODE,
    OGO_CELL_RELATIONSHIP
} ogo_cell_kind;

OGO_API const char* ogo_version(void);
OGO_API const char* ogo_last_error_message(void);
/* Pipeline stage of the last error ("expand", "extract", "parse", ...), or "". */
OGO_API const char* ogo_last_error_stage(void);
OGO_API const char* ogo_status_name(ogo_status status);
OGO_API void ogo_string_free(char* s);

/* Runs an object-language program to its POINT marker (or its end) and
 * returns the resulting heap as snapshot JSON (indented when indent >= 0). */
OGO_API ogo_status ogo_run_program(const char* program_text, int indent, char** snapshot_json);

/* ---- contexts ---- */
OGO_API ogo_status ogo_context_open(const char* snapshot_path, ogo_context** out);
OGO_API ogo_status ogo_context_from_json(const char* json, size_t length, ogo_context** out);
OGO_API void ogo_context_free(ogo_context* ctx);

OGO_API ogo_status ogo_context_set_whitelist(ogo_context* ctx, const char* const* classes, size_t count);
OGO_API ogo_status ogo_context_set_blacklist(ogo_context* ctx, const char* const* classes, size_t count);
OGO_API ogo_status ogo_context_set_force_collect(ogo_context* ctx, int on);
OGO_API ogo_status ogo_context_set_memoize(ogo_context* ctx, int on);
/* Round-trip the extracted graph through the CSV exporter/importer before
 * executing. */
OGO_API ogo_status ogo_context_set_via_csv(ogo_context* ctx, int on);

/* roots == NULL: unbounded query over every object. Otherwise the query sees
 * only objects reachable from the root_count roots. */
OGO_API ogo_status ogo_query(ogo_context* ctx, const int64_t* roots, size_t root_count, const char* fmt,
                             const ogo_arg* args, size_t arg_count, ogo_result** out);

OGO_API ogo_status ogo_query_boolean(ogo_context* ctx, const int64_t* roots, size_t root_count, const char* fmt,
                                     const ogo_arg* args, size_t arg_count, int* out);
OGO_API ogo_status ogo_query_long(ogo_context* ctx, const int64_t* roots, size_t root_count, const char* fmt,
                                  const ogo_arg* args, size_t arg_count, int64_t* out);
OGO_API ogo_status ogo_query_string(ogo_context* ctx, const int64_t* roots, size_t root_count, const char* fmt,
                                    const ogo_arg* args, size_t arg_count, char** out);
/* Yields the `$uid` of the single returned heap object. */
OGO_API ogo_status ogo_query_object(ogo_context* ctx, const int64_t* roots, size_t root_count, const char* fmt,
                                    const ogo_arg* args, size_t arg_count, int64_t* uid);

/* CSV bundle (nodes file, relationships file) of the graph a query over
 * `roots` would see. */
OGO_API ogo_status ogo_export_csv(ogo_context* ctx, const int64_t* roots, size_t root_count, char** nodes_csv,
                                  char** relationships_csv);

/* ---- results ---- */
OGO_API void ogo_result_free(ogo_result* rs);
OGO_API size_t ogo_result_column_count(const ogo_result* rs);
OGO_API const char* ogo_result_column_name(const ogo_result* rs, size_t column);
OGO_API size_t ogo_result_row_count(const ogo_result* rs);
/* *has_row = 1 when the cursor moved onto a row. */
OGO_API ogo_status ogo_result_next(ogo_result* rs, int* has_row);
/* 1-based current row, 0 before the first ogo_result_next(). */
OGO_API size_t ogo_result_row(const ogo_result* rs);
OGO_API ogo_status ogo_result_column_index(const ogo_result* rs, const char* name, size_t* column);
OGO_API ogo_status ogo_result_cell_kind(const ogo_result* rs, size_t column, ogo_cell_kind* kind);
/* Nodes render as #<uid>:<label>. */
OGO_API ogo_status ogo_result_cell_text(const ogo_result* rs, size_t column, char** text);
OGO_API ogo_status ogo_result_cell_long(const ogo_result* rs, size_t column, int64_t* value);
OGO_API ogo_status ogo_result_cell_boolean(const ogo_result* rs, size_t column, int* value);
OGO_API ogo_status ogo_result_cell_uid(const ogo_result* rs, size_t column, int64_t* uid);
/* Header line plus one line per row, tab separated, LF terminated. */
OGO_API ogo_status ogo_result_format_table(const ogo_result* rs, char** text);
/* Milliseconds spent in `stage`; 0 when the stage did not run. */
OGO_API double ogo_result_stage_ms(const ogo_result* rs, const char* stage);
OGO_API size_t ogo_result_warning_count(const ogo_result* rs);
OGO_API const char* ogo_result_warning(const ogo_result* rs, size_t index);

/* ---- sessions: one extracted graph that accumulates writes ---- */
OGO_API ogo_status ogo_session_open(ogo_context* ctx, const int64_t* roots, size_t root_count, ogo_session** out);
OGO_API ogo_status ogo_session_query(ogo_session* s, const char* fmt, const ogo_arg* args, size_t arg_count,
                                     ogo_result** out);
OGO_API void ogo_session_free(ogo_session* s);

#ifdef __cplusplus
}
#endif

#endif
