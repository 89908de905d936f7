#ifndef DYMFORGE_H
#define DYMFORGE_H

/* C interface to the engine. Handles are opaque, results come back as
 * malloc'd NUL-terminated strings the caller releases with
 * dym_string_free, and every call reports through a status code. The
 * failure message of the most recent failing call on this thread is
 * available from dym_last_error. */

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#ifndef DYM_API
#if defined(__GNUC__)
#define DYM_API __attribute__((visibility("default")))
#else
#define DYM_API
#endif
#endif

typedef enum dym_status {
    DYM_OK = 0,
    DYM_ERR_BADARG = 1,   /* null handle, unknown key, value out of range */
    DYM_ERR_PARSE = 2,    /* malformed expression or series text */
    DYM_ERR_DOMAIN = 3,   /* request outside the engine's domain */
    DYM_ERR_NUMERIC = 4,  /* simulation left the admissible region */
    DYM_ERR_VERIFY = 5,   /* a suite failed; the report is still returned */
    DYM_ERR_INTERNAL = 6
} dym_status;

typedef struct dym_session dym_session;
typedef struct dym_series dym_series;

/* A fresh session carries the defaults: order 6, family 8, lmax 2, format
 * text, mode free, suite all, seed 0, n 128, dt 0 (stability rule), steps 0
 * (run to t = 0.01), sample_every 1, cap 12, cache_dir from the
 * DYMFORGE_CACHE environment variable. */
DYM_API dym_session* dym_session_new(void);
DYM_API void dym_session_free(dym_session* s);

/* Set one configuration value by name. Keys: order, family, lmax, format,
 * mode, suite, seed, n, dt, steps, sample_every, cap, cache_dir. Values are
 * parsed according to the key; a bad key or value leaves the session
 * unchanged. The symbolic window keys (order, family, lmax) are checked
 * against the cap when a command runs, not here. */
DYM_API dym_status dym_session_set(dym_session* s, const char* key, const char* value);

DYM_API dym_status dym_run_hierarchy(dym_session* s, char** out);
DYM_API dym_status dym_run_currents(dym_session* s, char** out);
DYM_API dym_status dym_run_central(dym_session* s, char** out);
DYM_API dym_status dym_run_simulate(dym_session* s, char** out);
/* DYM_ERR_VERIFY when a suite fails; *out carries the report either way. */
DYM_API dym_status dym_run_verify(dym_session* s, char** out);

/* Message of the most recent failure on the calling thread ("" if none). */
DYM_API const char* dym_last_error(void);
DYM_API void dym_string_free(char* s);

/* Exact Laurent series over the hierarchy's generator ring, in the JSON
 * shape the hierarchy command emits under "k_series". */
DYM_API dym_status dym_series_parse(const char* json, dym_series** out);
DYM_API dym_status dym_series_render(const dym_series* s, char** json_out);
/* 1 equal, 0 different, -1 on a null argument. */
DYM_API int dym_series_equal(const dym_series* a, const dym_series* b);
DYM_API void dym_series_free(dym_series* s);

#ifdef __cplusplus
}
#endif

#endif
