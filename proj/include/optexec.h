/*
 * optexec — optimal execution with simultaneous market and limit orders
 * under affine fill uncertainty.
 *
 * C API over the solver/simulator core. All objects are opaque handles owned
 * by the library; every function returns an oe_status, with details from
 * oe_last_error() (thread-local). Strings returned through char** are
 * heap-allocated by the library and must be released with oe_string_free().
 */
#ifndef OPTEXEC_H
#define OPTEXEC_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum oe_status {
    OE_OK = 0,
    OE_EVALIDITY = 1, /* parameters violate a hard solvability condition */
    OE_ESOLVER = 2,   /* numerical solve aborted */
    OE_EIO = 3,       /* file / output error */
    OE_EINVAL = 4,    /* malformed input (config text, arguments) */
    OE_EINTERNAL = 5
} oe_status;

typedef struct oe_config oe_config;   /* parsed run configuration */
typedef struct oe_coeffs oe_coeffs;   /* solved value-function coefficients */

const char* oe_version(void);

/* Message for the most recent failing call on this thread ("" if none). */
const char* oe_last_error(void);

void oe_string_free(char* s);

/* -- configuration ------------------------------------------------------- */

oe_status oe_config_parse(const char* text, oe_config** out);
oe_status oe_config_load(const char* path, oe_config** out);
/* Normalized round-trippable key-value form. */
oe_status oe_config_dump(const oe_config* cfg, char** out);
/* Resolved parameters and derived constants as JSON. */
oe_status oe_config_json(const oe_config* cfg, char** out);
/* Override one key, e.g. oe_config_set(cfg, "sim.seed", "7"). */
oe_status oe_config_set(oe_config* cfg, const char* dotted_key, const char* value);
void oe_config_free(oe_config* cfg);

/* -- validity ------------------------------------------------------------ */

/* Full check of the configured parameter point, including the second-order
 * sweep over the solved a(t). Returns OE_OK when every hard check passes,
 * OE_EVALIDITY otherwise; *json_out (optional) receives the report either way. */
oe_status oe_validate(const oe_config* cfg, char** json_out);

/* -- solving ------------------------------------------------------------- */

oe_status oe_solve(const oe_config* cfg, oe_coeffs** out);
void oe_coeffs_free(oe_coeffs* coeffs);

/* a(t), b(t), c(t) by cubic-spline interpolation of the solved grid. */
oe_status oe_coeffs_eval(const oe_coeffs* coeffs, double t, double* a, double* b, double* c);
/* V(t,x) = a x^2 + b x + c. */
oe_status oe_coeffs_value(const oe_coeffs* coeffs, double t, double x, double* v);
/* Coefficient table, CSV columns t,a,b,c. */
oe_status oe_coeffs_csv(const oe_coeffs* coeffs, char** out);
oe_status oe_solve_summary_json(const oe_config* cfg, const oe_coeffs* coeffs, char** out);

/* Optimal feedback rates and diagnostics at (t, x):
 * out[0]=v*, out[1]=L*, out[2]=delta, out[3]=psi, out[4]=boundary P(t)
 * (NaN when undefined). */
oe_status oe_policy_eval(const oe_config* cfg, const oe_coeffs* coeffs, double t, double x,
                         double out[5]);

/* Reduced-PDE residual of the solved coefficients at (t, x). */
oe_status oe_hjb_residual(const oe_config* cfg, const oe_coeffs* coeffs, double t, double x,
                          double* out);

/* -- buy-sell boundary ---------------------------------------------------- */

/* Constant-uncertainty boundary on `grid_size`+1 nodes: *csv_out gets columns
 * t,P; *json_out the classification summary. Either output may be NULL. */
oe_status oe_boundary(const oe_config* cfg, int grid_size, char** csv_out, char** json_out);

/* -- simulation ----------------------------------------------------------- */

/* Monte Carlo estimate of the execution objective under the configured policy.
 * *json_out (optional) receives the summary (mean objective, stderr, mean
 * final position, per-config validity echo). */
oe_status oe_simulate(const oe_config* cfg, const oe_coeffs* coeffs, char** json_out);

/* One recorded trajectory (CSV columns t,x,S,Stilde,v,L[,P][,Q]). */
oe_status oe_simulate_path_csv(const oe_config* cfg, const oe_coeffs* coeffs,
                               uint64_t path_index, char** out);

/* -- scenario suite ------------------------------------------------------- */

/* Runs the built-in experiment set; writes artifacts under out_dir when
 * non-NULL/non-empty. *json_out (optional) receives the aggregated report.
 * Returns OE_OK even when individual claims fail (the report carries them);
 * non-OK only when a scenario could not run at all. */
oe_status oe_suite(const oe_config* cfg, const char* out_dir, char** json_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* OPTEXEC_H */
