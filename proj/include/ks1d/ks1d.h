/* C interface to the ks1d Keller-Segel toolkit.
 *
 * Every fallible call returns a ks1d_status; on failure the message is
 * available from ks1d_last_error() on the calling thread. Strings returned
 * through char** out-parameters are owned by the caller and released with
 * ks1d_string_free(). */
#ifndef KS1D_KS1D_H
#define KS1D_KS1D_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  ifdef KS1D_BUILDING_LIBRARY
#    define KS1D_API __declspec(dllexport)
#  else
#    define KS1D_API __declspec(dllimport)
#  endif
#else
#  define KS1D_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ks1d_status {
  KS1D_OK = 0,
  KS1D_ERR_INPUT_DOMAIN = 1,
  KS1D_ERR_DIVERGENT_TAIL = 2,
  KS1D_ERR_RANGE = 3,
  KS1D_ERR_NUMERIC_STATE = 4,
  KS1D_ERR_RESOLUTION = 5,
  KS1D_ERR_SOLVER = 6,
  KS1D_ERR_VALIDATION = 7,
  KS1D_ERR_CONFIG = 8,
  KS1D_ERR_CANNOT_CERTIFY = 9,
  KS1D_ERR_IO = 10,
  KS1D_ERR_INTERNAL = 11,
  KS1D_ERR_NULL_ARGUMENT = 12
} ks1d_status;

typedef struct ks1d_config ks1d_config;
typedef struct ks1d_model ks1d_model;

KS1D_API const char* ks1d_version(void);
/* Message of the last failed call on this thread ("" if none). */
KS1D_API const char* ks1d_last_error(void);
KS1D_API const char* ks1d_status_name(ks1d_status status);
KS1D_API void ks1d_string_free(char* s);

/* Scenario configuration (flat key = value text). */
KS1D_API ks1d_status ks1d_config_parse(const char* text, ks1d_config** out);
KS1D_API ks1d_status ks1d_config_load(const char* path, ks1d_config** out);
KS1D_API ks1d_status ks1d_config_set(ks1d_config* cfg, const char* key, const char* value);
KS1D_API ks1d_status ks1d_config_to_text(const ks1d_config* cfg, char** out);
KS1D_API void ks1d_config_free(ks1d_config* cfg);

/* Diffusion a(u): (1+u)^-alpha, or a CSV table (header r,a; comment line
 * "# tail_exponent=<p>"). */
KS1D_API ks1d_status ks1d_model_power_law(double alpha, ks1d_model** out);
KS1D_API ks1d_status ks1d_model_load_table(const char* path, ks1d_model** out);
KS1D_API ks1d_status ks1d_model_eval(const ks1d_model* model, double u, double* out);
/* r * int_r^inf a(s) ds */
KS1D_API ks1d_status ks1d_model_tail_mass(const ks1d_model* model, double r, double* out);
KS1D_API void ks1d_model_free(ks1d_model* model);

/* Runs a scenario and writes its artifacts. exit_code: 0 clean, 2 monitors
 * flagged violations. summary_json may be NULL. */
KS1D_API ks1d_status ks1d_run_scenario(const ks1d_config* cfg, int* exit_code, char** summary_json);

/* Blowup certificate for the ramp initial data at mass M. eps <= 0 selects
 * M^(1-q). base_cells = 0 selects 512. */
KS1D_API ks1d_status ks1d_certify(const ks1d_model* model, double q, double mass, double eps,
                                  size_t base_cells, char** report_json);
/* Bisection for the smallest certified mass on [m_min, m_max]. */
KS1D_API ks1d_status ks1d_search_threshold(const ks1d_model* model, double q, double m_min,
                                           double m_max, size_t base_cells, char** result_json);

/* Inequality suites: prop5 | prop6 | sobolev | lemma4 | cor4 | all.
 * delta <= 0 keeps the default 1/24. csv_path may be NULL. */
KS1D_API ks1d_status ks1d_inequalities(const char* suite, double delta, uint64_t seed,
                                       const char* csv_path, size_t* violations,
                                       char** summary_json);

/* One run per value of a numeric key; writes <output_dir>/index.json. */
KS1D_API ks1d_status ks1d_sweep(const ks1d_config* base, const char* key,
                                const char* const* values, size_t n_values, unsigned jobs,
                                char** index_json);

/* 2/sqrt(chi) - 1 */
KS1D_API ks1d_status ks1d_critical_mass_threshold(double chi, double* out);

#ifdef __cplusplus
}
#endif

#endif
