#ifndef POLEBASIS_CAPI_H
#define POLEBASIS_CAPI_H

/* C interface to the pole-based decoherence library. All functions return a
 * pb_status; on failure pb_last_error() holds a message for the calling
 * thread. Handles are opaque and freed with the matching pb_*_free call. */

#ifdef __cplusplus
extern "C" {
#endif

typedef struct pb_scenario pb_scenario;
typedef struct pb_report pb_report;

/* Status values double as CLI exit codes. */
enum {
  PB_OK = 0,
  PB_ERR_INTERNAL = 1,
  PB_ERR_SCENARIO = 2,
  PB_ERR_VERIFY = 3
};
typedef int pb_status;

const char* pb_version(void);

/* Message describing the most recent failure on this thread. */
const char* pb_last_error(void);

/* Scenario lifetime. pb_scenario_load parses a key = value scenario file;
 * pb_scenario_default builds the shipped default. */
pb_status pb_scenario_load(const char* path, pb_scenario** out);
pb_status pb_scenario_default(pb_scenario** out);
void pb_scenario_free(pb_scenario* sc);

/* Pipeline stages. Each writes its CSV/text artifacts under out_dir and
 * returns a report handle (optional; pass NULL to discard). */
pb_status pb_run_poles(const pb_scenario* sc, const char* out_dir,
                       pb_report** report);
pb_status pb_run_evolve(const pb_scenario* sc, const char* out_dir,
                        pb_report** report);
pb_status pb_run_timescales(const pb_scenario* sc, const char* out_dir,
                            pb_report** report);
pb_status pb_run_basis(const pb_scenario* sc, const char* out_dir,
                       pb_report** report);

/* Timescale analysis of an externally sampled two-column (time, value) CSV. */
pb_status pb_run_timescales_samples(const char* samples_csv, int model_order,
                                    double hbar, const char* out_dir,
                                    pb_report** report);

/* Report accessors. pb_report_value returns 0 and sets *ok = 0 when the key
 * is absent (ok may be NULL). Paths/warnings return NULL past the end. */
void pb_report_free(pb_report* rep);
double pb_report_value(const pb_report* rep, const char* key, int* ok);
const char* pb_report_path(const pb_report* rep, const char* key);
int pb_report_warning_count(const pb_report* rep);
const char* pb_report_warning(const pb_report* rep, int index);

/* Acceptance suite. list_only enumerates criterion names without running.
 * Returns PB_OK when every criterion passes, PB_ERR_VERIFY otherwise.
 * Tolerances honor the POLEBASIS_TOL_* environment overrides. */
pb_status pb_verify(int list_only, int quiet);

#ifdef __cplusplus
}
#endif

#endif /* POLEBASIS_CAPI_H */
