#ifndef GWREG_H
#define GWREG_H

/*
 * C interface to the groupwise online prediction library.
 *
 * Two layers:
 *   - the experiment pipeline (gwreg_gen / gwreg_run / gwreg_report /
 *     gwreg_plot), driven by a JSON config document (schema in README.md);
 *   - an incremental groupwise regression learner behind an opaque handle,
 *     for callers that feed rounds one at a time.
 *
 * Every call returns a gwreg_status. On failure, gwreg_last_error() holds a
 * message describing what went wrong (thread-local, valid until the next
 * failing call on the same thread).
 */

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gwreg_status {
  GWREG_OK = 0,
  GWREG_ERROR = 1,         /* unexpected failure */
  GWREG_ERR_CONFIG = 2,    /* bad config: unknown keys, bad values */
  GWREG_ERR_DATA = 3,      /* unreadable/invalid data or IO failure */
  GWREG_ERR_INVARIANT = 4  /* contract or protocol violation */
} gwreg_status;

const char* gwreg_version(void);
const char* gwreg_last_error(void);

/* Write a synthetic dataset CSV plus its metadata file into out_dir. */
gwreg_status gwreg_gen(const char* config_json, const char* out_dir);

/*
 * Run the configured experiment: per seed, order the data, run the groupwise
 * learner and the baseline, and score the best-in-hindsight benchmarks; then
 * write per-seed curve CSVs and ledgers plus the aggregated summary table.
 * seed_count_override >= 1 replaces the config's seed list with 0..N-1;
 * pass 0 or a negative value to keep the config's list. jobs is the number
 * of seeds run in parallel (values < 2 mean sequential).
 */
gwreg_status gwreg_run(const char* config_json, const char* out_dir,
                       int seed_count_override, int jobs);

/* Rebuild summary.csv in run_dir from the per-seed ledger files. */
gwreg_status gwreg_report(const char* run_dir);

/* Render one SVG per group from the curve CSVs in run_dir. */
gwreg_status gwreg_plot(const char* run_dir);

/*
 * Incremental learner. config_json example:
 *   {"lambda": 1.0, "hedge_mode": "sample", "seed": 0}
 * (all keys optional; unknown keys are an error).
 *
 * Protocol per round: predict, then update with the revealed label.
 * Calling them out of order is an invariant error.
 */
typedef struct gwreg_learner gwreg_learner;

gwreg_status gwreg_learner_new(const char* config_json, int context_dim,
                               int n_subsequences, gwreg_learner** out);
void gwreg_learner_free(gwreg_learner* learner);

/* activity holds one weight in [0,1] per subsequence. */
gwreg_status gwreg_learner_predict(gwreg_learner* learner,
                                   const double* context, int context_dim,
                                   const double* activity, int n_subsequences,
                                   double* prediction_out);
gwreg_status gwreg_learner_update(gwreg_learner* learner, double label);

/*
 * Cumulative hedge regret records, one pair per subsequence; either output
 * pointer may be NULL. n must equal the learner's subsequence count.
 */
gwreg_status gwreg_learner_records(gwreg_learner* learner, double* regret_out,
                                   double* abs_regret_out, int n);

#ifdef __cplusplus
}
#endif

#endif /* GWREG_H */
