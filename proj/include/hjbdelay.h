#ifndef HJBDELAY_H
#define HJBDELAY_H

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes shared with the CLI exit contract. */
#define HJB_OK 0
#define HJB_ERROR 1
#define HJB_CHECK_FAILED 2

typedef struct hjb_problem hjb_problem;

/* Library version string; static storage, do not free. */
const char* hjb_version(void);

/* Message for the most recent HJB_ERROR on this thread; static storage. */
const char* hjb_last_error(void);

/* Frees strings returned through char** out-parameters. */
void hjb_free_string(char* s);

/* Parses a problem description (TOML text). On HJB_OK the handle must be
 * released with hjb_problem_free. */
int hjb_problem_load(const char* toml_text, hjb_problem** out);
int hjb_problem_load_file(const char* path, hjb_problem** out);
void hjb_problem_free(hjb_problem* p);

/* Canonical serialized form of the loaded problem; caller frees. */
int hjb_problem_canonical(const hjb_problem* p, char** out);

/* Runs one subcommand: simulate, value, synthesize, check-minimax,
 * check-viscosity, check-derivs, mvi-search, bounds. Options are TOML text
 * (point/history tables plus command-specific keys). Writes a JSON report to
 * *json_out on HJB_OK and HJB_CHECK_FAILED; caller frees. HJB_CHECK_FAILED
 * means a refutation-semantics verdict failed; HJB_ERROR means usage or
 * runtime failure (see hjb_last_error). */
int hjb_run(const hjb_problem* p, const char* command, const char* options_toml,
            char** json_out);

#ifdef __cplusplus
}
#endif

#endif /* HJBDELAY_H */
