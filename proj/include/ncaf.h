/* C interface of the ncaf shared library: generator bases of direct sums of
 * matrix algebras, Bratteli embedding steps with their adapted derivation
 * bases, vacuum searches of the gauge potential, KO sign bookkeeping, and
 * the batch scenario runner.  All functions return NCAF_OK (or a handle) on
 * success; on failure they return an error code (or NULL) and store a
 * message retrievable with ncaf_last_error() on the same thread. */
#ifndef NCAF_H
#define NCAF_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

enum {
  NCAF_OK = 0,
  NCAF_EINVAL = 1,  /* bad argument or unusable input data */
  NCAF_ESHAPE = 2,  /* dimension or shape mismatch */
  NCAF_EPARSE = 3,  /* malformed JSON document */
  NCAF_ENOCONV = 4, /* minimizer finished without reaching its tolerance */
  NCAF_EIO = 5      /* file could not be read or written */
};

typedef struct ncaf_basis ncaf_basis;
typedef struct ncaf_step ncaf_step;

const char* ncaf_version(void);

/* Message for the most recent failure on the calling thread. */
const char* ncaf_last_error(void);

/* Orthonormal anti-Hermitean generator basis of M_{dims[0]} + ... */
ncaf_basis* ncaf_basis_create(const int* dims, int n_factors);
void ncaf_basis_free(ncaf_basis* b);
/* Number of generators of one factor, or -1 on error. */
int ncaf_basis_count(const ncaf_basis* b, int factor);

/* Bratteli step from its JSON document (keys shapeA, shapeB, mult, slack);
 * the adapted derivation basis of the target is built eagerly. */
ncaf_step* ncaf_step_parse(const char* json_text);
void ncaf_step_free(ncaf_step* s);
/* Inherited and complementary direction counts of one target factor. */
int ncaf_step_counts(const ncaf_step* s, int factor, int* inherited, int* complement);
/* The five family sizes of the complement of one target factor. */
int ncaf_step_family_sizes(const ncaf_step* s, int factor, int sizes[5]);
/* K-theory pushforward of a class vector (length = source factors) into the
 * target (length = target factors). */
int ncaf_step_k0_push(const ncaf_step* s, const long long* v, int n, long long* out, int m);

/* Vacuum search at one path point: lambda holds one value per source factor.
 * restarts/threads <= 0 keep the defaults.  Returns NCAF_ENOCONV when the
 * best run ended above the gradient tolerance (outputs still written). */
int ncaf_minimize(const ncaf_step* s, const double* lambda, int n_lambda, uint64_t seed,
                  int restarts, int threads, double* vmin, int* converged);

/* KO sign table; eps_dprime receives 0 for odd d. */
int ncaf_ko_signs(int d, int* eps, int* eps_prime, int* eps_dprime);

/* Runs a scenario file and writes its artifacts.  Returns the process exit
 * code: 0 ok, 2 invalid input, 3 non-convergence.  outdir (optional)
 * overrides the scenario output directory, seed >= 0 the seed, threads > 0
 * the worker count; no_warm nonzero disables warm starts.  On a nonzero
 * code, the error JSON is copied into errbuf (truncated to errcap). */
int ncaf_run_scenario_file(const char* path, const char* outdir, long long seed, int threads,
                           int no_warm, char* errbuf, size_t errcap);

#ifdef __cplusplus
}
#endif

#endif /* NCAF_H */
