/* C ABI for the tfdiff time-fractional diffusion solver and estimators.
 * Mirrors crates/tfdiff-ffi/src/lib.rs one to one. */

#ifndef TFDIFF_H
#define TFDIFF_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Error codes */
#define TFDIFF_OK 0
#define TFDIFF_ERR_INVALID_ARGUMENT 1
#define TFDIFF_ERR_SOLVER 2
#define TFDIFF_ERR_NULL_POINTER 3
#define TFDIFF_ERR_UNAVAILABLE 4
#define TFDIFF_ERR_PANIC 5

/* Field selectors for tfdiff_run_get */
#define TFDIFF_FIELD_E_U 0u       /* true L1(L2) error (manufactured runs) */
#define TFDIFF_FIELD_E_T_ALPHA 1u /* Caputo mismatch estimator */
#define TFDIFF_FIELD_E_U_GAP 2u   /* reconstruction-gap estimator E_U */
#define TFDIFF_FIELD_E_F 3u       /* data estimator E_f */
#define TFDIFF_FIELD_E_U_HAT 4u   /* quadratic reconstruction gap E_Uhat */
#define TFDIFF_FIELD_E_W 5u       /* kernel-sum estimator E_W */
#define TFDIFF_FIELD_THM1 6u      /* assembled L1(L2) bound, linear recon */
#define TFDIFF_FIELD_THM3 7u      /* assembled L1(L2) bound, quadratic recon */
#define TFDIFF_FIELD_THM5 8u      /* global final error bound, linear recon */
#define TFDIFF_FIELD_THM7 9u      /* global final error bound, quadratic recon */
#define TFDIFF_FIELD_ALPHA 10u
#define TFDIFF_FIELD_GRADING 11u  /* time-mesh grading exponent r */

/* Opaque run handle */
typedef struct TfdiffRun TfdiffRun;

/* Run one built-in experiment cell.
 *   example: 1 = smooth manufactured problem, 2 = nonsmooth
 *   grading: 0 -> uniform mesh, >= 1 -> explicit exponent, < 0 -> automatic
 * On success *out receives a handle to free with tfdiff_run_free. */
int tfdiff_run_example(unsigned int example,
                       double alpha,
                       unsigned int n_steps,
                       unsigned int m_elems,
                       double grading,
                       double theta,
                       TfdiffRun **out);

/* Read one scalar field; returns TFDIFF_OK on success. */
int tfdiff_run_get(const TfdiffRun *run, unsigned int field, double *out);

/* Release a run handle (null is a no-op). */
void tfdiff_run_free(TfdiffRun *run);

/* Copy the last error message on this thread into buf (NUL-terminated,
 * truncated to len). Returns the untruncated message length. */
size_t tfdiff_last_error_message(char *buf, size_t len);

/* Static version string. */
const char *tfdiff_version(void);

#ifdef __cplusplus
}
#endif

#endif /* TFDIFF_H */
