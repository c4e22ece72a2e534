/*
 * C interface to the lossy coupled-oscillator solvers.
 *
 * Every function returns an lo_status; on failure a description of the last
 * error of the calling thread is available from lo_last_error(). Objects are
 * opaque handles released with the matching *_destroy function. Mode indices
 * are zero-based.
 */
#ifndef LOSSYOSC_H
#define LOSSYOSC_H

#include <stddef.h>

#if defined(LOSSYOSC_BUILDING_LIBRARY)
#define LO_API __attribute__((visibility("default")))
#else
#define LO_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lo_status {
    LO_OK = 0,
    LO_ERR_INVALID = 1,            /* malformed input or configuration */
    LO_ERR_NUMERICAL = 2,          /* generic numerical failure */
    LO_ERR_EXCEPTIONAL_POINT = 3,  /* H_eff defective; eigensolver refused */
    LO_ERR_SINGULAR_FACTORIZATION = 4,
    LO_ERR_INTEGRATION = 5,        /* step budget exhausted / step underflow */
    LO_ERR_ALGEBRA = 6,            /* structure analysis could not decide */
    LO_ERR_INTERNAL = 7
} lo_status;

typedef enum lo_param { LO_SIGMA = 0, LO_GAMMA = 1, LO_KAPPA = 2 } lo_param;

typedef enum lo_solver {
    LO_SOLVER_ORACLE = 0,
    LO_SOLVER_EIGEN = 1,
    LO_SOLVER_WEINORMAN = 2
} lo_solver;

typedef struct lo_system lo_system;
typedef struct lo_trajectory lo_trajectory;

LO_API const char* lo_version(void);
LO_API const char* lo_last_error(void);
LO_API const char* lo_status_name(lo_status status);
/* Process exit code for a status: 0 success, 1 invalid input, 2 numerical. */
LO_API int lo_exit_code(lo_status status);

/* A chain of `modes` oscillators on the Fock space with total excitation
 * <= max_total. All parameters start at zero and the initial state empty. */
LO_API lo_status lo_system_create(size_t modes, size_t max_total, lo_system** out);
LO_API void lo_system_destroy(lo_system* system);
LO_API lo_status lo_system_dimension(const lo_system* system, size_t* out);

/* kappa has modes - 1 entries; index k couples modes k and k + 1. */
LO_API lo_status lo_system_set_constant(lo_system* system, lo_param which, size_t index,
                                        double value);
LO_API lo_status lo_system_set_schedule(lo_system* system, lo_param which, size_t index,
                                        const double* times, const double* values, size_t n);
/* Overrides every solver's default tolerances. */
LO_API lo_status lo_system_set_tolerances(lo_system* system, double rtol, double atol);

/* Initial state as a mixture of Fock states; `occupations` has `modes`
 * entries. The weights must sum to 1 when the system is evolved. */
LO_API lo_status lo_system_add_initial_term(lo_system* system, double weight,
                                            const int* occupations);
LO_API lo_status lo_system_clear_initial(lo_system* system);
/* Full D x D density matrix, column-major real and imaginary parts. */
LO_API lo_status lo_system_set_initial_density(lo_system* system, const double* re,
                                               const double* im);

LO_API lo_status lo_evolve(const lo_system* system, lo_solver solver, const double* times,
                           size_t n_times, lo_trajectory** out);
LO_API void lo_trajectory_destroy(lo_trajectory* trajectory);
LO_API size_t lo_trajectory_size(const lo_trajectory* trajectory);
LO_API lo_status lo_trajectory_time(const lo_trajectory* t, size_t i, double* out);
LO_API lo_status lo_trajectory_trace(const lo_trajectory* t, size_t i, double* out);
LO_API lo_status lo_trajectory_purity(const lo_trajectory* t, size_t i, double* out);
LO_API lo_status lo_trajectory_number(const lo_trajectory* t, size_t i, size_t mode,
                                      double* out);
LO_API lo_status lo_trajectory_coincidence(const lo_trajectory* t, size_t i, size_t mode_i,
                                           size_t mode_j, double* out);
/* Writes D*D column-major entries to each of re and im. */
LO_API lo_status lo_trajectory_density(const lo_trajectory* t, size_t i, double* re,
                                       double* im);
/* Largest trace distance between corresponding samples of two trajectories
 * on the same grid. */
LO_API lo_status lo_trace_distance_max(const lo_trajectory* a, const lo_trajectory* b,
                                       double* out);

/* JSON documents, released with lo_string_free. */
LO_API lo_status lo_spectrum_json(const lo_system* system, char** out);
LO_API lo_status lo_structure_json(size_t modes, char** json, char** report);
LO_API void lo_string_free(char* s);

/* Two-photon coincidence for losses (gamma, 0) and coupling kappa, and its
 * first zero. */
LO_API lo_status lo_hom_coincidence(double kappa, double gamma, double t, double* out);
LO_API lo_status lo_hom_dip(double kappa, double gamma, double resolution, double* t_dip,
                            double* gamma_min, int* pt_unbroken);

#ifdef __cplusplus
}
#endif

#endif /* LOSSYOSC_H */
