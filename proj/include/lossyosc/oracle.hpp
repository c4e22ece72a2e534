#pragma once

#include <string>
#include <vector>

#include "lossyosc/dopri5.hpp"
#include "lossyosc/fock.hpp"
#include "lossyosc/liouville.hpp"
#include "lossyosc/system_params.hpp"

namespace lossyosc {

struct TrajectoryMetadata {
    std::string solver;
    double rtol = 0.0;
    double atol = 0.0;
    long accepted_steps = 0;
    long rejected_steps = 0;
    long rhs_evaluations = 0;
    /// Largest anti-Hermitian residual max|rho - rho^dagger| seen before the
    /// sampled states were Hermitized.
    double max_hermiticity_residual = 0.0;
};

/// Density matrices sampled on an ascending time grid starting at 0.
struct Trajectory {
    std::vector<double> times;
    std::vector<DensityMatrix> states;
    TrajectoryMetadata metadata;
};

/// Throws InvalidArgument unless the grid is nonempty, finite, starts at 0
/// and is strictly increasing.
void validate_time_grid(const std::vector<double>& t_grid);

/// Tolerance used when a propagated matrix is accepted as a density
/// matrix: the anti-Hermitian part of numerically evolved states is at the
/// level of the integration error, not of machine precision.
inline constexpr double kEvolvedHermiticityTol = 1e-8;

/// Samples a propagated Liouville vector as a density matrix and folds its
/// Hermiticity residual into `meta`.
DensityMatrix sample_state(const Vector& v, const BasisPtr& basis, TrajectoryMetadata& meta);

/// Direct adaptive integration of d vec(rho)/dt = L(t) vec(rho). The output
/// grid is served from dense output and does not influence step selection.
Trajectory integrate_master(const SystemParams& params, const DensityMatrix& rho0,
                            const std::vector<double>& t_grid,
                            const IntegratorConfig& config = {});

/// exp(t L) by scaling and squaring with a degree-13 Pade approximant.
/// Throws NumericalFailure when t * ||L||_1 is so large that the result
/// would not be meaningful, or when the result is not finite.
Matrix expm_scaled(const Matrix& l, double t);

/// exp(t L) vec(rho0) for a time-independent Liouvillian.
DensityMatrix propagate_constant(const Superoperator& l, const DensityMatrix& rho0, double t);

}  // namespace lossyosc
