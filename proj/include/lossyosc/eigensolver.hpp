#pragma once

#include <cstddef>
#include <vector>

#include "lossyosc/fock.hpp"
#include "lossyosc/liouville.hpp"
#include "lossyosc/oracle.hpp"
#include "lossyosc/system_params.hpp"

namespace lossyosc {

/// Eigen-decomposition of the single-particle generator -i H_eff.
///
/// Row i of `coeffs` is the eigenvector c_i belonging to lambdas[i],
/// normalized so that sum_k c_ik c_jk = delta_ij (no conjugation; H_eff is
/// complex symmetric). The sign of each row is fixed by making its
/// largest-magnitude entry have a nonnegative real part. Eigenvalues are
/// sorted by descending imaginary part, then descending real part.
struct ModeSpectrum {
    std::vector<cplx> lambdas;
    Matrix coeffs;
    /// max_i 1/|v_i^T v_i| for unit-norm eigenvectors v_i; diverges at an
    /// exceptional point.
    double ep_condition = 1.0;
};

inline constexpr double kMaxEpCondition = 1e8;

/// Throws InvalidArgument for time-dependent parameters and
/// ExceptionalPointError when H_eff is numerically defective.
ModeSpectrum heff_spectrum(const SystemParams& params, double t = 0.0);

/// 4N x 4N matrix of ad_L on {L+_k, R-_k, R+_k, L-_k} (in that order):
/// [L, X_i] = sum_j R_ij X_j.
Matrix regular_representation(const SystemParams& params, double t = 0.0);

/// {lambda_i, -conj(lambda_i), conj(lambda_i), -lambda_i} for all i.
std::vector<cplx> liouvillian_eigenvalue_multiset(const ModeSpectrum& spectrum);

/// Collective ladder superoperators on a truncated basis:
///   P+_i = sum_k c_ik (L+_k - R-_k),   P-_i = sum_k c_ik L-_k,
///   Q+_i = sum_k c*_ik (R+_k - L-_k),  Q-_i = sum_k c*_ik R-_k.
struct LadderSet {
    BasisPtr basis;
    ModeSpectrum spectrum;
    std::vector<Matrix> p_plus, p_minus, q_plus, q_minus;
};

LadderSet build_ladder_operators(const ModeSpectrum& spectrum, const BasisPtr& basis);

struct GroundState {
    Vector right;  ///< vec(|0><0|)
    Vector left;   ///< vec(1)
};

GroundState ground_state(const FockBasis& basis);

using MultiIndex = std::vector<int>;

enum class Side { right, left };

/// |alpha, beta>> (right) or the dual <<alpha, beta| returned as the vector
/// w with <<alpha, beta|x>> = w^dagger x (left).
Vector ladder_state(const MultiIndex& alpha, const MultiIndex& beta, const LadderSet& ladder,
                    Side side);

/// <<alpha, beta|rho0>>
cplx overlap(const MultiIndex& alpha, const MultiIndex& beta, const LadderSet& ladder,
             const DensityMatrix& rho0);

/// alpha . lambda + beta . conj(lambda)
cplx ladder_exponent(const MultiIndex& alpha, const MultiIndex& beta,
                     const ModeSpectrum& spectrum);

/// All multi-indices of N entries with total <= max_total, in Fock-basis
/// order.
std::vector<MultiIndex> multi_indices(std::size_t n_modes, std::size_t max_total);

/// rho(t) = sum_{alpha,beta} e^{t mu_{alpha beta}} |alpha,beta>> <<alpha,beta|rho0>>.
Trajectory evolve_eigendecomposition(const SystemParams& params, const DensityMatrix& rho0,
                                     const std::vector<double>& t_grid);

/// Coincidence rate of two photons entering a coupler with losses
/// (gamma, 0), zero detuning and coupling kappa:
///   e^{-2 gamma t} |(gamma^2 - 4 kappa^2 cos(t sqrt(4 kappa^2 - gamma^2))) / (4 kappa^2 - gamma^2)|^2.
/// Finite through gamma = 2 kappa.
double coincidence_closed_form(double kappa, double gamma, double t);

struct HomDip {
    double t_dip = 0.0;       ///< first zero of the closed-form coincidence
    double gamma_min = 0.0;   ///< closed-form value at t_dip
    bool pt_unbroken = true;  ///< gamma < 2 kappa
};

/// Locates the first coincidence zero by bisection to the given time
/// resolution.
HomDip hom_dip(double kappa, double gamma, double resolution = 1e-12);

/// No-jump evolution of the top excitation layer of rho0:
/// e^{-i H_eff t} rho_top e^{+i H_eff^dagger t}, returned as the block.
Matrix evolve_top_layer(const SystemParams& params, const DensityMatrix& rho0, double t);

}  // namespace lossyosc
