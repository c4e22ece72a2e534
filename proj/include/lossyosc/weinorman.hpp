#pragma once

#include <array>
#include <vector>

#include "lossyosc/dopri5.hpp"
#include "lossyosc/fock.hpp"
#include "lossyosc/oracle.hpp"
#include "lossyosc/system_params.hpp"

namespace lossyosc {

/// Coefficients of L = L_R + L_S1 + L_S2 for two modes.
///
///   L_R  = m_left N_L + m_right N_R + loss1 L-_1 R-_1 + loss2 L-_2 R-_2
///   L_S1 = c0 K0 + c_plus K+ + c_minus K-
///   L_S2 = conj(c0) K0^R + conj(c_plus) K+^R + conj(c_minus) K-^R
///
/// with N_L = sum L+_k L-_k, K0 = L+_1 L-_1 - L+_2 L-_2, K+ = L+_1 L-_2,
/// K- = L+_2 L-_1 and the mirrored right-side generators.
struct WNSplit {
    cplx m_left, m_right;
    double loss1 = 0.0, loss2 = 0.0;
    cplx c0, c_plus, c_minus;
    cplx c0_right, c_plus_right, c_minus_right;
    /// i * c0 = ((sigma_1 - sigma_2) - i (gamma_1 - gamma_2)) / 2, so c0 = -i delta.
    cplx delta;
};

WNSplit split_liouvillian(const SystemParams& params, double t);

/// The fixed superoperators multiplying the WNSplit coefficients, on a
/// given two-mode basis.
struct WNGenerators {
    BasisPtr basis;
    Matrix n_left, n_right;
    Matrix jump11, jump22, jump21, jump12;  ///< L-_k R-_l as jump{k}{l}
    Matrix k0, k_plus, k_minus;
    Matrix k0_right, k_plus_right, k_minus_right;
};

WNGenerators build_wn_generators(const BasisPtr& basis);

/// sum of coefficient * generator; equals the full Liouvillian.
Matrix reassemble(const WNSplit& split, const WNGenerators& gens);

/// f+, f0, f- and their time derivatives at one instant.
struct FValues {
    cplx f_plus, f0, f_minus;
    cplx df_plus, df0, df_minus;
};

/// Solution of dM/dt = A(t) M, M(0) = 1, with
/// A = [[c0, c_plus], [c_minus, -c0]], the defining representation of the
/// sl(2) part. Its Gauss factors give the Wei-Norman functions:
///   f0 = -log M22, f+ = M12 / M22, f- = M21 / M22.
class Sl2Solution {
public:
    Sl2Solution(DenseSolution dense, double t_end, StepStats stats);

    double t_end() const noexcept { return t_end_; }
    const StepStats& stats() const noexcept { return stats_; }

    Eigen::Matrix2cd fundamental(double t) const;
    Eigen::Matrix2cd fundamental_derivative(double t) const;

    /// |M22| / ||M||_F
    double factorization_margin(double t) const;

    /// Throws FactorizationSingularity when |M22| < 1e-10 ||M|| at t. f0 is
    /// continued along the trajectory rather than taken on the principal
    /// branch.
    FValues f(double t) const;

    /// Local minima of the factorization margin below 1e-6; the product form
    /// does not exist at these times.
    const std::vector<double>& crossings() const noexcept { return crossings_; }

private:
    double unwrapped_arg(double t) const;

    DenseSolution dense_;
    double t_end_;
    StepStats stats_;
    std::vector<double> arg_times_;
    std::vector<double> arg_values_;
    std::vector<double> crossings_;
};

inline constexpr double kFactorizationTol = 1e-10;

/// Integrates the fundamental matrix on [0, t_end] without requiring the
/// product form to exist anywhere. `mirrored` integrates the right-side
/// system with conjugated coefficients.
Sl2Solution solve_fundamental(const SystemParams& params, double t_end,
                              const IntegratorConfig& config = {}, bool mirrored = false);

/// solve_fundamental plus the requirement that the factorization exists at
/// t_end.
Sl2Solution integrate_sl2(const SystemParams& params, double t_end,
                          const IntegratorConfig& config = {});

/// df+/dt + 2i delta f+ - i kappa f+^2 + i kappa
cplx riccati_residual(const FValues& f, const SystemParams& params, double t);

/// Residuals of the three coupled f-equations
///   df-/dt e^{-2 f0} = -i kappa
///   df0/dt + df-/dt f+ e^{-2 f0} = -i delta
///   df+/dt - 2 df0/dt f+ - df-/dt f+^2 e^{-2 f0} = -i kappa
std::array<cplx, 3> sl2_residuals(const FValues& f, const SystemParams& params, double t);

/// Rates da1..da6/dt written in terms of the f-functions.
std::array<cplx, 6> radical_rates(const FValues& f, cplx a1, cplx a2, double gamma1,
                                  double gamma2, double sigma_sum);

/// The same rates written through the fundamental matrix M, which stays
/// finite where the f-functions diverge:
///   da_{kl}/dt = e^{a1 + a2} * 2 sum_i gamma_i M_ik conj(M_il).
std::array<cplx, 6> radical_rates(const Eigen::Matrix2cd& m, cplx a1, cplx a2, double gamma1,
                                  double gamma2, double sigma_sum);

/// a1..a6 with a_i(0) = 0, as dense output on [0, t_end].
class RadicalSolution {
public:
    RadicalSolution(DenseSolution dense, StepStats stats)
        : dense_(std::move(dense)), stats_(stats) {}

    std::array<cplx, 6> a(double t) const;
    const StepStats& stats() const noexcept { return stats_; }

private:
    DenseSolution dense_;
    StepStats stats_;
};

RadicalSolution integrate_radical(const SystemParams& params, const Sl2Solution& sl2,
                                  double t_end, const IntegratorConfig& config = {});

/// U_S1 = e^{f+ K+} e^{f0 K0} e^{f- K-} and its mirrored U_S2, multiplied.
Matrix semisimple_propagator(const FValues& f, const WNGenerators& gens);

/// The same group element evaluated from the fundamental matrix:
/// U_S X = u X u^dagger with u the Fock-space representation of M.
Matrix semisimple_propagator(const Eigen::Matrix2cd& m, const WNGenerators& gens);

/// Fock-space operator of a single-particle matrix: u a_k^dagger u^{-1} =
/// sum_j M_jk a_j^dagger, u|0> = |0>.
Matrix fock_representation(const Eigen::Matrix2cd& m, const BasisPtr& basis);

/// e^{a1 N_L} e^{a2 N_R} e^{a3 L-_1R-_1} e^{a4 L-_2R-_2} e^{a5 L-_2R-_1} e^{a6 L-_1R-_2}
Matrix radical_propagator(const std::array<cplx, 6>& a, const WNGenerators& gens);

/// Wei-Norman propagation for two modes. Where the Gauss factors are well
/// conditioned the semisimple part is the ordered exponential product;
/// close to a factorization crossing the identical group element is built
/// from M instead.
Trajectory evolve_weinorman(const SystemParams& params, const DensityMatrix& rho0,
                            const std::vector<double>& t_grid,
                            const IntegratorConfig& config = {1e-12, 1e-14});

/// e^{2(a1 + a2)} |1 + 2 f+ f- e^{-2 f0}|^2 for the input |1,1>.
double coincidence_weinorman(const FValues& f, const std::array<cplx, 6>& a);

}  // namespace lossyosc
