#pragma once

#include <cstddef>
#include <vector>

#include "lossyosc/fock.hpp"
#include "lossyosc/system_params.hpp"

namespace lossyosc {

/// Linear map on operators, as a D^2 x D^2 matrix acting on column-stacked
/// density matrices: vec(rho)[i + D*j] = rho(i, j).
struct Superoperator {
    BasisPtr basis;
    Matrix s;
};

Vector vectorize(const Matrix& rho);
Vector vectorize(const DensityMatrix& rho);
Matrix devectorize(const Vector& v, std::size_t dimension);
DensityMatrix devectorize(const Vector& v, const BasisPtr& basis, double hermiticity_tol = 1e-12);

/// <<A|B>> = Tr(A^dagger B)
cplx hs_inner(const Matrix& a, const Matrix& b);

// vec(A X B) = (B^T (x) A) vec(X), so left multiplication by O is 1 (x) O and
// right multiplication is O^T (x) 1.
Matrix left_super(const Matrix& op);
Matrix right_super(const Matrix& op);
Superoperator left_super(const ModeOperator& op);
Superoperator right_super(const ModeOperator& op);

/// The 4N linear superoperators of a basis:
///   L-_k A = a_k A,   L+_k A = a_k^dagger A,
///   R-_k A = A a_k^dagger,  R+_k A = A a_k.
struct LinearSupers {
    std::vector<Matrix> l_plus, l_minus, r_plus, r_minus;
};

LinearSupers build_linear_superoperators(const BasisPtr& basis);

/// H = sum sigma_k n_k + sum kappa_k (a_k^dagger a_{k+1} + a_k a_{k+1}^dagger)
ModeOperator build_hamiltonian(const SystemParams& params, const BasisPtr& basis, double t);

/// N x N single-particle effective Hamiltonian: tridiagonal with
/// sigma_k - i gamma_k on the diagonal and kappa_k off it.
Matrix build_heff_matrix(const SystemParams& params, double t);

/// Many-body H - i sum gamma_k n_k restricted to one excitation layer.
Matrix build_heff_layer(const SystemParams& params, const BasisPtr& basis, std::size_t layer,
                        double t);

/// Right-action Liouvillian assembled from products of left/right
/// superoperators.
Superoperator build_liouvillian(const SystemParams& params, const BasisPtr& basis, double t);

/// -i[H, rho] + sum gamma_k (2 a_k rho a_k^dagger - {n_k, rho}), evaluated
/// directly in Hilbert space.
Matrix master_equation_rhs(const SystemParams& params, const BasisPtr& basis, double t,
                           const Matrix& rho);

/// Liouvillian terms with fixed operator content, so L(t) is a weighted sum
/// of precomputed matrices. The matrix is cached when all schedules are
/// constant.
class LiouvillianAssembler {
public:
    LiouvillianAssembler(SystemParams params, BasisPtr basis);

    const Matrix& at(double t);
    const SystemParams& params() const noexcept { return params_; }
    const BasisPtr& basis() const noexcept { return basis_; }

private:
    void assemble(double t);

    SystemParams params_;
    BasisPtr basis_;
    std::vector<Matrix> right_number_;   // R+_k R-_k
    std::vector<Matrix> left_number_;    // L+_k L-_k
    std::vector<Matrix> jump_;           // L-_k R-_k
    std::vector<Matrix> hopping_;        // L+_k L-_{k+1} + L+_{k+1} L-_k - R+_{k+1} R-_k - R+_k R-_{k+1}
    Matrix current_;
    bool cached_ = false;
};

/// Liouville-space indices i + D*j whose ket layer is <= ket_max and bra
/// layer is <= bra_max. On these columns products of truncated ladder
/// superoperators are exact.
std::vector<Eigen::Index> liouville_columns(const FockBasis& basis, std::size_t ket_max,
                                            std::size_t bra_max);

}  // namespace lossyosc
