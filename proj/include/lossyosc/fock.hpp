#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace lossyosc {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Occupation numbers (n_1, ..., n_N) of a multimode Fock state.
using Occupation = std::vector<int>;

/// Multimode Fock states with total excitation <= max_total.
///
/// States are ordered by total excitation first and lexicographically within
/// a layer, so every excitation layer is a contiguous index range. Because
/// the dynamics only removes excitations, an initial state inside this space
/// never leaves it and the truncation is exact.
class FockBasis {
public:
    FockBasis(std::size_t n_modes, std::size_t max_total);

    std::size_t n_modes() const noexcept { return n_modes_; }
    std::size_t max_total() const noexcept { return max_total_; }
    std::size_t dimension() const noexcept { return states_.size(); }

    const Occupation& state(std::size_t i) const { return states_.at(i); }
    const std::vector<Occupation>& states() const noexcept { return states_; }

    /// Basis index of an occupation vector; throws InvalidArgument when the
    /// vector is not part of the truncated space.
    std::size_t index(const Occupation& n) const;
    bool contains(const Occupation& n) const;

    /// Total excitation of basis state i.
    std::size_t layer_of(std::size_t i) const { return layer_.at(i); }

    /// Half-open index range [first, second) of the states with total
    /// excitation `total`.
    std::pair<std::size_t, std::size_t> layer_range(std::size_t total) const;

    bool operator==(const FockBasis& other) const {
        return n_modes_ == other.n_modes_ && max_total_ == other.max_total_;
    }

private:
    std::size_t n_modes_;
    std::size_t max_total_;
    std::vector<Occupation> states_;
    std::vector<std::size_t> layer_;
    std::map<Occupation, std::size_t> index_;
};

using BasisPtr = std::shared_ptr<const FockBasis>;

BasisPtr build_basis(std::size_t n_modes, std::size_t max_total);

enum class OperatorKind { annihilation, creation, number, composite };

/// A Hilbert-space operator on a truncated Fock basis.
struct ModeOperator {
    BasisPtr basis;
    Matrix m;
    OperatorKind kind = OperatorKind::composite;
};

/// a_k with <n - e_k| a_k |n> = sqrt(n_k). Mode indices are zero-based.
ModeOperator annihilation_matrix(const BasisPtr& basis, std::size_t mode);
/// a_k^dagger. Rows of the top layer + 1 do not exist, so the image of the
/// top layer is truncated to zero.
ModeOperator creation_matrix(const BasisPtr& basis, std::size_t mode);
ModeOperator number_operator(const BasisPtr& basis, std::size_t mode);

/// Density matrix over a FockBasis.
///
/// Construction Hermitizes the input, (m + m^dagger) / 2, when the
/// anti-Hermitian residual is below `hermiticity_tol` and rejects it
/// otherwise.
class DensityMatrix {
public:
    DensityMatrix(BasisPtr basis, Matrix m, double hermiticity_tol = 1e-12);

    /// |n><n|
    static DensityMatrix fock(const BasisPtr& basis, const Occupation& n);
    /// sum_i w_i |n_i><n_i|; weights must be nonnegative and sum to 1.
    static DensityMatrix mixture(const BasisPtr& basis,
                                 const std::vector<std::pair<double, Occupation>>& terms);

    const Matrix& matrix() const noexcept { return m_; }
    const FockBasis& basis() const noexcept { return *basis_; }
    const BasisPtr& basis_ptr() const noexcept { return basis_; }
    std::size_t dimension() const noexcept { return basis_->dimension(); }

    double trace() const;
    double purity() const;
    double min_eigenvalue() const;

    /// Checks trace in [0, 1 + 1e-12] and smallest eigenvalue >= -psd_tol.
    void require_physical(double psd_tol = 1e-10) const;

private:
    BasisPtr basis_;
    Matrix m_;
};

/// Tr(a_k^dagger a_k rho). Throws NumericalFailure when the imaginary part
/// exceeds 1e-9.
double number_expectation(const DensityMatrix& rho, std::size_t mode);

/// Tr(a_i^dagger a_j^dagger a_i a_j rho), the two-mode coincidence rate.
double coincidence(const DensityMatrix& rho, std::size_t mode_i, std::size_t mode_j);

struct Postselected {
    DensityMatrix state;          ///< top-layer block renormalized, embedded in the full basis
    double success_probability;   ///< trace of the top-layer block
};

/// Conditions rho on no excitation having been lost, i.e. on the
/// total-excitation layer max_total. Throws NumericalFailure when the
/// success probability is below 1e-14.
Postselected postselect_top_layer(const DensityMatrix& rho);

/// 1/2 Tr|a - b| for Hermitian a, b.
double trace_distance(const Matrix& a, const Matrix& b);
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

}  // namespace lossyosc
