#include "lossyosc/fock.hpp"

#include <cmath>
#include <sstream>

#include "lossyosc/errors.hpp"

namespace lossyosc {

namespace {

// Appends all occupation vectors of `n_modes` modes with exactly `total`
// excitations, in ascending lexicographic order.
void enumerate_layer(std::size_t n_modes, int total, Occupation& prefix,
                     std::vector<Occupation>& out) {
    if (prefix.size() + 1 == n_modes) {
        prefix.push_back(total);
        out.push_back(prefix);
        prefix.pop_back();
        return;
    }
    for (int k = 0; k <= total; ++k) {
        prefix.push_back(k);
        enumerate_layer(n_modes, total - k, prefix, out);
        prefix.pop_back();
    }
}

std::string describe(const Occupation& n) {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < n.size(); ++i) os << (i ? "," : "") << n[i];
    os << ')';
    return os.str();
}

void check_mode(const FockBasis& basis, std::size_t mode) {
    if (mode >= basis.n_modes()) {
        throw InvalidArgument("mode index " + std::to_string(mode) + " out of range for " +
                              std::to_string(basis.n_modes()) + " modes");
    }
}

}  // namespace

FockBasis::FockBasis(std::size_t n_modes, std::size_t max_total)
    : n_modes_(n_modes), max_total_(max_total) {
    if (n_modes == 0) throw InvalidArgument("a Fock basis needs at least one mode");
    Occupation prefix;
    for (std::size_t t = 0; t <= max_total; ++t) {
        enumerate_layer(n_modes, static_cast<int>(t), prefix, states_);
        layer_.resize(states_.size(), t);
    }
    for (std::size_t i = 0; i < states_.size(); ++i) index_.emplace(states_[i], i);
}

std::size_t FockBasis::index(const Occupation& n) const {
    auto it = index_.find(n);
    if (it == index_.end()) {
        throw InvalidArgument("occupation " + describe(n) + " is not in the truncated Fock space");
    }
    return it->second;
}

bool FockBasis::contains(const Occupation& n) const { return index_.count(n) != 0; }

std::pair<std::size_t, std::size_t> FockBasis::layer_range(std::size_t total) const {
    if (total > max_total_) return {states_.size(), states_.size()};
    std::size_t first = 0;
    while (first < states_.size() && layer_[first] < total) ++first;
    std::size_t last = first;
    while (last < states_.size() && layer_[last] == total) ++last;
    return {first, last};
}

BasisPtr build_basis(std::size_t n_modes, std::size_t max_total) {
    return std::make_shared<const FockBasis>(n_modes, max_total);
}

ModeOperator annihilation_matrix(const BasisPtr& basis, std::size_t mode) {
    check_mode(*basis, mode);
    const std::size_t d = basis->dimension();
    Matrix a = Matrix::Zero(d, d);
    for (std::size_t col = 0; col < d; ++col) {
        Occupation n = basis->state(col);
        if (n[mode] == 0) continue;
        const double amp = std::sqrt(static_cast<double>(n[mode]));
        n[mode] -= 1;
        a(basis->index(n), col) = amp;
    }
    return {basis, std::move(a), OperatorKind::annihilation};
}

ModeOperator creation_matrix(const BasisPtr& basis, std::size_t mode) {
    ModeOperator a = annihilation_matrix(basis, mode);
    return {basis, a.m.adjoint(), OperatorKind::creation};
}

ModeOperator number_operator(const BasisPtr& basis, std::size_t mode) {
    check_mode(*basis, mode);
    const std::size_t d = basis->dimension();
    Matrix n = Matrix::Zero(d, d);
    for (std::size_t i = 0; i < d; ++i) n(i, i) = basis->state(i)[mode];
    return {basis, std::move(n), OperatorKind::number};
}

DensityMatrix::DensityMatrix(BasisPtr basis, Matrix m, double hermiticity_tol)
    : basis_(std::move(basis)), m_(std::move(m)) {
    const auto d = static_cast<Eigen::Index>(basis_->dimension());
    if (m_.rows() != d || m_.cols() != d) {
        throw InvalidArgument("density matrix is " + std::to_string(m_.rows()) + "x" +
                              std::to_string(m_.cols()) + ", basis dimension is " +
                              std::to_string(d));
    }
    if (!m_.allFinite()) throw NumericalFailure("density matrix has non-finite entries");
    const double residual = (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
    if (residual > hermiticity_tol) {
        std::ostringstream os;
        os << "density matrix is not Hermitian (residual " << residual << ")";
        throw NumericalFailure(os.str());
    }
    m_ = (0.5 * (m_ + m_.adjoint())).eval();
}

DensityMatrix DensityMatrix::fock(const BasisPtr& basis, const Occupation& n) {
    return mixture(basis, {{1.0, n}});
}

DensityMatrix DensityMatrix::mixture(const BasisPtr& basis,
                                     const std::vector<std::pair<double, Occupation>>& terms) {
    if (terms.empty()) throw InvalidArgument("initial state has no terms");
    const std::size_t d = basis->dimension();
    Matrix m = Matrix::Zero(d, d);
    double total = 0.0;
    for (const auto& [w, n] : terms) {
        if (!(w >= 0.0)) throw InvalidArgument("mixture weights must be nonnegative");
        if (n.size() != basis->n_modes()) {
            throw InvalidArgument("occupation " + describe(n) + " has the wrong number of modes");
        }
        const std::size_t i = basis->index(n);
        m(i, i) += w;
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw InvalidArgument("mixture weights sum to " + std::to_string(total) + ", not 1");
    }
    return DensityMatrix(basis, std::move(m));
}

double DensityMatrix::trace() const { return m_.trace().real(); }

double DensityMatrix::purity() const { return (m_ * m_).trace().real(); }

double DensityMatrix::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

void DensityMatrix::require_physical(double psd_tol) const {
    const double tr = trace();
    if (tr < -1e-12 || tr > 1.0 + 1e-12) {
        throw InvalidArgument("density matrix trace " + std::to_string(tr) + " outside [0, 1]");
    }
    const double lmin = min_eigenvalue();
    if (lmin < -psd_tol) {
        throw InvalidArgument("density matrix is not positive semidefinite (min eigenvalue " +
                              std::to_string(lmin) + ")");
    }
}

namespace {

double real_expectation(const Matrix& op, const Matrix& rho) {
    const cplx value = (op * rho).trace();
    if (std::abs(value.imag()) > 1e-9) {
        throw NumericalFailure("expectation value has imaginary part " +
                               std::to_string(value.imag()) + "; state is corrupted");
    }
    return value.real();
}

}  // namespace

double number_expectation(const DensityMatrix& rho, std::size_t mode) {
    return real_expectation(number_operator(rho.basis_ptr(), mode).m, rho.matrix());
}

double coincidence(const DensityMatrix& rho, std::size_t mode_i, std::size_t mode_j) {
    if (mode_i == mode_j) throw InvalidArgument("coincidence needs two distinct modes");
    const auto& b = rho.basis_ptr();
    const Matrix ai = annihilation_matrix(b, mode_i).m;
    const Matrix aj = annihilation_matrix(b, mode_j).m;
    const Matrix op = ai.adjoint() * aj.adjoint() * ai * aj;
    return real_expectation(op, rho.matrix());
}

Postselected postselect_top_layer(const DensityMatrix& rho) {
    const auto [first, last] = rho.basis().layer_range(rho.basis().max_total());
    const auto f = static_cast<Eigen::Index>(first);
    const auto n = static_cast<Eigen::Index>(last - first);
    const double p = rho.matrix().block(f, f, n, n).trace().real();
    if (p < 1e-14) {
        throw NumericalFailure("postselection success probability " + std::to_string(p) +
                               " is below 1e-14; the state has fully decayed");
    }
    Matrix m = Matrix::Zero(rho.matrix().rows(), rho.matrix().cols());
    m.block(f, f, n, n) = rho.matrix().block(f, f, n, n) / p;
    return {DensityMatrix(rho.basis_ptr(), std::move(m)), p};
}

double trace_distance(const Matrix& a, const Matrix& b) {
    const Matrix diff = 0.5 * ((a - b) + (a - b).adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(diff, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
    return trace_distance(a.matrix(), b.matrix());
}

}  // namespace lossyosc
