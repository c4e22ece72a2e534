#include "lossyosc/liouville.hpp"

#include <string>

#include "lossyosc/errors.hpp"

namespace lossyosc {

namespace {

constexpr cplx I{0.0, 1.0};

void check_params(const SystemParams& params, const FockBasis& basis) {
    params.validate();
    if (params.n_modes() != basis.n_modes()) {
        throw InvalidArgument("parameters describe " + std::to_string(params.n_modes()) +
                              " modes but the basis has " + std::to_string(basis.n_modes()));
    }
}

void check_square(const Matrix& m, Eigen::Index d, const char* what) {
    if (m.rows() != d || m.cols() != d) {
        throw InvalidArgument(std::string(what) + ": dimension mismatch");
    }
}

}  // namespace

Vector vectorize(const Matrix& rho) {
    return Eigen::Map<const Vector>(rho.data(), rho.size());
}

Vector vectorize(const DensityMatrix& rho) { return vectorize(rho.matrix()); }

Matrix devectorize(const Vector& v, std::size_t dimension) {
    const auto d = static_cast<Eigen::Index>(dimension);
    if (v.size() != d * d) throw InvalidArgument("devectorize: length is not D^2");
    return Eigen::Map<const Matrix>(v.data(), d, d);
}

DensityMatrix devectorize(const Vector& v, const BasisPtr& basis, double hermiticity_tol) {
    return DensityMatrix(basis, devectorize(v, basis->dimension()), hermiticity_tol);
}

cplx hs_inner(const Matrix& a, const Matrix& b) {
    check_square(b, a.rows(), "hs_inner");
    return (a.adjoint() * b).trace();
}

Matrix left_super(const Matrix& op) {
    const Eigen::Index d = op.rows();
    check_square(op, d, "left_super");
    Matrix s = Matrix::Zero(d * d, d * d);
    for (Eigen::Index j = 0; j < d; ++j) s.block(j * d, j * d, d, d) = op;
    return s;
}

Matrix right_super(const Matrix& op) {
    const Eigen::Index d = op.rows();
    check_square(op, d, "right_super");
    Matrix s = Matrix::Zero(d * d, d * d);
    // (O^T (x) 1)[(i + d*j), (i + d*l)] = O(l, j)
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index l = 0; l < d; ++l) {
            const cplx o = op(l, j);
            if (o == cplx{}) continue;
            for (Eigen::Index i = 0; i < d; ++i) s(i + d * j, i + d * l) = o;
        }
    }
    return s;
}

Superoperator left_super(const ModeOperator& op) { return {op.basis, left_super(op.m)}; }

Superoperator right_super(const ModeOperator& op) { return {op.basis, right_super(op.m)}; }

LinearSupers build_linear_superoperators(const BasisPtr& basis) {
    LinearSupers out;
    for (std::size_t k = 0; k < basis->n_modes(); ++k) {
        const Matrix a = annihilation_matrix(basis, k).m;
        const Matrix ad = a.adjoint();
        out.l_minus.push_back(left_super(a));
        out.l_plus.push_back(left_super(ad));
        out.r_minus.push_back(right_super(ad));
        out.r_plus.push_back(right_super(a));
    }
    return out;
}

ModeOperator build_hamiltonian(const SystemParams& params, const BasisPtr& basis, double t) {
    check_params(params, *basis);
    const ParamValues p = evaluate(params, t);
    const auto d = static_cast<Eigen::Index>(basis->dimension());
    Matrix h = Matrix::Zero(d, d);
    std::vector<Matrix> a;
    for (std::size_t k = 0; k < basis->n_modes(); ++k) a.push_back(annihilation_matrix(basis, k).m);
    for (std::size_t k = 0; k < a.size(); ++k) h += p.sigma[k] * (a[k].adjoint() * a[k]);
    for (std::size_t k = 0; k + 1 < a.size(); ++k) {
        h += p.kappa[k] * (a[k].adjoint() * a[k + 1] + a[k + 1].adjoint() * a[k]);
    }
    return {basis, std::move(h), OperatorKind::composite};
}

Matrix build_heff_matrix(const SystemParams& params, double t) {
    params.validate();
    const ParamValues p = evaluate(params, t);
    const auto n = static_cast<Eigen::Index>(params.n_modes());
    Matrix h = Matrix::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) h(k, k) = cplx(p.sigma[k], -p.gamma[k]);
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
        h(k, k + 1) = p.kappa[k];
        h(k + 1, k) = p.kappa[k];
    }
    return h;
}

Matrix build_heff_layer(const SystemParams& params, const BasisPtr& basis, std::size_t layer,
                        double t) {
    Matrix h = build_hamiltonian(params, basis, t).m;
    const ParamValues p = evaluate(params, t);
    for (std::size_t k = 0; k < basis->n_modes(); ++k) {
        h -= I * p.gamma[k] * number_operator(basis, k).m;
    }
    const auto [first, last] = basis->layer_range(layer);
    const auto f = static_cast<Eigen::Index>(first);
    const auto n = static_cast<Eigen::Index>(last - first);
    return h.block(f, f, n, n);
}

Superoperator build_liouvillian(const SystemParams& params, const BasisPtr& basis, double t) {
    LiouvillianAssembler assembler(params, basis);
    return {basis, assembler.at(t)};
}

Matrix master_equation_rhs(const SystemParams& params, const BasisPtr& basis, double t,
                           const Matrix& rho) {
    check_params(params, *basis);
    check_square(rho, static_cast<Eigen::Index>(basis->dimension()), "master_equation_rhs");
    const Matrix h = build_hamiltonian(params, basis, t).m;
    const ParamValues p = evaluate(params, t);
    Matrix out = -I * (h * rho - rho * h);
    for (std::size_t k = 0; k < basis->n_modes(); ++k) {
        const Matrix a = annihilation_matrix(basis, k).m;
        const Matrix n = a.adjoint() * a;
        out += p.gamma[k] * (2.0 * a * rho * a.adjoint() - n * rho - rho * n);
    }
    return out;
}

LiouvillianAssembler::LiouvillianAssembler(SystemParams params, BasisPtr basis)
    : params_(std::move(params)), basis_(std::move(basis)) {
    check_params(params_, *basis_);
    const LinearSupers ls = build_linear_superoperators(basis_);
    const std::size_t n = basis_->n_modes();
    for (std::size_t k = 0; k < n; ++k) {
        right_number_.push_back(ls.r_plus[k] * ls.r_minus[k]);
        left_number_.push_back(ls.l_plus[k] * ls.l_minus[k]);
        jump_.push_back(ls.l_minus[k] * ls.r_minus[k]);
    }
    for (std::size_t k = 0; k + 1 < n; ++k) {
        hopping_.push_back(ls.l_plus[k] * ls.l_minus[k + 1] + ls.l_plus[k + 1] * ls.l_minus[k] -
                           ls.r_plus[k + 1] * ls.r_minus[k] - ls.r_plus[k] * ls.r_minus[k + 1]);
    }
}

const Matrix& LiouvillianAssembler::at(double t) {
    if (!(cached_ && params_.is_constant())) {
        assemble(t);
        cached_ = true;
    }
    return current_;
}

void LiouvillianAssembler::assemble(double t) {
    const ParamValues p = evaluate(params_, t);
    const Eigen::Index d2 = right_number_.front().rows();
    current_.setZero(d2, d2);
    for (std::size_t k = 0; k < right_number_.size(); ++k) {
        current_ += cplx(-p.gamma[k], p.sigma[k]) * right_number_[k];
        current_ -= cplx(p.gamma[k], p.sigma[k]) * left_number_[k];
        current_ += 2.0 * p.gamma[k] * jump_[k];
    }
    for (std::size_t k = 0; k < hopping_.size(); ++k) current_ -= I * p.kappa[k] * hopping_[k];
}

std::vector<Eigen::Index> liouville_columns(const FockBasis& basis, std::size_t ket_max,
                                            std::size_t bra_max) {
    std::vector<Eigen::Index> cols;
    const std::size_t d = basis.dimension();
    for (std::size_t j = 0; j < d; ++j) {
        if (basis.layer_of(j) > bra_max) continue;
        for (std::size_t i = 0; i < d; ++i) {
            if (basis.layer_of(i) <= ket_max) cols.push_back(static_cast<Eigen::Index>(i + d * j));
        }
    }
    return cols;
}

}  // namespace lossyosc
