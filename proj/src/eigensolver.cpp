#include "lossyosc/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "lossyosc/errors.hpp"

namespace lossyosc {

namespace {

constexpr cplx I{0.0, 1.0};

void require_constant(const SystemParams& params, const char* what) {
    params.validate();
    if (!params.is_constant()) {
        throw InvalidArgument(std::string(what) +
                              " needs time-independent parameters; use the oracle or "
                              "Wei-Norman solver");
    }
}

double factorial(int n) { return std::tgamma(n + 1.0); }

void check_index(const MultiIndex& m, const LadderSet& ladder, const char* name) {
    const std::size_t n = ladder.basis->n_modes();
    if (m.size() != n) {
        throw InvalidArgument(std::string(name) + " must have " + std::to_string(n) + " entries");
    }
    int total = 0;
    for (int k : m) {
        if (k < 0) throw InvalidArgument(std::string(name) + " has a negative entry");
        total += k;
    }
    if (static_cast<std::size_t>(total) > ladder.basis->max_total()) {
        throw InvalidArgument(std::string(name) + " exceeds the truncation " +
                              std::to_string(ladder.basis->max_total()));
    }
}

double index_norm(const MultiIndex& alpha, const MultiIndex& beta) {
    double f = 1.0;
    for (int k : alpha) f *= factorial(k);
    for (int k : beta) f *= factorial(k);
    return std::sqrt(f);
}

}  // namespace

ModeSpectrum heff_spectrum(const SystemParams& params, double t) {
    require_constant(params, "the eigendecomposition solver");
    // Extended precision: a defective H_eff splits into eigenvalues
    // separated by ~sqrt(eps), so the conditioning of an exceptional point is
    // only visible when eps is well below the detection threshold squared.
    using cld = std::complex<long double>;
    using MatrixL = Eigen::Matrix<cld, Eigen::Dynamic, Eigen::Dynamic>;
    using VectorL = Eigen::Matrix<cld, Eigen::Dynamic, 1>;
    const MatrixL gen = (-I * build_heff_matrix(params, t)).cast<cld>();
    const auto n = gen.rows();

    Eigen::ComplexEigenSolver<MatrixL> es(gen, true);
    if (es.info() != Eigen::Success) throw NumericalFailure("eigensolver did not converge");

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    const auto& ev = es.eigenvalues();
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        if (ev(a).imag() != ev(b).imag()) return ev(a).imag() > ev(b).imag();
        return ev(a).real() > ev(b).real();
    });

    ModeSpectrum out;
    out.coeffs.resize(n, n);
    long double scale = gen.cwiseAbs().maxCoeff();
    if (scale == 0.0L) scale = 1.0L;
    for (Eigen::Index r = 0; r < n; ++r) {
        const Eigen::Index i = order[static_cast<std::size_t>(r)];
        out.lambdas.push_back(cplx(static_cast<double>(ev(i).real()),
                                   static_cast<double>(ev(i).imag())));
        VectorL v = es.eigenvectors().col(i);
        v /= v.norm();
        const cld s = (v.transpose() * v)(0, 0);
        const double cond =
            std::abs(s) > 0.0L ? static_cast<double>(1.0L / std::abs(s)) : INFINITY;
        out.ep_condition = std::max(out.ep_condition, cond);
        if (!(cond <= kMaxEpCondition)) {
            throw ExceptionalPointError(
                "H_eff is at or near an exceptional point (eigenvector condition " +
                    std::to_string(cond) + "); use the oracle or weinorman solver",
                cond);
        }
        v /= std::sqrt(s);
        Eigen::Index big = 0;
        v.cwiseAbs().maxCoeff(&big);
        if (v(big).real() < 0.0L || (v(big).real() == 0.0L && v(big).imag() < 0.0L)) v = -v;
        for (Eigen::Index k = 0; k < n; ++k) {
            out.coeffs(r, k) = cplx(static_cast<double>(v(k).real()),
                                    static_cast<double>(v(k).imag()));
        }
    }
    for (std::size_t a = 0; a < out.lambdas.size(); ++a) {
        for (std::size_t b = a + 1; b < out.lambdas.size(); ++b) {
            if (std::abs(out.lambdas[a] - out.lambdas[b]) < 1e-10 * static_cast<double>(scale)) {
                throw ExceptionalPointError(
                    "H_eff has a degenerate eigenvalue pair; use the oracle or weinorman solver",
                    out.ep_condition);
            }
        }
    }
    return out;
}

Matrix regular_representation(const SystemParams& params, double t) {
    require_constant(params, "the regular representation");
    const Matrix h = build_heff_matrix(params, t);
    const ParamValues p = evaluate(params, t);
    const auto n = h.rows();
    Matrix gamma = Matrix::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) gamma(k, k) = 2.0 * p.gamma[static_cast<std::size_t>(k)];

    Matrix r = Matrix::Zero(4 * n, 4 * n);
    r.block(0, 0, n, n) = -I * h;
    r.block(0, n, n, n) = gamma;
    r.block(n, n, n, n) = -I * h.adjoint();
    r.block(2 * n, 2 * n, n, n) = I * h.adjoint();
    r.block(2 * n, 3 * n, n, n) = gamma;
    r.block(3 * n, 3 * n, n, n) = I * h;
    return r;
}

std::vector<cplx> liouvillian_eigenvalue_multiset(const ModeSpectrum& spectrum) {
    std::vector<cplx> out;
    for (cplx l : spectrum.lambdas) {
        out.insert(out.end(), {l, -std::conj(l), std::conj(l), -l});
    }
    return out;
}

LadderSet build_ladder_operators(const ModeSpectrum& spectrum, const BasisPtr& basis) {
    const auto n = static_cast<Eigen::Index>(basis->n_modes());
    if (spectrum.coeffs.rows() != n || spectrum.coeffs.cols() != n) {
        throw InvalidArgument("spectrum and basis have different mode counts");
    }
    const LinearSupers ls = build_linear_superoperators(basis);
    const Eigen::Index d2 = ls.l_plus.front().rows();
    LadderSet out;
    out.basis = basis;
    out.spectrum = spectrum;
    for (Eigen::Index i = 0; i < n; ++i) {
        Matrix pp = Matrix::Zero(d2, d2), pm = pp, qp = pp, qm = pp;
        for (Eigen::Index k = 0; k < n; ++k) {
            const auto kk = static_cast<std::size_t>(k);
            const cplx c = spectrum.coeffs(i, k);
            pp += c * (ls.l_plus[kk] - ls.r_minus[kk]);
            pm += c * ls.l_minus[kk];
            qp += std::conj(c) * (ls.r_plus[kk] - ls.l_minus[kk]);
            qm += std::conj(c) * ls.r_minus[kk];
        }
        out.p_plus.push_back(std::move(pp));
        out.p_minus.push_back(std::move(pm));
        out.q_plus.push_back(std::move(qp));
        out.q_minus.push_back(std::move(qm));
    }
    return out;
}

GroundState ground_state(const FockBasis& basis) {
    const auto d = static_cast<Eigen::Index>(basis.dimension());
    GroundState g;
    g.right = Vector::Zero(d * d);
    g.right(0) = 1.0;
    g.left = vectorize(Matrix(Matrix::Identity(d, d)));
    return g;
}

Vector ladder_state(const MultiIndex& alpha, const MultiIndex& beta, const LadderSet& ladder,
                    Side side) {
    check_index(alpha, ladder, "alpha");
    check_index(beta, ladder, "beta");
    const GroundState g = ground_state(*ladder.basis);
    Vector v;
    if (side == Side::right) {
        v = g.right;
        for (std::size_t i = 0; i < beta.size(); ++i) {
            for (int r = 0; r < beta[i]; ++r) v = ladder.q_plus[i] * v;
        }
        for (std::size_t i = 0; i < alpha.size(); ++i) {
            for (int r = 0; r < alpha[i]; ++r) v = ladder.p_plus[i] * v;
        }
    } else {
        // (prod P-^alpha prod Q-^beta)^dagger vec(1)
        v = g.left;
        for (std::size_t i = 0; i < alpha.size(); ++i) {
            for (int r = 0; r < alpha[i]; ++r) v = ladder.p_minus[i].adjoint() * v;
        }
        for (std::size_t i = 0; i < beta.size(); ++i) {
            for (int r = 0; r < beta[i]; ++r) v = ladder.q_minus[i].adjoint() * v;
        }
    }
    return v / index_norm(alpha, beta);
}

cplx overlap(const MultiIndex& alpha, const MultiIndex& beta, const LadderSet& ladder,
             const DensityMatrix& rho0) {
    if (!(rho0.basis() == *ladder.basis)) {
        throw InvalidArgument("density matrix and ladder operators use different bases");
    }
    return ladder_state(alpha, beta, ladder, Side::left).dot(vectorize(rho0));
}

cplx ladder_exponent(const MultiIndex& alpha, const MultiIndex& beta,
                     const ModeSpectrum& spectrum) {
    cplx mu = 0.0;
    for (std::size_t i = 0; i < spectrum.lambdas.size(); ++i) {
        mu += static_cast<double>(alpha.at(i)) * spectrum.lambdas[i] +
              static_cast<double>(beta.at(i)) * std::conj(spectrum.lambdas[i]);
    }
    return mu;
}

std::vector<MultiIndex> multi_indices(std::size_t n_modes, std::size_t max_total) {
    return FockBasis(n_modes, max_total).states();
}

Trajectory evolve_eigendecomposition(const SystemParams& params, const DensityMatrix& rho0,
                                     const std::vector<double>& t_grid) {
    validate_time_grid(t_grid);
    const BasisPtr& basis = rho0.basis_ptr();
    if (params.n_modes() != basis->n_modes()) {
        throw InvalidArgument("parameters and initial state have different mode counts");
    }
    const ModeSpectrum spectrum = heff_spectrum(params);
    const LadderSet ladder = build_ladder_operators(spectrum, basis);

    const std::vector<MultiIndex> idx = multi_indices(basis->n_modes(), basis->max_total());
    const auto count = static_cast<Eigen::Index>(idx.size() * idx.size());
    const Eigen::Index d2 = count;
    Matrix v(d2, count), w(count, d2);
    Vector mu(count);
    Eigen::Index col = 0;
    for (const MultiIndex& a : idx) {
        for (const MultiIndex& b : idx) {
            v.col(col) = ladder_state(a, b, ladder, Side::right);
            w.row(col) = ladder_state(a, b, ladder, Side::left).adjoint();
            mu(col) = ladder_exponent(a, b, spectrum);
            ++col;
        }
    }
    const double bio = (w * v - Matrix::Identity(count, count)).cwiseAbs().maxCoeff();
    if (!(bio < 1e-6)) {
        throw NumericalFailure("Liouvillian eigenbasis is ill-conditioned (biorthogonality error " +
                               std::to_string(bio) + ")");
    }
    const Vector c = w * vectorize(rho0);

    Trajectory out;
    out.metadata.solver = "eigen";
    out.times = t_grid;
    out.states.push_back(rho0);
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        const Vector weights = (t_grid[i] * mu).array().exp().matrix().cwiseProduct(c);
        out.states.push_back(sample_state(v * weights, basis, out.metadata));
    }
    return out;
}

namespace {

// (1 - cos(sqrt(u))) / u, continued analytically to u <= 0 and through u = 0.
double one_minus_cos_ratio(double u) {
    if (std::abs(u) < 1e-2) {
        return 0.5 - u / 24.0 + u * u / 720.0 - u * u * u / 40320.0 + u * u * u * u / 3628800.0;
    }
    if (u > 0.0) {
        const double s = std::sin(0.5 * std::sqrt(u));
        return 2.0 * s * s / u;
    }
    const double s = std::sinh(0.5 * std::sqrt(-u));
    return -2.0 * s * s / u;
}

// (gamma^2 - 4 kappa^2 cos(t sqrt(d))) / d  with d = 4 kappa^2 - gamma^2
double closed_form_ratio(double kappa, double gamma, double t) {
    const double d = 4.0 * kappa * kappa - gamma * gamma;
    return -1.0 + 4.0 * kappa * kappa * t * t * one_minus_cos_ratio(t * t * d);
}

}  // namespace

double coincidence_closed_form(double kappa, double gamma, double t) {
    if (!std::isfinite(kappa) || !std::isfinite(gamma) || !std::isfinite(t)) {
        throw InvalidArgument("coincidence_closed_form: non-finite argument");
    }
    if (gamma < 0.0) throw InvalidArgument("loss rate must be nonnegative");
    const double r = closed_form_ratio(kappa, gamma, t);
    return std::exp(-2.0 * gamma * t) * r * r;
}

HomDip hom_dip(double kappa, double gamma, double resolution) {
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw InvalidArgument("kappa must be positive");
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
        throw InvalidArgument("gamma must be nonnegative");
    }
    if (!(resolution > 0.0)) throw InvalidArgument("resolution must be positive");
    const double d = 4.0 * kappa * kappa - gamma * gamma;
    const double t_edge = 1.0 / (std::sqrt(2.0) * kappa);
    // The ratio rises monotonically from -1 at t = 0 to its first zero.
    double lo = 0.0, hi = t_edge;
    if (d > 0.0) {
        lo = t_edge;
        hi = M_PI / std::sqrt(d);
    }
    if (closed_form_ratio(kappa, gamma, lo) >= 0.0) hi = lo;
    while (hi - lo > resolution) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (closed_form_ratio(kappa, gamma, mid) < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    HomDip out;
    out.t_dip = 0.5 * (lo + hi);
    out.gamma_min = coincidence_closed_form(kappa, gamma, out.t_dip);
    out.pt_unbroken = gamma < 2.0 * kappa;
    return out;
}

Matrix evolve_top_layer(const SystemParams& params, const DensityMatrix& rho0, double t) {
    require_constant(params, "no-jump evolution");
    const BasisPtr& basis = rho0.basis_ptr();
    const std::size_t top = basis->max_total();
    const Matrix h = build_heff_layer(params, basis, top, 0.0);
    const auto [first, last] = basis->layer_range(top);
    const auto f = static_cast<Eigen::Index>(first);
    const auto n = static_cast<Eigen::Index>(last - first);
    const Matrix u = expm_scaled(-I * h, t);
    return u * rho0.matrix().block(f, f, n, n) * u.adjoint();
}

}  // namespace lossyosc
