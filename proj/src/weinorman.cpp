#include "lossyosc/weinorman.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lossyosc/errors.hpp"
#include "lossyosc/liouville.hpp"

namespace lossyosc {

namespace {

constexpr cplx I{0.0, 1.0};
constexpr double kTwoPi = 6.283185307179586476925286766559;

void require_two_modes(const SystemParams& params) {
    params.validate();
    if (params.n_modes() != 2) {
        throw InvalidArgument("the Wei-Norman solver is implemented for two modes, got " +
                              std::to_string(params.n_modes()));
    }
}

Eigen::Matrix2cd as_matrix(const Vector& y) {
    Eigen::Matrix2cd m;
    m << y(0), y(2), y(1), y(3);
    return m;
}

/// exp(a x). Every Wei-Norman generator is either diagonal or nilpotent on a
/// truncated basis, where the exponential is exact: elementwise, or a Taylor
/// series that terminates. Anything else goes to the Pade kernel.
Matrix exp_scaled(cplx a, const Matrix& x) {
    const Eigen::Index n = x.rows();
    const Matrix ax = a * x;
    if ((ax - Matrix(ax.diagonal().asDiagonal())).isZero(0.0)) {
        return ax.diagonal().array().exp().matrix().asDiagonal();
    }
    Matrix sum = Matrix::Identity(n, n);
    Matrix term = sum;
    for (Eigen::Index k = 1; k <= n; ++k) {
        term = (term * ax) / static_cast<double>(k);
        if (term.isZero(0.0)) return sum;
        sum += term;
    }
    return expm_scaled(ax, 1.0);
}

// Samples per accepted step used for branch tracking and crossing search.
constexpr int kSubsamples = 16;

}  // namespace

WNSplit split_liouvillian(const SystemParams& params, double t) {
    require_two_modes(params);
    const ParamValues p = evaluate(params, t);
    const double s1 = p.sigma[0], s2 = p.sigma[1], g1 = p.gamma[0], g2 = p.gamma[1];
    const double k = p.kappa[0];
    WNSplit out;
    out.m_left = 0.5 * cplx(-(g1 + g2), -(s1 + s2));
    out.m_right = std::conj(out.m_left);
    out.loss1 = 2.0 * g1;
    out.loss2 = 2.0 * g2;
    out.c0 = 0.5 * cplx(-(g1 - g2), -(s1 - s2));
    out.c_plus = cplx(0.0, -k);
    out.c_minus = cplx(0.0, -k);
    out.c0_right = std::conj(out.c0);
    out.c_plus_right = std::conj(out.c_plus);
    out.c_minus_right = std::conj(out.c_minus);
    out.delta = I * out.c0;
    return out;
}

WNGenerators build_wn_generators(const BasisPtr& basis) {
    if (basis->n_modes() != 2) throw InvalidArgument("Wei-Norman generators need two modes");
    const LinearSupers s = build_linear_superoperators(basis);
    WNGenerators g;
    g.basis = basis;
    const Matrix nl1 = s.l_plus[0] * s.l_minus[0], nl2 = s.l_plus[1] * s.l_minus[1];
    const Matrix nr1 = s.r_plus[0] * s.r_minus[0], nr2 = s.r_plus[1] * s.r_minus[1];
    g.n_left = nl1 + nl2;
    g.n_right = nr1 + nr2;
    g.jump11 = s.l_minus[0] * s.r_minus[0];
    g.jump22 = s.l_minus[1] * s.r_minus[1];
    g.jump21 = s.l_minus[1] * s.r_minus[0];
    g.jump12 = s.l_minus[0] * s.r_minus[1];
    g.k0 = nl1 - nl2;
    g.k_plus = s.l_plus[0] * s.l_minus[1];
    g.k_minus = s.l_plus[1] * s.l_minus[0];
    g.k0_right = nr1 - nr2;
    g.k_plus_right = s.r_plus[0] * s.r_minus[1];
    g.k_minus_right = s.r_plus[1] * s.r_minus[0];
    return g;
}

Matrix reassemble(const WNSplit& w, const WNGenerators& g) {
    return w.m_left * g.n_left + w.m_right * g.n_right + w.loss1 * g.jump11 +
           w.loss2 * g.jump22 + w.c0 * g.k0 + w.c_plus * g.k_plus + w.c_minus * g.k_minus +
           w.c0_right * g.k0_right + w.c_plus_right * g.k_plus_right +
           w.c_minus_right * g.k_minus_right;
}

Sl2Solution::Sl2Solution(DenseSolution dense, double t_end, StepStats stats)
    : dense_(std::move(dense)), t_end_(t_end), stats_(stats) {
    std::vector<double> ts, margins;
    double prev_arg = 0.0;
    bool first = true;
    auto visit = [&](double t) {
        const Eigen::Matrix2cd m = fundamental(t);
        const double a = std::arg(m(1, 1));
        const double unwrapped =
            first ? a : a + kTwoPi * std::round((prev_arg - a) / kTwoPi);
        first = false;
        prev_arg = unwrapped;
        arg_times_.push_back(t);
        arg_values_.push_back(unwrapped);
        ts.push_back(t);
        margins.push_back(std::abs(m(1, 1)) / m.norm());
    };
    if (dense_.empty()) {
        visit(0.0);
        return;
    }
    for (const DenseStep& s : dense_.steps()) {
        for (int j = 0; j < kSubsamples; ++j) visit(s.t0 + s.h * j / kSubsamples);
    }
    visit(t_end_);

    // Golden-section refinement of sampled local minima.
    const double invphi = 0.5 * (std::sqrt(5.0) - 1.0);
    for (std::size_t i = 1; i + 1 < ts.size(); ++i) {
        if (!(margins[i] <= margins[i - 1] && margins[i] < margins[i + 1] && margins[i] < 1e-2)) {
            continue;
        }
        double a = ts[i - 1], b = ts[i + 1];
        while (b - a > 1e-14 * std::max(1.0, b)) {
            const double c = b - invphi * (b - a), d = a + invphi * (b - a);
            if (factorization_margin(c) < factorization_margin(d)) {
                b = d;
            } else {
                a = c;
            }
        }
        const double tc = 0.5 * (a + b);
        if (factorization_margin(tc) < 1e-6) crossings_.push_back(tc);
    }
    if (margins.size() >= 2 && margins.back() < margins[margins.size() - 2] &&
        margins.back() < 1e-6) {
        crossings_.push_back(ts.back());
    }
}

Eigen::Matrix2cd Sl2Solution::fundamental(double t) const {
    if (dense_.empty()) {
        if (t != 0.0) throw InvalidArgument("time outside the integrated range");
        return Eigen::Matrix2cd::Identity();
    }
    return as_matrix(dense_.value(t));
}

Eigen::Matrix2cd Sl2Solution::fundamental_derivative(double t) const {
    if (dense_.empty()) throw InvalidArgument("derivative of an empty solution");
    return as_matrix(dense_.derivative(t));
}

double Sl2Solution::factorization_margin(double t) const {
    const Eigen::Matrix2cd m = fundamental(t);
    return std::abs(m(1, 1)) / m.norm();
}

double Sl2Solution::unwrapped_arg(double t) const {
    auto it = std::upper_bound(arg_times_.begin(), arg_times_.end(), t);
    const std::size_t j = it == arg_times_.begin() ? 0 : static_cast<std::size_t>(it - arg_times_.begin()) - 1;
    const double a = std::arg(fundamental(t)(1, 1));
    return a + kTwoPi * std::round((arg_values_[j] - a) / kTwoPi);
}

FValues Sl2Solution::f(double t) const {
    const Eigen::Matrix2cd m = fundamental(t);
    if (std::abs(m(1, 1)) < kFactorizationTol * m.norm()) {
        throw FactorizationSingularity(
            "Wei-Norman factorization does not exist at t = " + std::to_string(t) +
                " (M22 vanishes)",
            t);
    }
    const cplx m22 = m(1, 1);
    FValues v;
    v.f0 = -cplx(std::log(std::abs(m22)), unwrapped_arg(t));
    v.f_plus = m(0, 1) / m22;
    v.f_minus = m(1, 0) / m22;
    if (!dense_.empty()) {
        const Eigen::Matrix2cd dm = fundamental_derivative(t);
        v.df0 = -dm(1, 1) / m22;
        v.df_plus = (dm(0, 1) * m22 - m(0, 1) * dm(1, 1)) / (m22 * m22);
        v.df_minus = (dm(1, 0) * m22 - m(1, 0) * dm(1, 1)) / (m22 * m22);
    }
    return v;
}

Sl2Solution solve_fundamental(const SystemParams& params, double t_end,
                              const IntegratorConfig& config, bool mirrored) {
    require_two_modes(params);
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw InvalidArgument("t_end must be >= 0");
    auto rhs = [&](double t, const Vector& y) -> Vector {
        const WNSplit w = split_liouvillian(params, t);
        const cplx c0 = mirrored ? w.c0_right : w.c0;
        const cplx cp = mirrored ? w.c_plus_right : w.c_plus;
        const cplx cm = mirrored ? w.c_minus_right : w.c_minus;
        Eigen::Matrix2cd a;
        a << c0, cp, cm, -c0;
        const Eigen::Matrix2cd dm = a * as_matrix(y);
        Vector out(4);
        out << dm(0, 0), dm(1, 0), dm(0, 1), dm(1, 1);
        return out;
    };
    Vector y0(4);
    y0 << 1.0, 0.0, 0.0, 1.0;
    DenseSolution dense;
    const StepStats stats = integrate_dopri5(rhs, 0.0, y0, t_end, params.breakpoints(t_end),
                                             config, [&](const DenseStep& s) { dense.push(s); });
    return Sl2Solution(std::move(dense), t_end, stats);
}

Sl2Solution integrate_sl2(const SystemParams& params, double t_end,
                          const IntegratorConfig& config) {
    Sl2Solution sol = solve_fundamental(params, t_end, config);
    sol.f(t_end);  // throws at a singular endpoint
    return sol;
}

cplx riccati_residual(const FValues& f, const SystemParams& params, double t) {
    const WNSplit w = split_liouvillian(params, t);
    const double kappa = evaluate(params, t).kappa[0];
    return f.df_plus + 2.0 * I * w.delta * f.f_plus - I * kappa * f.f_plus * f.f_plus + I * kappa;
}

std::array<cplx, 3> sl2_residuals(const FValues& f, const SystemParams& params, double t) {
    const WNSplit w = split_liouvillian(params, t);
    const double kappa = evaluate(params, t).kappa[0];
    const cplx e = std::exp(-2.0 * f.f0);
    return {f.df_minus * e + I * kappa,
            f.df0 + f.df_minus * f.f_plus * e + I * w.delta,
            f.df_plus - 2.0 * f.df0 * f.f_plus - f.df_minus * f.f_plus * f.f_plus * e + I * kappa};
}

std::array<cplx, 6> radical_rates(const FValues& f, cplx a1, cplx a2, double gamma1,
                                  double gamma2, double sigma_sum) {
    const cplx pre = 2.0 * std::exp(a1 + a2);
    const double decay = std::exp(-2.0 * f.f0.real());
    const cplx m11 = std::exp(f.f0) + std::exp(-f.f0) * f.f_plus * f.f_minus;
    const double gsum = gamma1 + gamma2;
    return {0.5 * cplx(-gsum, -sigma_sum),
            0.5 * cplx(-gsum, sigma_sum),
            pre * (gamma1 * std::norm(m11) + gamma2 * decay * std::norm(f.f_minus)),
            pre * (gamma1 * decay * std::norm(f.f_plus) + gamma2 * decay),
            pre * (gamma1 * std::conj(m11) * std::exp(-f.f0) * f.f_plus +
                   gamma2 * decay * std::conj(f.f_minus)),
            pre * (gamma1 * m11 * std::exp(-std::conj(f.f0)) * std::conj(f.f_plus) +
                   gamma2 * decay * f.f_minus)};
}

std::array<cplx, 6> radical_rates(const Eigen::Matrix2cd& m, cplx a1, cplx a2, double gamma1,
                                  double gamma2, double sigma_sum) {
    const cplx pre = std::exp(a1 + a2);
    const double gsum = gamma1 + gamma2;
    auto g = [&](int k, int l) {
        return 2.0 * (gamma1 * m(0, k) * std::conj(m(0, l)) + gamma2 * m(1, k) * std::conj(m(1, l)));
    };
    return {0.5 * cplx(-gsum, -sigma_sum), 0.5 * cplx(-gsum, sigma_sum),
            pre * g(0, 0), pre * g(1, 1), pre * g(1, 0), pre * g(0, 1)};
}

std::array<cplx, 6> RadicalSolution::a(double t) const {
    std::array<cplx, 6> out{};
    if (dense_.empty()) {
        if (t != 0.0) throw InvalidArgument("time outside the integrated range");
        return out;
    }
    const Vector v = dense_.value(t);
    for (int i = 0; i < 6; ++i) out[static_cast<std::size_t>(i)] = v(i);
    return out;
}

RadicalSolution integrate_radical(const SystemParams& params, const Sl2Solution& sl2,
                                  double t_end, const IntegratorConfig& config) {
    require_two_modes(params);
    if (t_end > sl2.t_end()) throw InvalidArgument("radical range exceeds the sl(2) solution");
    auto rhs = [&](double t, const Vector& y) -> Vector {
        const ParamValues p = evaluate(params, t);
        const auto r = radical_rates(sl2.fundamental(t), y(0), y(1), p.gamma[0], p.gamma[1],
                                     p.sigma[0] + p.sigma[1]);
        return Eigen::Map<const Vector>(r.data(), 6);
    };
    DenseSolution dense;
    const StepStats stats = integrate_dopri5(rhs, 0.0, Vector::Zero(6), t_end,
                                             params.breakpoints(t_end), config,
                                             [&](const DenseStep& s) { dense.push(s); });
    return RadicalSolution(std::move(dense), stats);
}

namespace {

/// A generator prepared for repeated exp(a x) v: elementwise when diagonal,
/// otherwise through its cached powers x^k / k! while these terminate.
class PreparedGenerator {
public:
    explicit PreparedGenerator(const Matrix& x) : x_(x) {
        const Eigen::Index n = x.rows();
        if ((x - Matrix(x.diagonal().asDiagonal())).isZero(0.0)) {
            diagonal_ = true;
            return;
        }
        Matrix term = Matrix::Identity(n, n);
        for (Eigen::Index k = 1; k <= n; ++k) {
            powers_.push_back(term);
            term = (term * x) / static_cast<double>(k);
            if (term.isZero(0.0)) {
                nilpotent_ = true;
                return;
            }
        }
        powers_.clear();
    }

    void apply(cplx a, Vector& v) const {
        if (diagonal_) {
            v = ((a * x_.diagonal()).array().exp() * v.array()).matrix();
        } else if (nilpotent_) {
            Vector out = powers_[0] * v;
            cplx ak = 1.0;
            for (std::size_t k = 1; k < powers_.size(); ++k) {
                ak *= a;
                out += ak * (powers_[k] * v);
            }
            v = out;
        } else {
            v = expm_scaled(a * x_, 1.0) * v;
        }
    }

private:
    Matrix x_;
    bool diagonal_ = false;
    bool nilpotent_ = false;
    std::vector<Matrix> powers_;
};

/// The twelve Wei-Norman generators in factor order: semisimple left and
/// right, then radical.
struct PreparedFactors {
    std::vector<PreparedGenerator> semisimple, radical;

    explicit PreparedFactors(const WNGenerators& g) {
        for (const Matrix* x : {&g.k_plus, &g.k0, &g.k_minus, &g.k_plus_right, &g.k0_right,
                                &g.k_minus_right}) {
            semisimple.emplace_back(*x);
        }
        for (const Matrix* x : {&g.n_left, &g.n_right, &g.jump11, &g.jump22, &g.jump21, &g.jump12}) {
            radical.emplace_back(*x);
        }
    }
};

// Ordered product acting on v: the rightmost factor is applied first.
void apply_product(const std::vector<PreparedGenerator>& gens, const std::array<cplx, 6>& coef,
                   Vector& v) {
    for (std::size_t i = gens.size(); i-- > 0;) gens[i].apply(coef[i], v);
}

}  // namespace

Matrix semisimple_propagator(const FValues& f, const WNGenerators& g) {
    const Matrix u1 = exp_scaled(f.f_plus, g.k_plus) * exp_scaled(f.f0, g.k0) *
                      exp_scaled(f.f_minus, g.k_minus);
    const Matrix u2 = exp_scaled(std::conj(f.f_plus), g.k_plus_right) *
                      exp_scaled(std::conj(f.f0), g.k0_right) *
                      exp_scaled(std::conj(f.f_minus), g.k_minus_right);
    return u1 * u2;
}

Matrix fock_representation(const Eigen::Matrix2cd& m, const BasisPtr& basis) {
    if (basis->n_modes() != 2) throw InvalidArgument("fock_representation needs two modes");
    const Matrix ad0 = creation_matrix(basis, 0).m, ad1 = creation_matrix(basis, 1).m;
    const Matrix b[2] = {m(0, 0) * ad0 + m(1, 0) * ad1, m(0, 1) * ad0 + m(1, 1) * ad1};
    const auto d = static_cast<Eigen::Index>(basis->dimension());
    Matrix u(d, d);
    for (std::size_t i = 0; i < basis->dimension(); ++i) {
        const Occupation& n = basis->state(i);
        Vector v = Vector::Zero(d);
        v(0) = 1.0;
        double norm = 1.0;
        for (int k = 0; k < 2; ++k) {
            for (int r = 0; r < n[static_cast<std::size_t>(k)]; ++r) v = b[k] * v;
            norm *= std::tgamma(n[static_cast<std::size_t>(k)] + 1.0);
        }
        u.col(static_cast<Eigen::Index>(i)) = v / std::sqrt(norm);
    }
    return u;
}

Matrix semisimple_propagator(const Eigen::Matrix2cd& m, const WNGenerators& g) {
    const Matrix u = fock_representation(m, g.basis);
    return left_super(u) * right_super(Matrix(u.adjoint()));
}

Matrix radical_propagator(const std::array<cplx, 6>& a, const WNGenerators& g) {
    return exp_scaled(a[0], g.n_left) * exp_scaled(a[1], g.n_right) * exp_scaled(a[2], g.jump11) *
           exp_scaled(a[3], g.jump22) * exp_scaled(a[4], g.jump21) * exp_scaled(a[5], g.jump12);
}

Trajectory evolve_weinorman(const SystemParams& params, const DensityMatrix& rho0,
                            const std::vector<double>& t_grid, const IntegratorConfig& config) {
    require_two_modes(params);
    validate_time_grid(t_grid);
    const BasisPtr& basis = rho0.basis_ptr();
    if (basis->n_modes() != 2) throw InvalidArgument("initial state must have two modes");
    const double t_end = t_grid.back();
    const Sl2Solution sl2 = solve_fundamental(params, t_end, config);
    const RadicalSolution rad = integrate_radical(params, sl2, t_end, config);
    const WNGenerators gens = build_wn_generators(basis);
    const PreparedFactors prepared(gens);
    const Vector v0 = vectorize(rho0);

    // Rounding in the ordered product grows like eps / margin^(2 * max_total).
    const double eps = std::numeric_limits<double>::epsilon();
    const double product_floor =
        std::pow(eps / 1e-10, 1.0 / (2.0 * std::max<std::size_t>(basis->max_total(), 1)));

    Trajectory out;
    out.metadata.solver = "weinorman";
    out.metadata.rtol = config.rtol;
    out.metadata.atol = config.atol;
    out.metadata.accepted_steps = sl2.stats().accepted + rad.stats().accepted;
    out.metadata.rejected_steps = sl2.stats().rejected + rad.stats().rejected;
    out.metadata.rhs_evaluations = sl2.stats().rhs_evaluations + rad.stats().rhs_evaluations;
    out.times = t_grid;
    out.states.push_back(rho0);
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        const double t = t_grid[i];
        Vector v = v0;
        apply_product(prepared.radical, rad.a(t), v);
        if (sl2.factorization_margin(t) >= product_floor) {
            const FValues f = sl2.f(t);
            apply_product(prepared.semisimple,
                          {f.f_plus, f.f0, f.f_minus, std::conj(f.f_plus), std::conj(f.f0),
                           std::conj(f.f_minus)},
                          v);
        } else {
            v = semisimple_propagator(sl2.fundamental(t), gens) * v;
        }
        out.states.push_back(sample_state(v, basis, out.metadata));
    }
    return out;
}

double coincidence_weinorman(const FValues& f, const std::array<cplx, 6>& a) {
    const cplx amp = 1.0 + 2.0 * f.f_plus * f.f_minus * std::exp(-2.0 * f.f0);
    return std::abs(std::exp(2.0 * (a[0] + a[1]))) * std::norm(amp);
}

}  // namespace lossyosc
