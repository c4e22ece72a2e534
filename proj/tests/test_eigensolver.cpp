#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "lossyosc/eigensolver.hpp"
#include "lossyosc/errors.hpp"
#include "lossyosc/oracle.hpp"
#include "test_support.hpp"

using namespace lossyosc;
using testing::max_abs;
using testing::restrict_columns;

namespace {

const cplx I(0.0, 1.0);

// Greedy matching of two multisets; returns the largest pair distance.
double multiset_distance(std::vector<cplx> a, std::vector<cplx> b) {
    if (a.size() != b.size()) return 1e300;
    double worst = 0.0;
    for (const cplx& x : a) {
        auto best = std::min_element(b.begin(), b.end(), [&](const cplx& p, const cplx& q) {
            return std::abs(p - x) < std::abs(q - x);
        });
        worst = std::max(worst, std::abs(*best - x));
        b.erase(best);
    }
    return worst;
}

// Two-mode eigenvalues -gbar - i sbar +- i omega.
std::array<cplx, 2> two_mode_lambdas(double s1, double s2, double g1, double g2, double k) {
    const double ds = 0.5 * (s1 - s2), dg = 0.5 * (g1 - g2);
    const double sb = 0.5 * (s1 + s2), gb = 0.5 * (g1 + g2);
    const cplx omega = std::sqrt(k * k + (ds - I * dg) * (ds - I * dg));
    return {-gb - I * sb + I * omega, -gb - I * sb - I * omega};
}

SystemParams well_conditioned(std::size_t n, std::mt19937_64& rng) {
    while (true) {
        auto p = testing::random_params(n, rng, 1.5);
        try {
            if (heff_spectrum(p).ep_condition < 1e3) return p;
        } catch (const ExceptionalPointError&) {
        }
    }
}

std::vector<double> grid(double t_end, int n) {
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = t_end * i / (n - 1);
    return g;
}

}  // namespace

TEST_CASE("two-mode spectrum in the unbroken phase") {
    const auto s = heff_spectrum(SystemParams::constant({0, 0}, {1, 0}, {1}));
    REQUIRE(s.lambdas.size() == 2);
    CHECK(std::abs(s.lambdas[0] - cplx(-0.5, std::sqrt(0.75))) <= 1e-12);
    CHECK(std::abs(s.lambdas[1] - cplx(-0.5, -std::sqrt(0.75))) <= 1e-12);
    CHECK(s.lambdas[0].imag() == doctest::Approx(0.86603).epsilon(1e-5));
}

TEST_CASE("two-mode spectrum in the broken phase is real") {
    const auto s = heff_spectrum(SystemParams::constant({0, 0}, {2.5, 0}, {1}));
    std::vector<double> re;
    for (const auto& l : s.lambdas) {
        CHECK(std::abs(l.imag()) <= 1e-10);
        re.push_back(l.real());
    }
    std::sort(re.begin(), re.end());
    CHECK(re[0] == doctest::Approx(-2.0));
    CHECK(re[1] == doctest::Approx(-0.5));
}

TEST_CASE("exceptional point is refused with a pointer to the other solvers") {
    for (const auto& p : {SystemParams::constant({0, 0}, {2, 0}, {1}),
                          SystemParams::constant({0, 0}, {1.5, 0.5}, {0.5})}) {
        try {
            heff_spectrum(p);
            FAIL("expected an exceptional-point error");
        } catch (const ExceptionalPointError& e) {
            CHECK(e.condition() > kMaxEpCondition);
            const std::string what = e.what();
            CHECK(what.find("oracle") != std::string::npos);
            CHECK(what.find("weinorman") != std::string::npos);
        }
    }
    const SystemParams ramp({Schedule(0.0), Schedule(0.0)}, {Schedule(1.0), Schedule(0.0)},
                            {Schedule({0.0, 1.0}, {1.0, 2.0})});
    CHECK_THROWS_AS(heff_spectrum(ramp), InvalidArgument);
}

TEST_CASE("eigenvector rows solve the transposed problem and are complex orthonormal") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 3);
        const auto p = well_conditioned(n, rng);
        const auto s = heff_spectrum(p);
        const Matrix g = -I * build_heff_matrix(p, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto r = static_cast<Eigen::Index>(i);
            const Eigen::RowVectorXcd lhs = s.coeffs.row(r) * g;
            CHECK(max_abs(Matrix(lhs - s.lambdas[i] * s.coeffs.row(r))) <= 1e-10);
        }
        const Matrix gram = s.coeffs * s.coeffs.transpose();
        CHECK(max_abs(Matrix(gram - Matrix::Identity(gram.rows(), gram.cols()))) <= 1e-10);
        for (std::size_t i = 1; i < n; ++i) {
            const cplx a = s.lambdas[i - 1], b = s.lambdas[i];
            CHECK((a.imag() > b.imag() || (a.imag() == b.imag() && a.real() >= b.real())));
        }
    }
}

TEST_CASE("two-mode eigenvalues follow the closed formula") {
    std::mt19937_64 rng(32);
    for (int trial = 0; trial < 50; ++trial) {
        const double s1 = testing::uniform(rng, -1, 1), s2 = testing::uniform(rng, -1, 1);
        const double g1 = testing::uniform(rng, 0, 2), g2 = testing::uniform(rng, 0, 2);
        const double k = testing::uniform(rng, 0.3, 1.5);
        ModeSpectrum s;
        try {
            s = heff_spectrum(SystemParams::constant({s1, s2}, {g1, g2}, {k}));
        } catch (const ExceptionalPointError&) {
            continue;
        }
        const auto ref = two_mode_lambdas(s1, s2, g1, g2, k);
        CHECK(multiset_distance(s.lambdas, {ref[0], ref[1]}) <= 1e-12);
    }
}

TEST_CASE("single-mode regular representation") {
    const double sigma = 0.7, gamma = 0.4;
    const Matrix r = regular_representation(SystemParams::constant({sigma}, {gamma}, {}));
    const Eigen::ComplexEigenSolver<Matrix> es(r);
    std::vector<cplx> got(es.eigenvalues().data(), es.eigenvalues().data() + 4);
    const std::vector<cplx> expected{{-gamma, -sigma}, {gamma, -sigma}, {-gamma, sigma},
                                     {gamma, sigma}};
    CHECK(multiset_distance(got, expected) <= 1e-12);
}

TEST_CASE("regular representation spectrum equals the ladder multiset") {
    std::mt19937_64 rng(33);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 2);
        const auto p = well_conditioned(n, rng);
        const Eigen::ComplexEigenSolver<Matrix> es(regular_representation(p));
        std::vector<cplx> got(es.eigenvalues().data(),
                              es.eigenvalues().data() + es.eigenvalues().size());
        CHECK(multiset_distance(got, liouvillian_eigenvalue_multiset(heff_spectrum(p))) <= 1e-10);
    }
}

TEST_CASE("regular representation rows reproduce commutators with the Liouvillian") {
    std::mt19937_64 rng(34);
    for (std::size_t n : {1u, 2u, 3u}) {
        const auto b = build_basis(n, 2);
        const auto p = testing::random_params(n, rng, 1.5);
        const Matrix l = build_liouvillian(p, b, 0.0).s;
        const auto sup = build_linear_superoperators(b);
        std::vector<Matrix> x;
        for (const auto* group : {&sup.l_plus, &sup.r_minus, &sup.r_plus, &sup.l_minus}) {
            for (const auto& m : *group) x.push_back(m);
        }
        const Matrix r = regular_representation(p);
        const auto cols = liouville_columns(*b, 1, 1);
        for (std::size_t i = 0; i < x.size(); ++i) {
            Matrix expansion = Matrix::Zero(l.rows(), l.cols());
            for (std::size_t j = 0; j < x.size(); ++j) {
                expansion += r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * x[j];
            }
            const Matrix comm = testing::commutator(l, x[i]);
            CHECK(max_abs(Matrix(restrict_columns(comm, cols) - restrict_columns(expansion, cols))) <=
                  1e-10);
        }
    }
}

TEST_CASE("ladder operators obey bosonic relations and shift the Liouvillian spectrum") {
    const auto p = SystemParams::constant({0.3, -0.2}, {1.0, 0.2}, {1.0});
    const auto b = build_basis(2, 2);
    const auto ladder = build_ladder_operators(heff_spectrum(p), b);
    const Matrix l = build_liouvillian(p, b, 0.0).s;
    const auto cols = liouville_columns(*b, 1, 1);
    const auto d2 = static_cast<Eigen::Index>(b->dimension() * b->dimension());
    const Matrix id = restrict_columns(Matrix::Identity(d2, d2), cols);
    auto on_cols = [&](const Matrix& m) { return restrict_columns(m, cols); };
    const auto& lam = ladder.spectrum.lambdas;
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            const double delta = i == j ? 1.0 : 0.0;
            using testing::commutator;
            CHECK(max_abs(Matrix(on_cols(commutator(ladder.p_minus[i], ladder.p_plus[j])) - delta * id)) <= 1e-9);
            CHECK(max_abs(Matrix(on_cols(commutator(ladder.q_minus[i], ladder.q_plus[j])) - delta * id)) <= 1e-9);
            CHECK(max_abs(on_cols(commutator(ladder.p_minus[i], ladder.q_plus[j]))) <= 1e-9);
            CHECK(max_abs(on_cols(commutator(ladder.p_plus[i], ladder.q_plus[j]))) <= 1e-9);
            CHECK(max_abs(on_cols(commutator(ladder.p_plus[i], ladder.q_minus[j]))) <= 1e-9);
            // annihilators commute among themselves, so left-state ordering is immaterial
            CHECK(max_abs(commutator(ladder.p_minus[i], ladder.q_minus[j])) <= 1e-12);
            CHECK(max_abs(commutator(ladder.p_minus[i], ladder.p_minus[j])) <= 1e-12);
            CHECK(max_abs(commutator(ladder.q_minus[i], ladder.q_minus[j])) <= 1e-12);
        }
        using testing::commutator;
        CHECK(max_abs(Matrix(on_cols(commutator(l, ladder.p_plus[i]) - lam[i] * ladder.p_plus[i]))) <= 1e-9);
        CHECK(max_abs(Matrix(on_cols(commutator(l, ladder.q_plus[i]) - std::conj(lam[i]) * ladder.q_plus[i]))) <= 1e-9);
        CHECK(max_abs(Matrix(on_cols(commutator(l, ladder.p_minus[i]) + lam[i] * ladder.p_minus[i]))) <= 1e-9);
        CHECK(max_abs(Matrix(on_cols(commutator(l, ladder.q_minus[i]) + std::conj(lam[i]) * ladder.q_minus[i]))) <= 1e-9);
    }
}

TEST_CASE("coefficients match the two-mode epsilon and tau up to a sign per mode") {
    std::mt19937_64 rng(35);
    for (int trial = 0; trial < 20; ++trial) {
        const double s1 = testing::uniform(rng, -1, 1), s2 = testing::uniform(rng, -1, 1);
        const double g1 = testing::uniform(rng, 0, 1.5), g2 = testing::uniform(rng, 0, 1.5);
        const double k = testing::uniform(rng, 0.3, 1.5);
        const auto p = SystemParams::constant({s1, s2}, {g1, g2}, {k});
        ModeSpectrum s;
        try {
            s = heff_spectrum(p);
        } catch (const ExceptionalPointError&) {
            continue;
        }
        const cplx d = 0.5 * (s1 - s2) - I * 0.5 * (g1 - g2);
        const cplx omega = std::sqrt(k * k + d * d);
        const cplx n1 = std::sqrt(2.0 * omega * (omega + d));
        const cplx n2 = std::sqrt(2.0 * omega * (omega - d));
        const Eigen::Vector2cd v1(-k / n1, (omega + d) / n1);
        const Eigen::Vector2cd v2(k / n2, (omega - d) / n2);
        const auto ref = two_mode_lambdas(s1, s2, g1, g2, k);
        for (std::size_t i = 0; i < 2; ++i) {
            const Eigen::RowVector2cd c = s.coeffs.row(static_cast<Eigen::Index>(i));
            const bool first = std::abs(s.lambdas[i] - ref[0]) < std::abs(s.lambdas[i] - ref[1]);
            const Eigen::Vector2cd& v = first ? v1 : v2;
            const double diff = std::min((c.transpose() - v).cwiseAbs().maxCoeff(),
                                         (c.transpose() + v).cwiseAbs().maxCoeff());
            CHECK(diff <= 1e-10);
        }
    }
}

TEST_CASE("single-mode lossless ladder operator is the bare combination") {
    const auto b = build_basis(1, 2);
    const auto ladder = build_ladder_operators(heff_spectrum(SystemParams::constant({0.4}, {0.0}, {})), b);
    const auto sup = build_linear_superoperators(b);
    const Matrix bare = sup.l_plus[0] - sup.r_minus[0];
    CHECK(std::min(max_abs(Matrix(ladder.p_plus[0] - bare)), max_abs(Matrix(ladder.p_plus[0] + bare))) <= 1e-15);
}

TEST_CASE("ground states are annihilated on both sides") {
    const auto p = SystemParams::constant({0.1, 0.5}, {0.8, 0.1}, {0.7});
    const auto b = build_basis(2, 2);
    const auto ladder = build_ladder_operators(heff_spectrum(p), b);
    const auto g = ground_state(*b);
    const Matrix l = build_liouvillian(p, b, 0.0).s;
    CHECK(max_abs(Vector(l * g.right)) <= 1e-12);
    CHECK(max_abs(Vector(l.adjoint() * g.left)) <= 1e-12);
    CHECK(std::abs(g.left.dot(g.right) - 1.0) <= 1e-15);
    const auto cols = liouville_columns(*b, 1, 1);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(max_abs(Vector(ladder.p_minus[i] * g.right)) <= 1e-15);
        CHECK(max_abs(Vector(ladder.q_minus[i] * g.right)) <= 1e-15);
        const Eigen::RowVectorXcd lp = g.left.adjoint() * restrict_columns(ladder.p_plus[i], cols);
        const Eigen::RowVectorXcd lq = g.left.adjoint() * restrict_columns(ladder.q_plus[i], cols);
        CHECK(lp.cwiseAbs().maxCoeff() <= 1e-14);
        CHECK(lq.cwiseAbs().maxCoeff() <= 1e-14);
    }
}

TEST_CASE("ladder states are biorthonormal eigenstates of the Liouvillian") {
    const auto p = SystemParams::constant({0.3, -0.2}, {1.0, 0.2}, {1.0});
    const auto b = build_basis(2, 2);
    const auto ladder = build_ladder_operators(heff_spectrum(p), b);
    const Matrix l = build_liouvillian(p, b, 0.0).s;
    const auto idx = multi_indices(2, 2);
    CHECK(max_abs(Vector(ladder_state({0, 0}, {0, 0}, ladder, Side::right) - ground_state(*b).right)) <= 1e-15);
    CHECK(max_abs(Vector(ladder_state({0, 0}, {0, 0}, ladder, Side::left) - ground_state(*b).left)) <= 1e-15);
    for (const auto& a : idx) {
        for (const auto& c : idx) {
            const int order = a[0] + a[1] + c[0] + c[1];
            const Vector right = ladder_state(a, c, ladder, Side::right);
            CHECK(max_abs(Vector(l * right - ladder_exponent(a, c, ladder.spectrum) * right)) <= 1e-9);
            if (order > 2) continue;
            for (const auto& a2 : idx) {
                for (const auto& c2 : idx) {
                    if (a2[0] + a2[1] + c2[0] + c2[1] > 2) continue;
                    const cplx ip = ladder_state(a2, c2, ladder, Side::left).dot(right);
                    const double expected = (a == a2 && c == c2) ? 1.0 : 0.0;
                    CHECK(std::abs(ip - expected) <= 1e-9);
                }
            }
        }
    }
    CHECK_THROWS_AS(ladder_state({3, 0}, {0, 0}, ladder, Side::right), InvalidArgument);
}

TEST_CASE("overlaps resolve the initial state") {
    std::mt19937_64 rng(36);
    const auto p = SystemParams::constant({0.2, 0.0}, {0.6, 0.3}, {0.9});
    const auto b = build_basis(2, 2);
    const auto ladder = build_ladder_operators(heff_spectrum(p), b);
    const auto rho0 = testing::random_density(b, rng);
    CHECK(std::abs(overlap({0, 0}, {0, 0}, ladder, rho0) - 1.0) <= 1e-12);
    Vector sum = Vector::Zero(vectorize(rho0).size());
    for (const auto& a : multi_indices(2, 2)) {
        for (const auto& c : multi_indices(2, 2)) {
            const cplx w = overlap(a, c, ladder, rho0);
            CHECK(std::abs(w - ladder_state(a, c, ladder, Side::left).dot(vectorize(rho0))) <= 1e-14);
            sum += w * ladder_state(a, c, ladder, Side::right);
        }
    }
    CHECK(max_abs(Vector(sum - vectorize(rho0))) <= 1e-9);
    // an observable computed from the expansion
    const Matrix n1 = number_operator(b, 0).m;
    const cplx direct = hs_inner(n1, rho0.matrix());
    CHECK(std::abs(vectorize(n1).dot(sum) - direct) <= 1e-9);
}

TEST_CASE("a two-photon input only overlaps ladder states with at most two quanta") {
    const auto p = SystemParams::constant({0.0, 0.0}, {1.0, 0.0}, {1.0});
    const auto b = build_basis(2, 3);
    const auto ladder = build_ladder_operators(heff_spectrum(p), b);
    const auto rho0 = DensityMatrix::fock(b, {1, 1});
    for (const auto& a : multi_indices(2, 3)) {
        for (const auto& c : multi_indices(2, 3)) {
            if (a[0] + a[1] <= 2 && c[0] + c[1] <= 2) continue;
            CHECK(std::abs(overlap(a, c, ladder, rho0)) <= 1e-12);
        }
    }
}

TEST_CASE("eigendecomposition reconstructs the initial state and matches the oracle") {
    const auto p = SystemParams::constant({0.0, 0.0}, {1.0, 0.0}, {1.0});
    const auto b = build_basis(2, 2);
    const auto rho0 = DensityMatrix::fock(b, {1, 1});
    const auto g = grid(5.0, 51);
    const auto eig = evolve_eigendecomposition(p, rho0, g);
    const auto ora = integrate_master(p, rho0, g, IntegratorConfig{1e-11, 1e-13});
    CHECK(eig.metadata.solver == "eigen");
    CHECK(max_abs(Matrix(eig.states[0].matrix() - rho0.matrix())) <= 1e-9);
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(trace_distance(eig.states[i], ora.states[i]) <= 1e-8);
        CHECK(std::abs(eig.states[i].trace() - 1.0) <= 1e-9);
        CHECK(std::abs(coincidence(eig.states[i], 0, 1) - coincidence_closed_form(1.0, 1.0, g[i])) <= 1e-8);
    }
}

TEST_CASE("eigendecomposition equals the matrix exponential on random systems") {
    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 2);
        const std::size_t np = 1 + static_cast<std::size_t>((trial / 2) % 2);
        const auto p = well_conditioned(n, rng);
        const auto b = build_basis(n, np);
        const auto rho0 = testing::random_density(b, rng);
        const double t = testing::uniform(rng, 0.1, 3.0);
        const auto eig = evolve_eigendecomposition(p, rho0, {0.0, t});
        const auto expm = propagate_constant(build_liouvillian(p, b, 0.0), rho0, t);
        CHECK(trace_distance(eig.states[1], expm) <= 1e-8);
    }
}

TEST_CASE("adjoint action of the propagator scales ladder monomials") {
    const auto p = SystemParams::constant({0.2, -0.1}, {0.7, 0.2}, {0.8});
    const auto b = build_basis(2, 3);
    const auto ladder = build_ladder_operators(heff_spectrum(p), b);
    const Matrix l = build_liouvillian(p, b, 0.0).s;
    const double t = 0.9;
    const Matrix fwd = expm_scaled(l, t), bwd = expm_scaled(Matrix(-l), t);
    const auto cols = liouville_columns(*b, 1, 1);
    const auto& lam = ladder.spectrum.lambdas;
    for (const auto& a : multi_indices(2, 2)) {
        for (const auto& c : multi_indices(2, 2)) {
            if (a[0] + a[1] + c[0] + c[1] > 2) continue;
            const auto d2 = l.rows();
            Matrix mono = Matrix::Identity(d2, d2);
            for (int k = 0; k < 2; ++k) {
                for (int r = 0; r < a[static_cast<std::size_t>(k)]; ++r) mono = ladder.p_plus[static_cast<std::size_t>(k)] * mono;
                for (int r = 0; r < c[static_cast<std::size_t>(k)]; ++r) mono = ladder.q_plus[static_cast<std::size_t>(k)] * mono;
            }
            cplx mu = 0.0;
            for (std::size_t k = 0; k < 2; ++k) mu += double(a[k]) * lam[k] + double(c[k]) * std::conj(lam[k]);
            const Matrix lhs = restrict_columns(Matrix(fwd * mono * bwd), cols);
            const Matrix rhs = std::exp(t * mu) * restrict_columns(mono, cols);
            CHECK(max_abs(Matrix(lhs - rhs)) <= 1e-8);
        }
    }
}

TEST_CASE("postselected dynamics is generated by the effective Hamiltonian") {
    std::mt19937_64 rng(38);
    for (int trial = 0; trial < 5; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 2);
        const auto p = testing::random_params(n, rng, 1.5);
        const auto b = build_basis(n, 2);
        const auto rho0 = testing::random_density(b, rng);
        const double t = testing::uniform(rng, 0.2, 3.0);
        const auto ora = integrate_master(p, rho0, {0.0, t}, IntegratorConfig{1e-12, 1e-14});
        const auto [lo, hi] = b->layer_range(2);
        const auto off = static_cast<Eigen::Index>(lo), len = static_cast<Eigen::Index>(hi - lo);
        const Matrix block = ora.states[1].matrix().block(off, off, len, len);
        CHECK(trace_distance(block, evolve_top_layer(p, rho0, t)) <= 1e-8);
    }
}

TEST_CASE("closed-form coincidence") {
    for (double t : {0.0, 0.3, 0.785, 1.4, 2.0}) {
        CHECK(std::abs(coincidence_closed_form(1.0, 0.0, t) - std::pow(std::cos(2.0 * t), 2)) <= 1e-14);
    }
    CHECK(coincidence_closed_form(1.0, 0.0, testing::kPi / 4.0) <= 1e-30);
    const double root = std::acos(0.25) / std::sqrt(3.0);
    CHECK(root == doctest::Approx(0.76100).epsilon(1e-5));
    CHECK(coincidence_closed_form(1.0, 1.0, root) <= 1e-28);
    // gamma = 2 kappa: limit e^{-2 gamma t} (1 - 2 kappa^2 t^2)^2
    for (double t : {0.1, 0.5, 0.7, 1.3}) {
        const double limit = std::exp(-4.0 * t) * std::pow(1.0 - 2.0 * t * t, 2);
        CHECK(std::abs(coincidence_closed_form(1.0, 2.0, t) - limit) <= 1e-12);
        CHECK(std::abs(coincidence_closed_form(1.0, 2.0 - 1e-7, t) - limit) <= 1e-6);
        CHECK(std::abs(coincidence_closed_form(1.0, 2.0 + 1e-7, t) - limit) <= 1e-6);
    }
    for (double g : {0.0, 0.5, 1.9, 2.0, 3.0}) {
        for (double t : {0.2, 1.0, 4.0}) CHECK(coincidence_closed_form(1.0, g, t) >= 0.0);
    }
}

TEST_CASE("coincidence dip positions") {
    CHECK(std::abs(hom_dip(1.0, 0.0).t_dip - testing::kPi / 4.0) <= 1e-10);
    CHECK(std::abs(hom_dip(1.0, 1.0).t_dip - std::acos(0.25) / std::sqrt(3.0)) <= 1e-10);
    const auto near = hom_dip(1.0, 1.999999);
    CHECK(near.t_dip == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-3));
    CHECK(near.pt_unbroken);
    CHECK(std::abs(hom_dip(2.0, 0.0).t_dip - testing::kPi / 8.0) <= 1e-10);
    const auto broken = hom_dip(1.0, 2.5);
    CHECK_FALSE(broken.pt_unbroken);
    CHECK(hom_dip(1.0, 1.0).gamma_min <= 1e-20);
    CHECK_THROWS_AS(hom_dip(0.0, 1.0), InvalidArgument);
}
