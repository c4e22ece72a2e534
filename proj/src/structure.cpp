#include "lossyosc/structure.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include <Eigen/SVD>

#include "lossyosc/errors.hpp"
#include "lossyosc/liouville.hpp"
#include "lossyosc/weinorman.hpp"

namespace lossyosc {

namespace {

constexpr double kRankCut = 1e-8;
constexpr double kAmbiguityBand = 100.0;

struct Split {
    Matrix range;  // orthonormal columns
    Matrix null;   // orthonormal columns
};

Split rank_split(const Matrix& m, const char* what) {
    Split out;
    if (m.cols() == 0) {
        out.range = Matrix::Zero(m.rows(), 0);
        out.null = Matrix::Zero(0, 0);
        return out;
    }
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double smax = s.size() > 0 ? s(0) : 0.0;
    Eigen::Index r = 0;
    if (smax > 0.0) {
        const double cut = kRankCut * smax;
        for (Eigen::Index i = 0; i < s.size(); ++i) {
            if (s(i) > cut / kAmbiguityBand && s(i) < cut * kAmbiguityBand) {
                throw AlgebraError(std::string("ambiguous numerical rank in ") + what +
                                   " (singular value " + std::to_string(s(i)) + " near cut " +
                                   std::to_string(cut) + ")");
            }
            if (s(i) > cut) ++r;
        }
    }
    out.range = svd.matrixU().leftCols(r);
    out.null = svd.matrixV().rightCols(m.cols() - r);
    return out;
}

Matrix orthonormal_span(const Matrix& columns, const char* what) {
    return rank_split(columns, what).range;
}

Matrix intersection(const Matrix& a, const Matrix& b, const char* what) {
    if (a.cols() == 0 || b.cols() == 0) return Matrix::Zero(a.rows(), 0);
    Matrix stacked(a.rows(), a.cols() + b.cols());
    stacked << a, -b;
    const Matrix null = rank_split(stacked, what).null;
    return orthonormal_span(a * null.topRows(a.cols()), what);
}

// Distance of v from span(q) for orthonormal q.
double outside(const Vector& v, const Matrix& q) {
    if (q.cols() == 0) return v.norm();
    return (v - q * (q.adjoint() * v)).norm();
}

Matrix commutator_span(const StructureTensor& t, const Matrix& a, const Matrix& b) {
    Matrix cols(static_cast<Eigen::Index>(t.dim), a.cols() * b.cols());
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < a.cols(); ++i) {
        for (Eigen::Index j = 0; j < b.cols(); ++j) cols.col(k++) = t.bracket(a.col(i), b.col(j));
    }
    return cols;
}

double hs(const SparseMatrix& a, const SparseMatrix& b) {
    return std::real(a.conjugate().cwiseProduct(b).sum());
}

cplx hs_complex(const SparseMatrix& a, const SparseMatrix& b) {
    return a.conjugate().cwiseProduct(b).sum();
}

}  // namespace

std::size_t AlgebraBasis::index(ElementKind kind, std::size_t i, std::size_t j) const {
    if (i >= n_modes || j >= n_modes) throw InvalidArgument("algebra index out of range");
    const std::size_t block = kind == ElementKind::left_quadratic    ? 0
                              : kind == ElementKind::right_quadratic ? 1
                                                                     : 2;
    return block * n_modes * n_modes + i * n_modes + j;
}

AlgebraBasis quadratic_basis(std::size_t n_modes) {
    if (n_modes == 0) throw InvalidArgument("algebra needs at least one mode");
    AlgebraBasis out;
    out.n_modes = n_modes;
    out.fock = build_basis(n_modes, 2);
    const LinearSupers s = build_linear_superoperators(out.fock);
    auto push = [&](ElementKind kind, std::size_t i, std::size_t j, const Matrix& m,
                    std::string label) {
        out.elements.push_back({kind, i, j, std::move(label)});
        out.matrices.push_back(m.sparseView());
    };
    auto one = [](std::size_t k) { return std::to_string(k + 1); };
    for (std::size_t i = 0; i < n_modes; ++i) {
        for (std::size_t j = 0; j < n_modes; ++j) {
            push(ElementKind::left_quadratic, i, j, s.l_plus[i] * s.l_minus[j],
                 "L" + one(i) + "+L" + one(j) + "-");
        }
    }
    for (std::size_t i = 0; i < n_modes; ++i) {
        for (std::size_t j = 0; j < n_modes; ++j) {
            push(ElementKind::right_quadratic, i, j, s.r_plus[i] * s.r_minus[j],
                 "R" + one(i) + "+R" + one(j) + "-");
        }
    }
    for (std::size_t i = 0; i < n_modes; ++i) {
        for (std::size_t j = 0; j < n_modes; ++j) {
            push(ElementKind::loss, i, j, s.l_minus[i] * s.r_minus[j],
                 "L" + one(i) + "-R" + one(j) + "-");
        }
    }
    return out;
}

Vector StructureTensor::bracket(const Vector& x, const Vector& y) const {
    Vector out = Vector::Zero(static_cast<Eigen::Index>(dim));
    for (std::size_t a = 0; a < dim; ++a) {
        const cplx xa = x(static_cast<Eigen::Index>(a));
        if (xa != cplx{}) out += xa * (ad[a] * y);
    }
    return out;
}

cplx StructureTensor::killing_form(const Vector& x, const Vector& y) const {
    return x.transpose() * killing * y;
}

StructureTensor structure_constants(const AlgebraBasis& basis) {
    const std::size_t n = basis.dimension();
    const auto ni = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd gram(ni, ni);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                hs(basis.matrices[i], basis.matrices[j]);
        }
    }
    const Eigen::LDLT<Eigen::MatrixXd> gram_solver(gram);

    StructureTensor t;
    t.dim = n;
    t.n_modes = basis.n_modes;
    for (const auto& e : basis.elements) t.labels.push_back(e.label);
    t.ad.assign(n, Matrix::Zero(ni, ni));
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            const SparseMatrix y = basis.matrices[a] * basis.matrices[b] -
                                   basis.matrices[b] * basis.matrices[a];
            if (y.nonZeros() == 0) continue;
            Vector rhs(ni);
            for (std::size_t k = 0; k < n; ++k) {
                rhs(static_cast<Eigen::Index>(k)) = hs_complex(basis.matrices[k], y);
            }
            const Vector x = gram_solver.solve(rhs.real()).cast<cplx>() +
                             cplx(0.0, 1.0) * gram_solver.solve(rhs.imag()).cast<cplx>();
            SparseMatrix rebuilt(y.rows(), y.cols());
            for (std::size_t k = 0; k < n; ++k) {
                const cplx xk = x(static_cast<Eigen::Index>(k));
                if (std::abs(xk) > 0.0) rebuilt += xk * basis.matrices[k];
            }
            const double ynorm = y.norm();
            const double res = (y - rebuilt).norm() / std::max(1.0, ynorm);
            t.closure_residual = std::max(t.closure_residual, res);
            if (res > kClosureTol) {
                throw AlgebraError("commutator [" + basis.elements[a].label + ", " +
                                   basis.elements[b].label + "] leaves the span (residual " +
                                   std::to_string(res) + ")");
            }
            for (std::size_t k = 0; k < n; ++k) {
                const cplx c = x(static_cast<Eigen::Index>(k));
                t.ad[a](static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(b)) = c;
                t.ad[b](static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(a)) = -c;
            }
        }
    }
    t.killing.resize(ni, ni);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a; b < n; ++b) {
            const cplx k = (t.ad[a] * t.ad[b]).trace();
            t.killing(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = k;
            t.killing(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = k;
        }
    }
    t.jacobi_residual = jacobi_residual(t);
    return t;
}

double jacobi_residual(const StructureTensor& t) {
    const auto n = static_cast<Eigen::Index>(t.dim);
    double worst = 0.0;
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = a + 1; b < n; ++b) {
            const Vector ab = t.ad[static_cast<std::size_t>(a)].col(b);
            for (Eigen::Index c = b + 1; c < n; ++c) {
                const Vector bc = t.ad[static_cast<std::size_t>(b)].col(c);
                const Vector ca = t.ad[static_cast<std::size_t>(c)].col(a);
                Vector sum = Vector::Zero(n);
                for (Eigen::Index d = 0; d < n; ++d) {
                    const auto& adc = t.ad[static_cast<std::size_t>(d)];
                    sum += ab(d) * adc.col(c) + bc(d) * adc.col(a) + ca(d) * adc.col(b);
                }
                worst = std::max(worst, sum.cwiseAbs().maxCoeff());
            }
        }
    }
    return worst;
}

std::size_t numerical_rank(const Matrix& m, const char* what) {
    return static_cast<std::size_t>(rank_split(m, what).range.cols());
}

RadicalInfo radical(const StructureTensor& t) {
    const auto n = static_cast<Eigen::Index>(t.dim);
    Matrix all(n, n * (n - 1) / 2);
    Eigen::Index k = 0;
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = a + 1; b < n; ++b) all.col(k++) = t.ad[static_cast<std::size_t>(a)].col(b);
    }
    RadicalInfo out;
    out.derived = orthonormal_span(all, "derived algebra");
    if (out.derived.cols() == 0) {
        out.radical = Matrix::Identity(n, n);
    } else {
        const Matrix pairing = out.derived.transpose() * t.killing;
        out.radical = rank_split(pairing, "radical").null;
        out.radical = orthonormal_span(out.radical, "radical");
    }
    out.nilpotent = intersection(out.radical, out.derived, "nilpotent part");
    out.abelian_dim = static_cast<std::size_t>(out.radical.cols() - out.nilpotent.cols());
    for (Eigen::Index c = 0; c < out.radical.cols(); ++c) {
        Eigen::Index big = 0;
        out.radical.col(c).cwiseAbs().maxCoeff(&big);
        out.tags.push_back(t.labels[static_cast<std::size_t>(big)]);
    }
    return out;
}

DecompositionReport classify_semisimple(const StructureTensor& t, const RadicalInfo& rad) {
    const auto n = static_cast<Eigen::Index>(t.dim);
    const auto nn = static_cast<Eigen::Index>(t.n_modes * t.n_modes);
    DecompositionReport r;
    r.n_modes = t.n_modes;
    r.total = t.dim;
    r.nilpotent = static_cast<std::size_t>(rad.nilpotent.cols());
    r.abelian = rad.abelian_dim;
    r.closure_residual = t.closure_residual;
    r.jacobi_residual = t.jacobi_residual;
    r.radical_tags = rad.tags;
    r.killing_rank = numerical_rank(t.killing, "Killing form");

    const Matrix identity = Matrix::Identity(n, n);
    const Matrix left = intersection(rad.derived, identity.leftCols(nn), "left ideal");
    const Matrix right = intersection(rad.derived, identity.middleCols(nn, nn), "right ideal");
    r.sl_left = static_cast<std::size_t>(left.cols());
    r.sl_right = static_cast<std::size_t>(right.cols());

    // The two ideals commute with each other and are closed.
    for (Eigen::Index i = 0; i < left.cols(); ++i) {
        for (Eigen::Index j = 0; j < right.cols(); ++j) {
            r.ideal_commutator =
                std::max(r.ideal_commutator, t.bracket(left.col(i), right.col(j)).norm());
        }
    }
    double closure = 0.0;
    for (const Matrix* ideal : {&left, &right}) {
        const Matrix comm = commutator_span(t, *ideal, *ideal);
        for (Eigen::Index c = 0; c < comm.cols(); ++c) {
            closure = std::max(closure, outside(comm.col(c), *ideal));
        }
    }
    if (closure > 1e-9 || r.ideal_commutator > 1e-9) {
        throw AlgebraError("left/right semisimple parts are not commuting ideals");
    }

    // Traceless as gl(N) matrices: sum of the diagonal L+_i L-_i coefficients.
    const auto nm = static_cast<Eigen::Index>(t.n_modes);
    for (Eigen::Index c = 0; c < left.cols(); ++c) {
        cplx tr = 0.0;
        for (Eigen::Index i = 0; i < nm; ++i) tr += left(i * nm + i, c);
        r.trace_residual = std::max(r.trace_residual, std::abs(tr));
    }
    for (Eigen::Index c = 0; c < right.cols(); ++c) {
        cplx tr = 0.0;
        for (Eigen::Index i = 0; i < nm; ++i) tr += right(nn + i * nm + i, c);
        r.trace_residual = std::max(r.trace_residual, std::abs(tr));
    }

    const std::size_t sl_dim = t.n_modes * t.n_modes - 1;
    if (r.sl_left != sl_dim || r.sl_right != sl_dim) {
        throw AlgebraError("semisimple ideals have dimensions " + std::to_string(r.sl_left) +
                           " and " + std::to_string(r.sl_right) + ", expected " +
                           std::to_string(sl_dim));
    }
    if (r.sl_left > 0) {
        r.killing_rank_left =
            numerical_rank(Matrix(left.transpose() * t.killing * left), "left Killing form");
        r.killing_rank_right =
            numerical_rank(Matrix(right.transpose() * t.killing * right), "right Killing form");
        if (r.killing_rank_left != r.sl_left || r.killing_rank_right != r.sl_right) {
            throw AlgebraError("Killing form restricted to a semisimple ideal is degenerate");
        }
    }
    if (r.nilpotent + r.abelian + r.sl_left + r.sl_right != r.total) {
        throw AlgebraError("decomposition dimensions do not add up to " + std::to_string(r.total));
    }

    // The radical is an ideal.
    for (Eigen::Index c = 0; c < rad.radical.cols(); ++c) {
        for (Eigen::Index a = 0; a < n; ++a) {
            const Vector v = t.ad[static_cast<std::size_t>(a)] * rad.radical.col(c);
            r.radical_ideal_residual = std::max(r.radical_ideal_residual, outside(v, rad.radical));
        }
    }

    // Derived series of the radical.
    Matrix current = rad.radical;
    while (current.cols() > 0 && r.derived_series_length < 8) {
        current = orthonormal_span(commutator_span(t, current, current), "derived series");
        ++r.derived_series_length;
    }
    if (current.cols() > 0) throw AlgebraError("radical is not solvable");
    return r;
}

DecompositionReport analyze_structure(std::size_t n_modes) {
    const StructureTensor t = structure_constants(quadratic_basis(n_modes));
    return classify_semisimple(t, radical(t));
}

Vector semisimple_element(const StructureTensor& t, const SystemParams& params, double time) {
    if (t.n_modes != 2) throw InvalidArgument("semisimple element is defined for two modes");
    const WNSplit w = split_liouvillian(params, time);
    Vector z = Vector::Zero(static_cast<Eigen::Index>(t.dim));
    z(0) = w.c0;        // L1+L1-
    z(3) = -w.c0;       // L2+L2-
    z(1) = w.c_plus;    // L1+L2-
    z(2) = w.c_minus;   // L2+L1-
    return z;
}

cplx killing_norm_semisimple(const StructureTensor& t, const SystemParams& params, double time) {
    const Vector z = semisimple_element(t, params, time);
    return t.killing_form(z, z);
}

cplx killing_norm_semisimple(const SystemParams& params, double time) {
    static const StructureTensor t = structure_constants(quadratic_basis(2));
    return killing_norm_semisimple(t, params, time);
}

std::string decomposition_text(const DecompositionReport& r) {
    std::ostringstream os;
    os << "quadratic superoperator algebra, N = " << r.n_modes << "\n"
       << "  dimension           " << r.total << "\n"
       << "  radical             " << r.nilpotent + r.abelian << " = " << r.nilpotent
       << " nilpotent (L-R- loss terms) + " << r.abelian << " abelian\n"
       << "  semisimple          " << r.sl_left + r.sl_right << " = sl(" << r.n_modes
       << ",C) left [" << r.sl_left << "] + sl(" << r.n_modes << ",C) right [" << r.sl_right
       << "]\n"
       << "  Killing rank        " << r.killing_rank << " (left ideal " << r.killing_rank_left
       << ", right ideal " << r.killing_rank_right << ")\n"
       << "  derived series      terminates after " << r.derived_series_length << " steps\n"
       << "  closure residual    " << r.closure_residual << "\n"
       << "  Jacobi residual     " << r.jacobi_residual << "\n";
    return os.str();
}

}  // namespace lossyosc
