#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "lossyosc/fock.hpp"
#include "lossyosc/system_params.hpp"

namespace lossyosc {

using SparseMatrix = Eigen::SparseMatrix<cplx>;

enum class ElementKind { left_quadratic, right_quadratic, loss };

/// One quadratic superoperator: L+_i L-_j, R+_i R-_j or L-_i R-_j
/// (zero-based i, j).
struct AlgebraElement {
    ElementKind kind;
    std::size_t i, j;
    std::string label;  ///< one-based, e.g. "L1+L2-"
};

/// The 3N^2 quadratic superoperators, in the order L+_i L-_j, R+_i R-_j,
/// L-_i R-_j with (i, j) row-major, represented on FockBasis(N, 2).
struct AlgebraBasis {
    std::size_t n_modes = 0;
    BasisPtr fock;
    std::vector<AlgebraElement> elements;
    std::vector<SparseMatrix> matrices;

    std::size_t dimension() const noexcept { return elements.size(); }
    /// Index of the element with the given kind and modes.
    std::size_t index(ElementKind kind, std::size_t i, std::size_t j) const;
};

AlgebraBasis quadratic_basis(std::size_t n_modes);

/// Structure constants [X_a, X_b] = sum_c C_ab^c X_c stored as the matrices
/// of ad_{X_a}: ad[a](c, b) = C_ab^c.
struct StructureTensor {
    std::size_t dim = 0;
    std::vector<Matrix> ad;
    Matrix killing;  ///< K_ab = Tr(ad_a ad_b)
    double closure_residual = 0.0;
    double jacobi_residual = 0.0;
    std::vector<std::string> labels;
    std::size_t n_modes = 0;

    cplx c(std::size_t a, std::size_t b, std::size_t k) const {
        return ad[a](static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(b));
    }
    /// Coefficients of [x, y] for coefficient vectors x, y.
    Vector bracket(const Vector& x, const Vector& y) const;
    /// (x, y)_CK = x^T K y, the complex bilinear Killing form.
    cplx killing_form(const Vector& x, const Vector& y) const;
};

inline constexpr double kClosureTol = 1e-10;

/// Throws AlgebraError when a commutator leaves the span.
StructureTensor structure_constants(const AlgebraBasis& basis);

/// Max |[[a,b],c] + [[b,c],a] + [[c,a],b]| over all triples.
double jacobi_residual(const StructureTensor& tensor);

/// Orthonormal bases (columns in coefficient space) of the derived algebra,
/// the radical and its nilpotent part.
struct RadicalInfo {
    Matrix derived;
    Matrix radical;
    Matrix nilpotent;
    std::vector<std::string> tags;  ///< dominant element of each radical column
    std::size_t abelian_dim = 0;
};

/// Radical as the Killing-orthogonal complement of [g, g]. Numerical rank
/// uses a cut at 1e-8 of the largest singular value and throws AlgebraError
/// when a singular value is within two decades of the cut.
RadicalInfo radical(const StructureTensor& tensor);

struct DecompositionReport {
    std::size_t n_modes = 0;
    std::size_t total = 0, nilpotent = 0, abelian = 0, sl_left = 0, sl_right = 0;
    double closure_residual = 0.0;
    double jacobi_residual = 0.0;
    double ideal_commutator = 0.0;      ///< max |[sl_left, sl_right]|
    double radical_ideal_residual = 0.0;
    double trace_residual = 0.0;        ///< largest gl(N) trace of an sl basis element
    std::size_t derived_series_length = 0;
    std::size_t killing_rank = 0;
    std::size_t killing_rank_left = 0, killing_rank_right = 0;
    std::vector<std::string> radical_tags;
};

/// Splits the semisimple complement into left and right ideals and checks
/// that each is a copy of sl(N, C). Throws AlgebraError on failure.
DecompositionReport classify_semisimple(const StructureTensor& tensor, const RadicalInfo& rad);

/// Full pipeline for N modes.
DecompositionReport analyze_structure(std::size_t n_modes);

/// Coefficient vector of the left semisimple generator
/// c0 (L+_1L-_1 - L+_2L-_2) + c+ L+_1L-_2 + c- L+_2L-_1 for two modes.
Vector semisimple_element(const StructureTensor& tensor, const SystemParams& params, double t);

/// (Z, Z)_CK for Z the left semisimple generator of a two-mode system.
cplx killing_norm_semisimple(const StructureTensor& tensor, const SystemParams& params,
                             double t);
cplx killing_norm_semisimple(const SystemParams& params, double t);

/// Rank of a matrix with the module's ambiguity rule.
std::size_t numerical_rank(const Matrix& m, const char* what);

std::string decomposition_text(const DecompositionReport& report);

}  // namespace lossyosc
