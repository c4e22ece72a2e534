#include "lossyosc/oracle.hpp"

#include <cmath>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "lossyosc/errors.hpp"

namespace lossyosc {

namespace {

constexpr double kMaxExponentNorm = 1e6;

}  // namespace

void validate_time_grid(const std::vector<double>& t_grid) {
    if (t_grid.empty()) throw InvalidArgument("time grid is empty");
    if (t_grid.front() != 0.0) throw InvalidArgument("time grid must start at 0");
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (!std::isfinite(t_grid[i])) throw InvalidArgument("time grid contains a non-finite value");
        if (i > 0 && !(t_grid[i] > t_grid[i - 1])) {
            throw InvalidArgument("time grid must be strictly increasing");
        }
    }
}

DensityMatrix sample_state(const Vector& v, const BasisPtr& basis, TrajectoryMetadata& meta) {
    if (!v.allFinite()) throw NumericalFailure("propagated state contains NaN/Inf");
    const Matrix m = devectorize(v, basis->dimension());
    const double residual = (m - m.adjoint()).cwiseAbs().maxCoeff();
    meta.max_hermiticity_residual = std::max(meta.max_hermiticity_residual, residual);
    return DensityMatrix(basis, m, kEvolvedHermiticityTol);
}

Trajectory integrate_master(const SystemParams& params, const DensityMatrix& rho0,
                            const std::vector<double>& t_grid, const IntegratorConfig& config) {
    config.validate();
    validate_time_grid(t_grid);
    const BasisPtr& basis = rho0.basis_ptr();
    LiouvillianAssembler assembler(params, basis);

    Trajectory out;
    out.metadata.solver = "oracle";
    out.metadata.rtol = config.rtol;
    out.metadata.atol = config.atol;
    out.times = t_grid;
    out.states.reserve(t_grid.size());
    out.states.push_back(rho0);
    if (t_grid.size() == 1) return out;

    std::size_t next = 1;
    auto rhs = [&](double t, const Vector& y) -> Vector { return assembler.at(t) * y; };
    auto observe = [&](const DenseStep& step) {
        const bool final_step = step.t1() >= t_grid.back();
        while (next < t_grid.size() && (t_grid[next] <= step.t1() || final_step)) {
            const double t = t_grid[next];
            const Vector v = t == step.t1() ? Vector(step.r1 + step.r2) : step.value(t);
            out.states.push_back(sample_state(v, basis, out.metadata));
            ++next;
        }
    };
    const StepStats stats = integrate_dopri5(rhs, 0.0, vectorize(rho0), t_grid.back(),
                                             params.breakpoints(t_grid.back()), config, observe);
    out.metadata.accepted_steps = stats.accepted;
    out.metadata.rejected_steps = stats.rejected;
    out.metadata.rhs_evaluations = stats.rhs_evaluations;
    return out;
}

Matrix expm_scaled(const Matrix& l, double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("propagation time must be >= 0");
    if (l.rows() != l.cols()) throw InvalidArgument("matrix exponential needs a square matrix");
    const double norm = t * l.cwiseAbs().colwise().sum().maxCoeff();
    if (!std::isfinite(norm) || norm > kMaxExponentNorm) {
        throw NumericalFailure("matrix exponential argument too large (t*||L||_1 = " +
                               std::to_string(norm) + ")");
    }
    const Matrix e = (t * l).exp();
    if (!e.allFinite()) throw NumericalFailure("matrix exponential overflowed");
    return e;
}

DensityMatrix propagate_constant(const Superoperator& l, const DensityMatrix& rho0, double t) {
    const auto d = static_cast<Eigen::Index>(rho0.dimension());
    if (l.s.rows() != d * d || l.s.cols() != d * d) {
        throw InvalidArgument("Liouvillian and density matrix dimensions differ");
    }
    if (t == 0.0) return rho0;
    TrajectoryMetadata meta;
    return sample_state(expm_scaled(l.s, t) * vectorize(rho0), rho0.basis_ptr(), meta);
}

}  // namespace lossyosc
