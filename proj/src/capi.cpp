#include "lossyosc/lossyosc.h"

#include <cmath>
#include <cstring>
#include <memory>
#include <exception>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "lossyosc/eigensolver.hpp"
#include "lossyosc/errors.hpp"
#include "lossyosc/oracle.hpp"
#include "lossyosc/reports.hpp"
#include "lossyosc/structure.hpp"
#include "lossyosc/weinorman.hpp"

using namespace lossyosc;

struct lo_system {
    std::size_t modes;
    BasisPtr basis;
    std::vector<Schedule> sigma, gamma, kappa;
    std::optional<IntegratorConfig> tolerances;
    std::vector<std::pair<double, Occupation>> terms;
    std::optional<Matrix> density;
};

struct lo_trajectory {
    Trajectory t;
};

namespace {

thread_local std::string last_error;

template <class F>
lo_status guarded(F&& f) {
    try {
        f();
        last_error.clear();
        return LO_OK;
    } catch (const InvalidArgument& e) {
        last_error = e.what();
        return LO_ERR_INVALID;
    } catch (const ExceptionalPointError& e) {
        last_error = e.what();
        return LO_ERR_EXCEPTIONAL_POINT;
    } catch (const FactorizationSingularity& e) {
        last_error = e.what();
        return LO_ERR_SINGULAR_FACTORIZATION;
    } catch (const IntegrationFailure& e) {
        last_error = e.what();
        return LO_ERR_INTEGRATION;
    } catch (const AlgebraError& e) {
        last_error = e.what();
        return LO_ERR_ALGEBRA;
    } catch (const NumericalFailure& e) {
        last_error = e.what();
        return LO_ERR_NUMERICAL;
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return LO_ERR_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return LO_ERR_INTERNAL;
    } catch (...) {
        last_error = "unknown error";
        return LO_ERR_INTERNAL;
    }
}

void require(bool ok, const char* what) {
    if (!ok) throw InvalidArgument(what);
}

std::vector<Schedule>& group(lo_system* s, lo_param which) {
    switch (which) {
        case LO_SIGMA: return s->sigma;
        case LO_GAMMA: return s->gamma;
        case LO_KAPPA: return s->kappa;
    }
    throw InvalidArgument("unknown parameter selector");
}

const DensityMatrix& state_at(const lo_trajectory* t, std::size_t i) {
    require(t != nullptr, "null trajectory");
    require(i < t->t.states.size(), "sample index out of range");
    return t->t.states[i];
}

char* copy_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

DensityMatrix initial_state(const lo_system* s) {
    if (s->density) return DensityMatrix(s->basis, *s->density);
    require(!s->terms.empty(), "initial state is not set");
    return DensityMatrix::mixture(s->basis, s->terms);
}

}  // namespace

extern "C" {

const char* lo_version(void) { return "1.0.0"; }

const char* lo_last_error(void) { return last_error.c_str(); }

const char* lo_status_name(lo_status status) {
    switch (status) {
        case LO_OK: return "ok";
        case LO_ERR_INVALID: return "invalid_argument";
        case LO_ERR_NUMERICAL: return "numerical_failure";
        case LO_ERR_EXCEPTIONAL_POINT: return "exceptional_point";
        case LO_ERR_SINGULAR_FACTORIZATION: return "factorization_singularity";
        case LO_ERR_INTEGRATION: return "integration_failure";
        case LO_ERR_ALGEBRA: return "algebra_error";
        case LO_ERR_INTERNAL: return "internal_error";
    }
    return "unknown";
}

int lo_exit_code(lo_status status) {
    if (status == LO_OK) return 0;
    if (status == LO_ERR_INVALID) return 1;
    return 2;
}

lo_status lo_system_create(size_t modes, size_t max_total, lo_system** out) {
    return guarded([&] {
        require(out != nullptr, "null output pointer");
        *out = nullptr;
        require(modes >= 1, "system needs at least one mode");
        auto* s = new lo_system{modes, build_basis(modes, max_total),
                                std::vector<Schedule>(modes), std::vector<Schedule>(modes),
                                std::vector<Schedule>(modes - 1), std::nullopt, {}, std::nullopt};
        *out = s;
    });
}

void lo_system_destroy(lo_system* system) { delete system; }

lo_status lo_system_dimension(const lo_system* system, size_t* out) {
    return guarded([&] {
        require(system && out, "null argument");
        *out = system->basis->dimension();
    });
}

lo_status lo_system_set_constant(lo_system* system, lo_param which, size_t index, double value) {
    return guarded([&] {
        require(system != nullptr, "null system");
        auto& g = group(system, which);
        require(index < g.size(), "parameter index out of range");
        g[index] = Schedule(value);
    });
}

lo_status lo_system_set_schedule(lo_system* system, lo_param which, size_t index,
                                 const double* times, const double* values, size_t n) {
    return guarded([&] {
        require(system && times && values, "null argument");
        auto& g = group(system, which);
        require(index < g.size(), "parameter index out of range");
        g[index] = Schedule(std::vector<double>(times, times + n),
                            std::vector<double>(values, values + n));
    });
}

lo_status lo_system_set_tolerances(lo_system* system, double rtol, double atol) {
    return guarded([&] {
        require(system != nullptr, "null system");
        IntegratorConfig c;
        c.rtol = rtol;
        c.atol = atol;
        c.validate();
        system->tolerances = c;
    });
}

lo_status lo_system_add_initial_term(lo_system* system, double weight, const int* occupations) {
    return guarded([&] {
        require(system && occupations, "null argument");
        Occupation n(occupations, occupations + system->modes);
        require(system->basis->contains(n), "occupation outside the truncated space");
        require(weight >= 0.0 && std::isfinite(weight), "weights must be nonnegative");
        system->density.reset();
        system->terms.emplace_back(weight, std::move(n));
    });
}

lo_status lo_system_clear_initial(lo_system* system) {
    return guarded([&] {
        require(system != nullptr, "null system");
        system->terms.clear();
        system->density.reset();
    });
}

lo_status lo_system_set_initial_density(lo_system* system, const double* re, const double* im) {
    return guarded([&] {
        require(system && re && im, "null argument");
        const auto d = static_cast<Eigen::Index>(system->basis->dimension());
        Matrix m(d, d);
        for (Eigen::Index k = 0; k < d * d; ++k) m.data()[k] = cplx(re[k], im[k]);
        DensityMatrix rho(system->basis, m);
        rho.require_physical();
        system->terms.clear();
        system->density = rho.matrix();
    });
}

lo_status lo_evolve(const lo_system* system, lo_solver solver, const double* times,
                    size_t n_times, lo_trajectory** out) {
    return guarded([&] {
        require(system && out, "null argument");
        *out = nullptr;
        require(times != nullptr || n_times == 0, "null time grid");
        const std::vector<double> grid(times, times + n_times);
        const SystemParams params(system->sigma, system->gamma, system->kappa);
        const DensityMatrix rho0 = initial_state(system);
        auto traj = std::make_unique<lo_trajectory>();
        switch (solver) {
            case LO_SOLVER_ORACLE:
                traj->t = integrate_master(params, rho0, grid, system->tolerances.value_or(IntegratorConfig{}));
                break;
            case LO_SOLVER_EIGEN:
                traj->t = evolve_eigendecomposition(params, rho0, grid);
                break;
            case LO_SOLVER_WEINORMAN:
                traj->t = evolve_weinorman(params, rho0, grid,
                                           system->tolerances.value_or(IntegratorConfig{1e-12, 1e-14}));
                break;
            default:
                throw InvalidArgument("unknown solver");
        }
        *out = traj.release();
    });
}

void lo_trajectory_destroy(lo_trajectory* trajectory) { delete trajectory; }

size_t lo_trajectory_size(const lo_trajectory* trajectory) {
    return trajectory ? trajectory->t.times.size() : 0;
}

lo_status lo_trajectory_time(const lo_trajectory* t, size_t i, double* out) {
    return guarded([&] {
        state_at(t, i);
        require(out != nullptr, "null output");
        *out = t->t.times[i];
    });
}

lo_status lo_trajectory_trace(const lo_trajectory* t, size_t i, double* out) {
    return guarded([&] {
        const DensityMatrix& rho = state_at(t, i);
        require(out != nullptr, "null output");
        *out = rho.trace();
    });
}

lo_status lo_trajectory_purity(const lo_trajectory* t, size_t i, double* out) {
    return guarded([&] {
        const DensityMatrix& rho = state_at(t, i);
        require(out != nullptr, "null output");
        *out = rho.purity();
    });
}

lo_status lo_trajectory_number(const lo_trajectory* t, size_t i, size_t mode, double* out) {
    return guarded([&] {
        const DensityMatrix& rho = state_at(t, i);
        require(out != nullptr, "null output");
        *out = number_expectation(rho, mode);
    });
}

lo_status lo_trajectory_coincidence(const lo_trajectory* t, size_t i, size_t mode_i,
                                    size_t mode_j, double* out) {
    return guarded([&] {
        const DensityMatrix& rho = state_at(t, i);
        require(out != nullptr, "null output");
        *out = coincidence(rho, mode_i, mode_j);
    });
}

lo_status lo_trajectory_density(const lo_trajectory* t, size_t i, double* re, double* im) {
    return guarded([&] {
        const DensityMatrix& rho = state_at(t, i);
        require(re && im, "null output");
        const Matrix& m = rho.matrix();
        for (Eigen::Index k = 0; k < m.size(); ++k) {
            re[k] = m.data()[k].real();
            im[k] = m.data()[k].imag();
        }
    });
}

lo_status lo_trace_distance_max(const lo_trajectory* a, const lo_trajectory* b, double* out) {
    return guarded([&] {
        require(a && b && out, "null argument");
        require(a->t.times == b->t.times, "trajectories use different time grids");
        double worst = 0.0;
        for (std::size_t i = 0; i < a->t.states.size(); ++i) {
            worst = std::max(worst, trace_distance(a->t.states[i], b->t.states[i]));
        }
        *out = worst;
    });
}

lo_status lo_spectrum_json(const lo_system* system, char** out) {
    return guarded([&] {
        require(system && out, "null argument");
        *out = nullptr;
        const SystemParams params(system->sigma, system->gamma, system->kappa);
        *out = copy_string(spectrum_json(params, system->basis->max_total()));
    });
}

lo_status lo_structure_json(size_t modes, char** json, char** report) {
    return guarded([&] {
        require(json != nullptr, "null output");
        *json = nullptr;
        if (report) *report = nullptr;
        const DecompositionReport r = analyze_structure(modes);
        *json = copy_string(structure_json(r));
        if (report) *report = copy_string(decomposition_text(r));
    });
}

void lo_string_free(char* s) { delete[] s; }

lo_status lo_hom_coincidence(double kappa, double gamma, double t, double* out) {
    return guarded([&] {
        require(out != nullptr, "null output");
        *out = coincidence_closed_form(kappa, gamma, t);
    });
}

lo_status lo_hom_dip(double kappa, double gamma, double resolution, double* t_dip,
                     double* gamma_min, int* pt_unbroken) {
    return guarded([&] {
        require(t_dip != nullptr, "null output");
        const HomDip d = hom_dip(kappa, gamma, resolution);
        *t_dip = d.t_dip;
        if (gamma_min) *gamma_min = d.gamma_min;
        if (pt_unbroken) *pt_unbroken = d.pt_unbroken ? 1 : 0;
    });
}

}  // extern "C"
