#pragma once

#include <cstddef>
#include <vector>

namespace lossyosc {

/// A real function of time: either a constant or piecewise-linear through
/// explicit breakpoints. Beyond the last breakpoint the final value is held.
class Schedule {
public:
    Schedule(double value = 0.0);  // NOLINT: implicit from a constant is intended
    Schedule(std::vector<double> times, std::vector<double> values);

    double operator()(double t) const;

    bool is_constant() const noexcept { return times_.size() <= 1; }
    const std::vector<double>& times() const noexcept { return times_; }
    const std::vector<double>& values() const noexcept { return values_; }
    double min_value() const;

private:
    std::vector<double> times_;
    std::vector<double> values_;
};

/// Parameters of a linear chain of N lossy oscillators: energies sigma_k,
/// loss rates gamma_k >= 0 and nearest-neighbour couplings kappa_k
/// (N - 1 of them).
struct SystemParams {
    std::vector<Schedule> sigma;
    std::vector<Schedule> gamma;
    std::vector<Schedule> kappa;

    SystemParams() = default;
    SystemParams(std::vector<Schedule> sigma, std::vector<Schedule> gamma,
                 std::vector<Schedule> kappa);

    /// Constant-parameter convenience constructor.
    static SystemParams constant(const std::vector<double>& sigma,
                                 const std::vector<double>& gamma,
                                 const std::vector<double>& kappa);

    std::size_t n_modes() const noexcept { return sigma.size(); }
    bool is_constant() const;

    /// Sorted union of all schedule breakpoints in (0, t_end).
    std::vector<double> breakpoints(double t_end) const;

    /// Throws InvalidArgument for inconsistent lengths or negative loss.
    void validate() const;
};

/// sigma, gamma and kappa sampled at one instant.
struct ParamValues {
    std::vector<double> sigma;
    std::vector<double> gamma;
    std::vector<double> kappa;
};

ParamValues evaluate(const SystemParams& params, double t);

}  // namespace lossyosc
