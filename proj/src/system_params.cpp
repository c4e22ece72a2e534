#include "lossyosc/system_params.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lossyosc/errors.hpp"

namespace lossyosc {

Schedule::Schedule(double value) : times_{0.0}, values_{value} {
    if (!std::isfinite(value)) throw InvalidArgument("schedule value is not finite");
}

Schedule::Schedule(std::vector<double> times, std::vector<double> values)
    : times_(std::move(times)), values_(std::move(values)) {
    if (times_.empty() || times_.size() != values_.size()) {
        throw InvalidArgument("schedule needs equal-length, nonempty times and values");
    }
    if (times_.front() != 0.0) throw InvalidArgument("schedule times must start at 0");
    for (std::size_t i = 1; i < times_.size(); ++i) {
        if (!(times_[i] > times_[i - 1])) {
            throw InvalidArgument("schedule times must be strictly ascending");
        }
    }
    for (double v : values_) {
        if (!std::isfinite(v)) throw InvalidArgument("schedule value is not finite");
    }
}

double Schedule::operator()(double t) const {
    if (times_.size() == 1 || t <= times_.front()) return values_.front();
    if (t >= times_.back()) return values_.back();
    const auto hi = std::upper_bound(times_.begin(), times_.end(), t);
    const std::size_t j = static_cast<std::size_t>(hi - times_.begin());
    const double t0 = times_[j - 1], t1 = times_[j];
    const double w = (t - t0) / (t1 - t0);
    return (1.0 - w) * values_[j - 1] + w * values_[j];
}

double Schedule::min_value() const { return *std::min_element(values_.begin(), values_.end()); }

SystemParams::SystemParams(std::vector<Schedule> s, std::vector<Schedule> g,
                           std::vector<Schedule> k)
    : sigma(std::move(s)), gamma(std::move(g)), kappa(std::move(k)) {
    validate();
}

SystemParams SystemParams::constant(const std::vector<double>& s, const std::vector<double>& g,
                                    const std::vector<double>& k) {
    return SystemParams(std::vector<Schedule>(s.begin(), s.end()),
                        std::vector<Schedule>(g.begin(), g.end()),
                        std::vector<Schedule>(k.begin(), k.end()));
}

bool SystemParams::is_constant() const {
    auto constant = [](const Schedule& s) { return s.is_constant(); };
    return std::all_of(sigma.begin(), sigma.end(), constant) &&
           std::all_of(gamma.begin(), gamma.end(), constant) &&
           std::all_of(kappa.begin(), kappa.end(), constant);
}

std::vector<double> SystemParams::breakpoints(double t_end) const {
    std::vector<double> out;
    for (const auto* group : {&sigma, &gamma, &kappa}) {
        for (const Schedule& s : *group) {
            for (double t : s.times()) {
                if (t > 0.0 && t < t_end) out.push_back(t);
            }
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

void SystemParams::validate() const {
    const std::size_t n = sigma.size();
    if (n == 0) throw InvalidArgument("system needs at least one mode");
    if (gamma.size() != n) {
        throw InvalidArgument("expected " + std::to_string(n) + " loss rates, got " +
                              std::to_string(gamma.size()));
    }
    if (kappa.size() != n - 1) {
        throw InvalidArgument("expected " + std::to_string(n - 1) + " couplings, got " +
                              std::to_string(kappa.size()));
    }
    for (const Schedule& g : gamma) {
        // Piecewise-linear: the minimum over time is attained at a breakpoint.
        if (g.min_value() < 0.0) throw InvalidArgument("loss rates must be nonnegative");
    }
}

ParamValues evaluate(const SystemParams& params, double t) {
    ParamValues v;
    for (const Schedule& s : params.sigma) v.sigma.push_back(s(t));
    for (const Schedule& s : params.gamma) v.gamma.push_back(s(t));
    for (const Schedule& s : params.kappa) v.kappa.push_back(s(t));
    return v;
}

}  // namespace lossyosc
