#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lossyosc::cli {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A constant is stored as a single breakpoint at t = 0.
struct ScheduleSpec {
    std::vector<double> times{0.0};
    std::vector<double> values{0.0};

    bool is_constant() const { return times.size() == 1; }
};

struct InitialTerm {
    double weight = 1.0;
    std::vector<int> occupations;
};

struct RunConfig {
    std::size_t modes = 0;
    std::size_t max_total = 0;
    std::vector<ScheduleSpec> sigma, gamma, kappa;
    std::vector<InitialTerm> initial_state;
    double t_final = 0.0;
    std::size_t samples = 0;
    std::string solver = "oracle";
    std::optional<double> rtol, atol;

    bool is_constant() const;
    /// samples points evenly spaced on [0, t_final].
    std::vector<double> time_grid() const;
};

RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

}  // namespace lossyosc::cli
