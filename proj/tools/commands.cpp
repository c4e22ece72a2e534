#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "lossyosc/lossyosc.h"
#include "run_config.hpp"

namespace lossyosc::cli {

namespace {

using nlohmann::ordered_json;

constexpr double kAgreementThreshold = 1e-5;

/// A failed library call, or a failure detected by the CLI itself.
struct Failure {
    int exit_code;
    std::string reason;
    std::string message;
};

void check(lo_status s) {
    if (s != LO_OK) throw Failure{lo_exit_code(s), lo_status_name(s), lo_last_error()};
}

struct SystemDeleter {
    void operator()(lo_system* s) const { lo_system_destroy(s); }
};
struct TrajectoryDeleter {
    void operator()(lo_trajectory* t) const { lo_trajectory_destroy(t); }
};
struct StringDeleter {
    void operator()(char* s) const { lo_string_free(s); }
};
using SystemPtr = std::unique_ptr<lo_system, SystemDeleter>;
using TrajectoryPtr = std::unique_ptr<lo_trajectory, TrajectoryDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

void set_group(lo_system* sys, lo_param which, const std::vector<ScheduleSpec>& specs) {
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const ScheduleSpec& s = specs[i];
        if (s.is_constant()) {
            check(lo_system_set_constant(sys, which, i, s.values.front()));
        } else {
            check(lo_system_set_schedule(sys, which, i, s.times.data(), s.values.data(),
                                         s.times.size()));
        }
    }
}

SystemPtr build_system(const RunConfig& c) {
    lo_system* raw = nullptr;
    check(lo_system_create(c.modes, c.max_total, &raw));
    SystemPtr sys(raw);
    set_group(sys.get(), LO_SIGMA, c.sigma);
    set_group(sys.get(), LO_GAMMA, c.gamma);
    set_group(sys.get(), LO_KAPPA, c.kappa);
    if (c.rtol || c.atol) {
        check(lo_system_set_tolerances(sys.get(), c.rtol.value_or(1e-9), c.atol.value_or(1e-12)));
    }
    for (const InitialTerm& t : c.initial_state) {
        check(lo_system_add_initial_term(sys.get(), t.weight, t.occupations.data()));
    }
    return sys;
}

lo_solver solver_id(const std::string& name) {
    if (name == "oracle") return LO_SOLVER_ORACLE;
    if (name == "eigen") return LO_SOLVER_EIGEN;
    return LO_SOLVER_WEINORMAN;
}

void write_csv(std::ostream& os, const lo_trajectory* t, std::size_t modes) {
    os << "t,trace";
    for (std::size_t k = 0; k < modes; ++k) os << ",n_" << k + 1;
    for (std::size_t i = 0; i < modes; ++i) {
        for (std::size_t j = i + 1; j < modes; ++j) os << ",G_" << i + 1 << j + 1;
    }
    os << ",purity\n";
    for (std::size_t s = 0; s < lo_trajectory_size(t); ++s) {
        double v = 0.0;
        check(lo_trajectory_time(t, s, &v));
        os << fmt(v);
        check(lo_trajectory_trace(t, s, &v));
        os << ',' << fmt(v);
        for (std::size_t k = 0; k < modes; ++k) {
            check(lo_trajectory_number(t, s, k, &v));
            os << ',' << fmt(v);
        }
        for (std::size_t i = 0; i < modes; ++i) {
            for (std::size_t j = i + 1; j < modes; ++j) {
                check(lo_trajectory_coincidence(t, s, i, j, &v));
                os << ',' << fmt(v);
            }
        }
        check(lo_trajectory_purity(t, s, &v));
        os << ',' << fmt(v) << '\n';
    }
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw Failure{1, "io_error", "cannot write '" + path + "'"};
    return f;
}

struct EvolveResult {
    std::vector<std::string> solvers;
    std::vector<TrajectoryPtr> trajectories;
    ordered_json comparison;
    bool agree = true;
};

EvolveResult evolve(const RunConfig& c, bool compare_all) {
    std::vector<std::string> names;
    ordered_json skipped = ordered_json::object();
    if (compare_all) {
        names.push_back("oracle");
        if (c.is_constant()) {
            names.push_back("eigen");
        } else {
            skipped["eigen"] = "time-dependent parameters";
        }
        if (c.modes == 2) {
            names.push_back("weinorman");
        } else {
            skipped["weinorman"] = "implemented for two modes only";
        }
        if (names.size() < 2) {
            throw ConfigError("solver 'all' needs at least two applicable solvers");
        }
    } else {
        names.push_back(c.solver);
    }

    const SystemPtr sys = build_system(c);
    const std::vector<double> grid = c.time_grid();
    EvolveResult r;
    for (const std::string& n : names) {
        lo_trajectory* raw = nullptr;
        check(lo_evolve(sys.get(), solver_id(n), grid.data(), grid.size(), &raw));
        r.trajectories.emplace_back(raw);
        r.solvers.push_back(n);
    }
    if (compare_all) {
        ordered_json pairs = ordered_json::object();
        for (std::size_t i = 0; i < names.size(); ++i) {
            for (std::size_t j = i + 1; j < names.size(); ++j) {
                double d = 0.0;
                check(lo_trace_distance_max(r.trajectories[i].get(), r.trajectories[j].get(), &d));
                pairs[names[i] + "-" + names[j]] = d;
                if (!(d <= kAgreementThreshold)) r.agree = false;
            }
        }
        r.comparison["solvers"] = names;
        r.comparison["skipped"] = skipped;
        r.comparison["pairwise_max_trace_distance"] = pairs;
        r.comparison["threshold"] = kAgreementThreshold;
        r.comparison["agree"] = r.agree;
    }
    return r;
}

int finish_comparison(const EvolveResult& r) {
    if (r.agree) return 0;
    throw Failure{2, "solver_disagreement",
                  "pairwise trace distance exceeds " + fmt(kAgreementThreshold)};
}

int cmd_evolve(const std::string& config, const std::string& out_path) {
    const RunConfig c = load_run_config(config);
    const bool all = c.solver == "all";
    const EvolveResult r = evolve(c, all);
    {
        std::ofstream f = open_out(out_path);
        write_csv(f, r.trajectories.front().get(), c.modes);
    }
    if (all) {
        std::ofstream f = open_out(out_path + ".json");
        f << r.comparison.dump(2) << '\n';
        return finish_comparison(r);
    }
    return 0;
}

int cmd_compare(const std::string& config, const std::string& out_path, std::ostream& out) {
    const RunConfig c = load_run_config(config);
    const EvolveResult r = evolve(c, true);
    out << r.comparison.dump(2) << '\n';
    if (!out_path.empty()) {
        std::ofstream f = open_out(out_path);
        write_csv(f, r.trajectories.front().get(), c.modes);
        std::ofstream side = open_out(out_path + ".json");
        side << r.comparison.dump(2) << '\n';
    }
    return finish_comparison(r);
}

int cmd_spectrum(const std::string& config, std::ostream& out) {
    const RunConfig c = load_run_config(config);
    if (!c.is_constant()) throw ConfigError("spectrum needs time-independent parameters");
    const SystemPtr sys = build_system(c);
    char* raw = nullptr;
    check(lo_spectrum_json(sys.get(), &raw));
    const StringPtr json(raw);
    out << json.get() << '\n';
    return 0;
}

int cmd_hom_scan(double kappa, const std::vector<double>& gammas, const std::string& out_path,
                 double resolution) {
    if (!(kappa > 0.0)) throw ConfigError("--kappa must be positive");
    if (gammas.empty()) throw ConfigError("--gammas must list at least one value");
    std::ofstream f = open_out(out_path);
    f << "gamma_over_kappa,kappa_t_dip,Gamma_min,pt_phase\n";
    for (double g : gammas) {
        double t = 0.0, gmin = 0.0;
        int unbroken = 0;
        check(lo_hom_dip(kappa, g, resolution, &t, &gmin, &unbroken));
        f << fmt(g / kappa) << ',' << fmt(kappa * t) << ',' << fmt(gmin) << ','
          << (unbroken ? "unbroken" : "broken") << '\n';
    }
    return 0;
}

int cmd_structure(std::size_t modes, std::ostream& out, std::ostream& err) {
    char* json = nullptr;
    char* report = nullptr;
    check(lo_structure_json(modes, &json, &report));
    const StringPtr j(json), r(report);
    out << j.get() << '\n';
    err << r.get();
    return 0;
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Lossy coupled-oscillator solvers", "lossyosc"};
    app.require_subcommand(1);

    std::string config, out_path;
    double kappa = 1.0, resolution = 1e-12;
    std::vector<double> gammas;
    std::size_t modes = 2;

    auto* evolve_cmd = app.add_subcommand("evolve", "Propagate a configured system, write CSV");
    evolve_cmd->add_option("--config", config, "JSON run configuration")->required();
    evolve_cmd->add_option("--out", out_path, "CSV output path")->required();

    auto* spectrum_cmd = app.add_subcommand("spectrum", "Mode and Liouvillian eigenvalues as JSON");
    spectrum_cmd->add_option("--config", config, "JSON run configuration")->required();

    auto* hom_cmd = app.add_subcommand("hom-scan", "Coincidence-dip position versus loss");
    hom_cmd->add_option("--kappa", kappa, "coupling constant")->required();
    hom_cmd->add_option("--gammas", gammas, "comma-separated loss rates")
        ->required()
        ->delimiter(',');
    hom_cmd->add_option("--out", out_path, "CSV output path")->required();
    hom_cmd->add_option("--resolution", resolution, "bisection resolution in t");

    auto* structure_cmd = app.add_subcommand("structure", "Lie-algebra decomposition");
    structure_cmd->add_option("--modes", modes, "number of modes")->required();

    auto* compare_cmd = app.add_subcommand("compare", "Run every applicable solver and compare");
    compare_cmd->add_option("--config", config, "JSON run configuration")->required();
    compare_cmd->add_option("--out", out_path, "optional CSV output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: usage: " << e.what() << '\n';
        return 1;
    }

    try {
        if (*evolve_cmd) return cmd_evolve(config, out_path);
        if (*spectrum_cmd) return cmd_spectrum(config, out);
        if (*hom_cmd) return cmd_hom_scan(kappa, gammas, out_path, resolution);
        if (*structure_cmd) return cmd_structure(modes, out, err);
        if (*compare_cmd) return cmd_compare(config, out_path, out);
    } catch (const Failure& f) {
        err << "error: " << f.reason << ": " << f.message << '\n';
        return f.exit_code;
    } catch (const ConfigError& e) {
        err << "error: invalid_config: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: internal_error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}

}  // namespace lossyosc::cli
