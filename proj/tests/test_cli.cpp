#include "doctest.h"

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "json.hpp"
#include "run_config.hpp"

using lossyosc::cli::ConfigError;
using lossyosc::cli::parse_run_config;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "lossyosc");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream out, err;
    const int code = lossyosc::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string read_file(const std::string& path) {
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream(path) << text;
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(read_file(path));
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

const std::string kConfigs = LOSSYOSC_CONFIG_DIR;

const char* kHom = R"({
  "modes": 2, "max_total": 2, "sigma": [0, 0], "gamma": [0, 0], "kappa": [1],
  "initial_state": {"type": "fock", "occupations": [1, 1]},
  "t_final": 2.0, "samples": 41, "solver": "eigen"
})";

}  // namespace

TEST_CASE("config parsing accepts the documented schema") {
    const auto c = parse_run_config(R"({
      "modes": 3, "max_total": 2,
      "sigma": [0, 0.5, {"times": [0, 1], "values": [0, 1]}],
      "gamma": [0.1, 0, 0], "kappa": [1, 0.5],
      "initial_state": {"type": "mixture", "terms": [
        {"weight": 0.25, "occupations": [1, 0, 0]},
        {"weight": 0.75, "occupations": [0, 1, 1]}]},
      "t_final": 2, "samples": 5, "solver": "oracle",
      "tolerances": {"rtol": 1e-10}
    })");
    CHECK(c.modes == 3);
    CHECK(c.sigma[2].times == std::vector<double>{0.0, 1.0});
    CHECK(c.initial_state.size() == 2);
    CHECK(c.rtol.value() == 1e-10);
    CHECK_FALSE(c.atol.has_value());
    CHECK_FALSE(c.is_constant());
    CHECK(c.time_grid() == std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0});
    CHECK(parse_run_config(kHom).is_constant());
}

TEST_CASE("config parsing rejects malformed input") {
    const std::string base = kHom;
    auto with = [&](const std::string& from, const std::string& to) {
        std::string s = base;
        s.replace(s.find(from), from.size(), to);
        return s;
    };
    CHECK_THROWS_AS(parse_run_config("{"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("[]"), ConfigError);
    CHECK_THROWS_AS(parse_run_config(with("\"samples\": 41", "\"samples\": 0")), ConfigError);
    CHECK_THROWS_AS(parse_run_config(with("\"samples\": 41", "\"samples\": 41, \"extra\": 1")), ConfigError);
    CHECK_THROWS_AS(parse_run_config(with("[1, 1]", "[2, 1]")), ConfigError);
    CHECK_THROWS_AS(parse_run_config(with("[1, 1]", "[1]")), ConfigError);
    CHECK_THROWS_AS(parse_run_config(with("\"gamma\": [0, 0]", "\"gamma\": [-1, 0]")), ConfigError);
    CHECK_THROWS_AS(parse_run_config(with("\"kappa\": [1]", "\"kappa\": [1, 2]")), ConfigError);
    CHECK_THROWS_AS(parse_run_config(with("\"eigen\"", "\"magic\"")), ConfigError);
    CHECK_THROWS_AS(parse_run_config(with("\"kappa\": [1]",
                                          "\"kappa\": [{\"times\": [0, 2, 1], \"values\": [1, 1, 1]}]")),
                    ConfigError);
    CHECK_THROWS_AS(parse_run_config(with("\"kappa\": [1]",
                                          "\"kappa\": [{\"times\": [1, 2], \"values\": [1, 1]}]")),
                    ConfigError);
    CHECK_THROWS_AS(parse_run_config(with("{\"type\": \"fock\", \"occupations\": [1, 1]}",
                                          "{\"type\": \"mixture\", \"terms\": [{\"weight\": 0.5, \"occupations\": [1, 1]}]}")),
                    ConfigError);
    CHECK_THROWS_AS(lossyosc::cli::load_run_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("evolve writes the Hermitian coincidence curve") {
    write_file("hom.json", kHom);
    const auto r = run_cli({"evolve", "--config", "hom.json", "--out", "hom.csv"});
    REQUIRE(r.code == 0);
    const auto rows = read_csv("hom.csv");
    REQUIRE(rows.size() == 42);
    CHECK(rows[0] == std::vector<std::string>{"t", "trace", "n_1", "n_2", "G_12", "purity"});
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double t = std::stod(rows[i][0]);
        CHECK(std::abs(std::stod(rows[i][4]) - std::pow(std::cos(2.0 * t), 2)) <= 1e-8);
        CHECK(std::abs(std::stod(rows[i][1]) - 1.0) <= 1e-9);
    }
    CHECK(rows[2][0] == "0.05");
}

TEST_CASE("evolve with every solver writes a comparison sidecar") {
    const auto r = run_cli({"evolve", "--config", kConfigs + "/hom_hermitian.json", "--out", "all.csv"});
    REQUIRE(r.code == 0);
    const auto side = nlohmann::json::parse(read_file("all.csv.json"));
    CHECK(side["solvers"].size() == 3);
    CHECK(side["agree"] == true);
    for (const auto& [pair, d] : side["pairwise_max_trace_distance"].items()) {
        CHECK(d.get<double>() <= 1e-5);
    }
    CHECK(read_csv("all.csv").size() == 202);
}

TEST_CASE("time-dependent and three-mode configs skip inapplicable solvers") {
    for (const char* name : {"kappa_ramp.json", "three_mode_mixture.json", "pt_coupler.json", "pt_broken.json"}) {
        const auto r = run_cli({"compare", "--config", kConfigs + "/" + name});
        CHECK_MESSAGE(r.code == 0, name, r.err);
        const auto doc = nlohmann::json::parse(r.out);
        CHECK(doc["agree"] == true);
        CHECK(doc["solvers"].size() >= 2);
    }
    const auto ramp = nlohmann::json::parse(run_cli({"compare", "--config", kConfigs + "/kappa_ramp.json"}).out);
    CHECK(ramp["skipped"].contains("eigen"));
    CHECK_FALSE(ramp["skipped"].contains("weinorman"));
}

TEST_CASE("evolve output is deterministic") {
    write_file("det.json", kHom);
    REQUIRE(run_cli({"evolve", "--config", "det.json", "--out", "det1.csv"}).code == 0);
    REQUIRE(run_cli({"evolve", "--config", "det.json", "--out", "det2.csv"}).code == 0);
    CHECK(read_file("det1.csv") == read_file("det2.csv"));
}

TEST_CASE("configuration and numerical errors set exit codes") {
    std::string empty = kHom;
    empty.replace(empty.find("\"samples\": 41"), 13, "\"samples\": 0");
    write_file("empty.json", empty);
    auto r = run_cli({"evolve", "--config", "empty.json", "--out", "empty.csv"});
    CHECK(r.code == 1);
    CHECK(r.err.rfind("error: invalid_config: ", 0) == 0);
    CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);

    std::string ep = kHom;
    ep.replace(ep.find("\"gamma\": [0, 0]"), 15, "\"gamma\": [2, 0]");
    write_file("ep.json", ep);
    r = run_cli({"evolve", "--config", "ep.json", "--out", "ep.csv"});
    CHECK(r.code == 2);
    CHECK(r.err.rfind("error: exceptional_point: ", 0) == 0);
    r = run_cli({"spectrum", "--config", "ep.json"});
    CHECK(r.code == 2);

    std::string sing = kHom;
    sing.replace(sing.find("\"eigen\""), 7, "\"weinorman\"");
    sing.replace(sing.find("\"t_final\": 2.0, \"samples\": 41"), 29,
                 "\"t_final\": 1.5707963267948966, \"samples\": 2");
    write_file("sing.json", sing);
    r = run_cli({"evolve", "--config", "sing.json", "--out", "sing.csv"});
    CHECK(r.code == 0);  // crossings are handled through the fundamental matrix

    CHECK(run_cli({"evolve", "--config", "missing.json", "--out", "x.csv"}).code == 1);
    CHECK(run_cli({"frobnicate"}).code == 1);
    CHECK(run_cli({"structure"}).code == 1);
    CHECK(run_cli({"structure", "--modes", "0"}).code == 1);
}

TEST_CASE("spectrum subcommand") {
    auto r = run_cli({"spectrum", "--config", kConfigs + "/pt_coupler.json"});
    REQUIRE(r.code == 0);
    auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["lambdas"][0]["re"].get<double>() == doctest::Approx(-0.5));
    CHECK(doc["lambdas"][1]["re"].get<double>() == doctest::Approx(-0.5));
    CHECK(std::abs(doc["lambdas"][0]["im"].get<double>()) == doctest::Approx(0.8660254));
    CHECK(doc["lambdas"][0]["im"].get<double>() == doctest::Approx(-doc["lambdas"][1]["im"].get<double>()));

    r = run_cli({"spectrum", "--config", kConfigs + "/pt_broken.json"});
    REQUIRE(r.code == 0);
    doc = nlohmann::json::parse(r.out);
    CHECK(doc["slowest_nonzero_exponent"]["re"].get<double>() == doctest::Approx(-0.5));
    CHECK(std::abs(doc["slowest_nonzero_exponent"]["im"].get<double>()) <= 1e-10);

    write_file("single.json", R"({"modes": 1, "max_total": 1, "sigma": [0.5], "gamma": [0.3],
      "kappa": [], "initial_state": {"type": "fock", "occupations": [1]},
      "t_final": 1, "samples": 2, "solver": "eigen"})");
    r = run_cli({"spectrum", "--config", "single.json"});
    REQUIRE(r.code == 0);
    doc = nlohmann::json::parse(r.out);
    REQUIRE(doc["liouvillian_eigenvalues"].size() == 4);
    std::vector<std::pair<double, double>> got;
    for (const auto& z : doc["liouvillian_eigenvalues"]) got.emplace_back(z["re"], z["im"]);
    std::sort(got.begin(), got.end());
    const std::vector<std::pair<double, double>> expected{{-0.3, -0.5}, {-0.3, 0.5}, {0.3, -0.5}, {0.3, 0.5}};
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(got[i].first == doctest::Approx(expected[i].first));
        CHECK(got[i].second == doctest::Approx(expected[i].second));
    }

    r = run_cli({"spectrum", "--config", kConfigs + "/kappa_ramp.json"});
    CHECK(r.code == 1);
}

TEST_CASE("hom-scan subcommand") {
    const auto r = run_cli({"hom-scan", "--kappa", "1", "--gammas", "0,1,1.999,2.5", "--out", "scan.csv"});
    REQUIRE(r.code == 0);
    const auto rows = read_csv("scan.csv");
    REQUIRE(rows.size() == 5);
    CHECK(rows[0] == std::vector<std::string>{"gamma_over_kappa", "kappa_t_dip", "Gamma_min", "pt_phase"});
    CHECK(std::stod(rows[1][1]) == doctest::Approx(0.78540).epsilon(1e-5));
    CHECK(std::stod(rows[2][1]) == doctest::Approx(0.76100).epsilon(1e-5));
    CHECK(std::abs(std::stod(rows[3][1]) - 1.0 / std::sqrt(2.0)) <= 1e-2);
    CHECK(rows[3][3] == "unbroken");
    CHECK(rows[4][3] == "broken");
    CHECK(run_cli({"hom-scan", "--kappa", "0", "--gammas", "1", "--out", "bad.csv"}).code == 1);
}

TEST_CASE("structure subcommand") {
    struct Case {
        const char* modes;
        int total, nil, ab, sl;
    };
    for (const auto& c : {Case{"1", 3, 1, 2, 0}, Case{"2", 12, 4, 2, 3}, Case{"3", 27, 9, 2, 8}}) {
        const auto r = run_cli({"structure", "--modes", c.modes});
        REQUIRE(r.code == 0);
        const auto doc = nlohmann::json::parse(r.out);
        CHECK(doc["dims"]["total"] == c.total);
        CHECK(doc["dims"]["nilpotent"] == c.nil);
        CHECK(doc["dims"]["abelian"] == c.ab);
        CHECK(doc["dims"]["sl_left"] == c.sl);
        CHECK(doc["dims"]["sl_right"] == c.sl);
        CHECK(doc["closure_residual"].get<double>() <= 1e-10);
        CHECK(doc["jacobi_residual"].get<double>() <= 1e-10);
        CHECK_FALSE(r.err.empty());
    }
}

TEST_CASE("the installed executable reports exit codes") {
    const std::string exe = LOSSYOSC_EXECUTABLE;
    auto status = [](const std::string& cmd) {
        const int raw = std::system((cmd + " >/dev/null 2>&1").c_str());
        return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    };
    write_file("exe_hom.json", kHom);
    CHECK(status(exe + " evolve --config exe_hom.json --out exe_hom.csv") == 0);
    CHECK(read_csv("exe_hom.csv").size() == 42);
    CHECK(status(exe + " structure --modes 2") == 0);
    CHECK(status(exe + " evolve --config nonexistent.json --out x.csv") == 1);
    std::string ep = kHom;
    ep.replace(ep.find("\"gamma\": [0, 0]"), 15, "\"gamma\": [2, 0]");
    write_file("exe_ep.json", ep);
    CHECK(status(exe + " spectrum --config exe_ep.json") == 2);
}
