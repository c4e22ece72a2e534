#include "run_config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace lossyosc::cli {

namespace {

using nlohmann::json;

const std::set<std::string> kKeys = {"modes",   "max_total", "sigma",  "gamma",
                                     "kappa",   "initial_state", "t_final", "samples",
                                     "solver",  "tolerances"};

double finite_number(const json& j, const std::string& what) {
    if (!j.is_number()) throw ConfigError(what + " must be a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(what + " must be finite");
    return v;
}

std::size_t count(const json& j, const std::string& what) {
    if (!j.is_number_integer() || j.get<long long>() < 0) {
        throw ConfigError(what + " must be a nonnegative integer");
    }
    return j.get<std::size_t>();
}

ScheduleSpec schedule(const json& j, const std::string& what) {
    ScheduleSpec s;
    if (j.is_number()) {
        s.values = {finite_number(j, what)};
        return s;
    }
    if (!j.is_object() || !j.contains("times") || !j.contains("values") || j.size() != 2) {
        throw ConfigError(what + " must be a number or {\"times\": [...], \"values\": [...]}");
    }
    const json& t = j.at("times");
    const json& v = j.at("values");
    if (!t.is_array() || !v.is_array() || t.empty() || t.size() != v.size()) {
        throw ConfigError(what + ": times and values must be nonempty arrays of equal length");
    }
    s.times.clear();
    s.values.clear();
    for (std::size_t i = 0; i < t.size(); ++i) {
        s.times.push_back(finite_number(t[i], what + ".times"));
        s.values.push_back(finite_number(v[i], what + ".values"));
        if (i > 0 && !(s.times[i] > s.times[i - 1])) {
            throw ConfigError(what + ": times must be strictly ascending");
        }
    }
    if (s.times.front() != 0.0) throw ConfigError(what + ": times must start at 0");
    return s;
}

std::vector<ScheduleSpec> schedules(const json& root, const std::string& key, std::size_t n) {
    if (!root.contains(key)) throw ConfigError("missing key '" + key + "'");
    const json& j = root.at(key);
    if (!j.is_array()) throw ConfigError("'" + key + "' must be an array");
    if (j.size() != n) {
        throw ConfigError("'" + key + "' needs " + std::to_string(n) + " entries, got " +
                          std::to_string(j.size()));
    }
    std::vector<ScheduleSpec> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        out.push_back(schedule(j[i], key + "[" + std::to_string(i) + "]"));
    }
    return out;
}

std::vector<int> occupations(const json& j, const RunConfig& c) {
    if (!j.is_array() || j.size() != c.modes) {
        throw ConfigError("occupations need " + std::to_string(c.modes) + " entries");
    }
    std::vector<int> n;
    std::size_t total = 0;
    for (const json& x : j) {
        if (!x.is_number_integer() || x.get<long long>() < 0) {
            throw ConfigError("occupations must be nonnegative integers");
        }
        n.push_back(x.get<int>());
        total += static_cast<std::size_t>(n.back());
    }
    if (total > c.max_total) {
        throw ConfigError("occupations sum to " + std::to_string(total) + " > max_total " +
                          std::to_string(c.max_total));
    }
    return n;
}

std::vector<InitialTerm> initial_state(const json& j, const RunConfig& c) {
    if (!j.is_object() || !j.contains("type")) throw ConfigError("initial_state needs a type");
    const std::string type = j.at("type").get<std::string>();
    if (type == "fock") {
        if (!j.contains("occupations")) throw ConfigError("fock initial_state needs occupations");
        return {InitialTerm{1.0, occupations(j.at("occupations"), c)}};
    }
    if (type != "mixture") throw ConfigError("initial_state type must be 'fock' or 'mixture'");
    if (!j.contains("terms") || !j.at("terms").is_array() || j.at("terms").empty()) {
        throw ConfigError("mixture initial_state needs a nonempty 'terms' array");
    }
    std::vector<InitialTerm> out;
    double sum = 0.0;
    for (const json& t : j.at("terms")) {
        if (!t.is_object() || !t.contains("weight") || !t.contains("occupations")) {
            throw ConfigError("mixture terms need 'weight' and 'occupations'");
        }
        const double w = finite_number(t.at("weight"), "weight");
        if (w < 0.0) throw ConfigError("mixture weights must be nonnegative");
        sum += w;
        out.push_back({w, occupations(t.at("occupations"), c)});
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        throw ConfigError("mixture weights sum to " + std::to_string(sum) + ", not 1");
    }
    return out;
}

}  // namespace

bool RunConfig::is_constant() const {
    for (const auto* g : {&sigma, &gamma, &kappa}) {
        for (const ScheduleSpec& s : *g) {
            if (!s.is_constant()) return false;
        }
    }
    return true;
}

std::vector<double> RunConfig::time_grid() const {
    std::vector<double> t;
    for (std::size_t i = 0; i < samples; ++i) {
        t.push_back(samples == 1 ? 0.0
                                 : t_final * static_cast<double>(i) /
                                       static_cast<double>(samples - 1));
    }
    return t;
}

RunConfig parse_run_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& item : root.items()) {
        if (!kKeys.count(item.key())) throw ConfigError("unknown key '" + item.key() + "'");
    }
    try {
        RunConfig c;
        for (const char* key : {"modes", "max_total", "initial_state", "t_final", "samples"}) {
            if (!root.contains(key)) throw ConfigError(std::string("missing key '") + key + "'");
        }
        c.modes = count(root.at("modes"), "modes");
        if (c.modes < 1) throw ConfigError("modes must be at least 1");
        c.max_total = count(root.at("max_total"), "max_total");
        c.sigma = schedules(root, "sigma", c.modes);
        c.gamma = schedules(root, "gamma", c.modes);
        c.kappa = schedules(root, "kappa", c.modes - 1);
        for (const ScheduleSpec& g : c.gamma) {
            for (double v : g.values) {
                if (v < 0.0) throw ConfigError("loss rates must be nonnegative");
            }
        }
        c.initial_state = initial_state(root.at("initial_state"), c);
        c.t_final = finite_number(root.at("t_final"), "t_final");
        c.samples = count(root.at("samples"), "samples");
        if (c.samples == 0) throw ConfigError("samples must be at least 1");
        if (c.t_final < 0.0 || (c.samples > 1 && !(c.t_final > 0.0))) {
            throw ConfigError("t_final must be positive when more than one sample is requested");
        }
        if (root.contains("solver")) c.solver = root.at("solver").get<std::string>();
        if (c.solver != "oracle" && c.solver != "eigen" && c.solver != "weinorman" &&
            c.solver != "all") {
            throw ConfigError("solver must be one of oracle, eigen, weinorman, all");
        }
        if (root.contains("tolerances")) {
            const json& t = root.at("tolerances");
            if (!t.is_object()) throw ConfigError("tolerances must be an object");
            for (const auto& item : t.items()) {
                if (item.key() != "rtol" && item.key() != "atol") {
                    throw ConfigError("unknown tolerance '" + item.key() + "'");
                }
            }
            if (t.contains("rtol")) c.rtol = finite_number(t.at("rtol"), "rtol");
            if (t.contains("atol")) c.atol = finite_number(t.at("atol"), "atol");
            if ((c.rtol && !(*c.rtol > 0.0)) || (c.atol && !(*c.atol > 0.0))) {
                throw ConfigError("tolerances must be positive");
            }
        }
        return c;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad value type: ") + e.what());
    }
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str());
}

}  // namespace lossyosc::cli
