#include "cli/config.hpp"

#include <dualgal/errors.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace dualgal::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& text, const std::string& key) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty() || !std::isfinite(v)) {
        throw ConfigError("key '" + key + "': expected a number, got '" + text + "'");
    }
    return v;
}

int to_int(const std::string& text, const std::string& key) {
    const std::string t = trim(text);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
        throw ConfigError("key '" + key + "': expected an integer, got '" + text + "'");
    }
    return v;
}

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "kind", "kappa", "alpha", "a", "u0", "u0_offset", "u0_amplitude", "u0_wavenumber",
        "bc_left", "bc_right", "T", "lambda_T", "lambda_left", "lambda_right",
        "family", "p", "q", "n", "n_list", "output", "format", "eval_grid", "eval_grid_t",
        "workers", "fit_points"};
    return keys;
}

class Reader {
public:
    explicit Reader(const KeyValues& kv) : kv_(kv) {}

    bool has(const std::string& key) const { return kv_.count(key) != 0; }
    const std::string& str(const std::string& key) const {
        const auto it = kv_.find(key);
        if (it == kv_.end()) throw ConfigError("missing required key '" + key + "'");
        return it->second;
    }
    double real(const std::string& key, double fallback) const {
        return has(key) ? to_double(str(key), key) : fallback;
    }
    double real(const std::string& key) const { return to_double(str(key), key); }
    int integer(const std::string& key, int fallback) const {
        return has(key) ? to_int(str(key), key) : fallback;
    }

private:
    const KeyValues& kv_;
};

}  // namespace

double InitialProfile::operator()(double x) const {
    return offset + amplitude * std::sin(wavenumber * std::numbers::pi * x);
}

KeyValues parse_key_values(std::istream& in, const std::string& source) {
    KeyValues kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(source + ":" + std::to_string(lineno) + ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(source + ":" + std::to_string(lineno) + ": empty key");
        if (!kv.emplace(key, value).second) {
            throw ConfigError(source + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
        }
    }
    return kv;
}

OutputFormat parse_format(const std::string& name) {
    if (name == "csv") return OutputFormat::csv;
    if (name == "json") return OutputFormat::json;
    throw ConfigError("unknown output format '" + name + "' (csv or json)");
}

std::vector<int> parse_int_list(const std::string& text, const std::string& key) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_int(item, key));
    if (out.empty()) throw ConfigError("key '" + key + "': empty list");
    return out;
}

std::vector<double> parse_double_list(const std::string& text, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(item, key));
    if (out.empty()) throw ConfigError("key '" + key + "': empty list");
    return out;
}

namespace {

ExperimentConfig build_config_impl(const KeyValues& kv, bool sweep) {
    for (const auto& [key, value] : kv) {
        if (!known_keys().count(key)) throw ConfigError("unknown key '" + key + "'");
    }
    const Reader r(kv);
    ExperimentConfig cfg;

    const auto kind = parse_problem_kind(r.str("kind"));
    if (!kind) throw ConfigError("key 'kind': unknown problem kind '" + r.str("kind") + "'");

    const double left = r.real("bc_left", 0.0);
    const double right = r.real("bc_right", *kind == ProblemKind::transient_cd ? 0.0 : 1.0);
    const double T = r.real("T", 1.0);
    switch (*kind) {
        case ProblemKind::laplace_1d:
            cfg.problem = ProblemSpec::laplace(left, right);
            break;
        case ProblemKind::steady_cd:
            cfg.problem = ProblemSpec::steady_cd(r.real("alpha"), r.real("kappa", 1.0), left, right);
            break;
        case ProblemKind::transient_cd:
        case ProblemKind::transient_heat: {
            const bool heat = *kind == ProblemKind::transient_heat;
            InitialProfile init{heat ? left : 0.0, 1.0, heat ? 0.5 : 2.0};
            init.offset = r.real("u0_offset", init.offset);
            init.amplitude = r.real("u0_amplitude", init.amplitude);
            init.wavenumber = r.real("u0_wavenumber", init.wavenumber);
            if (heat && (init.offset != left || init.amplitude != 1.0 || init.wavenumber != 0.5)) {
                throw ConfigError("transient_heat reference solution needs u0 = bc_left + sin(pi x / 2)");
            }
            cfg.initial = init;
            cfg.problem = heat ? ProblemSpec::transient_heat(r.real("kappa", 1.0), init, left, T)
                               : ProblemSpec::transient_cd(r.real("kappa"), r.real("alpha"), init,
                                                           left, right, T);
            break;
        }
        case ProblemKind::ivp_ode:
            cfg.problem = ProblemSpec::ivp(r.real("a"), r.real("u0"), T, r.real("lambda_T", 0.0));
            break;
    }
    if (*kind != ProblemKind::ivp_ode && r.has("lambda_T")) {
        throw ConfigError("key 'lambda_T' applies to kind = ivp_ode only");
    }
    if (*kind != ProblemKind::ivp_ode && r.has("u0")) {
        throw ConfigError("key 'u0' applies to kind = ivp_ode only (use u0_offset/u0_amplitude/u0_wavenumber)");
    }

    if (r.has("lambda_left") || r.has("lambda_right")) {
        if (*kind != ProblemKind::laplace_1d && *kind != ProblemKind::steady_cd) {
            throw ConfigError("lambda boundary data applies to the steady kinds only");
        }
        const double l0 = r.real("lambda_left", 0.0);
        const double l1 = r.real("lambda_right", 0.0);
        if (l0 != 0.0 || l1 != 0.0) {
            cfg.problem.lambda_lift = LiftField{
                [l0, l1](double x, double) { return l0 + (l1 - l0) * x; },
                [l0, l1](double, double) { return l1 - l0; },
                nullptr, 1};
        }
    }

    const std::string family = r.has("family") ? r.str("family") : "bspline";
    if (family == "bspline") {
        cfg.family = BasisFamily::bspline;
    } else if (family == "repu") {
        cfg.family = BasisFamily::repu;
    } else {
        throw ConfigError("key 'family': expected bspline or repu, got '" + family + "'");
    }
    cfg.p = r.integer("p", cfg.p);
    cfg.q = r.integer("q", cfg.q);
    if (cfg.p < 1 || cfg.q < 1) throw ConfigError("degrees p and q must be at least 1");

    if (sweep) {
        cfg.n_list = parse_int_list(r.str("n_list"), "n_list");
        if (cfg.n_list.size() < 3) throw ConfigError("key 'n_list': a sweep needs at least three refinements");
        for (std::size_t k = 0; k < cfg.n_list.size(); ++k) {
            if (cfg.n_list[k] < 1) throw ConfigError("key 'n_list': entries must be positive");
            if (k > 0 && cfg.n_list[k] <= cfg.n_list[k - 1]) {
                throw ConfigError("key 'n_list': entries must be strictly increasing");
            }
        }
    } else {
        cfg.n = r.integer("n", 1);
        if (*cfg.n < 1) throw ConfigError("key 'n' must be positive");
    }
    if (is_transient(*kind) && cfg.family != BasisFamily::bspline) {
        throw ConfigError("transient kinds need family = bspline");
    }

    if (r.has("output")) cfg.output_path = r.str("output");
    if (r.has("format")) cfg.format = parse_format(r.str("format"));
    cfg.eval_grid = r.integer("eval_grid", cfg.eval_grid);
    cfg.eval_grid_t = r.integer("eval_grid_t", cfg.eval_grid_t);
    if (cfg.eval_grid < 2 || cfg.eval_grid_t < 2) throw ConfigError("evaluation grids need at least 2 points");
    cfg.workers = r.integer("workers", cfg.workers);
    if (cfg.workers < 1) throw ConfigError("key 'workers' must be positive");
    cfg.fit_points = r.integer("fit_points", cfg.fit_points);
    if (cfg.fit_points == 1 || cfg.fit_points < 0) throw ConfigError("key 'fit_points' must be 0 or at least 2");

    cfg.problem.validate();
    return cfg;
}

}  // namespace

ExperimentConfig build_config(const KeyValues& kv, bool sweep) {
    try {
        return build_config_impl(kv, sweep);
    } catch (const ArgumentError& e) {
        throw ConfigError(e.what());
    }
}

ExperimentConfig load_config(const std::string& path, bool sweep) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return build_config(parse_key_values(in, path), sweep);
}

}  // namespace dualgal::cli
