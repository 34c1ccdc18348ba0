#pragma once

#include <dualgal/assembly.hpp>
#include <dualgal/problem_spec.hpp>

#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dualgal::cli {

/// Bad or missing configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class OutputFormat { csv, json };

/// Initial profile u0(x) = offset + amplitude * sin(wavenumber * pi * x) for the
/// transient kinds.
struct InitialProfile {
    double offset = 0.0;
    double amplitude = 1.0;
    double wavenumber = 1.0;

    double operator()(double x) const;
};

struct ExperimentConfig {
    ProblemSpec problem;
    std::optional<InitialProfile> initial;
    BasisFamily family = BasisFamily::bspline;
    int p = 1;
    int q = 2;
    std::optional<int> n;
    std::vector<int> n_list;
    std::string output_path;
    OutputFormat format = OutputFormat::csv;
    /// Evaluation points per direction; transient kinds use eval_grid_t in time.
    int eval_grid = 1001;
    int eval_grid_t = 101;
    int workers = 1;
    int fit_points = 3;
};

using KeyValues = std::map<std::string, std::string>;

/// One `key = value` pair per line; `#` starts a comment. Duplicate keys and
/// lines without `=` are errors.
KeyValues parse_key_values(std::istream& in, const std::string& source = "config");

/// Builds and validates a configuration. Unknown keys are rejected so typos do
/// not silently fall back to defaults.
ExperimentConfig build_config(const KeyValues& kv, bool sweep);
ExperimentConfig load_config(const std::string& path, bool sweep);

OutputFormat parse_format(const std::string& name);
std::vector<int> parse_int_list(const std::string& text, const std::string& key);
std::vector<double> parse_double_list(const std::string& text, const std::string& key);

}  // namespace dualgal::cli
