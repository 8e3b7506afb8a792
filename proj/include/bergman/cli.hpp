#pragma once
// Batch driver: configuration, subcommand dispatch and report writing.
#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace bergman::cli {

enum class Command { selftest, density_map, potential_check, flatness, seip_sweep, restriction_check };

std::string command_name(Command c);
std::optional<Command> command_from_name(const std::string& s);

struct WeightSpec {
    std::string kind = "log_family";
    double beta = 3.0;
    double scale = 1.0;
    double quartic = 0.0;
    nlohmann::json perturbation;  ///< null or a term list
};

struct GridSpec {
    int per_axis = 5;
    double radius = 0.9;
};

struct RunConfig {
    Command command = Command::selftest;
    int dimension = 1;
    /// Term list or {"factors": [...], "exp": [...]}; null means T = 1.
    nlohmann::json polynomial;
    WeightSpec weight;
    std::vector<double> r_ladder{0.5, 0.7, 0.9};
    GridSpec grid;
    std::vector<double> eps{0.05, 0.1};
    int degree = 12;
    std::vector<int> degrees{8, 12, 16};
    std::vector<double> separations;  ///< empty: calibrated from `densities`
    std::vector<double> densities{0.5, 0.75, 1.0, 1.25, 1.5};
    int points = 100;
    double r = 0.5;
    std::uint64_t seed = 1;
    std::string output = "bergman_out";

    nlohmann::json to_json() const;
};

/// Thrown for invalid configurations (exit status 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Merges a JSON object over the defaults; unknown keys are rejected.
RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {});
void validate(const RunConfig& c);

/// Convention constants embedded in every report.
nlohmann::json conventions(int n);

/// Runs the configured command and writes <output>/<command>.{csv,json}.
/// Returns 0 on success, 2 on validation errors, 3 on numerical failures.
int run(const RunConfig& config, std::ostream& log);

/// Command-line entry point.
int main(int argc, char** argv);

}  // namespace bergman::cli
