#ifndef NLRD_SCENARIO_HPP
#define NLRD_SCENARIO_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "nlrd/diagnostics.hpp"
#include "nlrd/dispersion.hpp"
#include "nlrd/solver.hpp"

namespace nlrd {

inline constexpr std::string_view version = "0.1.0";

/// Observables to extract after a run. Negative thresholds mean "use the
/// computed default": front_level -> sigma/2, min_height -> 0.1*sigma,
/// min_separation -> tau/4 for box kernels else 4*dx.
struct DiagnosticsRequest {
    bool front = false;
    FrontDirection front_direction = FrontDirection::Rightward;
    double front_level = -1.0;
    bool peaks = true;
    double min_height = -1.0;
    double min_separation = -1.0;
    bool spectrum = true;
    bool drift = false;

    bool operator==(const DiagnosticsRequest&) const = default;
};

/// Everything needed to launch one run. Round-trips losslessly through JSON,
/// and a preset's manifest echoes the fully resolved form.
struct ScenarioConfig {
    std::string name = "custom";
    ModelParams params;
    Kernel kernel = Kernel::box_symmetric(3.0);
    Grid grid;
    SchemeConfig scheme;
    InitialSpec initial = initial::PerturbedEquilibrium{};
    DiagnosticsRequest diagnostics;
    std::uint64_t seed = 1;
    std::string output_dir;

    /// Checks every module precondition the run will rely on.
    void validate() const;

    /// Concrete values for the -1 sentinels in `diagnostics`.
    DiagnosticsRequest resolved_diagnostics() const;
};

nlohmann::json to_json(const ScenarioConfig& config);
ScenarioConfig config_from_json(const nlohmann::json& j);

nlohmann::json kernel_to_json(const Kernel& kernel);
Kernel kernel_from_json(const nlohmann::json& j);

/// Scenario presets named after the phenomena they reproduce. Unknown names
/// raise InvalidArgumentError.
ScenarioConfig preset(const std::string& name);
std::vector<std::string> preset_names();
std::string preset_description(const std::string& name);

/// Smallest integer >= n whose prime factors are all in {2, 3, 5}; keeps the
/// spectral transform sizes fast.
int next_smooth_size(int n);

struct ScenarioResult {
    RunRecord record;
    nlohmann::json summary;
    int exit_code = 0; // 0 ok, 3 numerical blow-up
};

/// Runs the scenario and, when write_files is set, writes manifest.json,
/// snapshots.csv, the requested diagnostics CSVs and summary.json under
/// config.output_dir (error.json instead of summary.json on blow-up).
/// Validation problems raise exceptions before anything is written.
ScenarioResult run_scenario(const ScenarioConfig& config, bool write_files = true);

/// Stability analysis of (params, kernel): verdict line, minimum location,
/// predicted pattern period and nearest critical d (box kernels) on `out`;
/// Phi samples as CSV on `csv` when given.
DispersionReport stability_report(const ModelParams& params, const Kernel& kernel,
                                  std::ostream& out, std::ostream* csv = nullptr,
                                  double xi_max = -1.0, int n_samples = 2000);

/// Neutral curves (N, j, z_j, mu_j, tau_j) for the given widths and odd
/// branch indices, as CSV with header N,j,z_j,mu_critical,tau.
void write_neutral_curve_csv(std::ostream& out, const std::vector<double>& widths,
                             const std::vector<int>& branches);

} // namespace nlrd

#endif
