#ifndef NLRD_SOLVER_HPP
#define NLRD_SOLVER_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "nlrd/grid.hpp"
#include "nlrd/kernel.hpp"
#include "nlrd/model.hpp"

namespace nlrd {

enum class ConvolutionMode { Direct, Spectral };

/// Explicit-scheme settings. The dt invariants are checked by validate():
/// dt <= safety*dx^2/(2d) (diffusion) and dt <= safety/(|a-b| + sigma*c_max)
/// with c_max estimated as 2*sigma (reaction).
struct SchemeConfig {
    double dt = 1e-3;
    double t_end = 100.0;
    double snapshot_every = 1.0;
    ConvolutionMode convolution_mode = ConvolutionMode::Spectral;
    double safety = 0.4;

    void validate(const ModelParams& params, const Grid& grid) const;

    /// Largest dt the invariants admit for these parameters.
    static double max_stable_dt(const ModelParams& params, const Grid& grid,
                                double safety = 0.4, double c_max_estimate = -1.0);

    /// dt = safety*dx^2/(2d) capped by the reaction bound; the standard way
    /// presets fill the step in.
    static SchemeConfig with_defaults(const ModelParams& params, const Grid& grid,
                                      double t_end, double snapshot_every);

    bool operator==(const SchemeConfig&) const = default;
};

/// Time-stamped simulation output: snapshots, their total mass, and the
/// minimum field value seen at any step (for positivity monitoring).
struct RunRecord {
    Grid grid;
    std::vector<double> times;
    std::vector<Eigen::ArrayXd> snapshots;
    std::vector<double> masses;
    double min_value_seen = 0.0;

    struct Failure {
        double t = 0.0;
        std::string message;
    };
    std::optional<Failure> failure; // set when the run blew up; record is partial

    int size() const { return static_cast<int>(times.size()); }
    const Eigen::ArrayXd& final_state() const { return snapshots.back(); }
    double final_time() const { return times.back(); }
};

/// Precomputed circular/extended convolution with the sampled kernel.
/// One instance per simulation; apply() reuses internal FFT plans and
/// buffers, so a single instance must not be shared across threads.
class NonlocalOperator {
public:
    NonlocalOperator(const Kernel& kernel, const Grid& grid, ConvolutionMode mode);

    void apply(const Eigen::ArrayXd& c, Eigen::ArrayXd& out);
    Eigen::ArrayXd operator()(const Eigen::ArrayXd& c);

    const KernelWeights& weights() const;

private:
    struct Impl;
    std::shared_ptr<Impl> impl_;
};

/// Kernel-weighted average K_i = sum_k w_k c_{i-k} of the field, wrapped
/// (periodic) or constant-extended beyond the walls (zero-flux).
Eigen::ArrayXd nonlocal_term(const State& state, const Kernel& kernel, const Grid& grid,
                             ConvolutionMode mode = ConvolutionMode::Direct);

/// One explicit step of c_t = d c_xx + c (a - b - K). Raises BlowUpError when
/// the field stops being finite.
State step(const State& state, const ModelParams& params, const Kernel& kernel,
           const Grid& grid, double dt);

// ---- initial conditions ----------------------------------------------------

namespace initial {

struct Zero {
    bool operator==(const Zero&) const = default;
};

/// a - b plus uniform noise in [-amplitude, amplitude], reproducible from the
/// seed (generator is pinned in-code so reruns are byte-identical).
struct PerturbedEquilibrium {
    double amplitude = 1e-3;
    std::uint64_t seed = 1;
    bool operator==(const PerturbedEquilibrium&) const = default;
};

struct Plug {
    double center = 5.0;
    double width = 1.0;
    double height = 1.0;
    bool operator==(const Plug&) const = default;
};

struct TwoPlugs {
    Plug first, second;
    bool operator==(const TwoPlugs&) const = default;
};

} // namespace initial

using InitialSpec = std::variant<initial::Zero, initial::PerturbedEquilibrium, initial::Plug,
                                 initial::TwoPlugs>;

State build_initial(const InitialSpec& spec, const ModelParams& params, const Grid& grid);

/// Advances the initial state to t_end recording snapshots. Component
/// validity is checked up front; a blow-up mid-run is reported through
/// RunRecord::failure together with the partial record.
RunRecord simulate(const State& initial_state, const ModelParams& params, const Kernel& kernel,
                   const Grid& grid, const SchemeConfig& scheme);

} // namespace nlrd

#endif
