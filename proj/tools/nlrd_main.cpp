#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "nlrd/scenario.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitBlowUp = 3;
constexpr int kExitIo = 4;

std::string output_root() {
    if (const char* env = std::getenv("NLRD_OUTPUT_ROOT")) return env;
    return "runs";
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw nlrd::IoError("cannot read " + path);
    json j;
    in >> j;
    return j;
}

// Shared --preset/--config/--override plumbing for the scenario subcommands.
struct ConfigCli {
    std::string preset_name;
    std::string config_path;
    std::string out_dir;

    // flag overrides; NaN/empty means "keep"
    double d = NAN, a = NAN, b = NAN;
    std::string kernel_shape;
    double kernel_width = NAN;
    double L = NAN;
    int n = -1;
    double dt = NAN, t_end = NAN, snapshot_every = NAN;
    std::string mode;
    std::uint64_t seed = 0;
    bool seed_set = false;
    double noise_amplitude = NAN;

    void attach(CLI::App* cmd) {
        cmd->add_option("--preset", preset_name, "start from a named preset (see list-presets)");
        cmd->add_option("--config", config_path, "start from a JSON configuration file");
        cmd->add_option("--out", out_dir, "output directory (default <root>/<name>)");
        cmd->add_option("--d", d, "diffusion coefficient override");
        cmd->add_option("--a", a, "birth constant override");
        cmd->add_option("--b", b, "death rate override");
        cmd->add_option("--kernel", kernel_shape,
                        "kernel shape override (box_symmetric, box_asymmetric, gaussian, "
                        "exponential, delta)");
        cmd->add_option("--width", kernel_width, "kernel width/decay parameter override");
        cmd->add_option("--L", L, "domain length override");
        cmd->add_option("--n", n, "grid point count override");
        cmd->add_option("--dt", dt, "time step override");
        cmd->add_option("--t-end", t_end, "final time override");
        cmd->add_option("--snapshot-every", snapshot_every, "snapshot interval override");
        cmd->add_option("--mode", mode, "convolution mode override (direct, spectral)");
        cmd->add_option("--seed", seed, "RNG seed override")->each([this](std::string) {
            seed_set = true;
        });
        cmd->add_option("--noise-amplitude", noise_amplitude,
                        "perturbed-equilibrium noise amplitude override");
    }

    nlrd::ScenarioConfig build() const {
        nlrd::ScenarioConfig cfg;
        if (!preset_name.empty() && !config_path.empty())
            throw nlrd::InvalidArgumentError("--preset and --config are mutually exclusive");
        if (!preset_name.empty())
            cfg = nlrd::preset(preset_name);
        else if (!config_path.empty())
            cfg = nlrd::config_from_json(load_json_file(config_path));
        else
            throw nlrd::InvalidArgumentError("need --preset or --config");

        // flags win over the file/preset
        if (!std::isnan(d)) cfg.params.d = d;
        if (!std::isnan(a)) cfg.params.a = a;
        if (!std::isnan(b)) cfg.params.b = b;
        if (!kernel_shape.empty() || !std::isnan(kernel_width)) {
            json kj = nlrd::kernel_to_json(cfg.kernel);
            if (!kernel_shape.empty()) kj["shape"] = kernel_shape;
            if (!std::isnan(kernel_width)) kj["width"] = kernel_width;
            cfg.kernel = nlrd::kernel_from_json(kj);
        }
        if (!std::isnan(L)) cfg.grid.L = L;
        if (n > 0) cfg.grid.n = n;
        if (!std::isnan(t_end)) cfg.scheme.t_end = t_end;
        if (!std::isnan(snapshot_every)) cfg.scheme.snapshot_every = snapshot_every;
        if (!mode.empty())
            cfg.scheme.convolution_mode = mode == "direct" ? nlrd::ConvolutionMode::Direct
                                                           : nlrd::ConvolutionMode::Spectral;
        // parameter overrides invalidate a preset dt; recompute unless pinned
        if (!std::isnan(dt))
            cfg.scheme.dt = dt;
        else if (!std::isnan(d) || !std::isnan(L) || n > 0)
            cfg.scheme.dt = nlrd::SchemeConfig::max_stable_dt(cfg.params, cfg.grid);
        if (seed_set) cfg.seed = seed;
        if (!std::isnan(noise_amplitude)) {
            if (auto* p = std::get_if<nlrd::initial::PerturbedEquilibrium>(&cfg.initial))
                p->amplitude = noise_amplitude;
            else
                throw nlrd::InvalidArgumentError(
                    "--noise-amplitude applies to perturbed-equilibrium initial conditions");
        }

        if (!out_dir.empty())
            cfg.output_dir = out_dir;
        else if (cfg.output_dir.empty())
            cfg.output_dir = (fs::path(output_root()) / cfg.name).string();
        return cfg;
    }
};

int write_error_json(const std::string& dir, const std::string& type, const std::string& message,
                     int code) {
    if (!dir.empty()) {
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (!ec) {
            std::ofstream out(fs::path(dir) / "error.json");
            out << json{{"error", {{"type", type}, {"message", message}}}}.dump(2) << "\n";
        }
    }
    std::cerr << "error (" << type << "): " << message << "\n";
    return code;
}

int cmd_simulate(const ConfigCli& cli) {
    const nlrd::ScenarioConfig cfg = cli.build();
    auto result = nlrd::run_scenario(cfg, true);
    std::cout << result.summary.dump(2) << "\n";
    if (result.exit_code == 0)
        std::cout << "run complete, artifacts in " << cfg.output_dir << "\n";
    else
        std::cerr << "run FAILED (blow-up), partial artifacts in " << cfg.output_dir << "\n";
    return result.exit_code;
}

int cmd_stability(const ConfigCli& cli, double xi_max, int samples) {
    const nlrd::ScenarioConfig cfg = cli.build();
    fs::create_directories(cfg.output_dir);
    std::ofstream csv(fs::path(cfg.output_dir) / "dispersion.csv");
    if (!csv) throw nlrd::IoError("cannot write dispersion.csv in " + cfg.output_dir);
    nlrd::stability_report(cfg.params, cfg.kernel, std::cout, &csv, xi_max, samples);
    std::cout << "Phi samples written to " << cfg.output_dir << "/dispersion.csv\n";
    return 0;
}

int cmd_neutral_curve(double n_min, double n_max, int n_steps, int branch_count,
                      std::vector<int> branch_list, const std::string& out_path) {
    if (!(n_min > 0.0) || !(n_max >= n_min) || n_steps < 1)
        throw nlrd::InvalidArgumentError("neutral-curve: need 0 < n-min <= n-max and n-steps >= 1");
    std::vector<double> widths;
    for (int i = 0; i < n_steps; ++i)
        widths.push_back(n_steps == 1 ? n_min
                                      : n_min + (n_max - n_min) * i / (n_steps - 1.0));
    if (branch_list.empty())
        for (int j = 1, taken = 0; taken < branch_count; j += 2, ++taken) branch_list.push_back(j);

    std::ostringstream csv;
    nlrd::write_neutral_curve_csv(csv, widths, branch_list);
    if (out_path.empty() || out_path == "-") {
        std::cout << csv.str();
    } else {
        std::ofstream out(out_path);
        if (!out) throw nlrd::IoError("cannot write " + out_path);
        out << csv.str();
        std::cout << "neutral curve written to " << out_path << "\n";
    }
    return 0;
}

int cmd_speed(const ConfigCli& cli) {
    nlrd::ScenarioConfig cfg = cli.build();
    cfg.diagnostics.front = true;
    auto result = nlrd::run_scenario(cfg, true);
    if (result.exit_code != 0) return result.exit_code;

    const double predicted = result.summary["predicted_minimal_speed"].get<double>();
    if (!result.summary.contains("front") || result.summary["front"].contains("error"))
        throw nlrd::NoFrontError("speed: no front could be tracked in this scenario");
    const double measured = result.summary["front"]["fitted_speed"].get<double>();
    const double rel = result.summary["front"]["relative_error_vs_minimal"].get<double>();

    json out = {{"measured_speed", measured},
                {"predicted_minimal_speed", predicted},
                {"relative_error", rel}};
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_sweep(const ConfigCli& cli, const std::string& param_path,
              const std::vector<double>& values, int jobs) {
    if (values.empty()) throw nlrd::InvalidArgumentError("sweep: need at least one --values entry");
    const nlrd::ScenarioConfig base = cli.build();
    const json base_json = nlrd::to_json(base);
    const json::json_pointer ptr("/" + [&] {
        std::string p = param_path;
        for (auto& ch : p)
            if (ch == '.') ch = '/';
        return p;
    }());

    struct Task {
        nlrd::ScenarioConfig cfg;
        double value;
        int exit_code = 0;
        std::string message;
    };
    std::vector<Task> tasks;
    for (double v : values) {
        json j = base_json;
        j[ptr] = v;
        Task t{nlrd::config_from_json(j), v};
        std::ostringstream dir;
        dir << base.output_dir << "/" << param_path << "=" << v;
        t.cfg.output_dir = dir.str();
        t.cfg.name = base.name + "_sweep";
        // keep the step consistent with the swept parameter
        t.cfg.scheme.dt = std::min(t.cfg.scheme.dt,
                                   nlrd::SchemeConfig::max_stable_dt(t.cfg.params, t.cfg.grid));
        tasks.push_back(std::move(t));
    }

    std::mutex mx;
    std::size_t next = 0;
    auto worker = [&] {
        for (;;) {
            std::size_t i;
            {
                std::lock_guard lock(mx);
                if (next >= tasks.size()) return;
                i = next++;
            }
            try {
                auto result = nlrd::run_scenario(tasks[i].cfg, true);
                tasks[i].exit_code = result.exit_code;
            } catch (const std::exception& e) {
                tasks[i].exit_code = kExitValidation;
                tasks[i].message = e.what();
            }
        }
    };
    jobs = std::max(1, jobs);
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    int rc = 0;
    for (const auto& t : tasks) {
        std::cout << param_path << " = " << t.value << " -> "
                  << (t.exit_code == 0 ? "ok" : "FAILED") << " (" << t.cfg.output_dir << ")";
        if (!t.message.empty()) std::cout << " " << t.message;
        std::cout << "\n";
        rc = std::max(rc, t.exit_code);
    }
    return rc;
}

int cmd_list_presets() {
    for (const auto& name : nlrd::preset_names()) {
        const auto cfg = nlrd::preset(name);
        std::cout << name << "  " << nlrd::preset_description(name) << "\n";
        std::cout << "    d=" << cfg.params.d << " a=" << cfg.params.a << " b=" << cfg.params.b
                  << " L=" << cfg.grid.L << " n=" << cfg.grid.n << " t_end=" << cfg.scheme.t_end
                  << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"nlrd: nonlocal-consumption reaction-diffusion toolkit"};
    app.require_subcommand(1);

    ConfigCli sim_cli, stab_cli, speed_cli, sweep_cli;

    auto* sim = app.add_subcommand("simulate", "run a scenario and write its artifacts");
    sim_cli.attach(sim);

    auto* stab = app.add_subcommand("stability", "dispersion scan and stability verdict");
    stab_cli.attach(stab);
    double xi_max = -1.0;
    int samples = 2000;
    stab->add_option("--xi-max", xi_max, "scan upper bound (default max(20/N, 10 sqrt(sigma/d)))");
    stab->add_option("--samples", samples, "number of scan samples");

    auto* ncurve = app.add_subcommand("neutral-curve", "tabulate critical mu over kernel widths");
    double n_min = 1.0, n_max = 3.0;
    int n_steps = 3, branch_count = 1;
    std::vector<int> branch_list;
    std::string ncurve_out;
    ncurve->add_option("--n-min", n_min, "smallest kernel width");
    ncurve->add_option("--n-max", n_max, "largest kernel width");
    ncurve->add_option("--n-steps", n_steps, "number of widths");
    ncurve->add_option("--branches", branch_count, "number of odd branches (1 -> j=1, 2 -> j=1,3, ...)");
    ncurve->add_option("--branch-index", branch_list, "explicit branch indices (odd)");
    ncurve->add_option("--out", ncurve_out, "output CSV path ('-' for stdout)");

    auto* speed = app.add_subcommand("speed", "measure the front speed against 2 sqrt(d sigma)");
    speed_cli.attach(speed);

    auto* sweep = app.add_subcommand("sweep", "fan a scenario out over parameter values");
    sweep_cli.attach(sweep);
    std::string sweep_param;
    std::vector<double> sweep_values;
    int sweep_jobs = 1;
    sweep->add_option("--param", sweep_param, "config path to vary, e.g. params.d or kernel.width")
        ->required();
    sweep->add_option("--values", sweep_values, "values to sweep")->required()->delimiter(',');
    sweep->add_option("--jobs", sweep_jobs, "parallel workers");

    app.add_subcommand("list-presets", "list scenario presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitValidation;
    }

    std::string err_dir;
    try {
        if (sim->parsed()) {
            err_dir = sim_cli.out_dir;
            return cmd_simulate(sim_cli);
        }
        if (stab->parsed()) return cmd_stability(stab_cli, xi_max, samples);
        if (ncurve->parsed())
            return cmd_neutral_curve(n_min, n_max, n_steps, branch_count, branch_list, ncurve_out);
        if (speed->parsed()) return cmd_speed(speed_cli);
        if (sweep->parsed()) return cmd_sweep(sweep_cli, sweep_param, sweep_values, sweep_jobs);
        return cmd_list_presets();
    } catch (const nlrd::IoError& e) {
        return write_error_json(err_dir, "io", e.what(), kExitIo);
    } catch (const fs::filesystem_error& e) {
        return write_error_json(err_dir, "io", e.what(), kExitIo);
    } catch (const nlrd::BlowUpError& e) {
        return write_error_json(err_dir, "blow_up", e.what(), kExitBlowUp);
    } catch (const std::exception& e) {
        return write_error_json(err_dir, "validation", e.what(), kExitValidation);
    }
}
