#include "nlrd/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>

#include <unsupported/Eigen/FFT>

namespace nlrd {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

bool is_box(const Kernel& k) {
    return k.shape() == KernelShape::BoxSymmetric || k.shape() == KernelShape::BoxAsymmetric;
}

} // namespace

// ---- config validation -------------------------------------------------------

void ScenarioConfig::validate() const {
    params.validate();
    grid.validate();
    scheme.validate(params, grid);
    // constructing the operator runs the support/mode checks
    NonlocalOperator probe(kernel, grid, scheme.convolution_mode);
    build_initial(initial, params, grid);
}

DiagnosticsRequest ScenarioConfig::resolved_diagnostics() const {
    DiagnosticsRequest d = diagnostics;
    const double sigma = params.sigma();
    if (d.front_level <= 0.0) d.front_level = sigma / 2.0;
    if (d.min_height <= 0.0) d.min_height = 0.1 * sigma;
    if (d.min_separation <= 0.0)
        d.min_separation =
            is_box(kernel) ? pattern_period(kernel.width()) / 4.0 : 4.0 * grid.dx();
    return d;
}

// ---- JSON ----------------------------------------------------------------------

json kernel_to_json(const Kernel& kernel) {
    json j;
    switch (kernel.shape()) {
        case KernelShape::BoxSymmetric: j["shape"] = "box_symmetric"; break;
        case KernelShape::BoxAsymmetric: j["shape"] = "box_asymmetric"; break;
        case KernelShape::Gaussian: j["shape"] = "gaussian"; break;
        case KernelShape::Exponential: j["shape"] = "exponential"; break;
        case KernelShape::Delta: j["shape"] = "delta"; return j;
    }
    j["width"] = kernel.parameter();
    j["normalized"] = kernel.normalized();
    return j;
}

Kernel kernel_from_json(const json& j) {
    const std::string shape = j.at("shape").get<std::string>();
    if (shape == "delta") return Kernel::delta();
    // "decay" is accepted as an alias for the Gaussian/Exponential parameter
    const double p = j.contains("width") ? j.at("width").get<double>()
                                         : j.at("decay").get<double>();
    const bool norm = j.value("normalized", true);
    if (shape == "box_symmetric") return Kernel::box_symmetric(p, norm);
    if (shape == "box_asymmetric") return Kernel::box_asymmetric(p, norm);
    if (shape == "gaussian") return Kernel::gaussian(p, norm);
    if (shape == "exponential") return Kernel::exponential(p, norm);
    throw ConfigError("unknown kernel shape: " + shape);
}

namespace {

json initial_to_json(const InitialSpec& spec) {
    json j;
    if (std::holds_alternative<initial::Zero>(spec)) {
        j["kind"] = "zero";
    } else if (const auto* p = std::get_if<initial::PerturbedEquilibrium>(&spec)) {
        j["kind"] = "perturbed_equilibrium";
        j["amplitude"] = p->amplitude;
    } else if (const auto* p = std::get_if<initial::Plug>(&spec)) {
        j["kind"] = "plug";
        j["center"] = p->center;
        j["width"] = p->width;
        j["height"] = p->height;
    } else if (const auto* p = std::get_if<initial::TwoPlugs>(&spec)) {
        j["kind"] = "two_plugs";
        for (const auto* plug : {&p->first, &p->second})
            j["plugs"].push_back(
                {{"center", plug->center}, {"width", plug->width}, {"height", plug->height}});
    }
    return j;
}

InitialSpec initial_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "zero") return initial::Zero{};
    if (kind == "perturbed_equilibrium")
        return initial::PerturbedEquilibrium{j.value("amplitude", 1e-3), 1};
    auto plug_at = [](const json& pj) {
        return initial::Plug{pj.at("center").get<double>(), pj.at("width").get<double>(),
                             pj.at("height").get<double>()};
    };
    if (kind == "plug") return plug_at(j);
    if (kind == "two_plugs") {
        const auto& plugs = j.at("plugs");
        if (plugs.size() != 2) throw ConfigError("two_plugs initial condition needs two plugs");
        return initial::TwoPlugs{plug_at(plugs[0]), plug_at(plugs[1])};
    }
    throw ConfigError("unknown initial condition kind: " + kind);
}

json diagnostics_to_json(const DiagnosticsRequest& d) {
    return {{"front", d.front},
            {"front_direction",
             d.front_direction == FrontDirection::Rightward ? "rightward" : "leftward"},
            {"front_level", d.front_level},
            {"peaks", d.peaks},
            {"min_height", d.min_height},
            {"min_separation", d.min_separation},
            {"spectrum", d.spectrum},
            {"drift", d.drift}};
}

DiagnosticsRequest diagnostics_from_json(const json& j) {
    DiagnosticsRequest d;
    d.front = j.value("front", d.front);
    d.front_direction = j.value("front_direction", std::string("rightward")) == "leftward"
                            ? FrontDirection::Leftward
                            : FrontDirection::Rightward;
    d.front_level = j.value("front_level", d.front_level);
    d.peaks = j.value("peaks", d.peaks);
    d.min_height = j.value("min_height", d.min_height);
    d.min_separation = j.value("min_separation", d.min_separation);
    d.spectrum = j.value("spectrum", d.spectrum);
    d.drift = j.value("drift", d.drift);
    return d;
}

} // namespace

json to_json(const ScenarioConfig& c) {
    json j;
    j["name"] = c.name;
    j["params"] = {{"d", c.params.d}, {"a", c.params.a}, {"b", c.params.b}};
    j["kernel"] = kernel_to_json(c.kernel);
    j["grid"] = {{"L", c.grid.L},
                 {"n", c.grid.n},
                 {"bc", c.grid.bc == BoundaryCondition::Periodic ? "periodic" : "zero_flux"}};
    j["scheme"] = {
        {"dt", c.scheme.dt},
        {"t_end", c.scheme.t_end},
        {"snapshot_every", c.scheme.snapshot_every},
        {"convolution_mode",
         c.scheme.convolution_mode == ConvolutionMode::Spectral ? "spectral" : "direct"},
        {"safety", c.scheme.safety}};
    j["initial"] = initial_to_json(c.initial);
    j["diagnostics"] = diagnostics_to_json(c.diagnostics);
    j["seed"] = c.seed;
    j["output_dir"] = c.output_dir;
    return j;
}

ScenarioConfig config_from_json(const json& j) {
    ScenarioConfig c;
    c.name = j.value("name", std::string("custom"));
    if (j.contains("params")) {
        const auto& p = j.at("params");
        c.params.d = p.value("d", c.params.d);
        c.params.a = p.value("a", c.params.a);
        c.params.b = p.value("b", c.params.b);
    }
    if (j.contains("kernel")) c.kernel = kernel_from_json(j.at("kernel"));
    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        c.grid.L = g.value("L", c.grid.L);
        c.grid.n = g.value("n", c.grid.n);
        c.grid.bc = g.value("bc", std::string("periodic")) == "zero_flux"
                        ? BoundaryCondition::ZeroFlux
                        : BoundaryCondition::Periodic;
    }
    if (j.contains("scheme")) {
        const auto& s = j.at("scheme");
        c.scheme.dt = s.value("dt", c.scheme.dt);
        c.scheme.t_end = s.value("t_end", c.scheme.t_end);
        c.scheme.snapshot_every = s.value("snapshot_every", c.scheme.snapshot_every);
        c.scheme.convolution_mode = s.value("convolution_mode", std::string("spectral")) == "direct"
                                        ? ConvolutionMode::Direct
                                        : ConvolutionMode::Spectral;
        c.scheme.safety = s.value("safety", c.scheme.safety);
    }
    if (j.contains("initial")) c.initial = initial_from_json(j.at("initial"));
    if (j.contains("diagnostics")) c.diagnostics = diagnostics_from_json(j.at("diagnostics"));
    c.seed = j.value("seed", c.seed);
    c.output_dir = j.value("output_dir", c.output_dir);
    return c;
}

// ---- presets -------------------------------------------------------------------

int next_smooth_size(int n) {
    auto good = [](int v) {
        if (v > 4 && v % 2 != 0) return false; // even keeps the real-FFT fast path
        for (int p : {2, 3, 5})
            while (v % p == 0) v /= p;
        return v == 1;
    };
    while (!good(n)) ++n;
    return n;
}

namespace {

// dx rule: min(0.02, tau/64) with tau from the box prediction when available.
double default_dx(const Kernel& kernel) {
    double dx = 0.02;
    if (is_box(kernel)) dx = std::min(dx, pattern_period(kernel.width()) / 64.0);
    return dx;
}

ScenarioConfig make_scenario(std::string name, ModelParams params, Kernel kernel, double L,
                             InitialSpec init, double t_end, double snapshot_every) {
    ScenarioConfig c;
    c.name = std::move(name);
    c.params = params;
    c.kernel = kernel;
    c.grid.L = L;
    c.grid.n = next_smooth_size(static_cast<int>(std::ceil(L / default_dx(kernel))));
    c.grid.bc = BoundaryCondition::Periodic;
    c.scheme = SchemeConfig::with_defaults(params, c.grid, t_end, snapshot_every);
    c.initial = std::move(init);
    c.seed = 20060101; // default preset seed, override with --seed
    return c;
}

struct PresetEntry {
    const char* name;
    const char* description;
    ScenarioConfig (*make)();
};

const PresetEntry kPresets[] = {
    {"fig1", "pattern emergence from a noisy equilibrium (d=0.05, box N=3, L=10)",
     [] {
         auto c = make_scenario("fig1", {0.05, 2.0, 1.0}, Kernel::box_symmetric(3.0), 10.0,
                                initial::PerturbedEquilibrium{1e-3, 1}, 300.0, 5.0);
         return c;
     }},
    {"fig2", "splitting of a centered population plug into two (d=0.05, box N=3, L=10)",
     [] {
         auto c = make_scenario("fig2", {0.05, 2.0, 1.0}, Kernel::box_symmetric(3.0), 10.0,
                                initial::Plug{5.0, 1.0, 1.0}, 150.0, 2.0);
         return c;
     }},
    {"fig3", "two plugs splitting in cascade on a wide domain (d=0.05, box N=3, L=40)",
     [] {
         auto c = make_scenario("fig3", {0.05, 2.0, 1.0}, Kernel::box_symmetric(3.0), 40.0,
                                initial::TwoPlugs{{40.0 / 3.0, 1.0, 1.0}, {80.0 / 3.0, 1.0, 1.0}},
                                400.0, 5.0);
         return c;
     }},
    {"fig4", "cascade at small diffusion, nearly disconnected structures (d=0.01)",
     [] {
         auto c = make_scenario("fig4", {0.01, 2.0, 1.0}, Kernel::box_symmetric(3.0), 40.0,
                                initial::TwoPlugs{{40.0 / 3.0, 1.0, 1.0}, {80.0 / 3.0, 1.0, 1.0}},
                                400.0, 5.0);
         return c;
     }},
    {"fig5", "drifting maxima with the one-sided kernel, N=2 (d=0.01)",
     [] {
         auto c = make_scenario("fig5", {0.01, 2.0, 1.0}, Kernel::box_asymmetric(2.0), 100.0,
                                initial::Plug{50.0, 1.0, 1.0}, 80.0, 1.0);
         c.diagnostics.drift = true;
         c.diagnostics.front = true;
         c.diagnostics.front_direction = FrontDirection::Leftward;
         return c;
     }},
    {"fig6", "travelling front with a stable equilibrium behind it (d=0.06, box N=1.5)",
     [] {
         auto c = make_scenario("fig6", {0.06, 2.0, 1.0}, Kernel::box_symmetric(1.5), 150.0,
                                initial::Plug{75.0, 1.0, 1.0}, 60.0, 1.0);
         c.diagnostics.front = true;
         return c;
     }},
    {"fig7", "periodic wave: front leaving a patterned wake (d=0.06, box N=3)",
     [] {
         auto c = make_scenario("fig7", {0.06, 2.0, 1.0}, Kernel::box_symmetric(3.0), 150.0,
                                initial::Plug{75.0, 1.0, 1.0}, 60.0, 1.0);
         c.diagnostics.front = true;
         return c;
     }},
    {"fig8", "drifting pattern near the stability boundary, one-sided kernel N=1.1 (d=0.01)",
     [] {
         auto c = make_scenario("fig8", {0.01, 2.0, 1.0}, Kernel::box_asymmetric(1.1), 110.0,
                                initial::Plug{55.0, 1.0, 1.0}, 150.0, 1.0);
         c.diagnostics.front = true;
         c.diagnostics.front_direction = FrontDirection::Leftward;
         c.diagnostics.drift = true;
         return c;
     }},
};

} // namespace

ScenarioConfig preset(const std::string& name) {
    for (const auto& e : kPresets)
        if (name == e.name) return e.make();
    throw InvalidArgumentError("unknown preset: " + name);
}

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const auto& e : kPresets) names.emplace_back(e.name);
    return names;
}

std::string preset_description(const std::string& name) {
    for (const auto& e : kPresets)
        if (name == e.name) return e.description;
    throw InvalidArgumentError("unknown preset: " + name);
}

// ---- artifacts ------------------------------------------------------------------

namespace {

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw IoError("failed writing " + path.string());
}

void write_snapshots_csv(const fs::path& path, const RunRecord& rec) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "t,x,c\n";
    std::string line;
    for (int s = 0; s < rec.size(); ++s) {
        const std::string t = fmt_double(rec.times[s]);
        for (int i = 0; i < rec.grid.n; ++i) {
            line = t;
            line += ',';
            line += fmt_double(rec.grid.x(i));
            line += ',';
            line += fmt_double(rec.snapshots[s][i]);
            line += '\n';
            out << line;
        }
    }
    if (!out) throw IoError("failed writing " + path.string());
}

std::string spectrum_csv(const Eigen::ArrayXd& c, const Grid& grid) {
    Eigen::VectorXd centered = (c - c.mean()).matrix();
    Eigen::FFT<double> fft;
    Eigen::VectorXcd spec;
    fft.fwd(spec, centered);
    std::string csv = "xi,power\n";
    for (int m = 1; m <= grid.n / 2; ++m) {
        csv += fmt_double(2.0 * std::numbers::pi * m / grid.L);
        csv += ',';
        csv += fmt_double(std::norm(spec[m]));
        csv += '\n';
    }
    return csv;
}

json manifest_json(const ScenarioConfig& config, const DiagnosticsRequest& resolved) {
    json m;
    m["tool"] = "nlrd";
    m["version"] = std::string(version);
    m["config"] = to_json(config);
    json derived;
    derived["dx"] = config.grid.dx();
    derived["sigma"] = config.params.sigma();
    derived["mu"] = config.params.mu();
    derived["steps"] =
        static_cast<long long>(std::ceil(config.scheme.t_end / config.scheme.dt - 1e-9));
    derived["minimal_wave_speed"] = minimal_wave_speed(config.params);
    derived["diagnostics"] = diagnostics_to_json(resolved);
    if (is_box(config.kernel)) {
        const double N = config.kernel.width();
        derived["pattern_period"] = pattern_period(N);
        derived["critical_d"] = config.params.sigma() * critical_mu(N, 1).mu_critical;
    }
    m["derived"] = derived;
    return m;
}

} // namespace

ScenarioResult run_scenario(const ScenarioConfig& config, bool write_files) {
    config.validate();
    const DiagnosticsRequest diag = config.resolved_diagnostics();

    // the run seed drives the noisy initial condition
    InitialSpec init = config.initial;
    if (auto* p = std::get_if<initial::PerturbedEquilibrium>(&init)) p->seed = config.seed;

    fs::path dir;
    if (write_files) {
        if (config.output_dir.empty()) throw ConfigError("run_scenario: output_dir is empty");
        dir = config.output_dir;
        fs::create_directories(dir);
        write_text(dir / "manifest.json", manifest_json(config, diag).dump(2) + "\n");
    }

    ScenarioResult result;
    const State start = build_initial(init, config.params, config.grid);
    result.record = simulate(start, config.params, config.kernel, config.grid, config.scheme);
    const RunRecord& rec = result.record;

    json summary;
    summary["name"] = config.name;
    summary["final_time"] = rec.final_time();
    summary["min_value_seen"] = rec.min_value_seen;
    summary["mass_initial"] = rec.masses.front();
    summary["mass_final"] = rec.masses.back();
    summary["predicted_minimal_speed"] = minimal_wave_speed(config.params);

    if (rec.failure) {
        result.exit_code = 3;
        json err = {{"error",
                     {{"type", "blow_up"}, {"t", rec.failure->t}, {"message", rec.failure->message}}}};
        summary["failure"] = err["error"];
        if (write_files) {
            write_snapshots_csv(dir / "snapshots.csv", rec);
            write_text(dir / "error.json", err.dump(2) + "\n");
        }
        result.summary = summary;
        return result;
    }

    const State final_state{rec.final_state(), rec.final_time()};

    if (diag.peaks) {
        auto history = splitting_history(rec, diag.min_height, diag.min_separation);
        auto events = splitting_events(history);
        const auto pattern =
            pattern_summary(final_state, rec.grid, diag.min_height, diag.min_separation);
        summary["peaks"] = {{"final_count", pattern.peak_count},
                            {"positions", pattern.peak_positions},
                            {"amplitude", pattern.amplitude},
                            {"dominant_xi", pattern.dominant_xi},
                            {"splitting_events", events}};
        if (write_files) {
            std::string csv = "t,peak_count\n";
            for (const auto& [t, count] : history)
                csv += fmt_double(t) + "," + std::to_string(count) + "\n";
            write_text(dir / "peaks.csv", csv);
        }
    }

    if (diag.front) {
        try {
            const auto trace = track_front(rec, diag.front_level, diag.front_direction);
            const double predicted = minimal_wave_speed(config.params);
            summary["front"] = {{"fitted_speed", trace.fitted_speed},
                                {"fit_residual", trace.fit_residual},
                                {"level", diag.front_level},
                                {"relative_error_vs_minimal",
                                 std::abs(std::abs(trace.fitted_speed) - predicted) / predicted}};
            if (write_files) {
                std::string csv = "t,x_front\n";
                for (std::size_t i = 0; i < trace.t.size(); ++i)
                    csv += fmt_double(trace.t[i]) + "," + fmt_double(trace.x[i]) + "\n";
                write_text(dir / "front.csv", csv);
            }
        } catch (const NoFrontError& e) {
            summary["front"] = {{"error", e.what()}};
        }
    }

    if (diag.drift) {
        const auto drift =
            drift_tracker(rec, diag.min_height, diag.min_separation, diag.min_separation);
        json tracks = json::array();
        for (const auto& tr : drift.tracks)
            tracks.push_back({{"speed", tr.speed},
                              {"t_first", tr.t.front()},
                              {"t_last", tr.t.back()},
                              {"x_first", tr.x.front()},
                              {"x_last", tr.x.back()},
                              {"lost", tr.lost}});
        summary["drift"] = {{"leading_edge_speed", drift.drift_speed},
                            {"partial", drift.partial},
                            {"final_spacing", drift.final_spacing},
                            {"tracks", tracks}};
    }

    if (write_files) {
        write_snapshots_csv(dir / "snapshots.csv", rec);
        if (diag.spectrum)
            write_text(dir / "spectrum.csv", spectrum_csv(rec.final_state(), rec.grid));
        write_text(dir / "summary.json", summary.dump(2) + "\n");
    }
    result.summary = summary;
    return result;
}

// ---- reports --------------------------------------------------------------------

DispersionReport stability_report(const ModelParams& params, const Kernel& kernel,
                                  std::ostream& out, std::ostream* csv, double xi_max,
                                  int n_samples) {
    if (xi_max <= 0.0) xi_max = default_xi_max(params, kernel);
    const auto rep = stability_verdict(params, kernel, xi_max, n_samples);

    out << (rep.stable ? "STABLE" : "UNSTABLE") << "\n";
    out << "  min Phi      = " << rep.min_value << " at xi = " << rep.min_xi << "\n";
    out << "  sigma        = " << params.sigma() << ", mu = d/sigma = " << params.mu() << "\n";
    if (is_box(kernel)) {
        const double N = kernel.width();
        out << "  predicted pattern period tau = " << pattern_period(N) << "\n";
        out << "  critical d (first branch)    = "
            << params.sigma() * critical_mu(N, 1).mu_critical << "\n";
    } else {
        out << "  no finite critical d for this kernel (transform stays positive)\n";
    }

    if (csv) {
        *csv << "xi,phi\n";
        for (int i = 0; i < rep.xi.size(); ++i)
            *csv << fmt_double(rep.xi[i]) << ',' << fmt_double(rep.phi[i]) << '\n';
    }
    return rep;
}

void write_neutral_curve_csv(std::ostream& out, const std::vector<double>& widths,
                             const std::vector<int>& branches) {
    for (int j : branches)
        if (j < 1 || j % 2 == 0)
            throw InvalidBranchError("neutral curve: branch indices must be positive odd integers");
    out << "N,j,z_j,mu_critical,tau\n";
    for (double N : widths) {
        for (int j : branches) {
            const auto pt = critical_mu(N, j);
            out << fmt_double(N) << ',' << j << ',' << fmt_double(pt.z) << ','
                << fmt_double(pt.mu_critical) << ',' << fmt_double(pt.tau) << '\n';
        }
    }
}

} // namespace nlrd
