#include <cmath>
#include <numbers>

#include <doctest.h>

#include "nlrd/dispersion.hpp"
#include "nlrd/solver.hpp"

using namespace nlrd;
using std::numbers::pi;

namespace {

const ModelParams kFig1{0.05, 2.0, 1.0};

Grid periodic_grid(double L, int n) { return {L, n, BoundaryCondition::Periodic}; }

// A smooth positive deterministic field made of a few harmonics.
Eigen::ArrayXd smooth_field(const Grid& grid, double base = 1.0) {
    Eigen::ArrayXd c(grid.n);
    for (int i = 0; i < grid.n; ++i) {
        const double x = grid.x(i);
        c[i] = base + 0.3 * std::cos(2.0 * pi * x / grid.L) +
               0.17 * std::sin(6.0 * pi * x / grid.L) + 0.05 * std::cos(10.0 * pi * x / grid.L);
    }
    return c;
}

// Test-local logistic stepper (the delta-kernel reduction target), written
// against the same stencil but without going through the solver.
Eigen::ArrayXd logistic_step(const Eigen::ArrayXd& c, const ModelParams& p, const Grid& grid,
                             double dt) {
    const int n = grid.n;
    const double inv_dx2 = 1.0 / (grid.dx() * grid.dx());
    Eigen::ArrayXd out(n);
    for (int i = 0; i < n; ++i) {
        const double lap = (c[(i + 1) % n] - 2.0 * c[i] + c[(i - 1 + n) % n]) * inv_dx2;
        out[i] = c[i] + dt * (p.d * lap + c[i] * (p.sigma() - c[i]));
    }
    return out;
}

} // namespace

TEST_SUITE("solver") {

TEST_CASE("nonlocal term: unit-mass convolution of a constant is the constant") {
    const Grid grid = periodic_grid(10.0, 128);
    State s{Eigen::ArrayXd::Constant(grid.n, 0.75), 0.0};
    for (auto mode : {ConvolutionMode::Direct, ConvolutionMode::Spectral}) {
        const auto K = nonlocal_term(s, Kernel::box_symmetric(3.0), grid, mode);
        CHECK((K - 0.75).abs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("nonlocal term: delta kernel is the identity") {
    const Grid grid = periodic_grid(10.0, 200);
    State s{smooth_field(grid), 0.0};
    const auto K = nonlocal_term(s, Kernel::delta(), grid);
    CHECK((K - s.c).abs().maxCoeff() == 0.0);
}

TEST_CASE("nonlocal term: direct and spectral paths agree to 1e-8") {
    const Grid grid = periodic_grid(10.0, 512);
    State s{smooth_field(grid), 0.0};
    for (const auto& k :
         {Kernel::box_symmetric(1.0), Kernel::box_asymmetric(1.1), Kernel::box_symmetric(3.0)}) {
        const auto direct = nonlocal_term(s, k, grid, ConvolutionMode::Direct);
        const auto spectral = nonlocal_term(s, k, grid, ConvolutionMode::Spectral);
        CHECK((direct - spectral).abs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("nonlocal term: configuration errors") {
    const Grid zero_flux{10.0, 128, BoundaryCondition::ZeroFlux};
    State s{Eigen::ArrayXd::Ones(zero_flux.n), 0.0};
    CHECK_THROWS_AS(nonlocal_term(s, Kernel::box_symmetric(1.0), zero_flux,
                                  ConvolutionMode::Spectral),
                    ConfigError);

    const Grid small = periodic_grid(5.0, 128);
    State s2{Eigen::ArrayXd::Ones(small.n), 0.0};
    CHECK_THROWS_AS(nonlocal_term(s2, Kernel::box_symmetric(3.0), small), ConfigError);
}

TEST_CASE("zero-flux walls: constant extension keeps the equilibrium flat") {
    const Grid grid{10.0, 201, BoundaryCondition::ZeroFlux};
    State s{Eigen::ArrayXd::Constant(grid.n, 1.0), 0.0};
    const auto K = nonlocal_term(s, Kernel::box_symmetric(2.0), grid);
    CHECK((K - 1.0).abs().maxCoeff() < 1e-13);

    const auto next = step(s, kFig1, Kernel::box_symmetric(2.0), grid, 1e-3);
    CHECK((next.c - 1.0).abs().maxCoeff() < 1e-13);
}

TEST_CASE("homogeneous equilibria are preserved") {
    const Grid grid = periodic_grid(10.0, 128);
    const auto box = Kernel::box_symmetric(3.0);

    State eq{Eigen::ArrayXd::Constant(grid.n, kFig1.sigma()), 0.0};
    auto one = step(eq, kFig1, box, grid, 1e-3);
    CHECK((one.c - kFig1.sigma()).abs().maxCoeff() < 1e-13);

    State zero{Eigen::ArrayXd::Zero(grid.n), 0.0};
    auto zero_next = step(zero, kFig1, box, grid, 1e-3);
    CHECK((zero_next.c == 0.0).all());

    // 100 time units, both convolution paths: drift below 1e-12 per unit time
    for (auto mode : {ConvolutionMode::Direct, ConvolutionMode::Spectral}) {
        SchemeConfig scheme = SchemeConfig::with_defaults(kFig1, grid, 100.0, 100.0);
        scheme.convolution_mode = mode;
        const auto rec = simulate(eq, kFig1, box, grid, scheme);
        REQUIRE(!rec.failure);
        CHECK((rec.final_state() - kFig1.sigma()).abs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("single-step growth of low modes matches -Phi to 5%") {
    const Grid grid = periodic_grid(10.0, 500);
    const auto box = Kernel::box_symmetric(3.0);
    const double dt = SchemeConfig::max_stable_dt(kFig1, grid);
    const double eps = 1e-6;

    for (int mode = 1; mode <= 3; ++mode) {
        const double xi = 2.0 * pi * mode / grid.L;
        Eigen::ArrayXd cosine(grid.n);
        for (int i = 0; i < grid.n; ++i) cosine[i] = std::cos(xi * grid.x(i));

        State s{kFig1.sigma() * (1.0 + eps * cosine), 0.0};
        const auto next = step(s, kFig1, box, grid, dt);

        const double a0 = ((s.c - kFig1.sigma()) * cosine).sum();
        const double a1 = ((next.c - kFig1.sigma()) * cosine).sum();
        const double measured_rate = (a1 / a0 - 1.0) / dt;
        const double predicted = -dispersion_value(kFig1, box, xi);
        CHECK(std::abs(measured_rate - predicted) < 0.05 * std::abs(predicted));
    }
}

TEST_CASE("delta kernel reduces to the local logistic solver, 1e-12 per step") {
    const Grid grid = periodic_grid(10.0, 200);
    const double dt = SchemeConfig::max_stable_dt(kFig1, grid);
    State s{smooth_field(grid, 1.0), 0.0};
    for (int i = 0; i < 500; ++i) {
        const auto expected = logistic_step(s.c, kFig1, grid, dt);
        s = step(s, kFig1, Kernel::delta(), grid, dt);
        CHECK((s.c - expected).abs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("grid convergence on a smooth stable run is at least O(dx^1.7)") {
    const ModelParams params{0.12, 2.0, 1.0};
    const auto box = Kernel::box_symmetric(3.0);
    const double t_end = 2.0;

    auto final_state = [&](int n) {
        const Grid grid = periodic_grid(10.0, n);
        const double dt_max = SchemeConfig::max_stable_dt(params, grid);
        SchemeConfig scheme;
        scheme.dt = t_end / std::ceil(t_end / dt_max); // land on t_end exactly
        scheme.t_end = t_end;
        scheme.snapshot_every = t_end;
        Eigen::ArrayXd c0(n);
        for (int i = 0; i < n; ++i)
            c0[i] = params.sigma() * (1.0 + 0.1 * std::cos(2.0 * pi * grid.x(i) / grid.L));
        const auto rec = simulate({c0, 0.0}, params, box, grid, scheme);
        REQUIRE(!rec.failure);
        return rec.final_state();
    };

    const auto coarse = final_state(200);
    const auto mid = final_state(400);
    const auto fine = final_state(800);

    double e1 = 0.0, e2 = 0.0;
    for (int i = 0; i < 200; ++i) e1 = std::max(e1, std::abs(coarse[i] - fine[4 * i]));
    for (int i = 0; i < 400; ++i) e2 = std::max(e2, std::abs(mid[i] - fine[2 * i]));
    const double order = std::log2(e1 / e2);
    CHECK(order >= 1.7);
}

TEST_CASE("perturbations grow below and decay above the critical diffusion") {
    const auto box = Kernel::box_symmetric(3.0);
    const double d_crit = critical_mu(3.0, 1).mu_critical; // sigma = 1
    const Grid grid = periodic_grid(10.0, 200);
    const double amplitude = 1e-4;

    // seed the most unstable domain mode (k = 2) directly
    auto deviation_after = [&](double d, double t_end) {
        const ModelParams p{d, 2.0, 1.0};
        Eigen::ArrayXd c0(grid.n);
        for (int i = 0; i < grid.n; ++i)
            c0[i] = p.sigma() + amplitude * std::cos(2.0 * (2.0 * pi / grid.L) * grid.x(i));
        const auto scheme = SchemeConfig::with_defaults(p, grid, t_end, t_end);
        const auto rec = simulate({c0, 0.0}, p, box, grid, scheme);
        REQUIRE(!rec.failure);
        return (rec.final_state() - p.sigma()).abs().maxCoeff();
    };

    CHECK(deviation_after(0.8 * d_crit, 200.0) > 10.0 * amplitude);
    CHECK(deviation_after(1.2 * d_crit, 60.0) < amplitude);
}

TEST_CASE("build_initial: kinds, determinism, plug mass") {
    const Grid grid = periodic_grid(10.0, 500);

    const auto zero = build_initial(initial::Zero{}, kFig1, grid);
    CHECK((zero.c == 0.0).all());

    const auto plug = build_initial(initial::Plug{5.0, 1.0, 1.0}, kFig1, grid);
    const double mass = plug.c.sum() * grid.dx();
    CHECK(std::abs(mass - 1.0) <= 1.1 * grid.dx());
    CHECK(plug.c.maxCoeff() == 1.0);
    CHECK(plug.c.minCoeff() == 0.0);

    const auto two = build_initial(
        initial::TwoPlugs{{2.0, 1.0, 1.0}, {8.0, 1.0, 0.5}}, kFig1, grid);
    CHECK(two.c.maxCoeff() == 1.0);
    CHECK(std::abs(two.c.sum() * grid.dx() - 1.5) <= 2.2 * grid.dx());

    const auto n1 = build_initial(initial::PerturbedEquilibrium{1e-3, 7}, kFig1, grid);
    const auto n2 = build_initial(initial::PerturbedEquilibrium{1e-3, 7}, kFig1, grid);
    CHECK((n1.c == n2.c).all()); // bitwise identical for equal seeds
    const auto n3 = build_initial(initial::PerturbedEquilibrium{1e-3, 8}, kFig1, grid);
    CHECK((n1.c != n3.c).any());
    CHECK((n1.c - kFig1.sigma()).abs().maxCoeff() <= 1e-3);

    CHECK_THROWS_AS(build_initial(initial::Plug{0.2, 1.0, 1.0}, kFig1, grid),
                    InvalidArgumentError);
}

TEST_CASE("blow-up is detected, reported, and leaves a partial record") {
    const Grid grid = periodic_grid(10.0, 64);
    const auto delta = Kernel::delta();
    State huge{Eigen::ArrayXd::Constant(grid.n, 1e9), 0.0};

    CHECK_THROWS_AS(step(huge, kFig1, delta, grid, 1e-3), BlowUpError);

    SchemeConfig scheme;
    scheme.dt = 1e-3;
    scheme.t_end = 1.0;
    scheme.snapshot_every = 0.1;
    const auto rec = simulate(huge, kFig1, delta, grid, scheme);
    REQUIRE(rec.failure.has_value());
    CHECK(rec.failure->t > 0.0);
    CHECK(rec.size() >= 1); // partial record survives
}

TEST_CASE("scheme validation rejects unstable steps") {
    const Grid grid = periodic_grid(10.0, 500);
    SchemeConfig scheme;
    scheme.dt = 10.0 * SchemeConfig::max_stable_dt(kFig1, grid);
    scheme.t_end = 1.0;
    CHECK_THROWS_AS(scheme.validate(kFig1, grid), ConfigError);

    State eq{Eigen::ArrayXd::Constant(grid.n, 1.0), 0.0};
    CHECK_THROWS_AS(simulate(eq, kFig1, Kernel::box_symmetric(3.0), grid, scheme), ConfigError);
}

TEST_CASE("short unstable run keeps the field nonnegative and tracks mass") {
    const Grid grid = periodic_grid(10.0, 250);
    const auto init = build_initial(initial::PerturbedEquilibrium{1e-3, 3}, kFig1, grid);
    const auto scheme = SchemeConfig::with_defaults(kFig1, grid, 40.0, 10.0);
    const auto rec = simulate(init, kFig1, Kernel::box_symmetric(3.0), grid, scheme);
    REQUIRE(!rec.failure);
    CHECK(rec.min_value_seen > -1e-9);
    REQUIRE(rec.masses.size() == rec.snapshots.size());
    CHECK(rec.masses.front() == doctest::Approx(10.0 * kFig1.sigma()).epsilon(1e-3));
}

} // TEST_SUITE
