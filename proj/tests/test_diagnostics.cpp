#include <cmath>
#include <functional>
#include <numbers>

#include <doctest.h>

#include "nlrd/diagnostics.hpp"

using namespace nlrd;
using std::numbers::pi;

namespace {

RunRecord make_record(const Grid& grid, double t0, double t1, double dt_snap,
                      const std::function<double(double, double)>& field) {
    RunRecord rec;
    rec.grid = grid;
    for (double t = t0; t <= t1 + 1e-12; t += dt_snap) {
        Eigen::ArrayXd c(grid.n);
        for (int i = 0; i < grid.n; ++i) c[i] = field(grid.x(i), t);
        rec.times.push_back(t);
        rec.snapshots.push_back(c);
        rec.masses.push_back(c.sum() * grid.dx());
    }
    return rec;
}

RunRecord mirrored(const RunRecord& rec) {
    RunRecord out = rec;
    const int n = rec.grid.n;
    for (auto& snap : out.snapshots) {
        Eigen::ArrayXd r(n);
        for (int i = 0; i < n; ++i) r[i] = snap[(n - i) % n];
        snap = r;
    }
    return out;
}

const Grid kWide{100.0, 2000, BoundaryCondition::Periodic};

} // namespace

TEST_SUITE("diagnostics") {

TEST_CASE("front tracking of a sharp translated step") {
    const double s = 0.5, sigma = 1.0;
    auto stepfield = [&](double x, double t) { return x <= 5.0 + s * t ? sigma : 0.0; };
    const auto rec = make_record(kWide, 0.0, 100.0, 1.0, stepfield);
    const auto trace = track_front(rec, sigma / 2.0, FrontDirection::Rightward);
    CHECK(trace.fitted_speed == doctest::Approx(0.5).epsilon(2e-3));
    CHECK(std::abs(trace.fitted_speed - 0.5) < 1e-3);
    CHECK(trace.t.size() == rec.snapshots.size());
}

TEST_CASE("mirror reflection flips the fitted speed exactly") {
    const double s = 0.37;
    auto smooth_front = [&](double x, double t) {
        return 0.5 * (1.0 - std::tanh((x - (20.0 + s * t)) / 0.8));
    };
    const auto rec = make_record(kWide, 0.0, 80.0, 1.0, smooth_front);
    const auto fwd = track_front(rec, 0.5, FrontDirection::Rightward);
    const auto bwd = track_front(mirrored(rec), 0.5, FrontDirection::Leftward);
    CHECK(fwd.fitted_speed == doctest::Approx(s).epsilon(1e-3));
    CHECK(std::abs(fwd.fitted_speed + bwd.fitted_speed) < 1e-10);
}

TEST_CASE("no-front error on a crossing-free record") {
    const Grid grid{10.0, 64, BoundaryCondition::Periodic};
    const auto rec = make_record(grid, 0.0, 10.0, 1.0, [](double, double) { return 1.0; });
    CHECK_THROWS_AS(track_front(rec, 0.5, FrontDirection::Rightward), NoFrontError);
}

TEST_CASE("pattern summary of constant and constructed two-mode fields") {
    const Grid grid{10.0, 256, BoundaryCondition::Periodic};

    State flat{Eigen::ArrayXd::Constant(grid.n, 2.7), 0.0};
    const auto none = pattern_summary(flat, grid, 0.1, 1.0);
    CHECK(none.peak_count == 0);
    CHECK(none.amplitude == 0.0);

    Eigen::ArrayXd two(grid.n);
    const double xi2 = 2.0 * (2.0 * pi / grid.L);
    for (int i = 0; i < grid.n; ++i) two[i] = 1.0 + 0.5 * std::cos(xi2 * grid.x(i));
    const auto summary = pattern_summary({two, 0.0}, grid, 0.1, 1.0);
    CHECK(summary.peak_count == 2);
    CHECK(summary.dominant_xi == doctest::Approx(xi2).epsilon(1e-14));
    CHECK(summary.amplitude == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("dominant mode is exact for pure harmonics 1..8 on n = 256") {
    const Grid grid{10.0, 256, BoundaryCondition::Periodic};
    for (int mode = 1; mode <= 8; ++mode) {
        Eigen::ArrayXd c(grid.n);
        const double xi = 2.0 * pi * mode / grid.L;
        for (int i = 0; i < grid.n; ++i) c[i] = 3.0 + 0.2 * std::sin(xi * grid.x(i) + 0.3);
        const auto summary = pattern_summary({c, 0.0}, grid, 0.01, 0.1);
        CHECK(summary.dominant_xi == doctest::Approx(xi).epsilon(1e-14));
    }
}

TEST_CASE("peak count is invariant under constant offset and cyclic shift") {
    const Grid grid{10.0, 256, BoundaryCondition::Periodic};
    Eigen::ArrayXd c(grid.n);
    for (int i = 0; i < grid.n; ++i) {
        const double x = grid.x(i);
        c[i] = 1.0 + 0.4 * std::cos(3.0 * (2.0 * pi / grid.L) * x) +
               0.1 * std::sin(2.0 * pi * x / grid.L);
    }
    const auto base = pattern_summary({c, 0.0}, grid, 0.05, 0.5);

    const auto lifted = pattern_summary({c + 11.5, 0.0}, grid, 0.05, 0.5);
    CHECK(lifted.peak_count == base.peak_count);
    for (int i = 0; i < base.peak_count; ++i)
        CHECK(lifted.peak_positions[i] == doctest::Approx(base.peak_positions[i]).epsilon(1e-12));

    const int shift = 40;
    Eigen::ArrayXd rolled(grid.n);
    for (int i = 0; i < grid.n; ++i) rolled[i] = c[(i - shift + grid.n) % grid.n];
    const auto moved = pattern_summary({rolled, 0.0}, grid, 0.05, 0.5);
    CHECK(moved.peak_count == base.peak_count);
    std::vector<double> expected;
    for (double p : base.peak_positions)
        expected.push_back(std::fmod(p + shift * grid.dx(), grid.L));
    std::sort(expected.begin(), expected.end());
    for (int i = 0; i < base.peak_count; ++i)
        CHECK(moved.peak_positions[i] == doctest::Approx(expected[i]).epsilon(1e-9));
}

TEST_CASE("separation conflict keeps the higher peak") {
    const Grid grid{10.0, 1000, BoundaryCondition::Periodic};
    Eigen::ArrayXd c(grid.n);
    for (int i = 0; i < grid.n; ++i) {
        const double x = grid.x(i);
        c[i] = std::exp(-(x - 5.0) * (x - 5.0) / 0.05) +
               0.8 * std::exp(-(x - 5.5) * (x - 5.5) / 0.05);
    }
    const auto tight = pattern_summary({c, 0.0}, grid, 0.05, 1.0);
    REQUIRE(tight.peak_count == 1);
    CHECK(tight.peak_positions[0] == doctest::Approx(5.0).epsilon(1e-3));

    const auto loose = pattern_summary({c, 0.0}, grid, 0.05, 0.3);
    CHECK(loose.peak_count == 2);
}

TEST_CASE("splitting history: zero record and thinning robustness") {
    const Grid grid{10.0, 256, BoundaryCondition::Periodic};
    const auto zero_rec = make_record(grid, 0.0, 5.0, 1.0, [](double, double) { return 0.0; });
    for (const auto& [t, count] : splitting_history(zero_rec, 0.05, 0.5)) CHECK(count == 0);

    // one bump splitting into two at t = 5
    auto splitting = [](double x, double t) {
        if (t < 5.0) return std::exp(-(x - 5.0) * (x - 5.0) / 0.5);
        return std::exp(-(x - 3.5) * (x - 3.5) / 0.5) + std::exp(-(x - 6.5) * (x - 6.5) / 0.5);
    };
    const auto rec = make_record(grid, 0.0, 10.0, 0.5, splitting);
    const auto history = splitting_history(rec, 0.05, 1.0);
    const auto events = splitting_events(history);
    REQUIRE(events.size() == 1);
    CHECK(events[0] == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(history.back().second == 2);

    RunRecord thinned;
    thinned.grid = rec.grid;
    for (int i = 0; i < rec.size(); i += 2) {
        thinned.times.push_back(rec.times[i]);
        thinned.snapshots.push_back(rec.snapshots[i]);
        thinned.masses.push_back(rec.masses[i]);
    }
    const auto thin_history = splitting_history(thinned, 0.05, 1.0);
    const auto thin_events = splitting_events(thin_history);
    CHECK(thin_history.back().second == history.back().second);
    REQUIRE(thin_events.size() == 1);
    CHECK(std::abs(thin_events[0] - events[0]) <= 1.0); // one thinned interval
}

TEST_CASE("drift tracker follows moving maxima and flags lost tracks") {
    const Grid grid{10.0, 500, BoundaryCondition::Periodic};
    const double v = 0.1;
    const double xi = 5.0 * 2.0 * pi / grid.L;
    auto drifting = [&](double x, double t) { return 0.5 + 0.45 * std::cos(xi * (x - v * t)); };
    const auto rec = make_record(grid, 0.0, 2.0, 0.1, drifting);
    const auto report = drift_tracker(rec, 0.05, 1.0, 1.0);
    REQUIRE(report.tracks.size() == 5);
    CHECK_FALSE(report.partial);
    for (const auto& tr : report.tracks) CHECK(tr.speed == doctest::Approx(v).epsilon(0.05));
    CHECK(report.drift_speed == doctest::Approx(v).epsilon(0.05));
    REQUIRE(report.final_spacing.size() == 4);
    for (double gap : report.final_spacing) CHECK(gap == doctest::Approx(2.0).epsilon(1e-3));

    auto frozen = [&](double x, double) { return 0.5 + 0.45 * std::cos(xi * x); };
    const auto still = drift_tracker(make_record(grid, 0.0, 2.0, 0.1, frozen), 0.05, 1.0, 1.0);
    for (const auto& tr : still.tracks) CHECK(std::abs(tr.speed) < 0.01);
    CHECK(std::abs(still.drift_speed) < 0.01);

    auto vanishing = [](double x, double t) {
        double c = std::exp(-(x - 3.0) * (x - 3.0) / 0.3);
        if (t < 1.0) c += std::exp(-(x - 7.0) * (x - 7.0) / 0.3);
        return c;
    };
    const auto lossy = drift_tracker(make_record(grid, 0.0, 2.0, 0.1, vanishing), 0.05, 1.0, 1.0);
    CHECK(lossy.partial);
    int lost = 0;
    for (const auto& tr : lossy.tracks) lost += tr.lost ? 1 : 0;
    CHECK(lost == 1);
}

TEST_CASE("windowed dominant mode") {
    const Grid grid{100.0, 2000, BoundaryCondition::Periodic};
    const double xi = 2.8;
    Eigen::ArrayXd c(grid.n);
    for (int i = 0; i < grid.n; ++i) c[i] = 1.0 + 0.3 * std::cos(xi * grid.x(i));
    const double measured = dominant_xi_in_window({c, 0.0}, grid, 30.0, 70.0);
    CHECK(std::abs(measured - xi) <= 2.0 * pi / 40.0); // within one window mode
    CHECK_THROWS_AS(dominant_xi_in_window({c, 0.0}, grid, 5.0, 5.1), InvalidArgumentError);
}

} // TEST_SUITE
