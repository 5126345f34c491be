#include "nlrd/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include <unsupported/Eigen/FFT>

namespace nlrd {

using std::numbers::pi;

namespace {

// Least-squares line through (t, x); returns {slope, rms residual}.
std::pair<double, double> fit_line(const std::vector<double>& t, const std::vector<double>& x) {
    const int n = static_cast<int>(t.size());
    if (n < 2) return {0.0, 0.0};
    double tm = 0.0, xm = 0.0;
    for (int i = 0; i < n; ++i) {
        tm += t[i];
        xm += x[i];
    }
    tm /= n;
    xm /= n;
    double stt = 0.0, stx = 0.0;
    for (int i = 0; i < n; ++i) {
        stt += (t[i] - tm) * (t[i] - tm);
        stx += (t[i] - tm) * (x[i] - xm);
    }
    const double slope = stt > 0.0 ? stx / stt : 0.0;
    const double intercept = xm - slope * tm;
    double ss = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = x[i] - (intercept + slope * t[i]);
        ss += r * r;
    }
    return {slope, std::sqrt(ss / n)};
}

// Outermost level crossing of one snapshot, linearly interpolated.
std::optional<double> outermost_crossing(const Eigen::ArrayXd& c, const Grid& grid, double level,
                                         FrontDirection direction) {
    const int n = grid.n;
    const double dx = grid.dx();
    std::optional<double> found;
    for (int i = 0; i + 1 < n; ++i) {
        const double f0 = c[i] - level, f1 = c[i + 1] - level;
        if (f0 == 0.0) {
            if (!found || (direction == FrontDirection::Rightward ? grid.x(i) > *found
                                                                  : grid.x(i) < *found))
                found = grid.x(i);
            continue;
        }
        if ((f0 < 0.0) == (f1 < 0.0)) continue;
        const double xc = grid.x(i) + dx * f0 / (f0 - f1);
        if (!found || (direction == FrontDirection::Rightward ? xc > *found : xc < *found))
            found = xc;
    }
    return found;
}

// Strict local maxima (cyclic on periodic grids) refined by a parabolic fit,
// as (position, height above mean) pairs.
std::vector<std::pair<double, double>> raw_peaks(const Eigen::ArrayXd& c, const Grid& grid) {
    const int n = grid.n;
    const double dx = grid.dx();
    const bool periodic = grid.bc == BoundaryCondition::Periodic;
    const double mean = c.mean();

    std::vector<std::pair<double, double>> peaks;
    const int i0 = periodic ? 0 : 1;
    const int i1 = periodic ? n : n - 1;
    for (int i = i0; i < i1; ++i) {
        const double cm = c[(i - 1 + n) % n];
        const double cp = c[(i + 1) % n];
        if (!(c[i] > cm && c[i] > cp)) continue;
        // parabola through the three points; vertex offset in (-dx/2, dx/2)
        const double denom = cm - 2.0 * c[i] + cp;
        double xpk = grid.x(i);
        if (denom < 0.0) xpk += 0.5 * dx * (cm - cp) / denom;
        if (periodic) xpk = std::fmod(xpk + grid.L, grid.L);
        peaks.emplace_back(xpk, c[i] - mean);
    }
    return peaks;
}

double circular_distance(double a, double b, const Grid& grid) {
    double d = std::abs(a - b);
    if (grid.bc == BoundaryCondition::Periodic) d = std::min(d, grid.L - d);
    return d;
}

std::vector<double> select_peaks(const Eigen::ArrayXd& c, const Grid& grid, double min_height,
                                 double min_separation) {
    auto candidates = raw_peaks(c, grid);
    std::erase_if(candidates, [&](const auto& p) { return p.second < min_height; });
    // higher peak wins a separation conflict
    std::sort(candidates.begin(), candidates.end(),
              [](const auto& a, const auto& b) { return a.second > b.second; });
    std::vector<double> accepted;
    for (const auto& [x, h] : candidates) {
        const bool clear = std::none_of(accepted.begin(), accepted.end(), [&](double ax) {
            return circular_distance(x, ax, grid) < min_separation;
        });
        if (clear) accepted.push_back(x);
    }
    std::sort(accepted.begin(), accepted.end());
    return accepted;
}

// Index of the dominant nonzero mode of the power spectrum of (v - mean).
std::pair<int, double> dominant_mode(const Eigen::ArrayXd& v) {
    const int n = static_cast<int>(v.size());
    Eigen::VectorXd centered = (v - v.mean()).matrix();
    Eigen::FFT<double> fft;
    Eigen::VectorXcd spec;
    fft.fwd(spec, centered);
    int best = 1;
    double best_power = -1.0;
    for (int m = 1; m <= n / 2; ++m) {
        const double p = std::norm(spec[m]);
        if (p > best_power) {
            best_power = p;
            best = m;
        }
    }
    return {best, best_power};
}

} // namespace

FrontTrace track_front(const RunRecord& record, double level, FrontDirection direction) {
    const int n_snap = record.size();
    if (n_snap < 3) throw InvalidArgumentError("track_front: need at least 3 snapshots");

    FrontTrace trace;
    int missing = 0;
    for (int s = 0; s < n_snap; ++s) {
        auto xc = outermost_crossing(record.snapshots[s], record.grid, level, direction);
        if (xc) {
            trace.t.push_back(record.times[s]);
            trace.x.push_back(*xc);
        } else {
            ++missing;
        }
    }
    if (missing * 5 >= n_snap)
        throw NoFrontError("track_front: no level crossing in >= 20% of snapshots");

    // fit window: middle 60% of the crossing samples
    const int m = static_cast<int>(trace.t.size());
    const int lo = m / 5;
    const int hi = m - m / 5;
    std::vector<double> tw(trace.t.begin() + lo, trace.t.begin() + hi);
    std::vector<double> xw(trace.x.begin() + lo, trace.x.begin() + hi);
    std::tie(trace.fitted_speed, trace.fit_residual) = fit_line(tw, xw);
    return trace;
}

PatternSummary pattern_summary(const State& state, const Grid& grid, double min_height,
                               double min_separation) {
    PatternSummary out;
    out.peak_positions = select_peaks(state.c, grid, min_height, min_separation);
    out.peak_count = static_cast<int>(out.peak_positions.size());
    out.amplitude = state.c.maxCoeff() - state.c.minCoeff();
    const auto [mode, power] = dominant_mode(state.c);
    out.dominant_xi = power > 0.0 ? 2.0 * pi * mode / grid.L : 0.0;
    return out;
}

std::vector<std::pair<double, int>> splitting_history(const RunRecord& record, double min_height,
                                                      double min_separation) {
    std::vector<std::pair<double, int>> history;
    history.reserve(record.size());
    for (int s = 0; s < record.size(); ++s) {
        const auto peaks =
            select_peaks(record.snapshots[s], record.grid, min_height, min_separation);
        history.emplace_back(record.times[s], static_cast<int>(peaks.size()));
    }
    return history;
}

std::vector<double> splitting_events(const std::vector<std::pair<double, int>>& history) {
    std::vector<double> events;
    for (std::size_t i = 1; i < history.size(); ++i)
        if (history[i].second > history[i - 1].second) events.push_back(history[i].first);
    return events;
}

DriftReport drift_tracker(const RunRecord& record, double min_height, double min_separation,
                          double match_window) {
    DriftReport report;
    const int n_snap = record.size();
    if (n_snap == 0) return report;

    std::vector<int> open; // indices into report.tracks
    for (int s = 0; s < n_snap; ++s) {
        const auto peaks =
            select_peaks(record.snapshots[s], record.grid, min_height, min_separation);

        // greedily match open tracks to the nearest new peak
        std::vector<bool> taken(peaks.size(), false);
        std::vector<int> still_open;
        for (int ti : open) {
            PeakTrack& tr = report.tracks[ti];
            const double last_x = tr.x.back();
            int best = -1;
            double best_d = match_window;
            for (std::size_t p = 0; p < peaks.size(); ++p) {
                if (taken[p]) continue;
                const double d = circular_distance(peaks[p], last_x, record.grid);
                if (d < best_d) {
                    best_d = d;
                    best = static_cast<int>(p);
                }
            }
            if (best >= 0) {
                taken[best] = true;
                tr.t.push_back(record.times[s]);
                tr.x.push_back(peaks[best]);
                still_open.push_back(ti);
            } else {
                tr.lost = true;
                report.partial = true;
            }
        }
        for (std::size_t p = 0; p < peaks.size(); ++p) {
            if (taken[p]) continue;
            PeakTrack tr;
            tr.t.push_back(record.times[s]);
            tr.x.push_back(peaks[p]);
            report.tracks.push_back(std::move(tr));
            still_open.push_back(static_cast<int>(report.tracks.size()) - 1);
        }
        open = std::move(still_open);

        if (s == n_snap - 1) {
            for (std::size_t p = 1; p < peaks.size(); ++p)
                report.final_spacing.push_back(peaks[p] - peaks[p - 1]);
        }
    }

    double mean_disp = 0.0;
    int counted = 0;
    for (auto& tr : report.tracks) {
        std::tie(tr.speed, std::ignore) = fit_line(tr.t, tr.x);
        if (tr.t.size() >= 2) {
            mean_disp += tr.x.back() - tr.x.front();
            ++counted;
        }
    }
    if (counted > 0) mean_disp /= counted;

    // leading-edge trajectory: outermost peak (per snapshot) in the drift
    // direction, fitted over the middle 60% of the record
    const bool leftward = mean_disp < 0.0;
    std::vector<double> lead_t, lead_x;
    for (int s = 0; s < n_snap; ++s) {
        const auto peaks =
            select_peaks(record.snapshots[s], record.grid, min_height, min_separation);
        if (peaks.empty()) continue;
        lead_t.push_back(record.times[s]);
        lead_x.push_back(leftward ? peaks.front() : peaks.back());
    }
    const int m = static_cast<int>(lead_t.size());
    if (m >= 3) {
        const int lo = m / 5, hi = m - m / 5;
        std::vector<double> tw(lead_t.begin() + lo, lead_t.begin() + hi);
        std::vector<double> xw(lead_x.begin() + lo, lead_x.begin() + hi);
        std::tie(report.drift_speed, std::ignore) = fit_line(tw, xw);
    }
    return report;
}

double dominant_xi_in_window(const State& state, const Grid& grid, double x0, double x1) {
    if (!(x1 > x0)) throw InvalidArgumentError("dominant_xi_in_window: empty window");
    const double dx = grid.dx();
    const int i0 = std::max(0, static_cast<int>(std::ceil(x0 / dx)));
    const int i1 = std::min(grid.n, static_cast<int>(std::floor(x1 / dx)));
    if (i1 - i0 < 16) throw InvalidArgumentError("dominant_xi_in_window: window too narrow");
    const Eigen::ArrayXd segment = state.c.segment(i0, i1 - i0);
    const auto [mode, power] = dominant_mode(segment);
    const double window_length = (i1 - i0) * dx;
    return power > 0.0 ? 2.0 * pi * mode / window_length : 0.0;
}

} // namespace nlrd
