#ifndef NLRD_DIAGNOSTICS_HPP
#define NLRD_DIAGNOSTICS_HPP

#include <utility>
#include <vector>

#include "nlrd/solver.hpp"

namespace nlrd {

enum class FrontDirection { Rightward, Leftward };

/// Level-crossing trace of a propagating front and its fitted speed.
struct FrontTrace {
    std::vector<double> t;         // time-ordered
    std::vector<double> x;         // interpolated crossing positions
    double fitted_speed = 0.0;     // least squares over the middle 60% of snapshots
    double fit_residual = 0.0;     // RMS about the linear fit
};

/// Peaks and dominant spatial frequency of one field.
struct PatternSummary {
    int peak_count = 0;
    std::vector<double> peak_positions;
    double dominant_xi = 0.0;  // nonzero discrete mode with the largest power
    double amplitude = 0.0;    // max - min
};

/// Trajectory of one tracked maximum.
struct PeakTrack {
    std::vector<double> t;
    std::vector<double> x;
    double speed = 0.0;  // least-squares slope over the track's life
    bool lost = false;   // track ended before the final snapshot
};

/// Peak trajectories of a drifting pattern plus the leading-edge speed.
struct DriftReport {
    std::vector<PeakTrack> tracks;
    std::vector<double> final_spacing;  // inter-peak spacing of the last snapshot
    double drift_speed = 0.0;           // fitted speed of the outermost peak in the drift direction
    bool partial = false;               // at least one track was lost mid-record
};

/// Outermost crossing of c = level per snapshot (largest x for Rightward,
/// smallest for Leftward), linearly interpolated between grid points. The
/// speed fit uses the middle 60% of the snapshots. Raises NoFrontError when
/// at least 20% of the snapshots have no crossing.
FrontTrace track_front(const RunRecord& record, double level, FrontDirection direction);

/// Strict local maxima at least min_height above the spatial mean, thinned to
/// min_separation (higher peak wins), plus the dominant nonzero mode of the
/// power spectrum of c - mean(c). min_height is measured relative to the mean
/// so the verdict is invariant under adding a constant to the field.
PatternSummary pattern_summary(const State& state, const Grid& grid, double min_height,
                               double min_separation);

/// Peak count per snapshot; splitting events are the increases.
std::vector<std::pair<double, int>> splitting_history(const RunRecord& record, double min_height,
                                                      double min_separation);

/// Timestamps at which the peak count increased.
std::vector<double> splitting_events(const std::vector<std::pair<double, int>>& history);

/// Associates maxima across snapshots by nearest neighbor within match_window
/// and fits per-peak drift speeds. A lost track (merge/disappearance) is
/// flagged, not fatal.
DriftReport drift_tracker(const RunRecord& record, double min_height, double min_separation,
                          double match_window);

/// Dominant discrete mode 2*pi*m/(x1-x0) of the field restricted to
/// [x0, x1); used to read off the wavelength of an established pattern region
/// away from fronts.
double dominant_xi_in_window(const State& state, const Grid& grid, double x0, double x1);

} // namespace nlrd

#endif
