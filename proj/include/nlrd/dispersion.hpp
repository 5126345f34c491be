#ifndef NLRD_DISPERSION_HPP
#define NLRD_DISPERSION_HPP

#include <vector>
#include <Eigen/Dense>

#include "nlrd/kernel.hpp"
#include "nlrd/model.hpp"

namespace nlrd {

/// Sampled dispersion function and the refined verdict on the homogeneous
/// equilibrium c = sigma.
struct DispersionReport {
    Eigen::ArrayXd xi;     // scan points
    Eigen::ArrayXd phi;    // Phi(xi) at the scan points
    double min_xi = 0.0;   // minimizer after golden-section refinement
    double min_value = 0.0;
    bool stable = false;   // min_value > 0
};

/// One point of a neutral-stability curve in the (N, mu) plane.
struct CriticalCurvePoint {
    int branch = 1;            // odd branch index j
    double z = 0.0;            // j-th positive root of tan z = z/3
    double N = 0.0;            // kernel half-width
    double mu_critical = 0.0;  // critical d/sigma on this branch
    double tau = 0.0;          // spatial period 2*pi*N/z of the touching mode
};

/// Critical point for a periodic domain of fixed length.
struct BoundedDomainCritical {
    double z = 0.0;   // first positive root of tan z = z
    double mu = 0.0;  // -sin(z)/(xi^2 z) with xi = 2*pi/L
};

/// Residual of the neutral-mode condition and the drift speed it implies.
struct NeutralRelation {
    double residual = 0.0;       // d xi^2 + sigma Re phi_hat(xi)
    double implied_speed = 0.0;  // -Im phi_hat(xi)/xi
};

/// Phase-plane trajectory of the Taylor-reduced stationary equation.
struct PhaseOrbit {
    std::vector<double> c;
    std::vector<double> p;
    double return_error = 0.0;  // distance start -> state after one revolution
};

/// Phi(xi) = d xi^2 + sigma Re phi_hat(xi). Only the real part of the
/// transform enters: it alone decides stability, also for asymmetric kernels.
double dispersion_value(const ModelParams& params, const Kernel& kernel, double xi);

/// Scan upper bound used by the reporting defaults:
/// max(20/width, 10 sqrt(sigma/d)) with width the kernel's shape parameter.
double default_xi_max(const ModelParams& params, const Kernel& kernel);

/// Scans Phi on [0, xi_max], refines the minimum by golden section and
/// returns the verdict. Requires Phi(xi_max) > sigma so the window provably
/// contains the global minimum; raises ScanRangeError otherwise.
DispersionReport stability_verdict(const ModelParams& params, const Kernel& kernel,
                                   double xi_max, int n_samples = 2000);

/// First n_branches positive roots of tan z = coefficient*z (z = 0 excluded),
/// one per tangent branch ((2k-1)pi/2, (2k+1)pi/2), bisected to 1e-12.
std::vector<double> solve_branch_roots(double coefficient, int n_branches);

/// Critical mu on the j-th branch (j odd): mu_j = -N^2 sin(z_j)/z_j^3.
CriticalCurvePoint critical_mu(double N, int branch);

/// Spatial period tau = 2*pi*N/z_1 of the first mode to lose stability.
double pattern_period(double N);

/// Critical mu for a periodic domain of length L with the perturbation mode
/// pinned at xi = 2*pi/L: z solves tan z = z, mu = -sin(z)/(xi^2 z).
BoundedDomainCritical bounded_domain_critical_mu(double L);

/// Minimal front speed 2 sqrt(d sigma) of waves invading c = 0.
double minimal_wave_speed(const ModelParams& params);

/// Drift speed (cos(xi N) - 1)/(xi^2 N) of the pattern produced by the
/// one-sided box kernel; always <= 0 (leftward drift).
double asymmetric_drift_speed(double xi, double N);

/// Evaluates both neutral-mode relations at xi: the real-part residual and
/// the implied drift speed -Im phi_hat(xi)/xi (which reduces to
/// asymmetric_drift_speed for the one-sided box).
NeutralRelation neutral_frequency_relation(const ModelParams& params, const Kernel& kernel,
                                           double xi);

/// Integrates c' = p, p' = -c(sigma - c)/(d(1 - gamma c)) once around the
/// center (sigma, 0) with fixed-step RK4 and reports the Poincare return
/// error. Raises SingularOrbitError if the trajectory reaches c = 1/gamma and
/// NonClosedOrbitError if no revolution completes within arc_steps.
PhaseOrbit taylor_phase_plane(const ModelParams& params, double gamma, double start_c,
                              int arc_steps);

} // namespace nlrd

#endif
