#include "nlrd/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nlrd {

using std::numbers::pi;

double dispersion_value(const ModelParams& params, const Kernel& kernel, double xi) {
    return params.d * xi * xi + params.sigma() * kernel.fourier_transform(xi).real();
}

double default_xi_max(const ModelParams& params, const Kernel& kernel) {
    const double width = kernel.shape() == KernelShape::Delta ? 1.0 : kernel.parameter();
    return std::max(20.0 / width, 10.0 * std::sqrt(params.sigma() / params.d));
}

namespace {

// Golden-section minimization of f on [lo, hi] to the given xi tolerance.
template <typename F>
double golden_section_min(F f, double lo, double hi, double tol) {
    constexpr double invphi = 0.6180339887498949;
    double x1 = hi - invphi * (hi - lo);
    double x2 = lo + invphi * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    while (hi - lo > tol) {
        if (f1 < f2) {
            hi = x2; x2 = x1; f2 = f1;
            x1 = hi - invphi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1; x1 = x2; f1 = f2;
            x2 = lo + invphi * (hi - lo);
            f2 = f(x2);
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace

DispersionReport stability_verdict(const ModelParams& params, const Kernel& kernel,
                                   double xi_max, int n_samples) {
    params.validate();
    if (n_samples < 3) throw InvalidArgumentError("stability_verdict: need at least 3 samples");
    if (!(xi_max > 0.0)) throw InvalidArgumentError("stability_verdict: xi_max must be positive");

    const double sigma = params.sigma();
    if (!(dispersion_value(params, kernel, xi_max) > sigma))
        throw ScanRangeError("stability_verdict: Phi(xi_max) <= sigma, scan range too small");

    DispersionReport rep;
    rep.xi = Eigen::ArrayXd::LinSpaced(n_samples, 0.0, xi_max);
    rep.phi.resize(n_samples);
    for (int i = 0; i < n_samples; ++i)
        rep.phi[i] = dispersion_value(params, kernel, rep.xi[i]);

    int imin = 0;
    rep.phi.minCoeff(&imin);

    const double lo = rep.xi[std::max(imin - 1, 0)];
    const double hi = rep.xi[std::min(imin + 1, n_samples - 1)];
    auto f = [&](double xi) { return dispersion_value(params, kernel, xi); };
    rep.min_xi = golden_section_min(f, lo, hi, 1e-10);
    rep.min_value = f(rep.min_xi);
    if (rep.phi[imin] < rep.min_value) { // sample already lower (flat minimum edge case)
        rep.min_value = rep.phi[imin];
        rep.min_xi = rep.xi[imin];
    }
    rep.stable = rep.min_value > 0.0;
    return rep;
}

std::vector<double> solve_branch_roots(double coefficient, int n_branches) {
    if (!(coefficient > 0.0))
        throw InvalidArgumentError("solve_branch_roots: coefficient must be positive");
    if (n_branches < 1)
        throw InvalidArgumentError("solve_branch_roots: need at least one branch");

    // Branch ends are poles of tan; shrink before bisecting.
    constexpr double shrink = 1e-6;
    auto f = [&](double z) { return std::tan(z) - coefficient * z; };

    std::vector<double> roots;
    roots.reserve(n_branches);
    for (int m = 1; m <= n_branches; ++m) {
        double lo = (2 * m - 1) * pi / 2.0 + shrink;
        double hi = (2 * m + 1) * pi / 2.0 - shrink;
        double flo = f(lo);
        while (hi - lo > 1e-12) {
            const double mid = 0.5 * (lo + hi);
            const double fmid = f(mid);
            if ((flo < 0.0) == (fmid < 0.0)) {
                lo = mid;
                flo = fmid;
            } else {
                hi = mid;
            }
        }
        roots.push_back(0.5 * (lo + hi));
    }
    return roots;
}

CriticalCurvePoint critical_mu(double N, int branch) {
    if (!(N > 0.0)) throw InvalidArgumentError("critical_mu: N must be positive");
    if (branch < 1 || branch % 2 == 0)
        throw InvalidBranchError("critical_mu: branch index must be a positive odd integer");

    CriticalCurvePoint pt;
    pt.branch = branch;
    pt.N = N;
    pt.z = solve_branch_roots(1.0 / 3.0, branch).back();
    pt.mu_critical = -N * N * std::sin(pt.z) / (pt.z * pt.z * pt.z);
    pt.tau = 2.0 * pi * N / pt.z;
    return pt;
}

double pattern_period(double N) {
    if (!(N > 0.0)) throw InvalidArgumentError("pattern_period: N must be positive");
    const double z1 = solve_branch_roots(1.0 / 3.0, 1).front();
    return 2.0 * pi * N / z1;
}

BoundedDomainCritical bounded_domain_critical_mu(double L) {
    if (!(L > 0.0)) throw InvalidArgumentError("bounded_domain_critical_mu: L must be positive");
    BoundedDomainCritical out;
    out.z = solve_branch_roots(1.0, 1).front();
    const double xi = 2.0 * pi / L;
    out.mu = -std::sin(out.z) / (xi * xi * out.z);
    return out;
}

double minimal_wave_speed(const ModelParams& params) {
    if (!(params.a > params.b))
        throw InvalidArgumentError("minimal_wave_speed: requires a > b");
    if (params.d < 0.0)
        throw InvalidArgumentError("minimal_wave_speed: requires d >= 0");
    return 2.0 * std::sqrt(params.d * params.sigma());
}

double asymmetric_drift_speed(double xi, double N) {
    if (!(N > 0.0)) throw InvalidArgumentError("asymmetric_drift_speed: N must be positive");
    if (xi == 0.0) throw SingularInputError("asymmetric_drift_speed: xi = 0 is singular");
    return (std::cos(xi * N) - 1.0) / (xi * xi * N);
}

NeutralRelation neutral_frequency_relation(const ModelParams& params, const Kernel& kernel,
                                           double xi) {
    if (!(xi > 0.0)) throw SingularInputError("neutral_frequency_relation: requires xi > 0");
    NeutralRelation rel;
    rel.residual = dispersion_value(params, kernel, xi);
    rel.implied_speed = -kernel.fourier_transform(xi).imag() / xi;
    return rel;
}

namespace {

struct PhasePoint {
    double c, p;
};

} // namespace

PhaseOrbit taylor_phase_plane(const ModelParams& params, double gamma, double start_c,
                              int arc_steps) {
    params.validate();
    if (arc_steps < 1) throw InvalidArgumentError("taylor_phase_plane: arc_steps must be positive");

    const double sigma = params.sigma();
    const double d = params.d;

    PhaseOrbit orbit;
    if (start_c == sigma) { // exact equilibrium of the phase plane
        orbit.c = {sigma};
        orbit.p = {0.0};
        orbit.return_error = 0.0;
        return orbit;
    }

    const double c_singular = gamma > 0.0 ? 1.0 / gamma : 0.0;
    auto restoring = [&](double c) { // Phi(c) of the first-order system
        return c * (sigma - c) / (d * (1.0 - gamma * c));
    };
    auto rhs = [&](const PhasePoint& s) {
        return PhasePoint{s.p, -restoring(s.c)};
    };
    auto rk4 = [&](const PhasePoint& s, double h) {
        const PhasePoint k1 = rhs(s);
        const PhasePoint k2 = rhs({s.c + 0.5 * h * k1.c, s.p + 0.5 * h * k1.p});
        const PhasePoint k3 = rhs({s.c + 0.5 * h * k2.c, s.p + 0.5 * h * k2.p});
        const PhasePoint k4 = rhs({s.c + h * k3.c, s.p + h * k3.p});
        return PhasePoint{s.c + h / 6.0 * (k1.c + 2.0 * k2.c + 2.0 * k3.c + k4.c),
                          s.p + h / 6.0 * (k1.p + 2.0 * k2.p + 2.0 * k3.p + k4.p)};
    };

    // Step from the linearized frequency around the center when it exists,
    // otherwise from the diffusive rate scale.
    const double curvature = std::abs(gamma * sigma - 1.0) > 1e-12
                                 ? sigma / (d * std::abs(gamma * sigma - 1.0))
                                 : sigma / d;
    const double dt = 2.0 * pi / std::sqrt(curvature) / 4096.0;

    const double escape = 100.0 * std::abs(start_c - sigma) + 10.0 * sigma;

    PhasePoint s{start_c, 0.0};
    orbit.c.push_back(s.c);
    orbit.p.push_back(s.p);

    int sign_changes = 0;
    double prev_p = 0.0;
    for (int step = 0; step < arc_steps; ++step) {
        PhasePoint next = rk4(s, dt);
        if (gamma > 0.0) {
            const bool crossed = (1.0 - gamma * s.c) * (1.0 - gamma * next.c) <= 0.0 ||
                                 std::abs(next.c - c_singular) < 1e-9;
            if (crossed)
                throw SingularOrbitError("taylor_phase_plane: trajectory reached c = 1/gamma");
        }
        if (!std::isfinite(next.c) || !std::isfinite(next.p) ||
            std::abs(next.c - sigma) > escape || std::abs(next.p) > escape * std::sqrt(curvature))
            throw NonClosedOrbitError("taylor_phase_plane: trajectory escaped, no closed orbit");

        if (prev_p != 0.0 && next.p != 0.0 && (prev_p < 0.0) != (next.p < 0.0))
            ++sign_changes;

        if (sign_changes == 2) {
            // Revolution completes inside this step: bisect the step size so
            // the endpoint lands on the section p = 0.
            double h_lo = 0.0, h_hi = dt;
            for (int it = 0; it < 64; ++it) {
                const double h = 0.5 * (h_lo + h_hi);
                const PhasePoint probe = rk4(s, h);
                if ((probe.p < 0.0) == (prev_p < 0.0))
                    h_lo = h;
                else
                    h_hi = h;
            }
            const PhasePoint end = rk4(s, 0.5 * (h_lo + h_hi));
            orbit.c.push_back(end.c);
            orbit.p.push_back(end.p);
            orbit.return_error = std::hypot(end.c - start_c, end.p);
            return orbit;
        }

        s = next;
        prev_p = s.p;
        orbit.c.push_back(s.c);
        orbit.p.push_back(s.p);
    }
    throw NonClosedOrbitError("taylor_phase_plane: no return within arc_steps");
}

} // namespace nlrd
