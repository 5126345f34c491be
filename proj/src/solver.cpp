#include "nlrd/solver.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/FFT>

namespace nlrd {

void SchemeConfig::validate(const ModelParams& params, const Grid& grid) const {
    if (!(dt > 0.0)) throw InvalidArgumentError("SchemeConfig: dt must be positive");
    if (!(t_end >= 0.0)) throw InvalidArgumentError("SchemeConfig: t_end must be nonnegative");
    if (!(snapshot_every > 0.0))
        throw InvalidArgumentError("SchemeConfig: snapshot_every must be positive");
    if (!(safety > 0.0 && safety <= 1.0))
        throw InvalidArgumentError("SchemeConfig: safety must lie in (0, 1]");
    if (dt > max_stable_dt(params, grid, safety) * (1.0 + 1e-12))
        throw ConfigError("SchemeConfig: dt violates the explicit-scheme stability bounds");
}

double SchemeConfig::max_stable_dt(const ModelParams& params, const Grid& grid, double safety,
                                   double c_max_estimate) {
    const double dx = grid.dx();
    const double diffusive = safety * dx * dx / (2.0 * params.d);
    const double c_max = c_max_estimate > 0.0 ? c_max_estimate : 2.0 * params.sigma();
    const double reaction = safety / (std::abs(params.sigma()) + params.sigma() * c_max);
    return std::min(diffusive, reaction);
}

SchemeConfig SchemeConfig::with_defaults(const ModelParams& params, const Grid& grid,
                                         double t_end, double snapshot_every) {
    SchemeConfig s;
    s.dt = max_stable_dt(params, grid);
    s.t_end = t_end;
    s.snapshot_every = snapshot_every;
    return s;
}

// ---- convolution ------------------------------------------------------------

struct NonlocalOperator::Impl {
    Grid grid;
    ConvolutionMode mode;
    KernelWeights weights;

    // spectral path
    Eigen::FFT<double> fft;
    Eigen::VectorXcd kernel_hat;
    Eigen::VectorXcd field_hat;
    Eigen::VectorXd real_buf;

    // direct path, zero-flux: reversed weights for contiguous dot products
    Eigen::ArrayXd weights_rev;
    Eigen::ArrayXd extended;
};

NonlocalOperator::NonlocalOperator(const Kernel& kernel, const Grid& grid, ConvolutionMode mode)
    : impl_(std::make_shared<Impl>()) {
    grid.validate();
    impl_->grid = grid;
    impl_->mode = mode;

    if (mode == ConvolutionMode::Spectral && grid.bc == BoundaryCondition::ZeroFlux)
        throw ConfigError("spectral convolution requires periodic boundaries");

    const double dx = grid.dx();
    impl_->weights = kernel.sample_on_grid(dx, kernel.support_radius());

    const int K = impl_->weights.max_offset();
    if (grid.bc == BoundaryCondition::Periodic && K * dx > grid.L / 2.0 + 1e-12)
        throw ConfigError("kernel support exceeds half the periodic domain");
    if (impl_->weights.size() > grid.n)
        throw ConfigError("kernel support exceeds the grid");

    if (mode == ConvolutionMode::Spectral) {
        Eigen::VectorXd circ = Eigen::VectorXd::Zero(grid.n);
        for (int i = 0; i < impl_->weights.size(); ++i) {
            const int k = impl_->weights.offset(i);
            circ[(k % grid.n + grid.n) % grid.n] += impl_->weights.weights[i];
        }
        impl_->fft.fwd(impl_->kernel_hat, circ);
        impl_->field_hat.resize(grid.n);
        impl_->real_buf.resize(grid.n);
    } else if (grid.bc == BoundaryCondition::ZeroFlux) {
        impl_->weights_rev = impl_->weights.weights.reverse();
        impl_->extended.resize(grid.n + 2 * K);
    }
}

void NonlocalOperator::apply(const Eigen::ArrayXd& c, Eigen::ArrayXd& out) {
    Impl& im = *impl_;
    const int n = im.grid.n;
    out.resize(n);

    if (im.mode == ConvolutionMode::Spectral) {
        Eigen::VectorXd cv = c.matrix();
        im.fft.fwd(im.field_hat, cv);
        im.field_hat.array() *= im.kernel_hat.array();
        im.fft.inv(im.real_buf, im.field_hat);
        out = im.real_buf.array();
        return;
    }

    const Eigen::ArrayXd& w = im.weights.weights;
    if (im.grid.bc == BoundaryCondition::Periodic) {
        out.setZero();
        for (int i = 0; i < im.weights.size(); ++i) {
            const double wk = w[i];
            if (wk == 0.0) continue;
            const int k = ((im.weights.offset(i) % n) + n) % n; // shift in [0, n)
            // out[j] += wk * c[(j - k) mod n]
            if (k == 0) {
                out += wk * c;
            } else {
                out.segment(k, n - k) += wk * c.head(n - k);
                out.head(k) += wk * c.tail(k);
            }
        }
    } else {
        const int K = im.weights.max_offset();
        im.extended.segment(K, n) = c;
        im.extended.head(K).setConstant(c[0]);
        im.extended.tail(K).setConstant(c[n - 1]);
        for (int j = 0; j < n; ++j)
            out[j] = (im.extended.segment(j, 2 * K + 1) * im.weights_rev).sum();
    }
}

Eigen::ArrayXd NonlocalOperator::operator()(const Eigen::ArrayXd& c) {
    Eigen::ArrayXd out;
    apply(c, out);
    return out;
}

const KernelWeights& NonlocalOperator::weights() const { return impl_->weights; }

Eigen::ArrayXd nonlocal_term(const State& state, const Kernel& kernel, const Grid& grid,
                             ConvolutionMode mode) {
    NonlocalOperator op(kernel, grid, mode);
    return op(state.c);
}

// ---- stepping ---------------------------------------------------------------

namespace {

void add_laplacian(const Eigen::ArrayXd& c, const Grid& grid, Eigen::ArrayXd& lap) {
    const int n = grid.n;
    const double inv_dx2 = 1.0 / (grid.dx() * grid.dx());
    lap.resize(n);
    lap.segment(1, n - 2) =
        (c.segment(2, n - 2) - 2.0 * c.segment(1, n - 2) + c.segment(0, n - 2)) * inv_dx2;
    if (grid.bc == BoundaryCondition::Periodic) {
        lap[0] = (c[1] - 2.0 * c[0] + c[n - 1]) * inv_dx2;
        lap[n - 1] = (c[0] - 2.0 * c[n - 1] + c[n - 2]) * inv_dx2;
    } else { // mirror ghost points: zero-flux walls
        lap[0] = 2.0 * (c[1] - c[0]) * inv_dx2;
        lap[n - 1] = 2.0 * (c[n - 2] - c[n - 1]) * inv_dx2;
    }
}

void advance_in_place(Eigen::ArrayXd& c, const Eigen::ArrayXd& lap, const Eigen::ArrayXd& K,
                      const ModelParams& params, double dt) {
    c += dt * (params.d * lap + c * (params.sigma() - K));
}

void check_finite(const Eigen::ArrayXd& c, double t) {
    if (!c.allFinite() || c.abs().maxCoeff() > 1e12)
        throw BlowUpError(t, "field blew up at t = " + std::to_string(t));
}

double field_mass(const Eigen::ArrayXd& c, const Grid& grid) {
    if (grid.bc == BoundaryCondition::Periodic) return c.sum() * grid.dx();
    return (c.sum() - 0.5 * (c[0] + c[grid.n - 1])) * grid.dx();
}

} // namespace

State step(const State& state, const ModelParams& params, const Kernel& kernel, const Grid& grid,
           double dt) {
    params.validate();
    grid.validate();
    if (!(dt > 0.0)) throw InvalidArgumentError("step: dt must be positive");

    NonlocalOperator op(kernel, grid, ConvolutionMode::Direct);
    Eigen::ArrayXd K = op(state.c);
    Eigen::ArrayXd lap;
    add_laplacian(state.c, grid, lap);

    State next{state.c, state.t + dt};
    advance_in_place(next.c, lap, K, params, dt);
    check_finite(next.c, next.t);
    return next;
}

State build_initial(const InitialSpec& spec, const ModelParams& params, const Grid& grid) {
    grid.validate();
    State state;
    state.t = 0.0;
    state.c = Eigen::ArrayXd::Zero(grid.n);

    struct Builder {
        const ModelParams& params;
        const Grid& grid;
        Eigen::ArrayXd& c;

        void operator()(const initial::Zero&) const {}

        void operator()(const initial::PerturbedEquilibrium& p) const {
            // splitmix64 stream mapped to [-amplitude, amplitude); pinned here
            // rather than using std::uniform_real_distribution so identical
            // seeds give identical bytes on every platform.
            std::uint64_t s = p.seed;
            auto next_u01 = [&s]() {
                s += 0x9e3779b97f4a7c15ULL;
                std::uint64_t z = s;
                z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
                z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
                z = z ^ (z >> 31);
                return static_cast<double>(z >> 11) * 0x1.0p-53;
            };
            const double eq = params.sigma();
            for (int i = 0; i < grid.n; ++i)
                c[i] = eq + p.amplitude * (2.0 * next_u01() - 1.0);
        }

        void add_plug(const initial::Plug& p) const {
            if (p.center - p.width / 2.0 < 0.0 || p.center + p.width / 2.0 > grid.L)
                throw InvalidArgumentError("build_initial: plug extends outside the domain");
            for (int i = 0; i < grid.n; ++i)
                if (std::abs(grid.x(i) - p.center) <= p.width / 2.0) c[i] = p.height;
        }

        void operator()(const initial::Plug& p) const { add_plug(p); }

        void operator()(const initial::TwoPlugs& p) const {
            add_plug(p.first);
            add_plug(p.second);
        }
    };

    std::visit(Builder{params, grid, state.c}, spec);
    return state;
}

RunRecord simulate(const State& initial_state, const ModelParams& params, const Kernel& kernel,
                   const Grid& grid, const SchemeConfig& scheme) {
    params.validate();
    grid.validate();
    scheme.validate(params, grid);
    if (initial_state.c.size() != grid.n)
        throw InvalidArgumentError("simulate: state size does not match the grid");

    NonlocalOperator op(kernel, grid, scheme.convolution_mode);

    RunRecord rec;
    rec.grid = grid;
    rec.min_value_seen = initial_state.c.minCoeff();

    Eigen::ArrayXd c = initial_state.c;
    double t = initial_state.t;

    auto record_snapshot = [&]() {
        rec.times.push_back(t);
        rec.snapshots.push_back(c);
        rec.masses.push_back(field_mass(c, grid));
    };
    record_snapshot();

    const long long total_steps = static_cast<long long>(std::ceil(scheme.t_end / scheme.dt - 1e-9));
    const long long steps_per_snap =
        std::max<long long>(1, std::llround(scheme.snapshot_every / scheme.dt));

    Eigen::ArrayXd K, lap;
    for (long long s = 1; s <= total_steps; ++s) {
        op.apply(c, K);
        add_laplacian(c, grid, lap);
        advance_in_place(c, lap, K, params, scheme.dt);
        t = initial_state.t + static_cast<double>(s) * scheme.dt;

        try {
            check_finite(c, t);
        } catch (const BlowUpError& e) {
            rec.failure = RunRecord::Failure{e.t, e.what()};
            return rec;
        }
        rec.min_value_seen = std::min(rec.min_value_seen, c.minCoeff());

        if (s % steps_per_snap == 0 || s == total_steps) record_snapshot();
    }
    return rec;
}

} // namespace nlrd
