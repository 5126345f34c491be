#include "nlrd/kernel.hpp"

#include <cmath>
#include <numbers>

namespace nlrd {

namespace {

// sin(z)/z with the removable singularity expanded.
double sinc(double z) {
    if (std::abs(z) < 1e-4) {
        const double z2 = z * z;
        return 1.0 - z2 / 6.0 * (1.0 - z2 / 20.0);
    }
    return std::sin(z) / z;
}

// (1 - cos(z))/z, likewise.
double one_minus_cos_over(double z) {
    if (std::abs(z) < 1e-4) {
        const double z2 = z * z;
        return z / 2.0 * (1.0 - z2 / 12.0 * (1.0 - z2 / 30.0));
    }
    return (1.0 - std::cos(z)) / z;
}

} // namespace

Kernel::Kernel(KernelShape shape, double param, bool normalized)
    : shape_(shape), param_(param), normalized_(normalized) {
    if (shape != KernelShape::Delta && !(param > 0.0))
        throw InvalidArgumentError("kernel width/decay parameter must be positive");
}

Kernel Kernel::box_symmetric(double half_width, bool normalized) {
    return Kernel(KernelShape::BoxSymmetric, half_width, normalized);
}
Kernel Kernel::box_asymmetric(double width, bool normalized) {
    return Kernel(KernelShape::BoxAsymmetric, width, normalized);
}
Kernel Kernel::gaussian(double decay, bool normalized) {
    return Kernel(KernelShape::Gaussian, decay, normalized);
}
Kernel Kernel::exponential(double decay, bool normalized) {
    return Kernel(KernelShape::Exponential, decay, normalized);
}
Kernel Kernel::delta() { return Kernel(KernelShape::Delta, 0.0, true); }

double Kernel::width() const {
    if (shape_ != KernelShape::BoxSymmetric && shape_ != KernelShape::BoxAsymmetric)
        throw UnsupportedOperationError("width() is defined for box kernels only");
    return param_;
}

double Kernel::decay() const {
    if (shape_ != KernelShape::Gaussian && shape_ != KernelShape::Exponential)
        throw UnsupportedOperationError("decay() is defined for Gaussian/Exponential kernels only");
    return param_;
}

double Kernel::base_mass() const {
    switch (shape_) {
        case KernelShape::BoxSymmetric:
        case KernelShape::BoxAsymmetric:
        case KernelShape::Delta:
            return 1.0;
        case KernelShape::Gaussian:
            return std::sqrt(std::numbers::pi / param_);
        case KernelShape::Exponential:
            return 2.0 / param_;
    }
    return 1.0;
}

double Kernel::mass() const { return normalized_ ? 1.0 : base_mass(); }

double Kernel::support_radius() const {
    switch (shape_) {
        case KernelShape::BoxSymmetric:
        case KernelShape::BoxAsymmetric:
            return param_;
        case KernelShape::Gaussian:
            return std::sqrt(35.0 / param_); // exp(-35) ~ 6e-16
        case KernelShape::Exponential:
            return 35.0 / param_;
        case KernelShape::Delta:
            return 0.0;
    }
    return 0.0;
}

double Kernel::evaluate(double y) const {
    const double scale = normalized_ ? 1.0 / base_mass() : 1.0;
    switch (shape_) {
        case KernelShape::BoxSymmetric:
            return std::abs(y) <= param_ ? 0.5 / param_ : 0.0;
        case KernelShape::BoxAsymmetric:
            return (y >= 0.0 && y <= param_) ? 1.0 / param_ : 0.0;
        case KernelShape::Gaussian:
            return scale * std::exp(-param_ * y * y);
        case KernelShape::Exponential:
            return scale * std::exp(-param_ * std::abs(y));
        case KernelShape::Delta:
            throw UnsupportedOperationError("delta kernel has no pointwise density");
    }
    return 0.0;
}

std::complex<double> Kernel::fourier_transform(double xi) const {
    using namespace std::complex_literals;
    switch (shape_) {
        case KernelShape::BoxSymmetric:
            return {sinc(xi * param_), 0.0};
        case KernelShape::BoxAsymmetric: {
            // int_0^N sin(xi y) dy = (1 - cos(xi N))/xi, so the imaginary
            // part is positive for small xi N.
            const double z = xi * param_;
            return {sinc(z), one_minus_cos_over(z)};
        }
        case KernelShape::Gaussian: {
            const double amp = normalized_ ? 1.0 : std::sqrt(std::numbers::pi / param_);
            return {amp * std::exp(-xi * xi / (4.0 * param_)), 0.0};
        }
        case KernelShape::Exponential: {
            // Transform of exp(-a|y|) is 2a/(a^2 + xi^2).
            const double base = 2.0 * param_ / (param_ * param_ + xi * xi);
            return {normalized_ ? 0.5 * param_ * base : base, 0.0};
        }
        case KernelShape::Delta:
            return {1.0, 0.0};
    }
    return {0.0, 0.0};
}

double Kernel::second_moment_gamma() const {
    const double scale = normalized_ ? 1.0 : mass();
    switch (shape_) {
        case KernelShape::BoxSymmetric:
        case KernelShape::BoxAsymmetric:
            // Both are unit-mass with the same |support| second moment.
            return param_ * param_ / 6.0;
        case KernelShape::Gaussian:
            return scale * 0.25 / param_;
        case KernelShape::Exponential:
            return scale * 1.0 / (param_ * param_);
        case KernelShape::Delta:
            return 0.0;
    }
    return 0.0;
}

KernelWeights Kernel::sample_on_grid(double dx, double support_radius) const {
    if (!(dx > 0.0)) throw InvalidArgumentError("sample_on_grid: dx must be positive");
    if (shape_ == KernelShape::Delta) {
        KernelWeights w;
        w.weights = Eigen::ArrayXd::Ones(1);
        w.min_offset = 0;
        return w;
    }
    if ((shape_ == KernelShape::BoxSymmetric || shape_ == KernelShape::BoxAsymmetric) &&
        support_radius < param_ - 1e-12)
        throw InvalidArgumentError("sample_on_grid: support_radius smaller than the kernel support");

    const int K = static_cast<int>(std::floor(support_radius / dx + 1e-9));
    const int n = 2 * K + 1;

    // Grid points where the density jumps take the mean of the one-sided
    // limits, i.e. half the interior value. A point that is both a jump and a
    // covering endpoint is halved once, not twice.
    auto is_jump = [&](int k) {
        const double y = k * dx;
        auto at = [&](double edge) { return std::abs(y - edge) < 1e-12 * std::max(1.0, std::abs(edge)); };
        if (shape_ == KernelShape::BoxSymmetric) return at(param_) || at(-param_);
        if (shape_ == KernelShape::BoxAsymmetric) return at(0.0) || at(param_);
        return false;
    };

    KernelWeights w;
    w.weights.resize(n);
    w.min_offset = -K;
    for (int k = -K; k <= K; ++k) {
        double v = evaluate(k * dx) * dx;
        if (is_jump(k) || std::abs(k) == K) v *= 0.5;
        w.weights[k + K] = v;
    }

    const double total = w.weights.sum();
    if (normalized_) {
        if (!(total > 0.0))
            throw ConfigError("sample_on_grid: grid too coarse, sampled kernel has zero mass");
        w.weights /= total;
    }
    return w;
}

} // namespace nlrd
