#ifndef NLRD_KERNEL_HPP
#define NLRD_KERNEL_HPP

#include <complex>
#include <Eigen/Dense>

#include "nlrd/errors.hpp"

namespace nlrd {

enum class KernelShape { BoxSymmetric, BoxAsymmetric, Gaussian, Exponential, Delta };

/// Trapezoid samples of a kernel on a uniform offset grid.
///
/// weights[i] belongs to spatial offset (min_offset + i) * dx. For every shape
/// except Delta the range is symmetric, offsets -K..K; Delta collapses to the
/// single weight [1] at offset 0.
struct KernelWeights {
    Eigen::ArrayXd weights;
    int min_offset = 0;

    int size() const { return static_cast<int>(weights.size()); }
    int max_offset() const { return min_offset + size() - 1; }
    int offset(int i) const { return min_offset + i; }
};

/**
 * Influence function phi(y): how individuals at offset y deplete the resources
 * at the origin. Immutable after construction; all queries are const and the
 * value can be freely copied or shared between threads.
 *
 * Base densities:
 *   BoxSymmetric(N):  1/(2N) on |y| <= N          (unit mass)
 *   BoxAsymmetric(N): 1/N    on 0 <= y <= N       (unit mass)
 *   Gaussian(a):      exp(-a y^2)                 (mass sqrt(pi/a))
 *   Exponential(a):   exp(-a|y|)                  (mass 2/a)
 *   Delta:            unit point mass at y = 0
 *
 * With normalized = true (the default) the density is rescaled to unit mass;
 * for the box shapes this is a no-op since they are intrinsically normalized.
 */
class Kernel {
public:
    static Kernel box_symmetric(double half_width, bool normalized = true);
    static Kernel box_asymmetric(double width, bool normalized = true);
    static Kernel gaussian(double decay, bool normalized = true);
    static Kernel exponential(double decay, bool normalized = true);
    static Kernel delta();

    KernelShape shape() const { return shape_; }
    bool normalized() const { return normalized_; }

    /// Support width parameter N of the box shapes.
    double width() const;
    /// Decay rate of the Gaussian/Exponential shapes (named to avoid any
    /// collision with the birth constant of the model).
    double decay() const;
    /// Raw shape parameter regardless of its meaning (0 for Delta).
    double parameter() const { return param_; }

    bool is_even() const { return shape_ != KernelShape::BoxAsymmetric; }

    /// Total mass of the kernel as evaluated (1 when normalized).
    double mass() const;

    /// Radius beyond which the kernel is zero (boxes) or numerically
    /// negligible, below ~1e-15 of the peak (decaying shapes). 0 for Delta.
    double support_radius() const;

    /// Pointwise density phi(y). Delta has none and raises
    /// UnsupportedOperationError.
    double evaluate(double y) const;

    /// Analytic Fourier transform \int phi(y) e^{i xi y} dy. The xi -> 0
    /// singularity of the box formulas is removable and handled by series,
    /// so fourier_transform(0) is exactly the mass.
    std::complex<double> fourier_transform(double xi) const;

    /// Second-moment coefficient gamma = 1/2 \int phi(y) y^2 dy of the
    /// Taylor reduction, analytic per shape.
    double second_moment_gamma() const;

    /// Trapezoid weights w_k = phi(k dx) dx on offsets covering
    /// [-support_radius, support_radius], endpoints (and any jump of the
    /// density that lands exactly on a grid point) at half weight. When the
    /// kernel is normalized the weights are rescaled to sum to exactly 1.
    KernelWeights sample_on_grid(double dx, double support_radius) const;

    bool operator==(const Kernel&) const = default;

private:
    Kernel(KernelShape shape, double param, bool normalized);

    double base_mass() const; // mass of the unnormalized density

    KernelShape shape_;
    double param_;
    bool normalized_;
};

} // namespace nlrd

#endif
