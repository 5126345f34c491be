#ifndef NLRD_MODEL_HPP
#define NLRD_MODEL_HPP

#include "nlrd/errors.hpp"

namespace nlrd {

/// Reaction and transport constants of the population model.
///
/// d is the diffusion coefficient (length^2/time), a the birth constant and b
/// the natural death rate (both 1/time). The positive homogeneous equilibrium
/// sits at c = sigma() = a - b.
struct ModelParams {
    double d = 0.05;
    double a = 2.0;
    double b = 1.0;

    double sigma() const { return a - b; }

    /// Stability ratio mu = d/sigma compared against the critical curves.
    double mu() const { return d / sigma(); }

    void validate() const {
        if (!(d > 0.0)) throw InvalidArgumentError("ModelParams: diffusion d must be positive");
        if (!(a > b)) throw InvalidArgumentError("ModelParams: birth constant a must exceed death rate b");
    }

    bool operator==(const ModelParams&) const = default;
};

} // namespace nlrd

#endif
