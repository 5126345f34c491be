#ifndef NLRD_GRID_HPP
#define NLRD_GRID_HPP

#include <Eigen/Dense>

#include "nlrd/errors.hpp"

namespace nlrd {

enum class BoundaryCondition { Periodic, ZeroFlux };

/// Uniform 1D mesh on [0, L]. Periodic grids store n points x_i = i*dx with
/// x_n identified with x_0 (dx = L/n); zero-flux grids include both endpoints
/// (dx = L/(n-1)).
struct Grid {
    double L = 10.0;
    int n = 500;
    BoundaryCondition bc = BoundaryCondition::Periodic;

    double dx() const {
        return bc == BoundaryCondition::Periodic ? L / n : L / (n - 1);
    }

    double x(int i) const { return i * dx(); }

    Eigen::ArrayXd coordinates() const {
        return Eigen::ArrayXd::LinSpaced(n, 0.0, (n - 1) * dx());
    }

    void validate() const {
        if (!(L > 0.0)) throw InvalidArgumentError("Grid: domain length must be positive");
        if (n < 16) throw InvalidArgumentError("Grid: need at least 16 points");
    }

    bool operator==(const Grid&) const = default;
};

/// Concentration field at one instant.
struct State {
    Eigen::ArrayXd c;
    double t = 0.0;
};

} // namespace nlrd

#endif
