#pragma once

#include <functional>
#include <vector>

#include "gasdyn/core.hpp"

// Independent references used to validate the variational solver: a
// first-order finite-volume scheme (local Lax-Friedrichs flux, forward Euler,
// outflow boundaries) and closed-form smooth solutions for the weak-strong
// comparisons.

namespace gasdyn {

struct GridSolution {
    std::vector<double> cell_centers;
    std::vector<double> rho;       // density per cell, >= 0
    std::vector<double> momentum;  // rho * u per cell
    double time = 0.0;
    double cfl = 0.5;
    double dx = 0.0;
    long floor_hits = 0;  // how often the vacuum density floor kicked in

    double total_mass() const;
    double total_momentum() const;
    double total_energy(const GasLaw& law) const;
};

GridSolution make_grid(double lo, double hi, std::size_t cells,
                       const std::function<double(double)>& density,
                       const std::function<double(double)>& velocity);

GridSolution fv_solve(const GridSolution& initial, const GasLaw& law, double t_end,
                      double cfl);

enum class ReferenceKind { Constant, FreeTransport };

struct ReferenceParams {
    double rho0 = 1.0;  // constant kind
    double u0 = 0.0;
    // free transport kind: W0(x) = offset + slope * x, density profile rho_init
    double slope = 0.0;
    double offset = 0.0;
    std::function<double(double)> rho_init;
};

// Classical solution fields at a fixed time, plus the velocity-gradient bound
// feeding the Gronwall constant.
struct ReferenceFields {
    std::function<double(double)> density;
    std::function<double(double)> velocity;
    double velocity_gradient_sup = 0.0;  // c(t)
    double time = 0.0;
};

// Lifespan of the classical solution (characteristic crossing time).
double reference_lifespan(ReferenceKind kind, const ReferenceParams& params);

ReferenceFields smooth_reference(ReferenceKind kind, const ReferenceParams& params,
                                 double t);

}  // namespace gasdyn
