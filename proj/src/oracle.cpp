#include "gasdyn/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gasdyn {

namespace {
constexpr double kDensityFloor = 1e-14;
}

double GridSolution::total_mass() const {
    double sum = 0.0;
    for (double r : rho) sum += r;
    return sum * dx;
}

double GridSolution::total_momentum() const {
    double sum = 0.0;
    for (double m : momentum) sum += m;
    return sum * dx;
}

double GridSolution::total_energy(const GasLaw& law) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) {
        const double r = std::max(rho[i], kDensityFloor);
        sum += 0.5 * momentum[i] * momentum[i] / r + law.internal_energy_density(rho[i]);
    }
    return sum * dx;
}

GridSolution make_grid(double lo, double hi, std::size_t cells,
                       const std::function<double(double)>& density,
                       const std::function<double(double)>& velocity) {
    if (!(hi > lo) || cells < 2) throw std::invalid_argument("make_grid: bad domain");
    GridSolution g;
    g.dx = (hi - lo) / cells;
    g.cell_centers.resize(cells);
    g.rho.resize(cells);
    g.momentum.resize(cells);
    for (std::size_t i = 0; i < cells; ++i) {
        const double x = lo + (i + 0.5) * g.dx;
        g.cell_centers[i] = x;
        g.rho[i] = std::max(density(x), 0.0);
        g.momentum[i] = g.rho[i] * velocity(x);
    }
    return g;
}

GridSolution fv_solve(const GridSolution& initial, const GasLaw& law, double t_end,
                      double cfl) {
    if (!(cfl > 0.0) || !(cfl < 1.0)) throw std::invalid_argument("fv_solve: cfl in (0,1)");
    if (!(t_end >= initial.time)) throw std::invalid_argument("fv_solve: t_end before start");

    GridSolution g = initial;
    g.cfl = cfl;
    const std::size_t n = g.rho.size();

    auto wave_speed = [&](double r, double m) {
        const double rr = std::max(r, kDensityFloor);
        return std::abs(m / rr) + std::sqrt(std::max(law.pressure_derivative(r), 0.0));
    };
    auto flux_rho = [](double /*r*/, double m) { return m; };
    auto flux_mom = [&](double r, double m) {
        const double rr = std::max(r, kDensityFloor);
        return m * m / rr + law.pressure(r);
    };

    std::vector<double> rho_new(n), mom_new(n), frho(n + 1), fmom(n + 1);
    while (g.time < t_end - 1e-15) {
        double smax = 1e-12;
        for (std::size_t i = 0; i < n; ++i) {
            if (g.rho[i] < kDensityFloor) ++g.floor_hits;
            smax = std::max(smax, wave_speed(g.rho[i], g.momentum[i]));
        }
        double dt = cfl * g.dx / smax;
        dt = std::min(dt, t_end - g.time);

        // Local Lax-Friedrichs interface fluxes with outflow (copy) ghosts.
        for (std::size_t f = 0; f <= n; ++f) {
            const std::size_t il = (f == 0) ? 0 : f - 1;
            const std::size_t ir = (f == n) ? n - 1 : f;
            const double rl = g.rho[il], ml = g.momentum[il];
            const double rr = g.rho[ir], mr = g.momentum[ir];
            const double a = std::max(wave_speed(rl, ml), wave_speed(rr, mr));
            frho[f] = 0.5 * (flux_rho(rl, ml) + flux_rho(rr, mr)) - 0.5 * a * (rr - rl);
            fmom[f] = 0.5 * (flux_mom(rl, ml) + flux_mom(rr, mr)) - 0.5 * a * (mr - ml);
        }
        const double lam = dt / g.dx;
        for (std::size_t i = 0; i < n; ++i) {
            rho_new[i] = g.rho[i] - lam * (frho[i + 1] - frho[i]);
            mom_new[i] = g.momentum[i] - lam * (fmom[i + 1] - fmom[i]);
            if (rho_new[i] < 0.0) rho_new[i] = 0.0;
        }
        g.rho.swap(rho_new);
        g.momentum.swap(mom_new);
        g.time += dt;
    }
    return g;
}

double reference_lifespan(ReferenceKind kind, const ReferenceParams& params) {
    if (kind == ReferenceKind::Constant) return std::numeric_limits<double>::infinity();
    if (params.slope >= 0.0) return std::numeric_limits<double>::infinity();
    return -1.0 / params.slope;  // characteristic crossing time
}

ReferenceFields smooth_reference(ReferenceKind kind, const ReferenceParams& params,
                                 double t) {
    if (!(t >= 0.0)) throw std::domain_error("smooth_reference: t must be nonnegative");
    ReferenceFields out;
    out.time = t;
    if (kind == ReferenceKind::Constant) {
        const double r0 = params.rho0, u0 = params.u0;
        if (!(r0 > 0.0)) throw std::invalid_argument("smooth_reference: rho0 must be positive");
        out.density = [r0](double) { return r0; };
        out.velocity = [u0](double) { return u0; };
        out.velocity_gradient_sup = 0.0;
        return out;
    }

    // Pressureless free transport from W0(x) = offset + slope x: characteristics
    // x = xi + t W0(xi) give W(t,x) = W0(xi(x)) and R by the Jacobian.
    if (t >= reference_lifespan(kind, params))
        throw std::domain_error("smooth_reference: beyond the classical lifespan");
    if (!params.rho_init)
        throw std::invalid_argument("smooth_reference: free transport needs rho_init");
    const double jac = 1.0 + t * params.slope;  // d x / d xi, positive before crossing
    const double slope = params.slope, offset = params.offset, time = t;
    auto pullback = [slope, offset, time, jac](double x) {
        return (x - time * offset) / jac;
    };
    auto rho_init = params.rho_init;
    out.density = [rho_init, pullback, jac](double x) { return rho_init(pullback(x)) / jac; };
    out.velocity = [slope, offset, pullback](double x) {
        const double xi = pullback(x);
        return offset + slope * xi;
    };
    out.velocity_gradient_sup = std::abs(slope / jac);
    return out;
}

}  // namespace gasdyn
