#include "gasdyn/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gasdyn {

namespace {

// 7-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr double kGaussX[7] = {-0.9491079123427585, -0.7415311855993945,
                               -0.4058451513773972, 0.0,
                               0.4058451513773972,  0.7415311855993945,
                               0.9491079123427585};
constexpr double kGaussW[7] = {0.1294849661688697, 0.2797053914892766,
                               0.3818300505051189, 0.4179591836734694,
                               0.3818300505051189, 0.2797053914892766,
                               0.1294849661688697};

}  // namespace

double CoarseField::mass() const {
    double sum = 0.0;
    for (std::size_t c = 0; c < cells(); ++c) sum += rbar[c] * width(c);
    return sum;
}

std::size_t default_cell_count(std::size_t n_particles) {
    return (std::size_t)std::ceil(std::sqrt((double)n_particles));
}

CoarseField coarse_grain(const InterpolantSample& sample, const GasLaw& law,
                         std::size_t n_cells) {
    if (n_cells < 1) throw std::domain_error("coarse_grain: need at least one cell");
    const ParticleState& s = sample.state;
    validate_state(s);
    const double lo = s.positions.front(), hi = s.positions.back();
    if (!(hi > lo)) throw std::domain_error("coarse_grain: empty hull");

    const GapDensity fine = reconstruct_density(s);
    const double cell_w = (hi - lo) / n_cells;

    CoarseField f;
    const std::size_t total = n_cells + 2;  // interior cells plus two ghosts
    f.cell_edges.resize(total + 1);
    f.cell_edges[0] = fine.cell_edges.front();
    for (std::size_t c = 0; c <= n_cells; ++c) f.cell_edges[c + 1] = lo + c * cell_w;
    f.cell_edges[n_cells + 1] = hi;  // guard against rounding
    f.cell_edges[total] = fine.cell_edges.back();

    f.rbar.assign(total, 0.0);
    f.rho_fine.assign(total, 0.0);
    f.ubar.assign(total, 0.0);
    f.second_moment_flux.assign(total, 0.0);
    f.pressure_avg.assign(total, 0.0);

    // Particle moments per cell (mass, momentum, m v^2).
    std::vector<double> mass(total, 0.0), mom(total, 0.0), mv2(total, 0.0);
    for (std::size_t i = 0; i < s.size(); ++i) {
        std::size_t c = 1 + (std::size_t)std::min<double>(
                                n_cells - 1.0,
                                std::max(0.0, std::floor((s.positions[i] - lo) / cell_w)));
        mass[c] += s.masses[i];
        mom[c] += s.masses[i] * s.velocities[i];
        mv2[c] += s.masses[i] * s.velocities[i] * s.velocities[i];
    }

    // Fine-density overlaps: integral of rho_fine and P(rho_fine) per cell.
    std::vector<double> fmass(total, 0.0), fpress(total, 0.0);
    std::size_t c = 0;
    for (std::size_t g = 0; g < fine.cells(); ++g) {
        const double ga = fine.cell_edges[g], gb = fine.cell_edges[g + 1];
        const double r = fine.cell_densities[g];
        const double p = law.pressure(r);
        while (c < total && f.cell_edges[c + 1] <= ga + 0.0) ++c;
        for (std::size_t cc = c; cc < total && f.cell_edges[cc] < gb; ++cc) {
            const double a = std::max(ga, f.cell_edges[cc]);
            const double b = std::min(gb, f.cell_edges[cc + 1]);
            if (b > a) {
                fmass[cc] += r * (b - a);
                fpress[cc] += p * (b - a);
            }
        }
    }

    for (std::size_t cc = 0; cc < total; ++cc) {
        const double w = f.width(cc);
        if (!(w > 0.0)) continue;
        f.rbar[cc] = mass[cc] / w;
        f.ubar[cc] = mass[cc] > 0.0 ? mom[cc] / mass[cc] : 0.0;
        f.second_moment_flux[cc] = mv2[cc] / w;
        f.rho_fine[cc] = fmass[cc] / w;
        f.pressure_avg[cc] = fpress[cc] / w;
    }
    return f;
}

DefectFields defects(const CoarseField& field, const GasLaw& law) {
    DefectFields out;
    const std::size_t n = field.cells();
    out.Q.resize(n);
    out.phi.resize(n);
    for (std::size_t c = 0; c < n; ++c) {
        double q = field.second_moment_flux[c] - field.rbar[c] * field.ubar[c] * field.ubar[c];
        double p = field.pressure_avg[c] - law.pressure(field.rho_fine[c]);
        if (q < -1e-10 || p < -1e-10)
            throw std::runtime_error("defects: Jensen gap negative beyond tolerance");
        q = std::max(q, 0.0);
        p = std::max(p, 0.0);
        out.Q[c] = q;
        out.phi[c] = p;
        out.total_Q += q * field.width(c);
        out.total_phi += p * field.width(c);
    }
    return out;
}

double resolved_energy(const CoarseField& field, const GasLaw& law) {
    double sum = 0.0;
    for (std::size_t c = 0; c < field.cells(); ++c) {
        const double w = field.width(c);
        sum += (0.5 * field.rbar[c] * field.ubar[c] * field.ubar[c] +
                law.internal_energy_density(field.rho_fine[c])) * w;
    }
    return sum;
}

double acceleration(const InterpolantSample& linear_sample,
                    const InterpolantSample& constant_sample, const GasLaw& law) {
    // Both cell sums telescope: the kinetic flux integrates to sum m W^2 over
    // the nu sample, the pressure average to the integral of P over the eps
    // reconstruction.
    double kinetic = 0.0;
    const ParticleState& lin = linear_sample.state;
    for (std::size_t i = 0; i < lin.size(); ++i)
        kinetic += lin.masses[i] * lin.velocities[i] * lin.velocities[i];

    double pressure = 0.0;
    if (!law.pressureless()) {
        const GapDensity fine = reconstruct_density(constant_sample.state);
        for (std::size_t g = 0; g < fine.cells(); ++g)
            pressure += law.pressure(fine.cell_densities[g]) *
                        (fine.cell_edges[g + 1] - fine.cell_edges[g]);
    }
    return kinetic + pressure;  // d = 1
}

namespace {

double momentum_pairing(const Trajectory& traj, double t) {
    InterpolantSample s = sample(traj, t, InterpolantKind::PiecewiseLinear);
    double a = 0.0;
    for (std::size_t i = 0; i < s.state.size(); ++i)
        a += s.state.masses[i] * s.state.positions[i] * s.state.velocities[i];
    return a;
}

}  // namespace

double virial_residual(const Trajectory& traj, const GasLaw& law, double t, double h) {
    if (h <= 0.0) h = 0.5 * traj.tau;
    if (!(t - h >= 0.0) || !(t + h <= traj.t_end) || !(t > traj.tau) ||
        !(t < traj.t_end - traj.tau))
        throw std::domain_error("virial_residual: t must lie in (tau, t_end - tau)");
    const double lhs = (momentum_pairing(traj, t + h) - momentum_pairing(traj, t - h)) /
                       (2.0 * h);
    const double rhs = acceleration(sample(traj, t, InterpolantKind::PiecewiseLinear),
                                    sample(traj, t, InterpolantKind::PiecewiseConstant), law);
    return lhs - rhs;
}

double relative_energy(const CoarseField& field, const DefectFields& def,
                       const ReferenceFields& ref, const GasLaw& law) {
    const double gm1 = law.gamma - 1.0;
    double delta = 0.0;
    for (std::size_t c = 0; c < field.cells(); ++c) {
        const double w = field.width(c);
        const double mid = 0.5 * (field.cell_edges[c] + field.cell_edges[c + 1]);
        const double R = ref.density(mid);
        const double W = ref.velocity(mid);
        if (!(R > 0.0))
            throw std::domain_error("relative_energy: reference density must be positive");
        delta += (0.5 * def.Q[c] + def.phi[c] / gm1) * w;
        const double dv = W - field.ubar[c];
        const double r = field.rho_fine[c];
        // U(r) - (U'(R)(r - R) + U(R)), the Bregman gap of the internal energy
        const double uprime = law.kappa * law.gamma * std::pow(R, law.gamma - 1.0);
        const double breg = law.internal_energy_density(r) -
                            (uprime * (r - R) + law.internal_energy_density(R));
        delta += (0.5 * field.rbar[c] * dv * dv + breg) * w;
    }
    return delta;
}

WeakFormResidual weak_form_residual(const Trajectory& traj, const GasLaw& law,
                                    const TestFunction& eta, const TestFunction& zeta) {
    WeakFormResidual out;
    double cont = 0.0, mom = 0.0;
    std::vector<double> cuts;
    for (std::size_t k = 0; k < traj.step_count(); ++k) {
        const double t0 = k * traj.tau, t1 = (k + 1) * traj.tau;
        const ParticleState& base = traj.states[k];
        const StepSolution& sol = traj.steps[k];
        // pressure term is piecewise constant in time within a step
        double press = 0.0;
        if (!law.pressureless()) {
            const GapDensity fine = reconstruct_density(base);
            for (std::size_t g = 0; g < fine.cells(); ++g)
                press += law.pressure(fine.cell_densities[g]) *
                         (zeta.value(fine.cell_edges[g + 1]) - zeta.value(fine.cell_edges[g]));
        }

        // The integrand is piecewise polynomial in t: panels split where eta
        // has a joint or a particle crosses a zeta joint, so the 7-point
        // Gauss rule integrates each panel exactly.
        cuts.clear();
        cuts.push_back(t0);
        cuts.push_back(t1);
        for (double b : eta.breakpoints)
            if (b > t0 && b < t1) cuts.push_back(b);
        for (double b : zeta.breakpoints) {
            for (std::size_t i = 0; i < base.size(); ++i) {
                const double dx = sol.X[i] - base.positions[i];
                if (dx == 0.0) continue;
                const double theta = (b - base.positions[i]) / dx;
                const double tc = t0 + theta * traj.tau;
                if (tc > t0 && tc < t1) cuts.push_back(tc);
            }
        }
        std::sort(cuts.begin(), cuts.end());

        for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
            const double a = cuts[p], b = cuts[p + 1];
            if (!(b > a)) continue;
            for (int q = 0; q < 7; ++q) {
                const double t = 0.5 * (a + b) + 0.5 * (b - a) * kGaussX[q];
                const double wq = 0.5 * (b - a) * kGaussW[q];
                const double theta = (t - t0) / traj.tau;
                double c_dt = 0.0, c_fx = 0.0, m_dt = 0.0, m_fx = 0.0;
                for (std::size_t i = 0; i < base.size(); ++i) {
                    const double xi = (1.0 - theta) * base.positions[i] + theta * sol.X[i];
                    const double wi = (1.0 - theta) * base.velocities[i] + theta * sol.W[i];
                    const double mi = base.masses[i];
                    const double zv = zeta.value(xi), zd = zeta.derivative(xi);
                    c_dt += mi * zv;
                    c_fx += mi * zd * wi;
                    m_dt += mi * zv * wi;
                    m_fx += mi * zd * wi * wi;
                }
                cont += wq * (eta.derivative(t) * c_dt + eta.value(t) * c_fx);
                mom += wq * (eta.derivative(t) * m_dt + eta.value(t) * (m_fx + press));
            }
        }
    }
    out.continuity = cont;
    out.momentum = mom;
    return out;
}

DiagnosticSeries compute_series(const Trajectory& traj, const GasLaw& law,
                                std::size_t n_cells, int samples_per_step) {
    if (samples_per_step < 1)
        throw std::invalid_argument("compute_series: samples_per_step >= 1");
    DiagnosticSeries out;
    const std::size_t K = traj.step_count();
    out.times.reserve(K * samples_per_step + 1);
    for (std::size_t k = 0; k < K; ++k)
        for (int j = 0; j < samples_per_step; ++j)
            out.times.push_back((k + (double)j / samples_per_step) * traj.tau);
    out.times.push_back(traj.t_end);

    const std::size_t n = out.times.size();
    out.E.resize(n);
    out.N.resize(n);
    out.a.resize(n);
    out.f.resize(n);
    out.virial_lhs.resize(n, 0.0);
    out.virial_rhs.resize(n, 0.0);
    out.defect_Q_total.resize(n);
    out.defect_phi_total.resize(n);
    out.defect_R_total.resize(n);
    out.defect_chi_total.resize(n);
    out.resolved_eps.resize(n);
    out.M2.resize(n);

    for (std::size_t s_i = 0; s_i < n; ++s_i) {
        const double t = out.times[s_i];
        InterpolantSample pc = sample(traj, t, InterpolantKind::PiecewiseConstant);
        InterpolantSample pl = sample(traj, t, InterpolantKind::PiecewiseLinear);

        out.E[s_i] = total_energy(pc.state, law).total;
        out.N[s_i] = total_energy(pl.state, law).total;
        out.f[s_i] = out.E[s_i];
        out.a[s_i] = acceleration(pl, pc, law);
        out.M2[s_i] = second_moment(pl.state);

        CoarseField feps = coarse_grain(pc, law, n_cells);
        CoarseField fnu = coarse_grain(pl, law, n_cells);
        DefectFields deps = defects(feps, law);
        DefectFields dnu = defects(fnu, law);
        out.defect_Q_total[s_i] = deps.total_Q;
        out.defect_phi_total[s_i] = deps.total_phi;
        out.defect_R_total[s_i] = dnu.total_Q;
        out.defect_chi_total[s_i] = dnu.total_phi;
        out.resolved_eps[s_i] = resolved_energy(feps, law);

        if (t > traj.tau && t < traj.t_end - traj.tau) {
            const double h = 0.5 * traj.tau;
            out.virial_lhs[s_i] = (momentum_pairing(traj, t + h) -
                                   momentum_pairing(traj, t - h)) / (2.0 * h);
            out.virial_rhs[s_i] = out.a[s_i];
        }
    }
    return out;
}

}  // namespace gasdyn
