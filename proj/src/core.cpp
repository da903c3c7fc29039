#include "gasdyn/core.hpp"

#include <cmath>
#include <numeric>

namespace gasdyn {

double GasLaw::internal_energy_density(double r) const {
    if (r < 0.0) throw std::domain_error("internal_energy_density: negative density");
    if (r == 0.0) return 0.0;
    return kappa * std::pow(r, gamma);
}

double GasLaw::pressure(double r) const {
    if (r < 0.0) throw std::domain_error("pressure: negative density");
    if (r == 0.0) return 0.0;
    return (gamma - 1.0) * kappa * std::pow(r, gamma);
}

double GasLaw::pressure_derivative(double r) const {
    if (r < 0.0) throw std::domain_error("pressure_derivative: negative density");
    if (r == 0.0) return 0.0;
    return gamma * (gamma - 1.0) * kappa * std::pow(r, gamma - 1.0);
}

GasLaw make_gas_law(double kappa, double gamma) {
    if (!(kappa >= 0.0) || !std::isfinite(kappa))
        throw std::invalid_argument("gas law: kappa must be >= 0 (0 = pressureless mode)");
    if (!(gamma > 1.0) || !std::isfinite(gamma))
        throw std::invalid_argument("gas law: gamma must be > 1");
    return GasLaw{kappa, gamma};
}

double pressure_of(const GasLaw& law, double r) { return law.pressure(r); }

ParticleState make_particle_state(std::vector<double> positions,
                                  std::vector<double> masses,
                                  std::vector<double> velocities,
                                  double time) {
    ParticleState state;
    state.positions = std::move(positions);
    state.masses = std::move(masses);
    state.velocities = std::move(velocities);
    state.time = time;

    if (state.masses.size() != state.positions.size() ||
        state.velocities.size() != state.positions.size())
        throw std::invalid_argument("particle state: positions/masses/velocities size mismatch");

    double total = std::accumulate(state.masses.begin(), state.masses.end(), 0.0);
    if (!(total > 0.0) || !std::isfinite(total))
        throw std::invalid_argument("particle state: total mass must be positive and finite");
    state.mass_scale = total;
    for (double& m : state.masses) m /= total;

    validate_state(state);
    return state;
}

void validate_state(const ParticleState& state) {
    const std::size_t n = state.size();
    if (n < 2) throw std::invalid_argument("particle state: need at least 2 particles");
    if (state.masses.size() != n || state.velocities.size() != n)
        throw std::invalid_argument("particle state: field size mismatch");
    if (!(state.time >= 0.0))
        throw std::invalid_argument("particle state: time must be nonnegative");

    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (!(state.positions[i] < state.positions[i + 1]))
            throw std::invalid_argument("particle state: positions must be strictly increasing");
    }
    const double width = state.hull_width();
    const double eps = kDegeneracyRel * width;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        // Committed states reject near-coincident particles; the optimizer's
        // clamp lands exactly on the threshold, so allow a half-factor slack.
        if (state.positions[i + 1] - state.positions[i] < 0.5 * eps)
            throw std::invalid_argument("particle state: degenerate particle spacing");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(state.masses[i] > 0.0))
            throw std::invalid_argument("particle state: masses must be positive");
        if (!std::isfinite(state.velocities[i]) || !std::isfinite(state.positions[i]))
            throw std::invalid_argument("particle state: non-finite entry");
        total += state.masses[i];
    }
    if (std::abs(total - 1.0) > kMassTol)
        throw std::invalid_argument("particle state: masses must sum to 1 within 1e-12");
}

double GapDensity::total_mass() const {
    double sum = 0.0;
    for (std::size_t i = 0; i < cells(); ++i)
        sum += cell_densities[i] * (cell_edges[i + 1] - cell_edges[i]);
    return sum;
}

GapDensity reconstruct_density(const ParticleState& state, bool ghost_cells) {
    validate_state(state);
    const std::size_t n = state.size();
    const auto& x = state.positions;
    const auto& m = state.masses;

    GapDensity out;
    out.cell_edges.reserve(n + (ghost_cells ? 2 : 0));
    out.cell_densities.reserve(n - 1 + (ghost_cells ? 2 : 0));

    const double left_width = x[1] - x[0];
    const double right_width = x[n - 1] - x[n - 2];

    if (ghost_cells) {
        out.cell_edges.push_back(x[0] - left_width);
        out.cell_densities.push_back(0.5 * m[0] / left_width);
    }
    out.cell_edges.push_back(x[0]);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double gap = x[i + 1] - x[i];
        out.cell_densities.push_back(0.5 * (m[i] + m[i + 1]) / gap);
        out.cell_edges.push_back(x[i + 1]);
    }
    if (ghost_cells) {
        out.cell_densities.push_back(0.5 * m[n - 1] / right_width);
        out.cell_edges.push_back(x[n - 1] + right_width);
    }
    return out;
}

EnergyBreakdown total_energy(const ParticleState& state, const GasLaw& law,
                             bool ghost_cells) {
    EnergyBreakdown out;
    for (std::size_t i = 0; i < state.size(); ++i)
        out.kinetic += 0.5 * state.masses[i] * state.velocities[i] * state.velocities[i];
    if (!law.pressureless()) {
        const GapDensity rho = reconstruct_density(state, ghost_cells);
        for (std::size_t c = 0; c < rho.cells(); ++c) {
            const double width = rho.cell_edges[c + 1] - rho.cell_edges[c];
            out.internal += law.internal_energy_density(rho.cell_densities[c]) * width;
        }
    }
    out.total = out.kinetic + out.internal;
    return out;
}

double second_moment(const ParticleState& state) {
    double sum = 0.0;
    for (std::size_t i = 0; i < state.size(); ++i)
        sum += state.masses[i] * state.positions[i] * state.positions[i];
    return std::sqrt(sum);
}

double velocity_l2_norm(const ParticleState& state) {
    double sum = 0.0;
    for (std::size_t i = 0; i < state.size(); ++i)
        sum += state.masses[i] * state.velocities[i] * state.velocities[i];
    return std::sqrt(sum);
}

}  // namespace gasdyn
