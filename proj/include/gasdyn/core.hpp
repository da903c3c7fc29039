#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

// Core vocabulary for the 1D polytropic gas: the gas law, discrete fluid
// states (sorted mass particles with velocities), the gap density
// reconstruction, energies and moments. Everything here is a plain value
// type; operations are pure functions.

namespace gasdyn {

// Relative spacing below which two particle positions count as coincident.
inline constexpr double kDegeneracyRel = 1e-12;
inline constexpr double kMassTol = 1e-12;

struct GasLaw {
    double kappa = 1.0;  // pressure scale, >= 0 (0 = pressureless test mode)
    double gamma = 2.0;  // adiabatic coefficient, > 1

    // Internal energy density U(r) = kappa * r^gamma.
    double internal_energy_density(double r) const;
    // P(r) = U'(r) r - U(r) = (gamma - 1) kappa r^gamma.
    double pressure(double r) const;
    // P'(r) = gamma (gamma - 1) kappa r^(gamma-1); squared sound speed ~ P'.
    double pressure_derivative(double r) const;
    bool pressureless() const { return kappa == 0.0; }
};

GasLaw make_gas_law(double kappa, double gamma);

double pressure_of(const GasLaw& law, double r);

struct ParticleState {
    std::vector<double> positions;   // strictly increasing
    std::vector<double> masses;      // positive, sum to 1 after normalization
    std::vector<double> velocities;
    double time = 0.0;
    double mass_scale = 1.0;  // factor the constructor divided the masses by

    std::size_t size() const { return positions.size(); }
    double hull_width() const { return positions.back() - positions.front(); }
};

// Normalizes masses to unit total (recording the scale) and validates.
ParticleState make_particle_state(std::vector<double> positions,
                                  std::vector<double> masses,
                                  std::vector<double> velocities,
                                  double time = 0.0);

// Throws std::invalid_argument on unsorted/degenerate positions or bad masses.
void validate_state(const ParticleState& state);

struct GapDensity {
    std::vector<double> cell_edges;      // sorted, size = cells + 1
    std::vector<double> cell_densities;  // mass per length, >= 0

    std::size_t cells() const { return cell_densities.size(); }
    double total_mass() const;
};

// Midpoint-mass gap rule: interior cell i on [x_i, x_{i+1}] carries density
// (m_i + m_{i+1})/2 / gap. With ghost_cells, the two boundary half-masses go
// into ghost cells whose width equals the adjacent interior gap, so the
// reconstruction integrates to exactly one.
GapDensity reconstruct_density(const ParticleState& state, bool ghost_cells = true);

struct EnergyBreakdown {
    double kinetic = 0.0;
    double internal = 0.0;
    double total = 0.0;
};

EnergyBreakdown total_energy(const ParticleState& state, const GasLaw& law,
                             bool ghost_cells = true);

// M(t) = sqrt(sum_i m_i x_i^2).
double second_moment(const ParticleState& state);

// sqrt(2 * kinetic): L^2(m) norm of the velocities, the speed bound used by
// the moment and Wasserstein Lipschitz estimates.
double velocity_l2_norm(const ParticleState& state);

}  // namespace gasdyn
