#pragma once

#include <cstddef>
#include <vector>

#include "gasdyn/core.hpp"
#include "gasdyn/oracle.hpp"
#include "gasdyn/stepper.hpp"
#include "gasdyn/trajectory.hpp"

// Discrete stand-ins for the measure-valued diagnostics: coarse-grained
// fields, Jensen-gap defect measures, the acceleration (trace of the momentum
// flux), the virial identity, the relative energy against a smooth reference,
// and weak-form residuals of the conservation laws.
//
// A coarse field carries two densities. rbar counts the particle mass per
// cell and pairs with the velocity moments (ubar, the m v^2 flux); rho_fine
// averages the gap reconstruction and pairs with the pressure average. Each
// pairing is a cell-level average of one underlying measure, so both Jensen
// gaps are nonnegative cell by cell.

namespace gasdyn {

struct CoarseField {
    // interior cells tile the particle hull; one ghost cell is appended on
    // each side so the fine reconstruction is covered in full
    std::vector<double> cell_edges;          // size cells()+1
    std::vector<double> rbar;                // particle mass / width
    std::vector<double> rho_fine;            // gap-reconstruction average
    std::vector<double> ubar;                // mass-weighted mean velocity
    std::vector<double> second_moment_flux;  // sum m v^2 / width
    std::vector<double> pressure_avg;        // width-average of P(fine density)

    std::size_t cells() const { return rbar.size(); }
    double width(std::size_t c) const { return cell_edges[c + 1] - cell_edges[c]; }
    double mass() const;  // sum rbar * width
};

std::size_t default_cell_count(std::size_t n_particles);

CoarseField coarse_grain(const InterpolantSample& sample, const GasLaw& law,
                         std::size_t n_cells);

struct DefectFields {
    std::vector<double> Q;    // kinetic Jensen gap per cell (scalar in 1D)
    std::vector<double> phi;  // pressure Jensen gap per cell
    double total_Q = 0.0;     // sum Q * width
    double total_phi = 0.0;   // sum phi * width
};

// Per-cell gaps of the coarse field against its own means; negative values
// beyond -1e-10 indicate an internal inconsistency and throw.
DefectFields defects(const CoarseField& field, const GasLaw& law);

// Resolved (coarse) energy: sum of cell kinetic energy of the mean velocity
// plus U of the fine-average density.
double resolved_energy(const CoarseField& field, const GasLaw& law);

// a(t): trace of the momentum flux, kinetic part from the piecewise-linear
// sample, pressure part from the piecewise-constant one.
double acceleration(const InterpolantSample& linear_sample,
                    const InterpolantSample& constant_sample, const GasLaw& law);

// Central-difference virial gap d/dt(sum m X W) - a(t) at time t.
double virial_residual(const Trajectory& traj, const GasLaw& law, double t,
                       double h = 0.0);

// Relative energy against a smooth reference evaluated at cell midpoints.
double relative_energy(const CoarseField& field, const DefectFields& def,
                       const ReferenceFields& ref, const GasLaw& law);

// Residuals of the time-integrated weak continuity and momentum equations
// against the tensor test eta(t) zeta(x).
struct WeakFormResidual {
    double continuity = 0.0;
    double momentum = 0.0;
};

WeakFormResidual weak_form_residual(const Trajectory& traj, const GasLaw& law,
                                    const TestFunction& eta, const TestFunction& zeta);

struct DiagnosticSeries {
    std::vector<double> times;
    std::vector<double> E;  // piecewise-constant interpolant energy
    std::vector<double> N;  // piecewise-linear interpolant energy
    std::vector<double> a;
    std::vector<double> f;  // energy objective (the epsilon-family energy)
    std::vector<double> virial_lhs;  // d/dt sum m X W (central difference)
    std::vector<double> virial_rhs;  // trace integral a(t)
    std::vector<double> defect_Q_total;    // epsilon family, own-field gaps
    std::vector<double> defect_phi_total;
    std::vector<double> defect_R_total;    // nu family, own-field gaps
    std::vector<double> defect_chi_total;
    std::vector<double> resolved_eps;      // coarse energy of the eps sample
    std::vector<double> M2;

    std::size_t size() const { return times.size(); }
};

DiagnosticSeries compute_series(const Trajectory& traj, const GasLaw& law,
                                std::size_t n_cells, int samples_per_step);

}  // namespace gasdyn
