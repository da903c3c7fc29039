#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gasdyn/core.hpp"

// Per-timestep variational problem: minimize
//
//   3/(4 tau^2) sum_i m_i |X_i - (x_i + tau u_i)|^2
//     + sum_c U_c (dX_c / dx_c)^(1-gamma) dx_c
//
// over nondecreasing X, where U_c is the internal-energy weight of gap c in
// the gap reconstruction (boundary ghost cells fold into the first and last
// gap, since their widths track the adjacent gap). The minimizer defines the
// updated velocities W = (3/2) V - (1/2) u with V = (X - x)/tau, and every
// accepted step carries an exact energy ledger splitting the dissipation into
// a velocity term, a pressure (Bregman) term and a constraint-multiplier term.

namespace gasdyn {

struct SolverOptions {
    double el_tol = 1e-7;        // Euler-Lagrange residual bound, also drives convergence
    int max_iters = 500;
    double degeneracy_eps = 1e-12;  // relative gap floor, scaled by hull width
    std::vector<double> initial_guess;  // optional feasible start (testing)
};

struct StepProblem {
    ParticleState state;
    GasLaw law;
    double tau = 0.0;
};

StepProblem make_step_problem(ParticleState state, GasLaw law, double tau);

struct DissipationLedger {
    double velocity_term = 0.0;    // 1/6 sum m |W - u|^2
    double bregman_term = 0.0;     // pressure dissipation: Bregman gap of the gap energy
    double multiplier_term = 0.0;  // sum over active constraints of mu_c (dx_c - dX_c)
    double energy_before = 0.0;
    double energy_after = 0.0;
    // energy_before - energy_after - (three terms above); zero up to solver
    // tolerance, and the ledger inequality requires it > -1e-8.
    double margin = 0.0;
};

struct StepSolution {
    std::vector<double> X;  // new positions, nondecreasing (>= eps gaps)
    std::vector<double> V;  // (X - x)/tau
    std::vector<double> W;  // 1.5 V - 0.5 u
    double objective = 0.0;
    double el_residual = 0.0;
    DissipationLedger dissipation;
    std::vector<double> multipliers;  // KKT multiplier per gap (0 if inactive)
    std::vector<double> gap_pressures;  // P_c = P(r_c) (dX/dx)^(-gamma), ghost-augmented
    int iterations = 0;
};

class solver_error : public std::runtime_error {
  public:
    solver_error(const std::string& what, std::vector<double> last_iterate, double residual)
        : std::runtime_error(what), last_iterate(std::move(last_iterate)), residual(residual) {}
    std::vector<double> last_iterate;
    double residual = 0.0;
};

// Internal-energy weight of each gap (kappa r_c^gamma plus ghost shares).
std::vector<double> gap_energy_weights(const ParticleState& state, const GasLaw& law);

// Value of the step functional at candidate positions X; +infinity when a
// gap is nonpositive (the (1-gamma)-power barrier) or X is decreasing.
double step_objective(const StepProblem& problem, const std::vector<double>& X);

// Analytic gradient of the step functional at strictly feasible X.
std::vector<double> step_gradient(const StepProblem& problem, const std::vector<double>& X);

StepSolution solve_step(const StepProblem& problem, const SolverOptions& opts = {});

// 1D Bregman gap of a -> a^(1-gamma) at the base point 1.
double bregman_divergence(const GasLaw& law, double gap_ratio);

struct TestFunction {
    std::string name;
    std::function<double(double)> value;
    std::function<double(double)> derivative;
    double norm = 1.0;  // BL-type normalization (sup + Lip; Lip only for unbounded)
    // Curvature breakpoints (piecewise-polynomial joints); quadratures split
    // integration panels there to stay exact.
    std::vector<double> breakpoints;
};

using TestFunctionFamily = std::vector<TestFunction>;

// Identity map plus C^1 bumps on dyadic grids covering [lo, hi].
TestFunctionFamily default_test_family(double lo, double hi, int levels);

// Normalized weak-form gap of the step optimality condition over the family:
// max_zeta | sum_i zeta(x_i) m_i (W_i - u_i)/tau
//            - sum_c (zeta(x_{c+1}) - zeta(x_c)) (P_c + mu_c) | / norm(zeta).
double el_residual(const StepProblem& problem, const StepSolution& sol,
                   const TestFunctionFamily& tests);

}  // namespace gasdyn
