#include "gasdyn/trajectory.hpp"

#include <cmath>
#include <string>

namespace gasdyn {

double Trajectory::initial_energy() const {
    return total_energy(states.front(), law).total;
}

double Trajectory::initial_moment() const { return second_moment(states.front()); }

Trajectory march(const ParticleState& initial, const GasLaw& law, double tau,
                 double t_end, const SolverOptions& opts) {
    if (!(tau > 0.0) || !(t_end > 0.0) || tau > t_end * (1.0 + 1e-12))
        throw std::invalid_argument("march: need 0 < tau <= t_end");
    validate_state(initial);

    const std::size_t nsteps = (std::size_t)std::ceil(t_end / tau - 1e-9);

    Trajectory traj;
    traj.tau = tau;
    traj.t_end = nsteps * tau;
    traj.law = law;
    traj.options = opts;
    traj.states.reserve(nsteps + 1);
    traj.steps.reserve(nsteps);
    traj.states.push_back(initial);

    for (std::size_t k = 0; k < nsteps; ++k) {
        const ParticleState& cur = traj.states.back();
        StepSolution sol;
        try {
            sol = solve_step(make_step_problem(cur, law, tau), opts);
        } catch (const solver_error& err) {
            throw solver_error("march: step " + std::to_string(k) + ": " + err.what(),
                               err.last_iterate, err.residual);
        }
        ParticleState next = make_particle_state(sol.X, cur.masses, sol.W,
                                                 cur.time + tau);
        traj.steps.push_back(std::move(sol));
        traj.states.push_back(std::move(next));
    }
    return traj;
}

InterpolantSample sample(const Trajectory& traj, double time, InterpolantKind kind) {
    if (time < -1e-12 || time > traj.t_end * (1.0 + 1e-12))
        throw std::domain_error("sample: time outside [0, t_end]");
    time = std::min(std::max(time, 0.0), traj.t_end);

    std::size_t k = (std::size_t)std::floor(time / traj.tau);
    double rem = time - k * traj.tau;
    if (rem > traj.tau * (1.0 - 1e-12)) {  // snap times that round just below a node
        ++k;
        rem = 0.0;
    }

    InterpolantSample out;
    out.time = time;
    out.kind = kind;
    if (kind == InterpolantKind::PiecewiseConstant) {
        // State at floor(time/tau) * tau; the final node owns t_end.
        out.state = traj.states[std::min(k, traj.step_count())];
        out.state.time = time;
        return out;
    }

    if (k >= traj.step_count()) {  // t_end belongs to the last step at theta = 1
        k = traj.step_count() - 1;
        rem = traj.tau;
    }
    const double theta = std::min(std::max(rem / traj.tau, 0.0), 1.0);
    const ParticleState& base = traj.states[k];
    const StepSolution& sol = traj.steps[k];
    std::vector<double> pos(base.size()), vel(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
        pos[i] = (1.0 - theta) * base.positions[i] + theta * sol.X[i];
        vel[i] = (1.0 - theta) * base.velocities[i] + theta * sol.W[i];
    }
    out.state = make_particle_state(std::move(pos), base.masses, std::move(vel), time);
    return out;
}

}  // namespace gasdyn
