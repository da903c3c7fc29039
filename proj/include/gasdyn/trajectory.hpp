#pragma once

#include <vector>

#include "gasdyn/core.hpp"
#include "gasdyn/stepper.hpp"

// Uniform-step time marching. Each step feeds the pushforward state of the
// previous minimization into the next one. Two time interpolants are kept:
// piecewise constant (the state at the left node) and piecewise linear
// (affine transport and velocity between nodes); the linear one never
// exceeds the node energy within a step.

namespace gasdyn {

enum class InterpolantKind { PiecewiseConstant, PiecewiseLinear };

struct Trajectory {
    double tau = 0.0;
    double t_end = 0.0;  // steps * tau, covering the requested horizon
    GasLaw law;
    std::vector<ParticleState> states;      // size steps + 1
    std::vector<StepSolution> steps;        // size steps
    SolverOptions options;

    std::size_t step_count() const { return steps.size(); }
    double initial_energy() const;
    double initial_moment() const;
};

Trajectory march(const ParticleState& initial, const GasLaw& law, double tau,
                 double t_end, const SolverOptions& opts = {});

struct InterpolantSample {
    double time = 0.0;
    InterpolantKind kind = InterpolantKind::PiecewiseLinear;
    ParticleState state;
};

InterpolantSample sample(const Trajectory& traj, double time, InterpolantKind kind);

}  // namespace gasdyn
