#pragma once

#include <string>
#include <vector>

#include "gasdyn/diagnostics.hpp"

// Pointwise quasi-order on sampled acceleration (or energy) profiles and
// minimal-element extraction over finite ensembles. The order is reflexive
// and transitive but deliberately not antisymmetric: distinct runs with equal
// profiles are Equivalent, not identical.

namespace gasdyn {

struct AccelerationProfile {
    std::vector<double> times;   // shared grid
    std::vector<double> values;  // nonnegative
    std::string run_id;
};

enum class Comparison { LessEq, GreaterEq, Equivalent, Incomparable };

// Default tolerance: 1e-9 * (1 + max profile value over both arguments).
double default_compare_tol(const AccelerationProfile& p, const AccelerationProfile& q);

Comparison compare(const AccelerationProfile& p, const AccelerationProfile& q, double tol);

enum class SelectionObjective { Acceleration, Energy };

struct EnsembleMember {
    std::string run_id;
    AccelerationProfile acceleration;
    AccelerationProfile energy;
};

struct Ensemble {
    std::vector<EnsembleMember> members;
    std::string initial_hash;  // all members share it

    const AccelerationProfile& profile(std::size_t i, SelectionObjective obj) const {
        return obj == SelectionObjective::Acceleration ? members[i].acceleration
                                                       : members[i].energy;
    }
};

// Members not strictly Pareto-dominated by any other member (q <= m
// everywhere and q < m beyond tol somewhere). Nonempty for finite ensembles.
std::vector<std::string> minimal_elements(const Ensemble& ens, SelectionObjective obj,
                                          double tol);

// Greedy maximal totally ordered subset, deterministic by run_id order.
std::vector<std::string> maximal_chain(const Ensemble& ens, SelectionObjective obj,
                                       double tol);

// Resample a profile onto a target grid by linear interpolation (constant
// extrapolation outside the source range).
AccelerationProfile resample(const AccelerationProfile& p,
                             const std::vector<double>& grid);

}  // namespace gasdyn
