#pragma once

#include <cstddef>
#include <vector>

// Small dense two-phase simplex solver. The linear programs in this project
// are tiny (metric duals, coupling oracles), so a deterministic tableau
// method is preferred over an external solver dependency.

namespace gasdyn::lp {

enum class Rel { LE, GE, EQ };

struct Row {
    std::vector<double> coeffs;  // dense, length = nvars
    Rel rel = Rel::LE;
    double rhs = 0.0;
};

struct Problem {
    std::size_t nvars = 0;
    std::vector<double> objective;  // maximize objective . x
    std::vector<Row> rows;
    std::vector<bool> free_var;  // default: x >= 0; true marks a free variable

    std::size_t add_var(double obj_coeff, bool is_free = false);
    void add_row(std::vector<double> coeffs, Rel rel, double rhs);
};

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

struct Solution {
    Status status = Status::IterationLimit;
    double value = 0.0;
    std::vector<double> x;
};

Solution solve(const Problem& problem);

}  // namespace gasdyn::lp
