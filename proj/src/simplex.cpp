#include "gasdyn/simplex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gasdyn::lp {

namespace {

constexpr double kEps = 1e-11;

// Dense tableau with explicit basis bookkeeping.
struct Tableau {
    std::size_t rows = 0;
    std::size_t cols = 0;  // structural + slack + artificial columns
    std::vector<double> a;  // rows x cols
    std::vector<double> b;
    std::vector<double> cost;       // current phase objective (minimize)
    std::vector<std::size_t> basis; // basic column per row

    double& at(std::size_t r, std::size_t c) { return a[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return a[r * cols + c]; }
};

void pivot(Tableau& t, std::size_t pr, std::size_t pc) {
    const double piv = t.at(pr, pc);
    const double inv = 1.0 / piv;
    for (std::size_t c = 0; c < t.cols; ++c) t.at(pr, c) *= inv;
    t.b[pr] *= inv;
    for (std::size_t r = 0; r < t.rows; ++r) {
        if (r == pr) continue;
        const double f = t.at(r, pc);
        if (f == 0.0) continue;
        for (std::size_t c = 0; c < t.cols; ++c) t.at(r, c) -= f * t.at(pr, c);
        t.b[r] -= f * t.b[pr];
    }
    t.basis[pr] = pc;
}

// Reduced costs for the current basis: z_j = c_j - c_B . B^{-1} A_j.
std::vector<double> reduced_costs(const Tableau& t) {
    std::vector<double> red(t.cost);
    for (std::size_t r = 0; r < t.rows; ++r) {
        const double cb = t.cost[t.basis[r]];
        if (cb == 0.0) continue;
        for (std::size_t c = 0; c < t.cols; ++c) red[c] -= cb * t.at(r, c);
    }
    return red;
}

// Minimize t.cost over the tableau. Dantzig rule with a Bland fallback once
// the iteration count suggests stalling.
Status run_simplex(Tableau& t, const std::vector<bool>& allowed) {
    const std::size_t max_iters = 50 * (t.rows + t.cols) + 1000;
    const std::size_t bland_after = 10 * (t.rows + t.cols) + 200;
    for (std::size_t iter = 0; iter < max_iters; ++iter) {
        const bool bland = iter >= bland_after;
        std::vector<double> red = reduced_costs(t);

        std::size_t pc = t.cols;
        double best = -kEps;
        for (std::size_t c = 0; c < t.cols; ++c) {
            if (!allowed[c]) continue;
            if (red[c] < best) {
                best = red[c];
                pc = c;
                if (bland) break;
            }
        }
        if (pc == t.cols) return Status::Optimal;

        // Ratio test, Bland tie-break on basis index.
        std::size_t pr = t.rows;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < t.rows; ++r) {
            const double arc = t.at(r, pc);
            if (arc > kEps) {
                const double ratio = t.b[r] / arc;
                if (ratio < best_ratio - kEps ||
                    (ratio < best_ratio + kEps && (pr == t.rows || t.basis[r] < t.basis[pr]))) {
                    best_ratio = ratio;
                    pr = r;
                }
            }
        }
        if (pr == t.rows) return Status::Unbounded;
        pivot(t, pr, pc);
    }
    return Status::IterationLimit;
}

}  // namespace

std::size_t Problem::add_var(double obj_coeff, bool is_free) {
    objective.push_back(obj_coeff);
    free_var.push_back(is_free);
    return nvars++;
}

void Problem::add_row(std::vector<double> coeffs, Rel rel, double rhs) {
    if (coeffs.size() != nvars) throw std::invalid_argument("lp row size mismatch");
    rows.push_back(Row{std::move(coeffs), rel, rhs});
}

Solution solve(const Problem& problem) {
    if (problem.objective.size() != problem.nvars ||
        (!problem.free_var.empty() && problem.free_var.size() != problem.nvars))
        throw std::invalid_argument("lp problem is inconsistent");

    // Split free variables into positive and negative parts.
    std::vector<std::size_t> pos_col(problem.nvars), neg_col(problem.nvars, SIZE_MAX);
    std::size_t nstruct = 0;
    for (std::size_t j = 0; j < problem.nvars; ++j) {
        pos_col[j] = nstruct++;
        const bool is_free = !problem.free_var.empty() && problem.free_var[j];
        if (is_free) neg_col[j] = nstruct++;
    }

    const std::size_t m = problem.rows.size();
    std::size_t nslack = 0;
    for (const Row& row : problem.rows)
        if (row.rel != Rel::EQ) ++nslack;

    Tableau t;
    t.rows = m;
    t.cols = nstruct + nslack + m;  // artificials allocated per row, used as needed
    t.a.assign(t.rows * t.cols, 0.0);
    t.b.assign(m, 0.0);
    t.basis.assign(m, 0);
    std::vector<bool> allowed(t.cols, true);
    std::vector<bool> artificial(t.cols, false);

    std::size_t slack_base = nstruct;
    std::size_t art_base = nstruct + nslack;
    std::size_t slack_idx = 0;

    for (std::size_t r = 0; r < m; ++r) {
        const Row& row = problem.rows[r];
        double sign = 1.0;
        Rel rel = row.rel;
        if (row.rhs < 0.0) {
            sign = -1.0;
            if (rel == Rel::LE) rel = Rel::GE;
            else if (rel == Rel::GE) rel = Rel::LE;
        }
        for (std::size_t j = 0; j < problem.nvars; ++j) {
            const double v = sign * row.coeffs[j];
            if (v == 0.0) continue;
            t.at(r, pos_col[j]) += v;
            if (neg_col[j] != SIZE_MAX) t.at(r, neg_col[j]) -= v;
        }
        t.b[r] = sign * row.rhs;

        if (rel == Rel::LE) {
            const std::size_t sc = slack_base + slack_idx++;
            t.at(r, sc) = 1.0;
            t.basis[r] = sc;
        } else {
            if (rel == Rel::GE) {
                const std::size_t sc = slack_base + slack_idx++;
                t.at(r, sc) = -1.0;
            }
            const std::size_t ac = art_base + r;
            t.at(r, ac) = 1.0;
            t.basis[r] = ac;
            artificial[ac] = true;
        }
    }

    // Phase 1: drive artificials to zero.
    bool need_phase1 = false;
    t.cost.assign(t.cols, 0.0);
    for (std::size_t c = 0; c < t.cols; ++c) {
        if (artificial[c]) {
            t.cost[c] = 1.0;
            need_phase1 = true;
        }
    }
    if (need_phase1) {
        Status s1 = run_simplex(t, allowed);
        if (s1 == Status::IterationLimit) return Solution{s1, 0.0, {}};
        double phase1 = 0.0;
        for (std::size_t r = 0; r < m; ++r)
            if (artificial[t.basis[r]]) phase1 += t.b[r];
        if (phase1 > 1e-8) return Solution{Status::Infeasible, 0.0, {}};
        // Pivot any degenerate artificial out of the basis if possible.
        for (std::size_t r = 0; r < m; ++r) {
            if (!artificial[t.basis[r]]) continue;
            for (std::size_t c = 0; c < art_base; ++c) {
                if (std::abs(t.at(r, c)) > kEps) {
                    pivot(t, r, c);
                    break;
                }
            }
        }
        for (std::size_t c = 0; c < t.cols; ++c)
            if (artificial[c]) allowed[c] = false;
    }

    // Phase 2: minimize -objective (i.e. maximize the objective).
    t.cost.assign(t.cols, 0.0);
    for (std::size_t j = 0; j < problem.nvars; ++j) {
        t.cost[pos_col[j]] = -problem.objective[j];
        if (neg_col[j] != SIZE_MAX) t.cost[neg_col[j]] = problem.objective[j];
    }
    Status s2 = run_simplex(t, allowed);
    if (s2 != Status::Optimal) return Solution{s2, 0.0, {}};

    std::vector<double> dense(t.cols, 0.0);
    for (std::size_t r = 0; r < m; ++r) dense[t.basis[r]] = t.b[r];

    Solution out;
    out.status = Status::Optimal;
    out.x.assign(problem.nvars, 0.0);
    for (std::size_t j = 0; j < problem.nvars; ++j) {
        out.x[j] = dense[pos_col[j]];
        if (neg_col[j] != SIZE_MAX) out.x[j] -= dense[neg_col[j]];
        out.value += problem.objective[j] * out.x[j];
    }
    return out;
}

}  // namespace gasdyn::lp
