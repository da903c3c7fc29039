#include "gasdyn/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gasdyn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Gap energy g_c(s) = K_c s^(1-gamma) with K_c = U_c dx_c^gamma.
struct GapEnergy {
    std::vector<double> k;  // K_c, zero for pressureless cells
    double gamma = 2.0;

    double value(std::size_t c, double s) const {
        if (k[c] == 0.0) return 0.0;
        return k[c] * std::pow(s, 1.0 - gamma);
    }
    double deriv(std::size_t c, double s) const {
        if (k[c] == 0.0) return 0.0;
        return (1.0 - gamma) * k[c] * std::pow(s, -gamma);
    }
    double second(std::size_t c, double s) const {
        if (k[c] == 0.0) return 0.0;
        return gamma * (gamma - 1.0) * k[c] * std::pow(s, -gamma - 1.0);
    }
};

GapEnergy make_gap_energy(const StepProblem& problem) {
    GapEnergy ge;
    ge.gamma = problem.law.gamma;
    const std::vector<double> weights = gap_energy_weights(problem.state, problem.law);
    const auto& x = problem.state.positions;
    ge.k.resize(weights.size());
    for (std::size_t c = 0; c < weights.size(); ++c)
        ge.k[c] = weights[c] * std::pow(x[c + 1] - x[c], ge.gamma);
    return ge;
}

// Solves the symmetric positive definite tridiagonal system in place.
void thomas_solve(std::vector<double>& diag, std::vector<double>& off,
                  std::vector<double>& rhs) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double w = off[i - 1] / diag[i - 1];
        diag[i] -= w * off[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;)
        rhs[i] = (rhs[i] - off[i] * rhs[i + 1]) / diag[i];
}

struct Workspace {
    const StepProblem* problem = nullptr;
    GapEnergy ge;
    std::vector<double> free_target;  // f_i = x_i + tau u_i
    double quad_coeff = 0.0;          // 3 / (2 tau^2), gradient scale
    double eps = 0.0;                 // absolute gap floor

    // Neumaier-compensated sum: the line search compares objective values
    // that differ by far less than n ulps of naive accumulation.
    double objective(const std::vector<double>& X) const {
        const auto& m = problem->state.masses;
        double sum = 0.0, comp = 0.0;
        auto add = [&](double v) {
            const double t = sum + v;
            comp += (std::abs(sum) >= std::abs(v)) ? (sum - t) + v : (v - t) + sum;
            sum = t;
        };
        for (std::size_t i = 0; i < X.size(); ++i) {
            const double d = X[i] - free_target[i];
            add(0.5 * quad_coeff * m[i] * d * d);
        }
        for (std::size_t c = 0; c + 1 < X.size(); ++c) {
            const double gap = X[c + 1] - X[c];
            if (gap < 0.0) return kInf;
            if (ge.k[c] > 0.0) {
                if (gap <= 0.0) return kInf;
                add(ge.value(c, gap));
            }
        }
        return sum + comp;
    }

    void gradient(const std::vector<double>& X, std::vector<double>& g) const {
        const auto& m = problem->state.masses;
        const std::size_t n = X.size();
        g.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            g[i] = quad_coeff * m[i] * (X[i] - free_target[i]);
        for (std::size_t c = 0; c + 1 < n; ++c) {
            const double gp = ge.deriv(c, X[c + 1] - X[c]);
            g[c] -= gp;
            g[c + 1] += gp;
        }
    }
};

// Consecutive active gaps glue particles into rigid blocks; the reduced
// problem is tridiagonal over block leaders.
struct Blocks {
    std::vector<std::size_t> start;  // first particle of each block
    std::vector<std::size_t> end;    // one past last particle
    std::vector<std::size_t> block_of;
};

Blocks build_blocks(const std::vector<bool>& active, std::size_t n) {
    Blocks b;
    b.block_of.resize(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && active[j]) ++j;
        b.start.push_back(i);
        b.end.push_back(j + 1);
        for (std::size_t k = i; k <= j; ++k) b.block_of[k] = b.start.size() - 1;
        i = j + 1;
    }
    return b;
}

}  // namespace

StepProblem make_step_problem(ParticleState state, GasLaw law, double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("step problem: tau must be positive");
    validate_state(state);
    return StepProblem{std::move(state), law, tau};
}

std::vector<double> gap_energy_weights(const ParticleState& state, const GasLaw& law) {
    const std::size_t n = state.size();
    std::vector<double> weights(n - 1, 0.0);
    if (law.pressureless()) return weights;
    const auto& x = state.positions;
    const auto& m = state.masses;
    for (std::size_t c = 0; c + 1 < n; ++c) {
        const double gap = x[c + 1] - x[c];
        double w = law.internal_energy_density(0.5 * (m[c] + m[c + 1]) / gap);
        if (c == 0) w += law.internal_energy_density(0.5 * m[0] / gap);
        if (c == n - 2) w += law.internal_energy_density(0.5 * m[n - 1] / gap);
        weights[c] = w;
    }
    return weights;
}

double step_objective(const StepProblem& problem, const std::vector<double>& X) {
    if (X.size() != problem.state.size())
        throw std::invalid_argument("step_objective: candidate size mismatch");
    Workspace ws;
    ws.problem = &problem;
    ws.ge = make_gap_energy(problem);
    ws.quad_coeff = 1.5 / (problem.tau * problem.tau);
    ws.free_target.resize(X.size());
    for (std::size_t i = 0; i < X.size(); ++i)
        ws.free_target[i] = problem.state.positions[i] + problem.tau * problem.state.velocities[i];
    return ws.objective(X);
}

std::vector<double> step_gradient(const StepProblem& problem, const std::vector<double>& X) {
    if (X.size() != problem.state.size())
        throw std::invalid_argument("step_gradient: candidate size mismatch");
    for (std::size_t c = 0; c + 1 < X.size(); ++c)
        if (!(X[c + 1] - X[c] > 0.0))
            throw std::domain_error("step_gradient: candidate must be strictly increasing");
    Workspace ws;
    ws.problem = &problem;
    ws.ge = make_gap_energy(problem);
    ws.quad_coeff = 1.5 / (problem.tau * problem.tau);
    ws.free_target.resize(X.size());
    for (std::size_t i = 0; i < X.size(); ++i)
        ws.free_target[i] = problem.state.positions[i] + problem.tau * problem.state.velocities[i];
    std::vector<double> g;
    ws.gradient(X, g);
    return g;
}

double bregman_divergence(const GasLaw& law, double gap_ratio) {
    if (!(gap_ratio > 0.0)) throw std::domain_error("bregman_divergence: gap ratio must be positive");
    const double g = law.gamma;
    return std::pow(gap_ratio, 1.0 - g) - 1.0 + (g - 1.0) * (gap_ratio - 1.0);
}

TestFunctionFamily default_test_family(double lo, double hi, int levels) {
    TestFunctionFamily family;
    family.push_back(TestFunction{
        "identity", [](double x) { return x; }, [](double) { return 1.0; }, 1.0, {}});
    const double width = hi - lo;
    if (!(width > 0.0)) return family;
    for (int level = 0; level <= levels; ++level) {
        const int segments = 1 << level;
        const double radius = width / segments;
        for (int k = 0; k <= segments; ++k) {
            const double center = lo + k * radius;
            auto value = [center, radius](double x) {
                const double r = std::abs(x - center) / radius;
                if (r >= 1.0) return 0.0;
                return 1.0 - 3.0 * r * r + 2.0 * r * r * r;
            };
            auto deriv = [center, radius](double x) {
                const double d = (x - center) / radius;
                const double r = std::abs(d);
                if (r >= 1.0) return 0.0;
                return (-6.0 * r + 6.0 * r * r) * (d < 0.0 ? -1.0 : 1.0) / radius;
            };
            family.push_back(TestFunction{
                "bump_l" + std::to_string(level) + "_" + std::to_string(k),
                value, deriv, 1.0 + 1.5 / radius,
                {center - radius, center, center + radius}});
        }
    }
    return family;
}

double el_residual(const StepProblem& problem, const StepSolution& sol,
                   const TestFunctionFamily& tests) {
    const auto& x = problem.state.positions;
    const auto& u = problem.state.velocities;
    const auto& m = problem.state.masses;
    const std::size_t n = x.size();
    double worst = 0.0;
    for (const TestFunction& test : tests) {
        double lhs = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            lhs += test.value(x[i]) * m[i] * (sol.W[i] - u[i]) / problem.tau;
        double rhs = 0.0;
        for (std::size_t c = 0; c + 1 < n; ++c) {
            const double dzeta = test.value(x[c + 1]) - test.value(x[c]);
            rhs += dzeta * (sol.gap_pressures[c] + sol.multipliers[c]);
        }
        worst = std::max(worst, std::abs(lhs - rhs) / test.norm);
    }
    return worst;
}

StepSolution solve_step(const StepProblem& problem, const SolverOptions& opts) {
    validate_state(problem.state);
    if (!(problem.tau > 0.0)) throw std::invalid_argument("solve_step: tau must be positive");
    const std::size_t n = problem.state.size();
    const auto& x = problem.state.positions;
    const auto& u = problem.state.velocities;
    const auto& m = problem.state.masses;
    const double tau = problem.tau;

    Workspace ws;
    ws.problem = &problem;
    ws.ge = make_gap_energy(problem);
    ws.quad_coeff = 1.5 / (tau * tau);
    ws.eps = opts.degeneracy_eps * problem.state.hull_width();
    ws.free_target.resize(n);
    for (std::size_t i = 0; i < n; ++i) ws.free_target[i] = x[i] + tau * u[i];

    // Feasible start: current positions when pressure is active (finite
    // barrier), otherwise the free targets pushed up to the gap floor.
    std::vector<double> X;
    if (!opts.initial_guess.empty()) {
        if (opts.initial_guess.size() != n)
            throw std::invalid_argument("solve_step: initial guess size mismatch");
        X = opts.initial_guess;
        for (std::size_t i = 1; i < n; ++i) X[i] = std::max(X[i], X[i - 1] + ws.eps);
    } else if (!problem.law.pressureless()) {
        X = x;
    } else {
        X = ws.free_target;
        for (std::size_t i = 1; i < n; ++i) X[i] = std::max(X[i], X[i - 1] + ws.eps);
    }

    std::vector<double> grad(n), mu(n > 0 ? n - 1 : 0, 0.0);
    std::vector<bool> active(n > 0 ? n - 1 : 0, false);
    auto mu_tol_for = [](const std::vector<double>& g) {
        double l1 = 0.0;
        for (double v : g) l1 += std::abs(v);
        return 1e-11 * (1.0 + l1);
    };
    auto gap_slack = [&](std::size_t c) {
        constexpr double ulp = 2.220446049250313e-16;
        return 8.0 * ulp * (std::abs(X[c]) + std::abs(X[c + 1]) + 1.0);
    };
    // Gaps in the working set are held at exactly eps; re-chain a block so
    // the invariant survives merges and floating-point projection noise.
    auto snap_active_runs = [&]() {
        for (std::size_t c = 0; c + 1 < n; ++c)
            if (active[c]) X[c + 1] = X[c] + ws.eps;
    };
    // Multipliers as prefix sums of the gradient within blocks; the residual
    // collects the per-block gradient sums (what the weak form pairs with).
    struct KktInfo {
        double res_l1 = 0.0;
        double worst_mu = 0.0;
        std::size_t worst_c = 0;
    };
    auto kkt_info = [&](const Blocks& blocks) {
        KktInfo info;
        std::fill(mu.begin(), mu.end(), 0.0);
        for (std::size_t b = 0; b < blocks.start.size(); ++b) {
            double acc = 0.0, blocksum = 0.0;
            for (std::size_t i = blocks.start[b]; i < blocks.end[b]; ++i) blocksum += grad[i];
            for (std::size_t i = blocks.start[b]; i + 1 < blocks.end[b]; ++i) {
                acc -= grad[i];
                mu[i] = acc;
                if (acc < info.worst_mu) {
                    info.worst_mu = acc;
                    info.worst_c = i;
                }
            }
            info.res_l1 += std::abs(blocksum);
        }
        return info;
    };

    // Initial working set from the (projected) start geometry.
    for (std::size_t c = 0; c + 1 < n; ++c)
        active[c] = (X[c + 1] - X[c]) <= ws.eps * (1.0 + 1e-9) + gap_slack(c);
    snap_active_runs();
    double fval = ws.objective(X);

    // At a working-set stationary point: finish, or release the most
    // negative multiplier. Returns true when optimal.
    auto stationarity = [&]() {
        ws.gradient(X, grad);
        const Blocks blocks = build_blocks(active, n);
        const double hull = std::max(1.0, std::max(std::abs(X.front()), std::abs(X.back())));
        const KktInfo info = kkt_info(blocks);
        if (info.worst_mu >= -mu_tol_for(grad)) {
            if (info.res_l1 * hull <= 0.5 * opts.el_tol) return true;
            throw solver_error("solve_step: stalled with nonzero KKT residual", X,
                               info.res_l1);
        }
        // Drop the constraint; the next reduced Newton direction moves off
        // the (still eps-sized) gap, since its multiplier was negative.
        active[info.worst_c] = false;
        return false;
    };

    int iter = 0;
    bool converged = false;
    for (; iter < opts.max_iters; ++iter) {
        Blocks blocks = build_blocks(active, n);
        const std::size_t nb = blocks.start.size();

        ws.gradient(X, grad);
        const double hull = std::max(1.0, std::max(std::abs(X.front()), std::abs(X.back())));

        // Reduced gradient and tridiagonal Hessian over blocks.
        std::vector<double> rg(nb, 0.0), diag(nb, 0.0), off(nb > 0 ? nb - 1 : 0, 0.0);
        for (std::size_t b = 0; b < nb; ++b) {
            for (std::size_t i = blocks.start[b]; i < blocks.end[b]; ++i) {
                rg[b] += grad[i];
                diag[b] += ws.quad_coeff * m[i];
            }
        }
        for (std::size_t b = 0; b + 1 < nb; ++b) {
            const std::size_t c = blocks.end[b] - 1;  // inactive gap between blocks
            const double h = ws.ge.second(c, X[c + 1] - X[c]);
            diag[b] += h;
            diag[b + 1] += h;
            off[b] = -h;
        }

        std::vector<double> step(nb);
        for (std::size_t b = 0; b < nb; ++b) step[b] = -rg[b];
        {
            std::vector<double> d2(diag), o2(off);
            thomas_solve(d2, o2, step);
        }

        double step_norm = 0.0, grad_dot_step = 0.0;
        for (std::size_t b = 0; b < nb; ++b) {
            step_norm = std::max(step_norm, std::abs(step[b]));
            grad_dot_step += rg[b] * step[b];
        }

        // Stationary on the working set: either optimal, or release the most
        // negative multiplier and continue.
        if (step_norm <= 1e-13 * (1.0 + problem.state.hull_width())) {
            if (stationarity()) {
                converged = true;
                break;
            }
            continue;
        }

        // Longest feasible step along the block direction; the binding gaps
        // join the working set if the move is capped or numerically stuck.
        double alpha_max = 1.0;
        std::vector<double> cap_ratio(nb > 0 ? nb - 1 : 0,
                                      std::numeric_limits<double>::infinity());
        for (std::size_t b = 0; b + 1 < nb; ++b) {
            const std::size_t c = blocks.end[b] - 1;
            const double dgap = step[b + 1] - step[b];
            if (dgap < 0.0) {
                const double room = std::max((X[c + 1] - X[c]) - ws.eps, 0.0);
                cap_ratio[b] = room / (-dgap);
                alpha_max = std::min(alpha_max, cap_ratio[b]);
            }
        }

        // Armijo backtracking from the feasible cap.
        double alpha = alpha_max;
        std::vector<double> trial(n);
        double ftrial = kInf;
        for (int ls = 0; ls < 80 && alpha > 0.0; ++ls) {
            for (std::size_t i = 0; i < n; ++i)
                trial[i] = X[i] + alpha * step[blocks.block_of[i]];
            ftrial = ws.objective(trial);
            if (ftrial <= fval + 1e-4 * alpha * grad_dot_step) break;
            alpha *= 0.5;
        }
        bool changed = false;
        bool improved = ftrial < kInf && ftrial < fval;
        if (!improved) {
            // Objective at the floating-point floor: accept the (capped) full
            // Newton step if it still shrinks the gradient, so the iteration
            // can polish past ulp(f). Tolerate a few ulp of objective noise.
            for (std::size_t i = 0; i < n; ++i)
                trial[i] = X[i] + alpha_max * step[blocks.block_of[i]];
            ftrial = ws.objective(trial);
            if (ftrial <= fval + 1e-14 * (1.0 + std::abs(fval))) {
                std::vector<double> gtrial;
                ws.gradient(trial, gtrial);
                double l1_old = 0.0, l1_new = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    l1_old += std::abs(grad[i]);
                    l1_new += std::abs(gtrial[i]);
                }
                improved = l1_new < l1_old;
            }
        }
        if (improved) {
            X.swap(trial);
            fval = std::min(fval, ftrial);
            changed = true;
        }
        if (alpha_max < 1.0 && (!improved || alpha == alpha_max)) {
            for (std::size_t b = 0; b + 1 < nb; ++b) {
                const std::size_t c = blocks.end[b] - 1;
                if (!active[c] && cap_ratio[b] <= alpha_max * (1.0 + 1e-9)) {
                    active[c] = true;
                    changed = true;
                }
            }
        }
        snap_active_runs();
        if (!changed) {
            // Numerically stationary even though the Newton step is sizable
            // (floating-point-limited line search): resolve via multipliers.
            if (stationarity()) {
                converged = true;
                break;
            }
            continue;
        }

        // Converged when the KKT residual is small in the dual norm matched
        // to the Euler-Lagrange tests (l1, weighted by the hull radius).
        ws.gradient(X, grad);
        Blocks blocks2 = build_blocks(active, n);
        const KktInfo info = kkt_info(blocks2);
        if (info.worst_mu >= -mu_tol_for(grad) && info.res_l1 * hull <= 0.5 * opts.el_tol) {
            converged = true;
            ++iter;
            break;
        }
    }

    if (!converged) {
        ws.gradient(X, grad);
        double res = 0.0;
        for (double g : grad) res += std::abs(g);
        throw solver_error("solve_step: no convergence within max_iters", X, res);
    }

    StepSolution sol;
    sol.X = X;
    sol.iterations = iter;
    sol.V.resize(n);
    sol.W.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        sol.V[i] = (X[i] - x[i]) / tau;
        sol.W[i] = 1.5 * sol.V[i] - 0.5 * u[i];
    }
    sol.objective = ws.objective(X);
    sol.multipliers = mu;  // prefix-sum form; tiny negatives stay (exact weak form)
    sol.gap_pressures.resize(n - 1);
    for (std::size_t c = 0; c + 1 < n; ++c)
        sol.gap_pressures[c] = -ws.ge.deriv(c, X[c + 1] - X[c]);

    DissipationLedger& led = sol.dissipation;
    led.energy_before = total_energy(problem.state, problem.law).total;
    ParticleState next = make_particle_state(X, m, sol.W, problem.state.time + tau);
    led.energy_after = total_energy(next, problem.law).total;
    for (std::size_t i = 0; i < n; ++i) {
        const double dv = sol.W[i] - u[i];
        led.velocity_term += m[i] * dv * dv / 6.0;
    }
    for (std::size_t c = 0; c + 1 < n; ++c) {
        const double dx = x[c + 1] - x[c];
        const double dX = X[c + 1] - X[c];
        const double breg = ws.ge.value(c, dx) - ws.ge.value(c, dX)
                            - ws.ge.deriv(c, dX) * (dx - dX);
        led.bregman_term += std::max(breg, 0.0);
        led.multiplier_term += sol.multipliers[c] * std::max(dx - dX, 0.0);
    }
    led.margin = led.energy_before - led.energy_after - led.velocity_term
                 - led.bregman_term - led.multiplier_term;

    const int levels = std::min(8, std::max(2, (int)std::ceil(std::log2((double)n))));
    sol.el_residual = el_residual(problem, sol,
                                  default_test_family(x.front(), x.back(), levels));
    return sol;
}

}  // namespace gasdyn
