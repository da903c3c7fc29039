#include "gasdyn/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>

#include "json.hpp"

#include "gasdyn/io.hpp"
#include "gasdyn/metrics.hpp"

namespace gasdyn {

namespace {

// Initial density with an analytic (unnormalized) CDF on its support.
struct InitialMeasure {
    double lo = 0.0, hi = 0.0;
    std::function<double(double)> density;   // unnormalized
    std::function<double(double)> cdf_fn;    // primitive of density, cdf(lo) = 0
    std::function<double(double)> velocity;
    double total = 0.0;

    double cdf(double x) const {
        if (x <= lo) return 0.0;
        if (x >= hi) return total;
        return cdf_fn(x);
    }
    double quantile(double q) const {  // bisection on the analytic CDF
        double a = lo, b = hi;
        for (int it = 0; it < 100; ++it) {
            const double mid = 0.5 * (a + b);
            if (cdf(mid) < q) a = mid;
            else b = mid;
        }
        return 0.5 * (a + b);
    }
};

double erf_cdf(double x, double c, double s) {
    return 0.5 * (1.0 + std::erf((x - c) / (s * std::sqrt(2.0))));
}

InitialMeasure make_initial_measure(const RunConfig& cfg) {
    InitialMeasure m;
    switch (cfg.init_kind) {
        case InitKind::Riemann: {
            m.lo = cfg.domain_lo;
            m.hi = cfg.domain_hi;
            const double lo = m.lo;
            const double xi = cfg.interface_pos, rl = cfg.rho_left, rr = cfg.rho_right;
            m.density = [xi, rl, rr](double x) { return x < xi ? rl : rr; };
            m.cdf_fn = [lo, xi, rl, rr](double x) {
                return x <= xi ? rl * (x - lo) : rl * (xi - lo) + rr * (x - xi);
            };
            const double ul = cfg.u_left, ur = cfg.u_right;
            m.velocity = [xi, ul, ur](double x) { return x < xi ? ul : ur; };
            m.total = rl * (xi - m.lo) + rr * (m.hi - xi);
            return m;
        }
        case InitKind::GaussianBlob: {
            m.lo = cfg.center - cfg.halfwidth;
            m.hi = cfg.center + cfg.halfwidth;
            const double lo = m.lo;
            const double c = cfg.center, s = cfg.sigma;
            const double scale = s * std::sqrt(2.0 * M_PI);
            m.density = [c, s](double x) {
                return std::exp(-0.5 * (x - c) * (x - c) / (s * s));
            };
            m.cdf_fn = [lo, c, s, scale](double x) {
                return scale * (erf_cdf(x, c, s) - erf_cdf(lo, c, s));
            };
            const double u0 = cfg.u0, us = cfg.u_slope;
            m.velocity = [c, u0, us](double x) { return u0 + us * (x - c); };
            m.total = m.cdf_fn(m.hi);
            return m;
        }
        case InitKind::TwoBlob: {
            const double lo1 = cfg.center - cfg.halfwidth, hi1 = cfg.center + cfg.halfwidth;
            const double lo2 = cfg.center2 - cfg.halfwidth, hi2 = cfg.center2 + cfg.halfwidth;
            m.lo = std::min(lo1, lo2);
            m.hi = std::max(hi1, hi2);
            const double c1 = cfg.center, s1 = cfg.sigma;
            const double c2 = cfg.center2, s2 = cfg.sigma2;
            const double w1 = cfg.mass_fraction, w2 = 1.0 - cfg.mass_fraction;
            const double n1 = s1 * std::sqrt(2.0 * M_PI) * (erf_cdf(hi1, c1, s1) - erf_cdf(lo1, c1, s1));
            const double n2 = s2 * std::sqrt(2.0 * M_PI) * (erf_cdf(hi2, c2, s2) - erf_cdf(lo2, c2, s2));
            m.density = [=](double x) {
                double d = 0.0;
                if (x >= lo1 && x <= hi1)
                    d += w1 / n1 * std::exp(-0.5 * (x - c1) * (x - c1) / (s1 * s1));
                if (x >= lo2 && x <= hi2)
                    d += w2 / n2 * std::exp(-0.5 * (x - c2) * (x - c2) / (s2 * s2));
                return d;
            };
            m.cdf_fn = [=](double x) {
                const double f1 = s1 * std::sqrt(2.0 * M_PI) *
                                  (erf_cdf(std::clamp(x, lo1, hi1), c1, s1) - erf_cdf(lo1, c1, s1));
                const double f2 = s2 * std::sqrt(2.0 * M_PI) *
                                  (erf_cdf(std::clamp(x, lo2, hi2), c2, s2) - erf_cdf(lo2, c2, s2));
                return w1 * f1 / n1 + w2 * f2 / n2;
            };
            const double u0 = cfg.u0, us = cfg.u_slope, c = cfg.center;
            m.velocity = [c, u0, us](double x) { return u0 + us * (x - c); };
            m.total = 1.0;
            return m;
        }
        case InitKind::CustomCsv:
            throw config_error("initial measure: custom_csv builds states directly");
    }
    throw config_error("initial measure: unknown kind");
}

std::vector<double> quantile_levels(std::size_t n, unsigned long seed, bool jitter) {
    std::vector<double> q(n);
    for (std::size_t i = 0; i < n; ++i) q[i] = (i + 0.5) / n;
    if (jitter) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(-0.3, 0.3);
        for (std::size_t i = 0; i < n; ++i) q[i] += u(rng) / n;
        std::sort(q.begin(), q.end());
        q.front() = std::max(q.front(), 0.25 / n);
        q.back() = std::min(q.back(), 1.0 - 0.25 / n);
    }
    return q;
}

ParticleState state_from_measure(const InitialMeasure& m, std::size_t n,
                                 const std::vector<double>& levels) {
    std::vector<double> x(n), masses(n, 1.0), v(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = m.quantile(levels[i] * m.total);
        v[i] = m.velocity(x[i]);
    }
    return make_particle_state(std::move(x), std::move(masses), std::move(v), 0.0);
}

}  // namespace

ParticleState build_initial_state(const RunConfig& cfg) {
    if (cfg.init_kind == InitKind::CustomCsv)
        return io::state_from_csv(io::read_file(cfg.csv_path));
    const InitialMeasure m = make_initial_measure(cfg);
    return state_from_measure(m, cfg.n_particles,
                              quantile_levels(cfg.n_particles, cfg.seed, false));
}

GridSolution build_initial_grid(const RunConfig& cfg, std::size_t cells) {
    if (cfg.init_kind == InitKind::CustomCsv)
        throw config_error("oracle grid: custom_csv initial data is not gridable");
    const InitialMeasure m = make_initial_measure(cfg);
    const double pad = 0.25 * (m.hi - m.lo);
    const double total = m.total;
    const double lo = m.lo, hi = m.hi;
    auto density = m.density;
    auto rho = [density, total, lo, hi](double x) {
        return (x < lo || x > hi) ? 0.0 : density(x) / total;
    };
    return make_grid(lo - pad, hi + pad, cells, rho, m.velocity);
}

bool InvariantReport::passed(double el_tol) const {
    return ledger_min_margin >= -1e-8 && energy_max_uptick <= 1e-8 &&
           n_le_e_max_gap <= 1e-8 && moment_max_excess <= 1e-6 &&
           w2_rate_excess <= 1e-6 && el_residual_max <= el_tol &&
           defect_min_cell >= -1e-10 && ordering_min_gap >= -1e-8;
}

namespace {

InvariantReport check_invariants(const Trajectory& traj, const DiagnosticSeries& series,
                                 const GasLaw& law, std::size_t n_cells) {
    InvariantReport rep;
    const double ebar = traj.initial_energy();
    const double mbar = traj.initial_moment();
    const double speed = std::sqrt(2.0 * ebar);

    for (const StepSolution& s : traj.steps) {
        rep.ledger_min_margin = std::min(rep.ledger_min_margin, s.dissipation.margin);
        rep.el_residual_max = std::max(rep.el_residual_max, s.el_residual);
    }
    for (std::size_t k = 0; k + 1 < traj.states.size(); ++k) {
        const double e0 = total_energy(traj.states[k], law).total;
        const double e1 = total_energy(traj.states[k + 1], law).total;
        rep.energy_max_uptick = std::max(rep.energy_max_uptick, e1 - e0);
    }
    double prev_t = 0.0;
    AtomicMeasure prev_atoms;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const double t = series.times[i];
        rep.n_le_e_max_gap = std::max(rep.n_le_e_max_gap, series.N[i] - series.E[i]);
        rep.moment_max_excess = std::max(rep.moment_max_excess,
                                         series.M2[i] - (mbar + t * speed));
        rep.ordering_min_gap = std::min(rep.ordering_min_gap, series.E[i] - series.N[i]);
        InterpolantSample pl = sample(traj, t, InterpolantKind::PiecewiseLinear);
        AtomicMeasure atoms = make_atomic_measure(pl.state.positions, pl.state.masses);
        if (i > 0) {
            const double w2 = wasserstein_p(prev_atoms, atoms, 2.0);
            rep.w2_rate_excess = std::max(rep.w2_rate_excess,
                                          w2 / (t - prev_t) - speed);
        }
        prev_atoms = std::move(atoms);
        prev_t = t;

        CoarseField field = coarse_grain(pl, law, n_cells);
        for (std::size_t c = 0; c < field.cells(); ++c) {
            const double q = field.second_moment_flux[c] -
                             field.rbar[c] * field.ubar[c] * field.ubar[c];
            const double p = field.pressure_avg[c] - law.pressure(field.rho_fine[c]);
            rep.defect_min_cell = std::min({rep.defect_min_cell, q, p});
        }
    }
    return rep;
}

}  // namespace

std::filesystem::path resolve_output_dir(const std::string& configured) {
    if (const char* root = std::getenv("GASDYN_OUTPUT_ROOT"); root && *root)
        return std::filesystem::path(root) / configured;
    return configured;
}

RunResult run_single(const RunConfig& cfg, const std::filesystem::path& out_dir) {
    const auto t_start = std::chrono::steady_clock::now();
    const GasLaw law = cfg.law();
    const ParticleState initial = build_initial_state(cfg);

    RunResult result;
    result.directory = out_dir;
    result.trajectory = march(initial, law, cfg.tau, cfg.t_end, cfg.solver);
    result.series = compute_series(result.trajectory, law, cfg.effective_cells(),
                                   cfg.samples_per_step);
    result.invariants = check_invariants(result.trajectory, result.series, law,
                                         cfg.effective_cells());

    std::filesystem::create_directories(out_dir / "states");
    std::string states_concat;
    for (std::size_t k = 0; k < result.trajectory.states.size(); ++k) {
        char name[32];
        std::snprintf(name, sizeof(name), "step_%06zu.csv", k);
        const std::string body = io::state_to_csv(result.trajectory.states[k]);
        io::write_file(out_dir / "states" / name, body);
        states_concat += body;
    }
    const std::string ledger = io::ledger_to_csv(result.trajectory);
    const std::string diagnostics = io::diagnostics_to_csv(result.series);
    io::write_file(out_dir / "ledger.csv", ledger);
    io::write_file(out_dir / "diagnostics.csv", diagnostics);

    const auto t_stop = std::chrono::steady_clock::now();
    const double wall = std::chrono::duration<double>(t_stop - t_start).count();

    nlohmann::ordered_json manifest;
    manifest["config"] = config_echo(cfg);
    manifest["initial_hash"] = io::sha256_hex(init_block_echo(cfg));
    manifest["tau"] = cfg.tau;
    manifest["t_end"] = result.trajectory.t_end;
    manifest["law"] = {{"kappa", cfg.kappa}, {"gamma", cfg.gamma}};
    manifest["options"] = {{"el_tol", cfg.solver.el_tol},
                           {"max_iters", cfg.solver.max_iters},
                           {"degeneracy_eps", cfg.solver.degeneracy_eps},
                           {"samples_per_step", cfg.samples_per_step},
                           {"n_cells", cfg.effective_cells()}};
    manifest["content_hash"] = {{"states", io::sha256_hex(states_concat)},
                                {"ledger.csv", io::sha256_hex(ledger)},
                                {"diagnostics.csv", io::sha256_hex(diagnostics)}};
    manifest["wall_time_s"] = wall;
    const InvariantReport& inv = result.invariants;
    manifest["invariants"] = {
        {"ledger_min_margin", inv.ledger_min_margin},
        {"energy_max_uptick", inv.energy_max_uptick},
        {"n_le_e_max_gap", inv.n_le_e_max_gap},
        {"moment_max_excess", inv.moment_max_excess},
        {"w2_rate_excess", inv.w2_rate_excess},
        {"el_residual_max", inv.el_residual_max},
        {"defect_min_cell", inv.defect_min_cell},
        {"ordering_min_gap", inv.ordering_min_gap},
        {"passed", inv.passed(cfg.solver.el_tol)}};
    io::write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");

    if (!inv.passed(cfg.solver.el_tol))
        throw invariant_violation("run: invariant check failed, see " +
                                  (out_dir / "manifest.json").string());
    return result;
}

namespace {

RunConfig member_config(const RunConfig& base, std::size_t j) {
    RunConfig cfg = base;
    auto apply = [&](EnsembleStrategy s) {
        switch (s) {
            case EnsembleStrategy::TauSweep:
                cfg.tau = base.tau / (double)(j + 1);
                break;
            case EnsembleStrategy::ParticleSweep:
                cfg.n_particles = base.n_particles + j * std::max<std::size_t>(
                                                             base.n_particles / 2, 2);
                break;
            case EnsembleStrategy::CellsSweep:
                cfg.n_cells = base.effective_cells() + j;
                break;
            case EnsembleStrategy::Jitter:
                cfg.seed = base.seed + 1000003 * j;
                break;
            case EnsembleStrategy::Mixed:
                break;  // handled below
        }
    };
    if (base.strategy == EnsembleStrategy::Mixed) {
        const EnsembleStrategy cycle[4] = {
            EnsembleStrategy::TauSweep, EnsembleStrategy::ParticleSweep,
            EnsembleStrategy::CellsSweep, EnsembleStrategy::Jitter};
        if (j > 0) apply(cycle[(j - 1) % 4]);
    } else if (j > 0) {
        apply(base.strategy);
    }
    return cfg;
}

AccelerationProfile extract_profile(const DiagnosticSeries& series, bool energy,
                                    const std::string& run_id) {
    AccelerationProfile p;
    p.run_id = run_id;
    p.times = series.times;
    p.values = energy ? series.f : series.a;
    return p;
}

}  // namespace

EnsembleRunResult run_ensemble(const RunConfig& cfg, const std::filesystem::path& out_dir) {
    EnsembleRunResult out;
    out.directory = out_dir;
    out.ensemble.initial_hash = io::sha256_hex(init_block_echo(cfg));

    std::vector<std::string> failures;
    std::vector<double> base_grid;
    for (std::size_t j = 0; j < cfg.ensemble_k; ++j) {
        char name[32];
        std::snprintf(name, sizeof(name), "member_%03zu", j);
        RunConfig mc = member_config(cfg, j);
        // jitter applies to particle placement only when requested
        const bool jitter = (cfg.strategy == EnsembleStrategy::Jitter && j > 0) ||
                            (cfg.strategy == EnsembleStrategy::Mixed && j > 0 &&
                             (j - 1) % 4 == 3);
        try {
            RunResult r;
            if (jitter) {
                const InitialMeasure m = make_initial_measure(mc);
                const GasLaw law = mc.law();
                ParticleState init = state_from_measure(
                    m, mc.n_particles, quantile_levels(mc.n_particles, mc.seed, true));
                r.directory = out_dir / name;
                r.trajectory = march(init, law, mc.tau, mc.t_end, mc.solver);
                r.series = compute_series(r.trajectory, law, mc.effective_cells(),
                                          mc.samples_per_step);
                r.invariants = check_invariants(r.trajectory, r.series, law,
                                                mc.effective_cells());
                std::filesystem::create_directories(r.directory);
                io::write_file(r.directory / "ledger.csv", io::ledger_to_csv(r.trajectory));
                io::write_file(r.directory / "diagnostics.csv",
                               io::diagnostics_to_csv(r.series));
                nlohmann::ordered_json manifest;
                manifest["config"] = config_echo(mc);
                manifest["initial_hash"] = out.ensemble.initial_hash;
                manifest["jitter"] = true;
                io::write_file(r.directory / "manifest.json", manifest.dump(2) + "\n");
            } else {
                r = run_single(mc, out_dir / name);
            }
            EnsembleMember member;
            member.run_id = name;
            member.acceleration = extract_profile(r.series, false, name);
            member.energy = extract_profile(r.series, true, name);
            if (base_grid.empty()) base_grid = member.acceleration.times;
            member.acceleration = resample(member.acceleration, base_grid);
            member.energy = resample(member.energy, base_grid);
            out.ensemble.members.push_back(std::move(member));
            out.member_ids.push_back(name);
        } catch (const std::exception& err) {
            failures.push_back(std::string(name) + ": " + err.what());
        }
    }
    if (!failures.empty()) {
        std::string what = "ensemble: member failures:";
        for (const std::string& f : failures) what += "\n  " + f;
        throw std::runtime_error(what);
    }

    nlohmann::ordered_json manifest;
    manifest["initial_hash"] = out.ensemble.initial_hash;
    manifest["strategy"] = to_string(cfg.strategy);
    manifest["strategy_note"] =
        "members are heuristic perturbations (timestep, resolution, sampling) "
        "of one initial measure; they explore, not exhaust, the solution set";
    manifest["k"] = cfg.ensemble_k;
    manifest["members"] = out.member_ids;
    io::write_file(out_dir / "ensemble_manifest.json", manifest.dump(2) + "\n");
    return out;
}

Ensemble load_ensemble(const std::filesystem::path& ensemble_dir) {
    const auto manifest = nlohmann::json::parse(
        io::read_file(ensemble_dir / "ensemble_manifest.json"));
    Ensemble ens;
    ens.initial_hash = manifest.at("initial_hash").get<std::string>();

    std::vector<double> base_grid;
    for (const auto& name : manifest.at("members")) {
        const std::string id = name.get<std::string>();
        const std::string body = io::read_file(ensemble_dir / id / "diagnostics.csv");
        std::istringstream in(body);
        std::string line;
        std::getline(in, line);  // header
        EnsembleMember member;
        member.run_id = id;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::istringstream ls(line);
            std::string cell;
            std::vector<double> row;
            while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
            member.acceleration.times.push_back(row[0]);
            member.acceleration.values.push_back(row[3]);
            member.energy.times.push_back(row[0]);
            member.energy.values.push_back(row[4]);
        }
        member.acceleration.run_id = id;
        member.energy.run_id = id;
        if (base_grid.empty()) base_grid = member.acceleration.times;
        member.acceleration = resample(member.acceleration, base_grid);
        member.energy = resample(member.energy, base_grid);
        ens.members.push_back(std::move(member));
    }
    return ens;
}

std::string selection_json(const Ensemble& ensemble, SelectionObjective objective,
                           double tol) {
    nlohmann::ordered_json j;
    j["objective"] = objective == SelectionObjective::Acceleration ? "acceleration"
                                                                   : "energy";
    j["tol"] = tol;
    j["initial_hash"] = ensemble.initial_hash;
    j["minimal"] = minimal_elements(ensemble, objective, tol);
    j["chains"] = nlohmann::json::array();
    j["chains"].push_back(maximal_chain(ensemble, objective, tol));
    nlohmann::ordered_json matrix = nlohmann::json::array();
    for (std::size_t i = 0; i < ensemble.members.size(); ++i) {
        nlohmann::ordered_json row = nlohmann::json::array();
        for (std::size_t k = 0; k < ensemble.members.size(); ++k) {
            const Comparison c = compare(ensemble.profile(i, objective),
                                         ensemble.profile(k, objective), tol);
            row.push_back(c == Comparison::LessEq      ? "<="
                          : c == Comparison::GreaterEq ? ">="
                          : c == Comparison::Equivalent ? "=="
                                                        : "||");
        }
        matrix.push_back(row);
    }
    j["pairwise"] = matrix;
    return j.dump(2) + "\n";
}

std::string oracle_compare_csv(const RunConfig& cfg) {
    const GasLaw law = cfg.law();
    const ParticleState initial = build_initial_state(cfg);
    Trajectory traj = march(initial, law, cfg.tau, cfg.t_end, cfg.solver);

    const std::size_t cells = std::max<std::size_t>(16 * cfg.n_particles, 400);
    GridSolution grid0 = build_initial_grid(cfg, cells);

    std::string out = "t,w2,relative_energy\n";
    const int samples = 10;
    for (int s = 0; s <= samples; ++s) {
        const double t = traj.t_end * s / samples;
        GridSolution grid = fv_solve(grid0, law, t, 0.45);
        InterpolantSample pl = sample(traj, t, InterpolantKind::PiecewiseLinear);

        AtomicMeasure part = make_atomic_measure(pl.state.positions, pl.state.masses);
        std::vector<double> gw(grid.rho.size());
        double gtot = 0.0;
        for (std::size_t i = 0; i < grid.rho.size(); ++i) {
            gw[i] = grid.rho[i] * grid.dx;
            gtot += gw[i];
        }
        for (double& w : gw) w /= gtot;
        AtomicMeasure gridm = make_atomic_measure(grid.cell_centers, gw);
        const double w2 = wasserstein_p(part, gridm, 2.0);

        // relative energy of the particle solution against the (positive
        // part of the) grid solution, interpolated as a piecewise field
        CoarseField field = coarse_grain(pl, law, cfg.effective_cells());
        DefectFields def = defects(field, law);
        ReferenceFields ref;
        ref.time = t;
        const GridSolution g = grid;
        ref.density = [g](double x) {
            if (g.cell_centers.empty()) return 1e-12;
            const double lo = g.cell_centers.front(), dx = g.dx;
            std::ptrdiff_t i = (std::ptrdiff_t)std::llround((x - lo) / dx);
            i = std::clamp<std::ptrdiff_t>(i, 0, (std::ptrdiff_t)g.rho.size() - 1);
            return std::max(g.rho[(std::size_t)i], 1e-12);
        };
        ref.velocity = [g](double x) {
            if (g.cell_centers.empty()) return 0.0;
            const double lo = g.cell_centers.front(), dx = g.dx;
            std::ptrdiff_t i = (std::ptrdiff_t)std::llround((x - lo) / dx);
            i = std::clamp<std::ptrdiff_t>(i, 0, (std::ptrdiff_t)g.rho.size() - 1);
            const double r = std::max(g.rho[(std::size_t)i], 1e-12);
            return g.momentum[(std::size_t)i] / r;
        };
        const double rel = relative_energy(field, def, ref, law);

        out += io::format_double(t);
        out += ',';
        out += io::format_double(w2);
        out += ',';
        out += io::format_double(rel);
        out += '\n';
    }
    return out;
}

}  // namespace gasdyn
