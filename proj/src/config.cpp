#include "gasdyn/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "gasdyn/diagnostics.hpp"
#include "gasdyn/io.hpp"

namespace gasdyn {

GasLaw RunConfig::law() const { return make_gas_law(kappa, gamma); }

std::size_t RunConfig::effective_cells() const {
    return n_cells > 0 ? n_cells : default_cell_count(n_particles);
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    std::size_t b = s.find_last_not_of(" \t\r");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

double parse_number(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw config_error("config: key '" + key + "': not a number: '" + value + "'");
    }
}

long parse_integer(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const long v = std::stol(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw config_error("config: key '" + key + "': not an integer: '" + value + "'");
    }
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("config: line " + std::to_string(lineno) +
                               ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw config_error("config: line " + std::to_string(lineno) +
                               ": empty key or value");
        if (kv.count(key))
            throw config_error("config: duplicate key '" + key + "'");
        kv[key] = value;
    }

    bool saw_tau = false, saw_tend = false;
    auto take = [&](const char* key) {
        auto it = kv.find(key);
        if (it == kv.end()) return std::string();
        std::string v = it->second;
        kv.erase(it);
        return v;
    };

    if (std::string v = take("law.kappa"); !v.empty()) cfg.kappa = parse_number("law.kappa", v);
    if (std::string v = take("law.gamma"); !v.empty()) cfg.gamma = parse_number("law.gamma", v);

    if (std::string v = take("init.kind"); !v.empty()) {
        if (v == "riemann") cfg.init_kind = InitKind::Riemann;
        else if (v == "gaussian_blob") cfg.init_kind = InitKind::GaussianBlob;
        else if (v == "two_blob") cfg.init_kind = InitKind::TwoBlob;
        else if (v == "custom_csv") cfg.init_kind = InitKind::CustomCsv;
        else throw config_error("config: key 'init.kind': unknown kind '" + v + "'");
    }
    if (std::string v = take("init.domain_lo"); !v.empty()) cfg.domain_lo = parse_number("init.domain_lo", v);
    if (std::string v = take("init.domain_hi"); !v.empty()) cfg.domain_hi = parse_number("init.domain_hi", v);
    if (std::string v = take("init.interface"); !v.empty()) cfg.interface_pos = parse_number("init.interface", v);
    if (std::string v = take("init.rho_left"); !v.empty()) cfg.rho_left = parse_number("init.rho_left", v);
    if (std::string v = take("init.rho_right"); !v.empty()) cfg.rho_right = parse_number("init.rho_right", v);
    if (std::string v = take("init.u_left"); !v.empty()) cfg.u_left = parse_number("init.u_left", v);
    if (std::string v = take("init.u_right"); !v.empty()) cfg.u_right = parse_number("init.u_right", v);
    if (std::string v = take("init.center"); !v.empty()) cfg.center = parse_number("init.center", v);
    if (std::string v = take("init.sigma"); !v.empty()) cfg.sigma = parse_number("init.sigma", v);
    if (std::string v = take("init.halfwidth"); !v.empty()) cfg.halfwidth = parse_number("init.halfwidth", v);
    if (std::string v = take("init.u0"); !v.empty()) cfg.u0 = parse_number("init.u0", v);
    if (std::string v = take("init.u_slope"); !v.empty()) cfg.u_slope = parse_number("init.u_slope", v);
    if (std::string v = take("init.center2"); !v.empty()) cfg.center2 = parse_number("init.center2", v);
    if (std::string v = take("init.sigma2"); !v.empty()) cfg.sigma2 = parse_number("init.sigma2", v);
    if (std::string v = take("init.mass_fraction"); !v.empty()) cfg.mass_fraction = parse_number("init.mass_fraction", v);
    if (std::string v = take("init.csv_path"); !v.empty()) cfg.csv_path = v;

    if (std::string v = take("n_particles"); !v.empty()) {
        const long n = parse_integer("n_particles", v);
        if (n < 2) throw config_error("config: key 'n_particles': need at least 2");
        cfg.n_particles = (std::size_t)n;
    }
    if (std::string v = take("tau"); !v.empty()) {
        cfg.tau = parse_number("tau", v);
        saw_tau = true;
    }
    if (std::string v = take("t_end"); !v.empty()) {
        cfg.t_end = parse_number("t_end", v);
        saw_tend = true;
    }
    if (std::string v = take("samples_per_step"); !v.empty())
        cfg.samples_per_step = (int)parse_integer("samples_per_step", v);
    if (std::string v = take("n_cells"); !v.empty()) {
        const long n = parse_integer("n_cells", v);
        if (n < 0) throw config_error("config: key 'n_cells': must be nonnegative");
        cfg.n_cells = (std::size_t)n;
    }
    if (std::string v = take("solver.el_tol"); !v.empty())
        cfg.solver.el_tol = parse_number("solver.el_tol", v);
    if (std::string v = take("solver.max_iters"); !v.empty())
        cfg.solver.max_iters = (int)parse_integer("solver.max_iters", v);
    if (std::string v = take("solver.degeneracy_eps"); !v.empty())
        cfg.solver.degeneracy_eps = parse_number("solver.degeneracy_eps", v);
    if (std::string v = take("ensemble.strategy"); !v.empty()) {
        if (v == "tau_sweep") cfg.strategy = EnsembleStrategy::TauSweep;
        else if (v == "n_sweep") cfg.strategy = EnsembleStrategy::ParticleSweep;
        else if (v == "cells_sweep") cfg.strategy = EnsembleStrategy::CellsSweep;
        else if (v == "jitter") cfg.strategy = EnsembleStrategy::Jitter;
        else if (v == "mixed") cfg.strategy = EnsembleStrategy::Mixed;
        else throw config_error("config: key 'ensemble.strategy': unknown strategy '" + v + "'");
    }
    if (std::string v = take("ensemble.k"); !v.empty()) {
        const long k = parse_integer("ensemble.k", v);
        if (k < 1) throw config_error("config: key 'ensemble.k': need k >= 1");
        cfg.ensemble_k = (std::size_t)k;
    }
    if (std::string v = take("output_dir"); !v.empty()) cfg.output_dir = v;
    if (std::string v = take("seed"); !v.empty())
        cfg.seed = (unsigned long)parse_integer("seed", v);

    if (!kv.empty())
        throw config_error("config: unknown key '" + kv.begin()->first + "'");
    if (!saw_tau) throw config_error("config: missing required key 'tau'");
    if (!saw_tend) throw config_error("config: missing required key 't_end'");

    validate_config(cfg);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("config: cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void validate_config(const RunConfig& cfg) {
    if (!(cfg.kappa >= 0.0) || !std::isfinite(cfg.kappa))
        throw config_error("config: key 'law.kappa': must be >= 0");
    if (!(cfg.gamma > 1.0) || !std::isfinite(cfg.gamma))
        throw config_error("config: key 'law.gamma': must be > 1");
    if (!(cfg.tau > 0.0)) throw config_error("config: key 'tau': must be positive");
    if (!(cfg.t_end > 0.0)) throw config_error("config: key 't_end': must be positive");
    if (cfg.tau > cfg.t_end * (1.0 + 1e-12))
        throw config_error("config: key 'tau': must not exceed t_end");
    if (cfg.n_particles < 2) throw config_error("config: key 'n_particles': need at least 2");
    if (cfg.samples_per_step < 1)
        throw config_error("config: key 'samples_per_step': need at least 1");
    if (!(cfg.solver.el_tol > 0.0))
        throw config_error("config: key 'solver.el_tol': must be positive");
    if (cfg.solver.max_iters < 1)
        throw config_error("config: key 'solver.max_iters': need at least 1");
    if (!(cfg.solver.degeneracy_eps > 0.0))
        throw config_error("config: key 'solver.degeneracy_eps': must be positive");
    switch (cfg.init_kind) {
        case InitKind::Riemann:
            if (!(cfg.domain_hi > cfg.domain_lo))
                throw config_error("config: key 'init.domain_hi': must exceed init.domain_lo");
            if (!(cfg.interface_pos > cfg.domain_lo && cfg.interface_pos < cfg.domain_hi))
                throw config_error("config: key 'init.interface': must lie inside the domain");
            if (!(cfg.rho_left > 0.0) || !(cfg.rho_right > 0.0))
                throw config_error("config: key 'init.rho_left/rho_right': must be positive");
            break;
        case InitKind::GaussianBlob:
        case InitKind::TwoBlob:
            if (!(cfg.sigma > 0.0))
                throw config_error("config: key 'init.sigma': must be positive");
            if (!(cfg.halfwidth > 0.0))
                throw config_error("config: key 'init.halfwidth': must be positive");
            if (cfg.init_kind == InitKind::TwoBlob) {
                if (!(cfg.sigma2 > 0.0))
                    throw config_error("config: key 'init.sigma2': must be positive");
                if (!(cfg.mass_fraction > 0.0 && cfg.mass_fraction < 1.0))
                    throw config_error("config: key 'init.mass_fraction': must be in (0,1)");
            }
            break;
        case InitKind::CustomCsv:
            if (cfg.csv_path.empty())
                throw config_error("config: key 'init.csv_path': required for custom_csv");
            break;
    }
}

std::string to_string(InitKind kind) {
    switch (kind) {
        case InitKind::Riemann: return "riemann";
        case InitKind::GaussianBlob: return "gaussian_blob";
        case InitKind::TwoBlob: return "two_blob";
        case InitKind::CustomCsv: return "custom_csv";
    }
    return "?";
}

std::string to_string(EnsembleStrategy strategy) {
    switch (strategy) {
        case EnsembleStrategy::TauSweep: return "tau_sweep";
        case EnsembleStrategy::ParticleSweep: return "n_sweep";
        case EnsembleStrategy::CellsSweep: return "cells_sweep";
        case EnsembleStrategy::Jitter: return "jitter";
        case EnsembleStrategy::Mixed: return "mixed";
    }
    return "?";
}

std::string init_block_echo(const RunConfig& c) {
    std::ostringstream out;
    auto num = [&](const char* key, double v) {
        out << key << " = " << io::format_double(v) << "\n";
    };
    out << "init.kind = " << to_string(c.init_kind) << "\n";
    switch (c.init_kind) {
        case InitKind::Riemann:
            num("init.domain_lo", c.domain_lo);
            num("init.domain_hi", c.domain_hi);
            num("init.interface", c.interface_pos);
            num("init.rho_left", c.rho_left);
            num("init.rho_right", c.rho_right);
            num("init.u_left", c.u_left);
            num("init.u_right", c.u_right);
            break;
        case InitKind::GaussianBlob:
            num("init.center", c.center);
            num("init.sigma", c.sigma);
            num("init.halfwidth", c.halfwidth);
            num("init.u0", c.u0);
            num("init.u_slope", c.u_slope);
            break;
        case InitKind::TwoBlob:
            num("init.center", c.center);
            num("init.sigma", c.sigma);
            num("init.center2", c.center2);
            num("init.sigma2", c.sigma2);
            num("init.halfwidth", c.halfwidth);
            num("init.mass_fraction", c.mass_fraction);
            num("init.u0", c.u0);
            num("init.u_slope", c.u_slope);
            break;
        case InitKind::CustomCsv:
            out << "init.csv_path = " << c.csv_path << "\n";
            break;
    }
    return out.str();
}

std::string config_echo(const RunConfig& c) {
    std::ostringstream out;
    auto num = [&](const char* key, double v) {
        out << key << " = " << io::format_double(v) << "\n";
    };
    num("law.kappa", c.kappa);
    num("law.gamma", c.gamma);
    out << init_block_echo(c);
    out << "n_particles = " << c.n_particles << "\n";
    num("tau", c.tau);
    num("t_end", c.t_end);
    out << "samples_per_step = " << c.samples_per_step << "\n";
    out << "n_cells = " << c.n_cells << "\n";
    num("solver.el_tol", c.solver.el_tol);
    out << "solver.max_iters = " << c.solver.max_iters << "\n";
    num("solver.degeneracy_eps", c.solver.degeneracy_eps);
    out << "ensemble.strategy = " << to_string(c.strategy) << "\n";
    out << "ensemble.k = " << c.ensemble_k << "\n";
    out << "output_dir = " << c.output_dir << "\n";
    out << "seed = " << c.seed << "\n";
    return out.str();
}

}  // namespace gasdyn
