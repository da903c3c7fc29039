#pragma once

#include <string>

#include "gasdyn/core.hpp"
#include "gasdyn/stepper.hpp"

// Flat key = value run configuration. Lines are `key = value`, `#` starts a
// comment. Unknown keys are rejected; every violated constraint reports the
// offending key. The documented schema ships in docs/config_schema.txt.

namespace gasdyn {

enum class InitKind { Riemann, GaussianBlob, TwoBlob, CustomCsv };

enum class EnsembleStrategy { TauSweep, ParticleSweep, CellsSweep, Jitter, Mixed };

struct RunConfig {
    double kappa = 1.0;
    double gamma = 2.0;

    InitKind init_kind = InitKind::Riemann;
    // riemann
    double domain_lo = -1.0;
    double domain_hi = 1.0;
    double interface_pos = 0.0;
    double rho_left = 1.0;
    double rho_right = 0.25;
    double u_left = 0.0;
    double u_right = 0.0;
    // gaussian_blob / two_blob
    double center = 0.0;
    double sigma = 0.25;
    double halfwidth = 1.0;
    double u0 = 0.0;
    double u_slope = 0.0;
    double center2 = 1.0;
    double sigma2 = 0.25;
    double mass_fraction = 0.5;
    // custom_csv
    std::string csv_path;

    std::size_t n_particles = 64;
    double tau = 0.0125;
    double t_end = 0.25;
    int samples_per_step = 8;
    std::size_t n_cells = 0;  // 0 = ceil(sqrt(n_particles))

    SolverOptions solver;

    EnsembleStrategy strategy = EnsembleStrategy::TauSweep;
    std::size_t ensemble_k = 1;

    std::string output_dir = "out";
    unsigned long seed = 0;

    GasLaw law() const;
    std::size_t effective_cells() const;
};

class config_error : public std::runtime_error {
  public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
void validate_config(const RunConfig& config);

// Canonical echo of the configuration (sorted keys, 17-digit floats); the
// initial-condition block alone feeds the shared-initial-data hash.
std::string config_echo(const RunConfig& config);
std::string init_block_echo(const RunConfig& config);

std::string to_string(InitKind kind);
std::string to_string(EnsembleStrategy strategy);

}  // namespace gasdyn
