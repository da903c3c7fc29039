#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gasdyn/config.hpp"
#include "gasdyn/diagnostics.hpp"
#include "gasdyn/oracle.hpp"
#include "gasdyn/selection.hpp"
#include "gasdyn/trajectory.hpp"

// Orchestration: initial data synthesis, single runs with their artifact
// directories (states/, ledger.csv, diagnostics.csv, manifest.json), ensemble
// generation, selection over ensemble directories, and the finite-volume
// cross-check. The GASDYN_OUTPUT_ROOT environment variable, when set,
// prefixes every artifact directory.

namespace gasdyn {

class invariant_violation : public std::runtime_error {
  public:
    explicit invariant_violation(const std::string& what) : std::runtime_error(what) {}
};

// Equal-mass quantile discretization of the configured initial measure.
ParticleState build_initial_state(const RunConfig& config);

// Same initial measure on a finite-volume grid for the oracle comparison.
GridSolution build_initial_grid(const RunConfig& config, std::size_t cells);

struct InvariantReport {
    double ledger_min_margin = 0.0;
    double energy_max_uptick = 0.0;      // max E(t_{k+1}) - E(t_k)
    double n_le_e_max_gap = 0.0;         // max N(t) - E(t)
    double moment_max_excess = 0.0;      // max M(t) - (Mbar + t sqrt(2 Ebar))
    double w2_rate_excess = 0.0;         // max W2 rate - sqrt(2 Ebar)
    double el_residual_max = 0.0;
    double defect_min_cell = 0.0;        // most negative per-cell Jensen gap
    double ordering_min_gap = 0.0;       // min E(t) - N(t) (common-subtrahend defect order)
    bool passed(double el_tol) const;
};

struct RunResult {
    std::filesystem::path directory;
    Trajectory trajectory;
    DiagnosticSeries series;
    InvariantReport invariants;
};

std::filesystem::path resolve_output_dir(const std::string& configured);

// March, diagnose, check invariants, and persist the artifact directory.
RunResult run_single(const RunConfig& config, const std::filesystem::path& out_dir);

// k member runs under <out>/member_XXX varying per the configured strategy;
// writes ensemble_manifest.json. Throws with the list of failures when any
// member fails.
struct EnsembleRunResult {
    std::filesystem::path directory;
    std::vector<std::string> member_ids;
    Ensemble ensemble;
};

EnsembleRunResult run_ensemble(const RunConfig& config,
                               const std::filesystem::path& out_dir);

// Load an ensemble back from member directories (diagnostics.csv + manifest).
Ensemble load_ensemble(const std::filesystem::path& ensemble_dir);

// selection.json body for an ensemble (pure function of inputs).
std::string selection_json(const Ensemble& ensemble, SelectionObjective objective,
                           double tol);

// Runs both solvers from a shared config; returns comparison.csv body with
// columns t, W2 distance, relative energy.
std::string oracle_compare_csv(const RunConfig& config);

}  // namespace gasdyn
