// Command-line front end: run a single simulation, generate an ensemble,
// select minimal members, compute metrics between measure files, or compare
// against the finite-volume reference.
//
// Exit codes: 0 ok, 2 configuration error, 3 solver failure, 4 invariant
// violation.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "gasdyn/config.hpp"
#include "gasdyn/io.hpp"
#include "gasdyn/metrics.hpp"
#include "gasdyn/runner.hpp"
#include "gasdyn/stepper.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitInvariant = 4;

int guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const gasdyn::config_error& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return kExitConfig;
    } catch (const gasdyn::invariant_violation& err) {
        std::cerr << "invariant violation: " << err.what() << "\n";
        return kExitInvariant;
    } catch (const gasdyn::solver_error& err) {
        std::cerr << "solver failure: " << err.what() << "\n";
        return kExitSolver;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitSolver;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"variational 1D isentropic Euler solver and selection tools"};
    app.require_subcommand(1);

    std::string config_path, out_override;
    std::string ensemble_dir, objective_name = "acceleration";
    std::string file_a, file_b, metric_name = "w2";
    double tol = -1.0;

    CLI::App* run = app.add_subcommand("run", "run one trajectory with diagnostics");
    run->add_option("config", config_path, "configuration file")->required();
    run->add_option("--output", out_override, "override output directory");

    CLI::App* ens = app.add_subcommand("ensemble", "run an ensemble of perturbed trajectories");
    ens->add_option("config", config_path, "configuration file")->required();
    ens->add_option("--output", out_override, "override output directory");

    CLI::App* sel = app.add_subcommand("select", "select minimal members of an ensemble");
    sel->add_option("--ensemble-dir", ensemble_dir, "ensemble directory")->required();
    sel->add_option("--objective", objective_name, "acceleration | energy");
    sel->add_option("--tol", tol, "comparison tolerance (default 1e-9*(1+max))");

    CLI::App* met = app.add_subcommand("metrics", "distance between two measure CSV files");
    met->add_option("a", file_a, "first measure csv (x,w)")->required();
    met->add_option("b", file_b, "second measure csv (x,w)")->required();
    met->add_option("--metric", metric_name, "w1 | w2 | bl");

    CLI::App* cmp = app.add_subcommand("oracle-compare",
                                       "compare against the finite-volume reference");
    cmp->add_option("config", config_path, "configuration file")->required();
    cmp->add_option("--output", out_override, "override output directory");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) {
        return guarded([&] {
            gasdyn::RunConfig cfg = gasdyn::load_config(config_path);
            if (!out_override.empty()) cfg.output_dir = out_override;
            const auto dir = gasdyn::resolve_output_dir(cfg.output_dir);
            gasdyn::RunResult result = gasdyn::run_single(cfg, dir);
            std::cout << "wrote " << result.directory.string() << "\n";
            return kExitOk;
        });
    }
    if (ens->parsed()) {
        return guarded([&] {
            gasdyn::RunConfig cfg = gasdyn::load_config(config_path);
            if (!out_override.empty()) cfg.output_dir = out_override;
            const auto dir = gasdyn::resolve_output_dir(cfg.output_dir);
            gasdyn::EnsembleRunResult result = gasdyn::run_ensemble(cfg, dir);
            std::cout << "wrote " << result.directory.string() << " ("
                      << result.member_ids.size() << " members)\n";
            return kExitOk;
        });
    }
    if (sel->parsed()) {
        return guarded([&] {
            gasdyn::SelectionObjective obj;
            if (objective_name == "acceleration") {
                obj = gasdyn::SelectionObjective::Acceleration;
            } else if (objective_name == "energy") {
                obj = gasdyn::SelectionObjective::Energy;
            } else {
                throw gasdyn::config_error("select: objective must be acceleration or energy");
            }
            gasdyn::Ensemble ensb = gasdyn::load_ensemble(ensemble_dir);
            double use_tol = tol;
            if (use_tol < 0.0) {
                use_tol = 0.0;
                for (const auto& mem : ensb.members)
                    use_tol = std::max(use_tol,
                                       gasdyn::default_compare_tol(mem.acceleration,
                                                                   mem.acceleration));
            }
            const std::string body = gasdyn::selection_json(ensb, obj, use_tol);
            gasdyn::io::write_file(std::filesystem::path(ensemble_dir) / "selection.json",
                                   body);
            std::cout << body;
            return kExitOk;
        });
    }
    if (met->parsed()) {
        return guarded([&] {
            const gasdyn::AtomicMeasure a =
                gasdyn::io::measure_from_csv(gasdyn::io::read_file(file_a));
            const gasdyn::AtomicMeasure b =
                gasdyn::io::measure_from_csv(gasdyn::io::read_file(file_b));
            double value = 0.0;
            if (metric_name == "w1") value = gasdyn::wasserstein_p(a, b, 1.0);
            else if (metric_name == "w2") value = gasdyn::wasserstein_p(a, b, 2.0);
            else if (metric_name == "bl")
                value = gasdyn::bl_norm(gasdyn::subtract(a, b)).value;
            else throw gasdyn::config_error("metrics: metric must be w1, w2 or bl");
            nlohmann::ordered_json j;
            j["metric"] = metric_name;
            j["value"] = value;
            std::cout << j.dump() << "\n";
            return kExitOk;
        });
    }
    if (cmp->parsed()) {
        return guarded([&] {
            gasdyn::RunConfig cfg = gasdyn::load_config(config_path);
            if (!out_override.empty()) cfg.output_dir = out_override;
            const auto dir = gasdyn::resolve_output_dir(cfg.output_dir);
            const std::string body = gasdyn::oracle_compare_csv(cfg);
            gasdyn::io::write_file(dir / "comparison.csv", body);
            std::cout << body;
            return kExitOk;
        });
    }
    return kExitConfig;
}
