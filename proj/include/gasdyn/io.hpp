#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gasdyn/core.hpp"
#include "gasdyn/diagnostics.hpp"
#include "gasdyn/metrics.hpp"
#include "gasdyn/trajectory.hpp"

// Serialization: CSV/JSON formats for states and diagnostics, and content
// hashing for reproducibility manifests. All floating-point output uses 17
// significant digits so byte-identity is meaningful.

namespace gasdyn::io {

std::string format_double(double v);

std::string sha256_hex(const std::string& bytes);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

// ParticleState <-> CSV with header x,m,v. Masses are written unnormalized
// by the recorded scale so a round trip reproduces the state exactly.
std::string state_to_csv(const ParticleState& state);
ParticleState state_from_csv(const std::string& text, double time = 0.0);

// ParticleState <-> JSON object {time, positions, masses, velocities}.
std::string state_to_json(const ParticleState& state);
ParticleState state_from_json(const std::string& text);

// Measure CSV with header x,w.
AtomicMeasure measure_from_csv(const std::string& text);

std::string ledger_to_csv(const Trajectory& traj);
std::string diagnostics_to_csv(const DiagnosticSeries& series);

}  // namespace gasdyn::io
