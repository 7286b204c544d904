// Experiment configuration, ensemble orchestration, persistence and the
// reproducibility layer. A run directory holds a canonical config echo, a
// manifest with per-trajectory seeds and content checksums, one
// subdirectory per trajectory, and aggregated statistics. Re-running with
// the same master seed reproduces every artifact bit for bit; completed
// trajectories are detected through the manifest and skipped.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "shearlab/diagnostics.hpp"

namespace shearlab::harness {

inline constexpr const char* kCodeVersion = "0.1.0";

struct ExperimentConfig {
    bounds::FlowConfig flow;
    solver::GridSpec grid;
    double t_end = 1.0;
    int trajectories = 1;
    std::uint64_t master_seed = 0;
    std::string out_dir;

    solver::InitialCondition::Kind initial = solver::InitialCondition::Kind::couette;
    double perturbation_amplitude = 0.0;
    ou::PathMode wall_mode = ou::PathMode::ou;
    ou::PathInitial wall_initial = ou::PathInitial::stationary();

    bool audit_energy = true;
    double audit_tolerance_constant = 1.0;
    int snapshot_cadence = 0;
    int workers = 1;

    void validate() const;

    std::string serialize() const;                       // canonical text form
    static ExperimentConfig parse(const std::string&);   // inverse of serialize
    static ExperimentConfig load(const std::filesystem::path&);
    void save(const std::filesystem::path&) const;

    std::string config_hash() const;  // hash of the canonical form
};

struct TrajectoryEntry {
    int index = 0;
    std::uint64_t seed = 0;
    std::string status = "pending";  // pending | complete | failed
    std::string reason;
    std::map<std::string, std::string> files;  // name -> checksum
};

struct RunManifest {
    std::string config_hash;
    std::string code_version = kCodeVersion;
    std::vector<TrajectoryEntry> trajectories;

    void save(const std::filesystem::path&) const;
    static RunManifest load(const std::filesystem::path&);
};

std::uint64_t trajectory_seed(std::uint64_t master_seed, int index);

/// Persist / reload one trajectory (trajectory.csv, audit.csv, meta.json).
void save_trajectory(const std::filesystem::path& dir, const solver::TrajectoryRecord& rec,
                     const ExperimentConfig& cfg);
solver::TrajectoryRecord load_trajectory(const std::filesystem::path& dir);

struct EnsembleResult {
    RunManifest manifest;
    diag::DissipationStats stats;
    bounds::BoundsReport bounds;
    std::vector<diag::InequalityLedger> ledgers;  // one per completed trajectory (audit on)
    int completed = 0;
    int failed = 0;
};

/// Run (or resume) the ensemble described by cfg. Trajectory i uses the
/// stream derived from (master_seed, i); partial failures are recorded and
/// the statistics cover the completed subset.
EnsembleResult run_ensemble(const ExperimentConfig& cfg);

/// Aggregate an existing run directory without simulating anything.
EnsembleResult collect_ensemble(const ExperimentConfig& cfg);

struct SweepPoint {
    double sigma = 0.0;
    double theta = 0.0;
    double reynolds = 0.0;
    bool skipped = false;
    std::string skip_reason;
    diag::DissipationStats stats;
    bounds::BoundsReport bounds;
};

struct SweepResult {
    std::vector<SweepPoint> points;
    bool mean_bound_nondecreasing_in_sigma = true;
    bool mean_bound_increases_as_theta_decreases = true;
};

/// Cartesian sweep over the provided sigma / theta / Re lists (an absent
/// list keeps the base value). Invalid points are skipped with a reason.
SweepResult sweep(const ExperimentConfig& base, const std::vector<double>& sigmas,
                  const std::vector<double>& thetas, const std::vector<double>& reynolds_list);

}  // namespace shearlab::harness
