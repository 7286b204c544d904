#include <atomic>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "shearlab/harness.hpp"
#include "shearlab/io.hpp"

namespace shearlab::harness {

namespace {

std::filesystem::path trajectory_dir(const std::filesystem::path& root, int index) {
    char name[16];
    std::snprintf(name, sizeof(name), "traj_%04d", index);
    return root / name;
}

bool entry_verified(const TrajectoryEntry& e, const std::filesystem::path& dir) {
    if (e.status != "complete") return false;
    for (const auto& [name, checksum] : e.files) {
        const auto p = dir / name;
        if (!std::filesystem::exists(p)) return false;
        if (io::file_checksum(p) != checksum) return false;
    }
    return !e.files.empty();
}

solver::SimulateOptions simulate_options(const ExperimentConfig& cfg) {
    solver::SimulateOptions opt;
    opt.initial.kind = cfg.initial;
    opt.initial.amplitude = cfg.perturbation_amplitude;
    opt.record_audit = cfg.audit_energy;
    opt.wall_mode = cfg.wall_mode;
    opt.wall_initial = cfg.wall_initial;
    return opt;
}

void write_stats_json(const std::filesystem::path& path, const EnsembleResult& result,
                      const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["trajectories_completed"] = result.completed;
    j["trajectories_failed"] = result.failed;
    j["t_end"] = cfg.t_end;
    j["stats"] = {{"mean", result.stats.mean},
                  {"se_mean", result.stats.se_mean},
                  {"second_moment", result.stats.second_moment},
                  {"se_second_moment", result.stats.se_second_moment},
                  {"count", result.stats.trajectory_count}};
    j["bounds"] = {{"reynolds", result.bounds.reynolds},
                   {"mean_bound", result.bounds.mean_bound},
                   {"second_moment_bound", result.bounds.second_moment_bound},
                   {"large_noise_bound", result.bounds.large_noise_bound},
                   {"u3_over_h", result.bounds.kolmogorov_scale_u3_over_h}};
    if (!result.ledgers.empty()) {
        int passes = 0;
        double min_slack = result.ledgers.front().slack;
        double mean_m = 0.0;
        for (const auto& led : result.ledgers) {
            passes += led.pass ? 1 : 0;
            min_slack = std::min(min_slack, led.slack);
            mean_m += led.martingale;
        }
        j["audit"] = {{"ledgers", result.ledgers.size()},
                      {"passes", passes},
                      {"min_slack", min_slack},
                      {"mean_martingale", mean_m / static_cast<double>(result.ledgers.size())}};
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("run_ensemble: cannot write stats.json");
    out << j.dump(2) << "\n";
}

void aggregate(EnsembleResult& result, const ExperimentConfig& cfg,
               const std::filesystem::path& root) {
    std::vector<solver::TrajectoryRecord> records;
    result.completed = 0;
    result.failed = 0;
    for (const auto& e : result.manifest.trajectories) {
        if (e.status == "complete") {
            records.push_back(load_trajectory(trajectory_dir(root, e.index)));
            ++result.completed;
        } else if (e.status == "failed") {
            ++result.failed;
        }
    }
    result.bounds = bounds::make_report(cfg.flow);
    if (records.size() >= 2) result.stats = diag::ensemble_stats(records, cfg.t_end);
    else if (records.size() == 1) {
        result.stats.trajectory_count = 1;
        result.stats.t_end = cfg.t_end;
        result.stats.mean = records.front().mean_dissipation();
        result.stats.second_moment = result.stats.mean * result.stats.mean;
        result.stats.per_trajectory = {result.stats.mean};
    }
    result.ledgers.clear();
    if (cfg.audit_energy) {
        diag::AuditOptions opt;
        opt.tolerance_constant = cfg.audit_tolerance_constant;
        for (const auto& rec : records)
            result.ledgers.push_back(diag::energy_inequality_audit(rec, cfg.flow, cfg.grid, opt));
    }
}

}  // namespace

EnsembleResult run_ensemble(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.out_dir.empty()) throw std::invalid_argument("run_ensemble: out_dir not set");
    const std::filesystem::path root(cfg.out_dir);
    std::filesystem::create_directories(root);
    cfg.save(root / "config.cfg");

    EnsembleResult result;
    const auto manifest_path = root / "manifest.json";
    if (std::filesystem::exists(manifest_path)) {
        result.manifest = RunManifest::load(manifest_path);
        if (result.manifest.config_hash != cfg.config_hash())
            throw std::runtime_error(
                "run_ensemble: existing manifest belongs to a different config; refusing to mix runs");
    } else {
        result.manifest.config_hash = cfg.config_hash();
    }

    auto& entries = result.manifest.trajectories;
    if (entries.empty()) {
        for (int i = 0; i < cfg.trajectories; ++i) {
            TrajectoryEntry e;
            e.index = i;
            e.seed = trajectory_seed(cfg.master_seed, i);
            entries.push_back(std::move(e));
        }
    } else if (static_cast<int>(entries.size()) != cfg.trajectories) {
        throw std::runtime_error("run_ensemble: manifest trajectory count differs from config");
    }

    std::vector<int> todo;
    for (auto& e : entries)
        if (!entry_verified(e, trajectory_dir(root, e.index))) {
            e.status = "pending";
            todo.push_back(e.index);
        }

    std::mutex manifest_mutex;
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t pick = next.fetch_add(1);
            if (pick >= todo.size()) return;
            const int index = todo[pick];
            TrajectoryEntry& e = entries[static_cast<std::size_t>(index)];
            try {
                const auto rec =
                    solver::simulate_trajectory(cfg.flow, cfg.grid, cfg.t_end, e.seed, simulate_options(cfg));
                const auto dir = trajectory_dir(root, index);
                save_trajectory(dir, rec, cfg);
                std::lock_guard<std::mutex> lock(manifest_mutex);
                e.files.clear();
                e.files["trajectory.csv"] = io::file_checksum(dir / "trajectory.csv");
                e.files["meta.json"] = io::file_checksum(dir / "meta.json");
                if (cfg.audit_energy) e.files["audit.csv"] = io::file_checksum(dir / "audit.csv");
                if (rec.completed) {
                    e.status = "complete";
                } else {
                    e.status = "failed";
                    e.reason = rec.abort_reason;
                }
                result.manifest.save(manifest_path);
            } catch (const std::exception& ex) {
                std::lock_guard<std::mutex> lock(manifest_mutex);
                e.status = "failed";
                e.reason = ex.what();
                result.manifest.save(manifest_path);
            }
        }
    };

    if (cfg.workers <= 1 || todo.size() <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        const int n_workers = std::min<int>(cfg.workers, static_cast<int>(todo.size()));
        pool.reserve(static_cast<std::size_t>(n_workers));
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    result.manifest.save(manifest_path);

    aggregate(result, cfg, root);
    write_stats_json(root / "stats.json", result, cfg);
    return result;
}

EnsembleResult collect_ensemble(const ExperimentConfig& cfg) {
    cfg.validate();
    const std::filesystem::path root(cfg.out_dir);
    EnsembleResult result;
    result.manifest = RunManifest::load(root / "manifest.json");
    aggregate(result, cfg, root);
    return result;
}

}  // namespace shearlab::harness
