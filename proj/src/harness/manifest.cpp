#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "shearlab/harness.hpp"
#include "shearlab/io.hpp"

namespace shearlab::harness {

using nlohmann::json;

void RunManifest::save(const std::filesystem::path& path) const {
    json j;
    j["config_hash"] = config_hash;
    j["code_version"] = code_version;
    j["trajectories"] = json::array();
    for (const auto& t : trajectories) {
        json e;
        e["index"] = t.index;
        e["seed"] = t.seed;
        e["status"] = t.status;
        if (!t.reason.empty()) e["reason"] = t.reason;
        e["files"] = t.files;
        j["trajectories"].push_back(std::move(e));
    }
    // Atomic replace so a crash cannot leave a torn manifest.
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw std::runtime_error("manifest: cannot write " + tmp);
        out << j.dump(2) << "\n";
    }
    std::filesystem::rename(tmp, path);
}

RunManifest RunManifest::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("manifest: cannot open " + path.string());
    json j = json::parse(in);
    RunManifest m;
    m.config_hash = j.at("config_hash").get<std::string>();
    m.code_version = j.at("code_version").get<std::string>();
    for (const auto& e : j.at("trajectories")) {
        TrajectoryEntry t;
        t.index = e.at("index").get<int>();
        t.seed = e.at("seed").get<std::uint64_t>();
        t.status = e.at("status").get<std::string>();
        if (e.contains("reason")) t.reason = e.at("reason").get<std::string>();
        if (e.contains("files")) t.files = e.at("files").get<std::map<std::string, std::string>>();
        m.trajectories.push_back(std::move(t));
    }
    return m;
}

void save_trajectory(const std::filesystem::path& dir, const solver::TrajectoryRecord& rec,
                     const ExperimentConfig& cfg) {
    std::filesystem::create_directories(dir);

    io::CsvTable traj;
    traj.columns = {"t", "x_wall", "dissipation", "energy"};
    for (std::size_t n = 0; n < rec.times.size(); ++n)
        traj.rows.push_back({rec.times[n], rec.wall_speed[n], rec.dissipation[n], rec.energy[n]});
    io::write_csv(dir / "trajectory.csv", traj);

    const bool audit = !rec.grad_v_sq.empty();
    if (audit) {
        io::CsvTable a;
        a.columns = {"t", "dw", "grad_v_sq", "m_integrand", "v_norm_sq", "boundary_power"};
        for (std::size_t n = 0; n < rec.times.size(); ++n) {
            const double dw = (n < rec.brownian_increments.size()) ? rec.brownian_increments[n] : 0.0;
            a.rows.push_back({rec.times[n], dw, rec.grad_v_sq[n], rec.m_integrand[n],
                              rec.v_norm_sq[n], rec.boundary_power[n]});
        }
        io::write_csv(dir / "audit.csv", a);
    }

    nlohmann::json meta;
    meta["seed"] = rec.seed;
    meta["dt"] = rec.dt;
    meta["t_end"] = rec.t_end;
    meta["completed"] = rec.completed;
    meta["abort_reason"] = rec.abort_reason;
    meta["audit"] = audit;
    meta["grid"] = {{"n1", cfg.grid.n1}, {"n2", cfg.grid.n2}, {"n3", cfg.grid.n3}};
    std::ofstream out(dir / "meta.json");
    if (!out) throw std::runtime_error("save_trajectory: cannot write meta.json");
    out << meta.dump(2) << "\n";
}

solver::TrajectoryRecord load_trajectory(const std::filesystem::path& dir) {
    solver::TrajectoryRecord rec;

    std::ifstream min(dir / "meta.json");
    if (!min) throw std::runtime_error("load_trajectory: cannot open meta.json in " + dir.string());
    nlohmann::json meta = nlohmann::json::parse(min);
    rec.seed = meta.at("seed").get<std::uint64_t>();
    rec.dt = meta.at("dt").get<double>();
    rec.t_end = meta.at("t_end").get<double>();
    rec.completed = meta.at("completed").get<bool>();
    rec.abort_reason = meta.at("abort_reason").get<std::string>();

    const io::CsvTable traj = io::read_csv(dir / "trajectory.csv");
    for (const auto& row : traj.rows) {
        rec.times.push_back(row[0]);
        rec.wall_speed.push_back(row[1]);
        rec.dissipation.push_back(row[2]);
        rec.energy.push_back(row[3]);
    }

    if (meta.at("audit").get<bool>()) {
        const io::CsvTable a = io::read_csv(dir / "audit.csv");
        for (std::size_t n = 0; n < a.rows.size(); ++n) {
            const auto& row = a.rows[n];
            if (n + 1 < a.rows.size()) rec.brownian_increments.push_back(row[1]);
            rec.grad_v_sq.push_back(row[2]);
            rec.m_integrand.push_back(row[3]);
            rec.v_norm_sq.push_back(row[4]);
            rec.boundary_power.push_back(row[5]);
        }
    }
    return rec;
}

}  // namespace shearlab::harness
