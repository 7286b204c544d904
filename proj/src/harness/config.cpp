#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "shearlab/harness.hpp"
#include "shearlab/io.hpp"

namespace shearlab::harness {

void ExperimentConfig::validate() const {
    flow.validate();
    grid.validate();
    if (!(t_end > 0.0)) throw std::invalid_argument("ExperimentConfig: t_end must be positive");
    if (trajectories < 1) throw std::invalid_argument("ExperimentConfig: need at least 1 trajectory");
    if (workers < 1) throw std::invalid_argument("ExperimentConfig: workers must be >= 1");
    if (snapshot_cadence < 0) throw std::invalid_argument("ExperimentConfig: bad snapshot cadence");
    if (!(audit_tolerance_constant > 0.0))
        throw std::invalid_argument("ExperimentConfig: audit tolerance constant must be positive");
}

namespace {

const char* initial_name(solver::InitialCondition::Kind k) {
    switch (k) {
        case solver::InitialCondition::Kind::rest: return "rest";
        case solver::InitialCondition::Kind::couette: return "couette";
        case solver::InitialCondition::Kind::perturbed: return "perturbed";
    }
    return "couette";
}

solver::InitialCondition::Kind initial_from(const std::string& s) {
    if (s == "rest") return solver::InitialCondition::Kind::rest;
    if (s == "couette") return solver::InitialCondition::Kind::couette;
    if (s == "perturbed") return solver::InitialCondition::Kind::perturbed;
    throw std::invalid_argument("config: unknown initial '" + s + "'");
}

}  // namespace

std::string ExperimentConfig::serialize() const {
    std::ostringstream out;
    auto num = [](double v) { return io::format_full(v); };
    out << "[geometry]\n";
    out << "l = " << num(flow.geometry.length) << "\n";
    out << "h = " << num(flow.geometry.height) << "\n\n";
    out << "[fluid]\n";
    out << "nu = " << num(flow.nu) << "\n\n";
    out << "[ou]\n";
    out << "u = " << num(flow.ou.mean_speed) << "\n";
    out << "theta = " << num(flow.ou.reversion_rate) << "\n";
    out << "sigma = " << num(flow.ou.noise_amplitude) << "\n\n";
    out << "[background]\n";
    out << "a = " << num(flow.background.a) << "\n";
    out << "b = " << num(flow.background.b) << "\n\n";
    out << "[grid]\n";
    out << "n1 = " << grid.n1 << "\n";
    out << "n2 = " << grid.n2 << "\n";
    out << "n3 = " << grid.n3 << "\n";
    out << "dt = " << num(grid.dt) << "\n";
    out << "cfl_safety = " << num(grid.cfl_safety) << "\n\n";
    out << "[run]\n";
    out << "t_end = " << num(t_end) << "\n";
    out << "trajectories = " << trajectories << "\n";
    out << "seed = " << master_seed << "\n";
    out << "initial = " << initial_name(initial) << "\n";
    out << "perturbation_amplitude = " << num(perturbation_amplitude) << "\n";
    out << "wall_mode = " << (wall_mode == ou::PathMode::ou ? "ou" : "wiener") << "\n";
    out << "wall_initial = "
        << (wall_initial.kind == ou::PathInitial::Kind::stationary ? "stationary" : "fixed") << "\n";
    out << "wall_initial_value = " << num(wall_initial.value) << "\n";
    out << "workers = " << workers << "\n";
    out << "out_dir = " << out_dir << "\n\n";
    out << "[audit]\n";
    out << "energy = " << (audit_energy ? "true" : "false") << "\n";
    out << "tolerance_constant = " << num(audit_tolerance_constant) << "\n\n";
    out << "[snapshots]\n";
    out << "cadence = " << snapshot_cadence << "\n";
    return out.str();
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line, section;
    auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[' && line.back() == ']') {
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: expected key = value, got '" + line + "'");
        kv[section + "." + trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }

    auto take = [&](const std::string& key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        std::string v = it->second;
        kv.erase(it);
        return v;
    };
    auto require = [&](const std::string& key) {
        auto v = take(key);
        if (!v) throw std::invalid_argument("config: missing key '" + key + "'");
        return *v;
    };
    auto to_double = [](const std::string& s) { return std::stod(s); };
    auto to_int = [](const std::string& s) { return std::stoi(s); };
    auto to_bool = [](const std::string& s) {
        if (s == "true" || s == "1") return true;
        if (s == "false" || s == "0") return false;
        throw std::invalid_argument("config: bad boolean '" + s + "'");
    };

    ExperimentConfig cfg;
    cfg.flow.geometry.length = to_double(require("geometry.l"));
    cfg.flow.geometry.height = to_double(require("geometry.h"));
    cfg.flow.nu = to_double(require("fluid.nu"));
    cfg.flow.ou.mean_speed = to_double(require("ou.u"));
    cfg.flow.ou.reversion_rate = to_double(require("ou.theta"));
    cfg.flow.ou.noise_amplitude = to_double(require("ou.sigma"));
    cfg.flow.background.geometry = cfg.flow.geometry;
    if (auto a = take("background.a"); a) {
        cfg.flow.background.a = to_double(*a);
        cfg.flow.background.b = to_double(require("background.b"));
    } else {
        cfg.flow.background =
            background::BackgroundParams::standard(cfg.flow.nu, cfg.flow.ou.mean_speed, cfg.flow.geometry);
    }
    cfg.grid.n1 = to_int(require("grid.n1"));
    cfg.grid.n2 = to_int(require("grid.n2"));
    cfg.grid.n3 = to_int(require("grid.n3"));
    if (auto v = take("grid.dt"); v) cfg.grid.dt = to_double(*v);
    if (auto v = take("grid.cfl_safety"); v) cfg.grid.cfl_safety = to_double(*v);
    cfg.t_end = to_double(require("run.t_end"));
    cfg.trajectories = to_int(require("run.trajectories"));
    cfg.master_seed = std::stoull(require("run.seed"));
    if (auto v = take("run.initial"); v) cfg.initial = initial_from(*v);
    if (auto v = take("run.perturbation_amplitude"); v) cfg.perturbation_amplitude = to_double(*v);
    if (auto v = take("run.wall_mode"); v) {
        if (*v == "ou") cfg.wall_mode = ou::PathMode::ou;
        else if (*v == "wiener") cfg.wall_mode = ou::PathMode::wiener;
        else throw std::invalid_argument("config: unknown wall_mode '" + *v + "'");
    }
    if (auto v = take("run.wall_initial"); v) {
        if (*v == "stationary") cfg.wall_initial.kind = ou::PathInitial::Kind::stationary;
        else if (*v == "fixed") cfg.wall_initial.kind = ou::PathInitial::Kind::fixed;
        else throw std::invalid_argument("config: unknown wall_initial '" + *v + "'");
    }
    if (auto v = take("run.wall_initial_value"); v) cfg.wall_initial.value = to_double(*v);
    if (auto v = take("run.workers"); v) cfg.workers = to_int(*v);
    if (auto v = take("run.out_dir"); v) cfg.out_dir = *v;
    if (auto v = take("audit.energy"); v) cfg.audit_energy = to_bool(*v);
    if (auto v = take("audit.tolerance_constant"); v) cfg.audit_tolerance_constant = to_double(*v);
    if (auto v = take("snapshots.cadence"); v) cfg.snapshot_cadence = to_int(*v);

    if (!kv.empty())
        throw std::invalid_argument("config: unknown key '" + kv.begin()->first + "'");
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

void ExperimentConfig::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("config: cannot write " + path.string());
    out << serialize();
}

std::string ExperimentConfig::config_hash() const {
    // The output directory is a placement detail, not an identity of the
    // experiment; exclude it so a moved run directory still resumes.
    ExperimentConfig c = *this;
    c.out_dir.clear();
    const std::string s = c.serialize();
    char hex[24];
    std::snprintf(hex, sizeof(hex), "fnv64:%016llx",
                  static_cast<unsigned long long>(io::fnv1a64(s.data(), s.size())));
    return hex;
}

std::uint64_t trajectory_seed(std::uint64_t master_seed, int index) {
    return derive_stream_seed(master_seed, static_cast<std::uint64_t>(index));
}

}  // namespace shearlab::harness
