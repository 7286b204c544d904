#include <stdexcept>

#include "shearlab/harness.hpp"

namespace shearlab::harness {

SweepResult sweep(const ExperimentConfig& base, const std::vector<double>& sigmas,
                  const std::vector<double>& thetas, const std::vector<double>& reynolds_list) {
    const std::vector<double> sig = sigmas.empty()
                                        ? std::vector<double>{base.flow.ou.noise_amplitude}
                                        : sigmas;
    const std::vector<double> the = thetas.empty()
                                        ? std::vector<double>{base.flow.ou.reversion_rate}
                                        : thetas;
    const std::vector<double> rey =
        reynolds_list.empty() ? std::vector<double>{base.flow.reynolds()} : reynolds_list;
    if (sig.empty() || the.empty() || rey.empty() ||
        (sigmas.empty() && thetas.empty() && reynolds_list.empty()))
        throw std::invalid_argument("sweep: empty parameter grid");

    SweepResult result;
    int point_index = 0;
    for (double re : rey) {
        for (double theta : the) {
            for (double sigma : sig) {
                SweepPoint pt;
                pt.sigma = sigma;
                pt.theta = theta;
                pt.reynolds = re;
                ExperimentConfig cfg = base;
                cfg.flow.ou.noise_amplitude = sigma;
                cfg.flow.ou.reversion_rate = theta;
                cfg.flow.nu = cfg.flow.ou.mean_speed * cfg.flow.geometry.height / re;
                try {
                    if (!(re > 1.0)) throw std::invalid_argument("Re must exceed 1");
                    cfg.flow.background = background::BackgroundParams::standard(
                        cfg.flow.nu, cfg.flow.ou.mean_speed, cfg.flow.geometry);
                    char sub[32];
                    std::snprintf(sub, sizeof(sub), "point_%03d", point_index);
                    cfg.out_dir = (std::filesystem::path(base.out_dir) / sub).string();
                    const EnsembleResult run = run_ensemble(cfg);
                    pt.stats = run.stats;
                    pt.bounds = run.bounds;
                } catch (const std::exception& ex) {
                    pt.skipped = true;
                    pt.skip_reason = ex.what();
                }
                result.points.push_back(std::move(pt));
                ++point_index;
            }
        }
    }

    // Trend summaries: the mean bound along ascending sigma (other
    // parameters fixed) and along descending theta.
    auto find_point = [&](double re, double theta, double sigma) -> const SweepPoint* {
        for (const auto& pt : result.points)
            if (!pt.skipped && pt.reynolds == re && pt.theta == theta && pt.sigma == sigma)
                return &pt;
        return nullptr;
    };
    std::vector<double> sig_sorted = sig, the_sorted = the;
    std::sort(sig_sorted.begin(), sig_sorted.end());
    std::sort(the_sorted.begin(), the_sorted.end(), std::greater<double>());

    for (double re : rey)
        for (double theta : the) {
            double prev = -1.0;
            bool first = true;
            for (double sigma : sig_sorted) {
                const SweepPoint* pt = find_point(re, theta, sigma);
                if (!pt) continue;
                if (!first && pt->bounds.mean_bound < prev * (1.0 - 1e-12))
                    result.mean_bound_nondecreasing_in_sigma = false;
                prev = pt->bounds.mean_bound;
                first = false;
            }
        }
    for (double re : rey)
        for (double sigma : sig) {
            if (sigma == 0.0) continue;  // bound is theta-independent at zero noise
            const SweepPoint* prev = nullptr;
            for (double theta : the_sorted) {
                const SweepPoint* pt = find_point(re, theta, sigma);
                if (!pt) continue;
                if (prev && pt->bounds.mean_bound <= prev->bounds.mean_bound)
                    result.mean_bound_increases_as_theta_decreases = false;
                prev = pt;
            }
        }
    return result;
}

}  // namespace shearlab::harness
