#include "salvol/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "salvol/sampler.hpp"

namespace salvol {

SyntheticConfig bundled_synthetic_config() {
    SyntheticConfig cfg;
    cfg.images = {
        {"synth-01", {1800, 1500, 210, 0.6}, {4200, 1300, 210, 0.4}},
        {"synth-02", {1200, 1100, 245, 0.5}, {3300, 1700, 175, 0.5}},
        {"synth-03", {2700, 1400, 195, 0.7}, {5100, 1600, 225, 0.3}},
    };
    return cfg;
}

namespace {

// Nearest multiple of 1/per_unit, written back as the closest double so it prints short.
double round_to(double v, double per_unit) { return std::round(v * per_unit) / per_unit; }

// Logistic fade-in and fade-out with one-second time constants.
double onset_gain(const SyntheticPeak& p, double time_s) {
    return 1.0 / (1.0 + std::exp(p.onset_s - time_s)) / (1.0 + std::exp(time_s - p.offset_s));
}

std::vector<double> peak_density(const SyntheticImage& image, const SyntheticConfig& cfg, std::size_t rows,
                                 std::size_t cols, double time_s) {
    const double step = static_cast<double>(cfg.grid_step_px);
    const double width = cfg.dims.width_px;
    std::vector<double> d(rows * cols);
    double total = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const double x = (static_cast<double>(c) + 0.5) * step, y = (static_cast<double>(r) + 0.5) * step;
            double v = 0.0;
            for (const auto* p : {&image.first, &image.second}) {
                double dx = std::abs(x - p->x_px);
                dx = std::min(dx, width - dx);
                const double dy = y - p->y_px;
                v += p->weight * onset_gain(*p, time_s) * std::exp(-0.5 * (dx * dx + dy * dy) / (p->spread_px * p->spread_px));
            }
            d[r * cols + c] = v;
            total += v;
        }
    }
    const double floor = cfg.background_weight * total / static_cast<double>(d.size());
    for (auto& v : d) v = v * (1.0 - cfg.background_weight) + floor;
    return d;
}

} // namespace

FixationDataset make_synthetic_dataset(const SyntheticConfig& cfg) {
    if (cfg.images.empty() || cfg.observers == 0 || cfg.min_length == 0 || cfg.max_length < cfg.min_length ||
        cfg.grid_step_px == 0)
        throw ValidationError("synthetic configuration is empty or inconsistent");

    const double step = static_cast<double>(cfg.grid_step_px);
    const std::size_t cols = static_cast<std::size_t>(cfg.dims.width_px) / cfg.grid_step_px;
    const std::size_t rows = static_cast<std::size_t>(cfg.dims.height_px) / cfg.grid_step_px;
    const double loc_sigma = cfg.locality_sigma_px / step;
    const double inh_sigma = cfg.inhibition_sigma_px / step;

    FixationDataset ds;
    for (std::size_t img = 0; img < cfg.images.size(); ++img) {
        const auto& image = cfg.images[img];
        auto& rec = ds.images[image.image_id];
        rec.dims = cfg.dims;

        for (std::size_t obs = 0; obs < cfg.observers; ++obs) {
            Rng rng = Rng::derived(cfg.seed, img * 1000 + obs);
            char name[16];
            std::snprintf(name, sizeof name, "obs-%02zu", obs);
            ScanPath sp{image.image_id, name, {}};

            const auto length = cfg.min_length + rng.uniform_index(cfg.max_length - cfg.min_length + 1);
            std::vector<double> inhibition(rows * cols, 1.0);
            std::vector<double> weights(rows * cols);
            GridPoint prev{};
            double start = 0.0;
            for (std::size_t k = 0; k < length; ++k) {
                const auto density = peak_density(image, cfg, rows, cols, start);
                if (k == 0) {
                    weights = density;
                } else {
                    const auto local = gaussian_mask(prev, loc_sigma, rows, cols, true);
                    for (std::size_t i = 0; i < weights.size(); ++i) weights[i] = density[i] * local[i] * inhibition[i];
                }
                CellSampler sampler(weights);
                const auto cell = sampler.valid() ? sampler.sample(rng) : rng.uniform_index(weights.size());
                const GridPoint p{static_cast<double>(cell % cols) + 0.5, static_cast<double>(cell / cols) + 0.5};
                const auto bump = gaussian_mask(p, inh_sigma, rows, cols, true);
                for (std::size_t i = 0; i < inhibition.size(); ++i)
                    inhibition[i] *= 1.0 - cfg.inhibition_strength * bump[i];
                prev = p;

                // Jitter inside the generating cell; tenth-of-pixel / millisecond resolution.
                const double x = (static_cast<double>(cell % cols) + rng.uniform()) * step;
                const double y = (static_cast<double>(cell / cols) + rng.uniform()) * step;
                const double duration = std::clamp(
                    cfg.median_duration_s * std::exp(cfg.duration_log_sigma * rng.normal()),
                    cfg.min_duration_s, cfg.max_duration_s);
                const double d = round_to(duration, 1000.0);
                sp.fixations.push_back({std::min(round_to(x, 10.0), cfg.dims.width_px - 0.1),
                                        std::min(round_to(y, 10.0), cfg.dims.height_px - 0.1),
                                        round_to(start, 1000.0), d});
                start = round_to(start + d, 1000.0);
            }
            rec.scanpaths.push_back(std::move(sp));
        }
    }
    return ds;
}

} // namespace salvol
