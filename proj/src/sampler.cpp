#include "salvol/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace salvol {

std::string_view to_string(Strategy s) {
    switch (s) {
    case Strategy::naive: return "naive";
    case Strategy::distance_limited: return "distance-limited";
    case Strategy::inhibition_of_return: return "inhibition-of-return";
    case Strategy::random_baseline: return "random-baseline";
    }
    return "unknown";
}

Strategy parse_strategy(std::string_view name) {
    for (auto s : {Strategy::naive, Strategy::distance_limited, Strategy::inhibition_of_return,
                   Strategy::random_baseline})
        if (name == to_string(s)) return s;
    throw ValidationError("unknown strategy '" + std::string(name) +
                          "' (expected naive, distance-limited, inhibition-of-return or random-baseline)");
}

void SamplingConfig::validate() const {
    if (!(mask_sigma_px > 0.0) || !std::isfinite(mask_sigma_px))
        throw ValidationError("mask_sigma_px must be positive");
    if (num_scanpaths < 1) throw ValidationError("num_scanpaths must be at least 1");
}

std::vector<PlannedFixation> plan_scanpath(const EmpiricalDistribution& count_dist,
                                           const EmpiricalDistribution& dur_dist, Rng& rng) {
    const double drawn = count_dist.sample(rng);
    const auto length = std::llround(drawn);
    if (length < 1) throw ValidationError("count distribution produced a scanpath length below 1");

    std::vector<PlannedFixation> plan;
    plan.reserve(static_cast<std::size_t>(length));
    double start = 0.0;
    for (long long i = 0; i < length; ++i) {
        const double d = dur_dist.sample(rng);
        if (!(d > 0.0)) throw ValidationError("duration distribution produced a non-positive duration");
        plan.push_back({start, d});
        start += d;
    }
    return plan;
}

CellSampler::CellSampler(std::span<const double> weights) {
    cumulative_.reserve(weights.size());
    double total = 0.0;
    for (double w : weights) {
        total += w;
        cumulative_.push_back(total);
    }
}

std::size_t CellSampler::sample(Rng& rng) const {
    const double target = rng.uniform() * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
    auto i = static_cast<std::size_t>(it - cumulative_.begin());
    if (i >= cumulative_.size()) i = cumulative_.size() - 1;
    // Land on a cell with positive weight when rounding put us on a flat step.
    while (i > 0 && cumulative_[i] == cumulative_[i - 1]) --i;
    return i;
}

namespace {

void check_grid(GridView g) {
    if (g.height == 0 || g.width == 0 || g.values.size() != g.height * g.width)
        throw ValidationError("grid shape does not match its values");
}

GridPoint cell_center(std::size_t index, std::size_t width) {
    return {static_cast<double>(index % width) + 0.5, static_cast<double>(index / width) + 0.5};
}

std::vector<double> axis_profile(double center, double sigma, std::size_t n, bool wrap) {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) {
        double d = std::abs(static_cast<double>(i) + 0.5 - center);
        if (wrap) d = std::min(d, static_cast<double>(n) - d);
        g[i] = std::exp(-0.5 * (d / sigma) * (d / sigma));
    }
    return g;
}

GridPoint sample_weighted_or_naive(GridView slice, std::span<const double> weights, Rng& rng,
                                   const WarningSink& warnings, const char* strategy) {
    CellSampler sampler(weights);
    if (sampler.valid()) return cell_center(sampler.sample(rng), slice.width);
    warn(warnings, std::string(strategy) + ": masked slice has no mass, falling back to naive sampling");
    return sample_naive(slice, rng);
}

// Running product of (1 - mask) over the fixations seen so far.
class Inhibition {
public:
    Inhibition(std::size_t height, std::size_t width, double sigma, bool wrap)
        : height_(height), width_(width), sigma_(sigma), wrap_(wrap), factor_(height * width, 1.0) {}

    void add(GridPoint p) {
        const auto gx = axis_profile(p.x, sigma_, width_, wrap_);
        const auto gy = axis_profile(p.y, sigma_, height_, false);
        for (std::size_t r = 0; r < height_; ++r)
            for (std::size_t c = 0; c < width_; ++c) factor_[r * width_ + c] *= 1.0 - gy[r] * gx[c];
    }

    std::vector<double> apply(std::span<const double> slice) const {
        std::vector<double> w(slice.size());
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = slice[i] * factor_[i];
        return w;
    }

private:
    std::size_t height_, width_;
    double sigma_;
    bool wrap_;
    std::vector<double> factor_;
};

std::vector<double> distance_limited_weights(GridView slice, GridPoint prev, double sigma, bool wrap) {
    const auto gx = axis_profile(prev.x, sigma, slice.width, wrap);
    const auto gy = axis_profile(prev.y, sigma, slice.height, false);
    std::vector<double> w(slice.values.size());
    for (std::size_t r = 0; r < slice.height; ++r)
        for (std::size_t c = 0; c < slice.width; ++c)
            w[r * slice.width + c] = slice.values[r * slice.width + c] * (gy[r] * gx[c]);
    return w;
}

Fixation to_image(GridPoint p, const PlannedFixation& plan, ImageDims image, std::size_t grid_h,
                  std::size_t grid_w) {
    Fixation f{p.x * image.width_px / static_cast<double>(grid_w),
               p.y * image.height_px / static_cast<double>(grid_h), plan.start_s, plan.duration_s};
    // Guard the open upper bound against rounding.
    f.x_px = std::min(f.x_px, std::nextafter(static_cast<double>(image.width_px), 0.0));
    f.y_px = std::min(f.y_px, std::nextafter(static_cast<double>(image.height_px), 0.0));
    return f;
}

std::string observer_name(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "gen-%03zu", i);
    return buf;
}

} // namespace

std::vector<double> gaussian_mask(GridPoint center, double sigma, std::size_t height, std::size_t width,
                                  bool wrap) {
    const auto gx = axis_profile(center.x, sigma, width, wrap);
    const auto gy = axis_profile(center.y, sigma, height, false);
    std::vector<double> m(height * width);
    for (std::size_t r = 0; r < height; ++r)
        for (std::size_t c = 0; c < width; ++c) m[r * width + c] = gy[r] * gx[c];
    return m;
}

GridPoint sample_naive(GridView slice, Rng& rng) {
    check_grid(slice);
    CellSampler sampler(slice.values);
    if (!sampler.valid()) return cell_center(rng.uniform_index(slice.values.size()), slice.width);
    return cell_center(sampler.sample(rng), slice.width);
}

GridPoint sample_distance_limited(GridView slice, GridPoint prev, double mask_sigma_px, bool wrap, Rng& rng,
                                  const WarningSink& warnings) {
    check_grid(slice);
    if (!(mask_sigma_px > 0.0)) throw ValidationError("mask_sigma_px must be positive");
    const auto w = distance_limited_weights(slice, prev, mask_sigma_px, wrap);
    return sample_weighted_or_naive(slice, w, rng, warnings, "distance-limited");
}

GridPoint sample_inhibition_of_return(GridView slice, std::span<const GridPoint> prev_all, double mask_sigma_px,
                                      bool wrap, Rng& rng, const WarningSink& warnings) {
    check_grid(slice);
    if (!(mask_sigma_px > 0.0)) throw ValidationError("mask_sigma_px must be positive");
    Inhibition inhibition(slice.height, slice.width, mask_sigma_px, wrap);
    for (const auto& p : prev_all) inhibition.add(p);
    const auto w = inhibition.apply(slice.values);
    return sample_weighted_or_naive(slice, w, rng, warnings, "inhibition-of-return");
}

std::vector<ScanPath> generate_scanpaths(const SaliencyVolume& v, const EmpiricalDistribution& count_dist,
                                         const EmpiricalDistribution& dur_dist, const SamplingConfig& cfg,
                                         ImageDims image, const std::string& image_id,
                                         const WarningSink& warnings) {
    cfg.validate();
    if (image.width_px <= 0 || image.height_px <= 0) throw ValidationError("image dimensions must be positive");
    if (cfg.strategy == Strategy::random_baseline)
        return generate_random_scanpaths(image, v.height(), v.width(), count_dist, dur_dist, cfg, image_id);

    const std::size_t h = v.height(), w = v.width();
    auto slice_view = [&](std::size_t t) { return GridView{v.slice(t), h, w}; };

    // Naive draws reuse one sampler per slice.
    std::vector<std::optional<CellSampler>> naive(v.t_bins());
    auto naive_draw = [&](std::size_t t, Rng& rng) {
        if (!naive[t]) naive[t].emplace(v.slice(t));
        if (!naive[t]->valid()) return sample_naive(slice_view(t), rng);
        return cell_center(naive[t]->sample(rng), w);
    };

    std::vector<ScanPath> out;
    out.reserve(cfg.num_scanpaths);
    for (std::size_t i = 0; i < cfg.num_scanpaths; ++i) {
        Rng rng = Rng::derived(cfg.seed, i);
        const auto plan = plan_scanpath(count_dist, dur_dist, rng);

        ScanPath sp{image_id, observer_name(i), {}};
        sp.fixations.reserve(plan.size());
        std::optional<Inhibition> inhibition;
        if (cfg.strategy == Strategy::inhibition_of_return) inhibition.emplace(h, w, cfg.mask_sigma_px, cfg.wrap_width);

        GridPoint prev{};
        for (std::size_t k = 0; k < plan.size(); ++k) {
            const auto t = slice_for_time(plan[k].start_s, v.dt_s(), v.t_bins());
            GridPoint p;
            if (k == 0 || cfg.strategy == Strategy::naive) {
                p = naive_draw(t, rng);
            } else if (cfg.strategy == Strategy::distance_limited) {
                const auto weights = distance_limited_weights(slice_view(t), prev, cfg.mask_sigma_px, cfg.wrap_width);
                p = sample_weighted_or_naive(slice_view(t), weights, rng, warnings, "distance-limited");
            } else {
                const auto weights = inhibition->apply(v.slice(t));
                p = sample_weighted_or_naive(slice_view(t), weights, rng, warnings, "inhibition-of-return");
            }
            if (inhibition) inhibition->add(p);
            prev = p;
            sp.fixations.push_back(to_image(p, plan[k], image, h, w));
        }
        out.push_back(std::move(sp));
    }
    return out;
}

std::vector<ScanPath> generate_random_scanpaths(ImageDims image, std::size_t grid_height, std::size_t grid_width,
                                                const EmpiricalDistribution& count_dist,
                                                const EmpiricalDistribution& dur_dist, const SamplingConfig& cfg,
                                                const std::string& image_id) {
    cfg.validate();
    if (grid_height == 0 || grid_width == 0) throw ValidationError("grid dimensions must be positive");
    if (image.width_px <= 0 || image.height_px <= 0) throw ValidationError("image dimensions must be positive");

    std::vector<ScanPath> out;
    out.reserve(cfg.num_scanpaths);
    for (std::size_t i = 0; i < cfg.num_scanpaths; ++i) {
        Rng rng = Rng::derived(cfg.seed, i);
        const auto plan = plan_scanpath(count_dist, dur_dist, rng);
        ScanPath sp{image_id, observer_name(i), {}};
        for (const auto& step : plan) {
            const auto cell = rng.uniform_index(grid_height * grid_width);
            sp.fixations.push_back(to_image(cell_center(cell, grid_width), step, image, grid_height, grid_width));
        }
        out.push_back(std::move(sp));
    }
    return out;
}

} // namespace salvol
