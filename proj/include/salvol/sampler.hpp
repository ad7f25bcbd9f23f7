#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "salvol/fixation_data.hpp"
#include "salvol/random.hpp"
#include "salvol/volume.hpp"

namespace salvol {

enum class Strategy { naive, distance_limited, inhibition_of_return, random_baseline };

std::string_view to_string(Strategy s);
/// Accepts "naive", "distance-limited", "inhibition-of-return", "random-baseline".
Strategy parse_strategy(std::string_view name);

struct SamplingConfig {
    Strategy strategy = Strategy::naive;
    double mask_sigma_px = 40.0; // grid pixels
    std::size_t num_scanpaths = 40;
    std::uint64_t seed = 0;
    bool wrap_width = false; // horizontal wrap of the Gaussian masks

    void validate() const;
};

struct PlannedFixation {
    double start_s;
    double duration_s;

    bool operator==(const PlannedFixation&) const = default;
};

/// Draws a length and that many durations; fixations abut in time.
std::vector<PlannedFixation> plan_scanpath(const EmpiricalDistribution& count_dist,
                                           const EmpiricalDistribution& dur_dist, Rng& rng);

inline std::size_t slice_for_time(double start_s, double dt_s, std::size_t t_bins) {
    return slice_index(start_s, dt_s, t_bins);
}

/// Read-only H x W grid of cell weights.
struct GridView {
    std::span<const double> values;
    std::size_t height;
    std::size_t width;
};

/// Grid coordinates: cell (row, col) has center (col + 0.5, row + 0.5).
struct GridPoint {
    double x;
    double y;

    bool operator==(const GridPoint&) const = default;
};

/// Inverse-CDF sampler over non-negative cell weights.
class CellSampler {
public:
    explicit CellSampler(std::span<const double> weights);

    /// False when the weights sum to zero.
    bool valid() const { return !cumulative_.empty() && cumulative_.back() > 0.0; }
    std::size_t sample(Rng& rng) const;

private:
    std::vector<double> cumulative_;
};

/// Peak-normalized Gaussian exp(-d^2 / 2 sigma^2) around `center`, evaluated at
/// every cell center, with horizontal distances taken around the seam when `wrap`.
std::vector<double> gaussian_mask(GridPoint center, double sigma, std::size_t height, std::size_t width,
                                  bool wrap);

GridPoint sample_naive(GridView slice, Rng& rng);

/// Samples from slice * mask(prev). Falls back to naive sampling with a
/// warning when the product has no mass.
GridPoint sample_distance_limited(GridView slice, GridPoint prev, double mask_sigma_px, bool wrap, Rng& rng,
                                  const WarningSink& warnings = {});

/// Samples from slice * prod_k (1 - mask(prev_k)). Same fallback as above.
GridPoint sample_inhibition_of_return(GridView slice, std::span<const GridPoint> prev_all, double mask_sigma_px,
                                      bool wrap, Rng& rng, const WarningSink& warnings = {});

/// Generates cfg.num_scanpaths scanpaths for one image. Scanpath i draws from
/// Rng::derived(cfg.seed, i). Grid coordinates are mapped back to image pixels.
std::vector<ScanPath> generate_scanpaths(const SaliencyVolume& v, const EmpiricalDistribution& count_dist,
                                         const EmpiricalDistribution& dur_dist, const SamplingConfig& cfg,
                                         ImageDims image, const std::string& image_id = "image",
                                         const WarningSink& warnings = {});

/// Baseline with locations uniform over a height x width grid.
std::vector<ScanPath> generate_random_scanpaths(ImageDims image, std::size_t grid_height, std::size_t grid_width,
                                                const EmpiricalDistribution& count_dist,
                                                const EmpiricalDistribution& dur_dist, const SamplingConfig& cfg,
                                                const std::string& image_id = "image");

} // namespace salvol
