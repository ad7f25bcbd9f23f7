#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "salvol/fixation_data.hpp"

namespace salvol {

/// One attention peak of a synthetic stimulus, in image pixels.
struct SyntheticPeak {
    double x_px;
    double y_px;
    double spread_px; // isotropic standard deviation
    double weight;
    double onset_s = -1e9;  // the peak fades in around this time
    double offset_s = 1e9;  // and fades out around this one
};

struct SyntheticImage {
    std::string image_id;
    SyntheticPeak first;
    SyntheticPeak second;
};

/// Synthetic observers. Each fixation is drawn from the image's two-peak
/// density multiplied by a locality kernel around the previous fixation and by
/// an inhibition term around every earlier fixation. Lengths are uniform in
/// [min_length, max_length]; durations are log-normal, clamped to
/// [min_duration_s, max_duration_s].
struct SyntheticConfig {
    ImageDims dims{6000, 3000};
    std::vector<SyntheticImage> images;
    std::size_t observers = 20;
    std::size_t min_length = 8;
    std::size_t max_length = 24;
    double median_duration_s = 0.35;
    double duration_log_sigma = 0.45;
    double min_duration_s = 0.1;
    double max_duration_s = 1.5;
    double background_weight = 0.02; // uniform share of the density
    double locality_sigma_px = 600.0;
    double inhibition_sigma_px = 250.0;
    double inhibition_strength = 0.9; // in [0, 1]
    std::size_t grid_step_px = 20;    // resolution of the generating density
    std::uint64_t seed = 2017;
};

/// The configuration of the bundled dataset (3 images, 20 observers each).
SyntheticConfig bundled_synthetic_config();

FixationDataset make_synthetic_dataset(const SyntheticConfig& cfg);

} // namespace salvol
