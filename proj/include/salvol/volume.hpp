#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "salvol/fixation_data.hpp"

namespace salvol {

struct VolumeDims {
    std::size_t t_bins = 12;
    std::size_t height = 300;
    std::size_t width = 600;

    std::size_t slice_size() const { return height * width; }
    std::size_t size() const { return t_bins * height * width; }
    bool operator==(const VolumeDims&) const = default;
};

/// 25 s of viewing split into 12 slices.
inline constexpr double default_dt_s = 25.0 / 12.0;

/// Kernel standard deviations: time in slices, space in grid pixels.
struct GaussianBandwidths {
    double sigma_t = 4.0;
    double sigma_h = 20.0;
    double sigma_w = 20.0;

    void validate() const;
    bool operator==(const GaussianBandwidths&) const = default;
};

/// T x H x W grid of non-negative values stored (t, h, w) row-major.
class SaliencyVolume {
public:
    SaliencyVolume(VolumeDims dims, double dt_s);
    SaliencyVolume(VolumeDims dims, double dt_s, std::vector<double> values);

    const VolumeDims& dims() const { return dims_; }
    std::size_t t_bins() const { return dims_.t_bins; }
    std::size_t height() const { return dims_.height; }
    std::size_t width() const { return dims_.width; }
    double dt_s() const { return dt_s_; }

    double at(std::size_t t, std::size_t h, std::size_t w) const { return values_[index(t, h, w)]; }
    double& at(std::size_t t, std::size_t h, std::size_t w) { return values_[index(t, h, w)]; }

    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }
    std::span<const double> slice(std::size_t t) const {
        return std::span<const double>(values_).subspan(t * dims_.slice_size(), dims_.slice_size());
    }
    std::span<double> slice(std::size_t t) {
        return std::span<double>(values_).subspan(t * dims_.slice_size(), dims_.slice_size());
    }

    double slice_sum(std::size_t t) const;

    bool operator==(const SaliencyVolume&) const = default;

private:
    std::size_t index(std::size_t t, std::size_t h, std::size_t w) const {
        return (t * dims_.height + h) * dims_.width + w;
    }

    VolumeDims dims_;
    double dt_s_;
    std::vector<double> values_;
};

/// H x W probability map, row-major, summing to 1.
struct SaliencyMap {
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<double> values;

    double at(std::size_t h, std::size_t w) const { return values[h * width + w]; }
    bool operator==(const SaliencyMap&) const = default;
};

/// floor(start_s / dt_s) clamped to [0, t_bins - 1].
std::size_t slice_index(double start_s, double dt_s, std::size_t t_bins);

std::vector<std::size_t> quantize_timestamps(const ScanPath& sp, double dt_s, std::size_t t_bins);

/// Places a 1 at every fixated voxel. Positions are rescaled from image pixels
/// with floor(x * W / W_img) and floor(y * H / H_img).
SaliencyVolume build_binary_volume(std::span<const ScanPath> scanpaths, VolumeDims dims, double dt_s,
                                   ImageDims image);

/// Sampled Gaussian truncated at ceil(4 sigma) on each side and normalized to sum 1.
std::vector<double> gaussian_kernel(double sigma);

/// Separable convolution with the truncated kernels. Time and height are
/// zero-padded; width is zero-padded or circular depending on `wrap_width`.
SaliencyVolume gaussian_blur_3d(const SaliencyVolume& v, const GaussianBandwidths& bw, bool wrap_width);

/// Divides every slice by its sum. Zero-sum slices become uniform.
SaliencyVolume normalize_slices(const SaliencyVolume& v);

struct VolumeOptions {
    VolumeDims dims;
    double dt_s = default_dt_s;
    GaussianBandwidths bandwidths;
    bool wrap_width = false;
};

SaliencyVolume build_saliency_volume(std::span<const ScanPath> scanpaths, ImageDims image,
                                     const VolumeOptions& opts = {});

SaliencyMap extract_saliency_map(const SaliencyVolume& v);
SaliencyMap extract_weighted_map(const SaliencyVolume& v, std::span<const double> weights);

inline constexpr double bce_epsilon = 1e-7;

/// Mean binary cross entropy of `pred` against `gt`, with predictions clipped
/// to [eps, 1 - eps]. Both operands must already lie in [0, 1].
double binary_cross_entropy(std::span<const double> pred, std::span<const double> gt);

/// BCE after rescaling each operand by its own maximum into [0, 1].
double bce_loss(const SaliencyVolume& pred, const SaliencyVolume& gt);
double bce_loss(const SaliencyMap& pred, const SaliencyMap& gt);

} // namespace salvol
