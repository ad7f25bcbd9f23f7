#include "salvol/volume.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace salvol {

void GaussianBandwidths::validate() const {
    for (double s : {sigma_t, sigma_h, sigma_w})
        if (!(s > 0.0) || !std::isfinite(s)) throw ValidationError("Gaussian bandwidths must be positive");
}

SaliencyVolume::SaliencyVolume(VolumeDims dims, double dt_s)
    : SaliencyVolume(dims, dt_s, std::vector<double>(dims.size(), 0.0)) {}

SaliencyVolume::SaliencyVolume(VolumeDims dims, double dt_s, std::vector<double> values)
    : dims_(dims), dt_s_(dt_s), values_(std::move(values)) {
    if (dims_.t_bins == 0 || dims_.height == 0 || dims_.width == 0)
        throw ValidationError("volume dimensions must be at least 1");
    if (!(dt_s_ > 0.0) || !std::isfinite(dt_s_)) throw ValidationError("dt_s must be positive");
    if (values_.size() != dims_.size())
        throw ValidationError("volume holds " + std::to_string(values_.size()) + " values, expected " +
                              std::to_string(dims_.size()));
    for (double x : values_)
        if (!(x >= 0.0) || !std::isfinite(x)) throw ValidationError("volume values must be finite and >= 0");
}

double SaliencyVolume::slice_sum(std::size_t t) const {
    auto s = slice(t);
    return std::accumulate(s.begin(), s.end(), 0.0);
}

std::size_t slice_index(double start_s, double dt_s, std::size_t t_bins) {
    const double q = std::floor(start_s / dt_s);
    if (!(q > 0.0)) return 0;
    if (q >= static_cast<double>(t_bins - 1)) return t_bins - 1;
    return static_cast<std::size_t>(q);
}

std::vector<std::size_t> quantize_timestamps(const ScanPath& sp, double dt_s, std::size_t t_bins) {
    if (!(dt_s > 0.0)) throw ValidationError("dt_s must be positive");
    if (t_bins == 0) throw ValidationError("t_bins must be at least 1");
    std::vector<std::size_t> out;
    out.reserve(sp.fixations.size());
    for (const auto& f : sp.fixations) out.push_back(slice_index(f.start_s, dt_s, t_bins));
    return out;
}

SaliencyVolume build_binary_volume(std::span<const ScanPath> scanpaths, VolumeDims dims, double dt_s,
                                   ImageDims image) {
    if (scanpaths.empty()) throw ValidationError("cannot build a volume from zero scanpaths");
    if (image.width_px <= 0 || image.height_px <= 0) throw ValidationError("image dimensions must be positive");
    SaliencyVolume v(dims, dt_s);
    for (const auto& sp : scanpaths) {
        validate_scanpath(sp, image);
        for (const auto& f : sp.fixations) {
            const auto t = slice_index(f.start_s, dt_s, dims.t_bins);
            auto y = static_cast<std::size_t>(std::floor(f.y_px * static_cast<double>(dims.height) / image.height_px));
            auto x = static_cast<std::size_t>(std::floor(f.x_px * static_cast<double>(dims.width) / image.width_px));
            y = std::min(y, dims.height - 1);
            x = std::min(x, dims.width - 1);
            v.at(t, y, x) = 1.0;
        }
    }
    return v;
}

std::vector<double> gaussian_kernel(double sigma) {
    if (!(sigma > 0.0)) throw ValidationError("kernel sigma must be positive");
    const auto radius = static_cast<long>(std::ceil(4.0 * sigma));
    std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
    double total = 0.0;
    for (long i = -radius; i <= radius; ++i) {
        const double x = static_cast<double>(i) / sigma;
        k[static_cast<std::size_t>(i + radius)] = std::exp(-0.5 * x * x);
        total += k[static_cast<std::size_t>(i + radius)];
    }
    for (auto& x : k) x /= total;
    return k;
}

namespace {

// Convolves along the middle axis of an (outer, axis, inner) row-major block.
void convolve_axis(const std::vector<double>& in, std::vector<double>& out, std::size_t outer,
                   std::size_t axis, std::size_t inner, const std::vector<double>& kernel, bool wrap) {
    std::fill(out.begin(), out.end(), 0.0);
    const long radius = static_cast<long>(kernel.size() / 2);
    const long n = static_cast<long>(axis);
    for (std::size_t o = 0; o < outer; ++o) {
        const double* src = in.data() + o * axis * inner;
        double* dst = out.data() + o * axis * inner;
        for (long a = 0; a < n; ++a) {
            double* d = dst + a * static_cast<long>(inner);
            for (long k = -radius; k <= radius; ++k) {
                long s = a + k;
                if (wrap) {
                    s %= n;
                    if (s < 0) s += n;
                } else if (s < 0 || s >= n) {
                    continue;
                }
                const double weight = kernel[static_cast<std::size_t>(k + radius)];
                const double* row = src + s * static_cast<long>(inner);
                for (std::size_t i = 0; i < inner; ++i) d[i] += weight * row[i];
            }
        }
    }
}

} // namespace

SaliencyVolume gaussian_blur_3d(const SaliencyVolume& v, const GaussianBandwidths& bw, bool wrap_width) {
    bw.validate();
    const auto& d = v.dims();
    std::vector<double> a(v.values().begin(), v.values().end());
    std::vector<double> b(a.size());

    convolve_axis(a, b, 1, d.t_bins, d.slice_size(), gaussian_kernel(bw.sigma_t), false);
    convolve_axis(b, a, d.t_bins, d.height, d.width, gaussian_kernel(bw.sigma_h), false);
    convolve_axis(a, b, d.t_bins * d.height, d.width, 1, gaussian_kernel(bw.sigma_w), wrap_width);

    // Cancellation cannot occur with non-negative weights, but keep the invariant explicit.
    for (auto& x : b) x = std::max(x, 0.0);
    return SaliencyVolume(d, v.dt_s(), std::move(b));
}

SaliencyVolume normalize_slices(const SaliencyVolume& v) {
    SaliencyVolume out = v;
    const double uniform = 1.0 / static_cast<double>(v.dims().slice_size());
    for (std::size_t t = 0; t < v.t_bins(); ++t) {
        const double total = v.slice_sum(t);
        auto s = out.slice(t);
        if (total > 0.0) {
            for (auto& x : s) x /= total;
        } else {
            std::fill(s.begin(), s.end(), uniform);
        }
    }
    return out;
}

SaliencyVolume build_saliency_volume(std::span<const ScanPath> scanpaths, ImageDims image,
                                     const VolumeOptions& opts) {
    const auto binary = build_binary_volume(scanpaths, opts.dims, opts.dt_s, image);
    return normalize_slices(gaussian_blur_3d(binary, opts.bandwidths, opts.wrap_width));
}

namespace {

SaliencyMap normalized_map(std::size_t height, std::size_t width, std::vector<double> values) {
    const double total = std::accumulate(values.begin(), values.end(), 0.0);
    if (total > 0.0) {
        for (auto& x : values) x /= total;
    } else {
        std::fill(values.begin(), values.end(), 1.0 / static_cast<double>(values.size()));
    }
    return SaliencyMap{height, width, std::move(values)};
}

} // namespace

SaliencyMap extract_saliency_map(const SaliencyVolume& v) {
    std::vector<double> ones(v.t_bins(), 1.0);
    return extract_weighted_map(v, ones);
}

SaliencyMap extract_weighted_map(const SaliencyVolume& v, std::span<const double> weights) {
    if (weights.size() != v.t_bins())
        throw ValidationError("expected " + std::to_string(v.t_bins()) + " weights, got " +
                              std::to_string(weights.size()));
    bool any = false;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw ValidationError("weights must be finite and >= 0");
        any = any || w > 0.0;
    }
    if (!any) throw ValidationError("weights are all zero");

    std::vector<double> acc(v.dims().slice_size(), 0.0);
    for (std::size_t t = 0; t < v.t_bins(); ++t) {
        if (weights[t] == 0.0) continue;
        auto s = v.slice(t);
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += weights[t] * s[i];
    }
    return normalized_map(v.height(), v.width(), std::move(acc));
}

double binary_cross_entropy(std::span<const double> pred, std::span<const double> gt) {
    if (pred.size() != gt.size()) throw ValidationError("BCE operands differ in size");
    if (pred.empty()) throw ValidationError("BCE of empty operands");
    double total = 0.0;
    for (std::size_t j = 0; j < pred.size(); ++j) {
        const double p = std::clamp(pred[j], bce_epsilon, 1.0 - bce_epsilon);
        const double s = gt[j];
        total += s * std::log(p) + (1.0 - s) * std::log(1.0 - p);
    }
    return -total / static_cast<double>(pred.size());
}

namespace {

std::vector<double> max_rescaled(std::span<const double> values) {
    std::vector<double> out(values.begin(), values.end());
    const double peak = out.empty() ? 0.0 : *std::max_element(out.begin(), out.end());
    if (peak > 0.0)
        for (auto& x : out) x /= peak;
    return out;
}

} // namespace

double bce_loss(const SaliencyVolume& pred, const SaliencyVolume& gt) {
    if (!(pred.dims() == gt.dims())) throw ValidationError("BCE operands differ in shape");
    return binary_cross_entropy(max_rescaled(pred.values()), max_rescaled(gt.values()));
}

double bce_loss(const SaliencyMap& pred, const SaliencyMap& gt) {
    if (pred.height != gt.height || pred.width != gt.width || pred.values.size() != gt.values.size())
        throw ValidationError("BCE operands differ in shape");
    return binary_cross_entropy(max_rescaled(pred.values), max_rescaled(gt.values));
}

} // namespace salvol
