#pragma once

// Slow, independent reference implementations.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "salvol/metric.hpp"
#include "salvol/volume.hpp"

namespace salvol::oracle {

inline std::vector<double> kernel_1d(double sigma) {
    const long r = static_cast<long>(std::ceil(4.0 * sigma));
    std::vector<double> k;
    double total = 0.0;
    for (long i = -r; i <= r; ++i) {
        k.push_back(std::exp(-static_cast<double>(i * i) / (2.0 * sigma * sigma)));
        total += k.back();
    }
    for (auto& x : k) x /= total;
    return k;
}

/// Direct 3D convolution with the product kernel, zero padding on t and h;
/// w is circular when `wrap_width`.
inline std::vector<double> dense_blur(const SaliencyVolume& v, GaussianBandwidths bw, bool wrap_width) {
    const auto kt = kernel_1d(bw.sigma_t), kh = kernel_1d(bw.sigma_h), kw = kernel_1d(bw.sigma_w);
    const long rt = long(kt.size() / 2), rh = long(kh.size() / 2), rw = long(kw.size() / 2);
    const long T = long(v.t_bins()), H = long(v.height()), W = long(v.width());

    std::vector<double> out(v.values().size(), 0.0);
    for (long t = 0; t < T; ++t)
        for (long h = 0; h < H; ++h)
            for (long w = 0; w < W; ++w) {
                double acc = 0.0;
                for (long dt = -rt; dt <= rt; ++dt)
                    for (long dh = -rh; dh <= rh; ++dh)
                        for (long dw = -rw; dw <= rw; ++dw) {
                            const long st = t + dt, sh = h + dh;
                            long sw = w + dw;
                            if (st < 0 || st >= T || sh < 0 || sh >= H) continue;
                            if (wrap_width) {
                                sw = ((sw % W) + W) % W;
                            } else if (sw < 0 || sw >= W) {
                                continue;
                            }
                            acc += kt[dt + rt] * kh[dh + rh] * kw[dw + rw] * v.at(st, sh, sw);
                        }
                out[(t * H + h) * W + w] = acc;
            }
    return out;
}

/// Minimum over all injective row-to-column maps, summed in row order.
/// Rows must not exceed columns.
inline double brute_force_assignment(const CostMatrix& c) {
    std::vector<std::size_t> cols(c.cols());
    std::iota(cols.begin(), cols.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double total = 0.0;
        for (std::size_t i = 0; i < c.rows(); ++i) total += c(i, cols[i]);
        best = std::min(best, total);
    } while (std::next_permutation(cols.begin(), cols.end()));
    return best;
}

/// Enumerates every monotone right/down/diagonal path; returns the mean cell
/// cost of the path with the smallest total (fewest cells among equal totals).
inline double enumerate_paths_mean(const CostMatrix& lattice) {
    const std::size_t rows = lattice.rows(), cols = lattice.cols();
    double best_sum = std::numeric_limits<double>::infinity();
    std::size_t best_cells = 0;
    auto walk = [&](auto&& self, std::size_t i, std::size_t j, double sum, std::size_t cells) -> void {
        sum += lattice(i, j);
        ++cells;
        if (i == rows - 1 && j == cols - 1) {
            if (sum < best_sum || (sum == best_sum && cells < best_cells)) {
                best_sum = sum;
                best_cells = cells;
            }
            return;
        }
        if (i + 1 < rows) self(self, i + 1, j, sum, cells);
        if (j + 1 < cols) self(self, i, j + 1, sum, cells);
        if (i + 1 < rows && j + 1 < cols) self(self, i + 1, j + 1, sum, cells);
    };
    walk(walk, 0, 0, 0.0, 0);
    return best_sum / static_cast<double>(best_cells);
}

/// Great-circle angle via unit vectors; independent of the production formula.
inline double chord_angle(SphericalPoint a, SphericalPoint b) {
    const double ax = std::cos(a.lat) * std::cos(a.lon), ay = std::cos(a.lat) * std::sin(a.lon), az = std::sin(a.lat);
    const double bx = std::cos(b.lat) * std::cos(b.lon), by = std::cos(b.lat) * std::sin(b.lon), bz = std::sin(b.lat);
    const double dot = std::clamp(ax * bx + ay * by + az * bz, -1.0, 1.0);
    return std::acos(dot);
}

} // namespace salvol::oracle
