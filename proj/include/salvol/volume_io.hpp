#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "salvol/volume.hpp"

namespace salvol {

// SALVOL1 layout (little-endian throughout):
//   8 bytes  magic "SALVOL1\0"
//   3 x u32  T, H, W
//   f64      dt_s
//   T*H*W    f32 values in (t, h, w) row-major order
inline constexpr std::string_view volume_magic{"SALVOL1\0", 8};
inline constexpr std::size_t volume_header_size = 8 + 3 * 4 + 8;

/// Values are narrowed to f32 on encode.
std::string encode_volume(const SaliencyVolume& v);
SaliencyVolume decode_volume(std::string_view bytes);

void write_volume(const std::string& path, const SaliencyVolume& v);
SaliencyVolume read_volume(const std::string& path);

/// The volume as it reads back from a SALVOL1 file.
SaliencyVolume to_file_precision(const SaliencyVolume& v);

/// 8-bit grayscale image, row-major.
struct GrayImage {
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<std::uint8_t> pixels;

    bool operator==(const GrayImage&) const = default;
};

/// Linear scaling with the maximum mapped to 255. An all-zero grid stays black.
GrayImage to_heatmap(std::span<const double> values, std::size_t height, std::size_t width);

void write_png(const std::string& path, const GrayImage& img);
GrayImage read_png(const std::string& path);

} // namespace salvol
