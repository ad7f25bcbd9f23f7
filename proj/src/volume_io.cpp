#include "salvol/volume_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <memory>

#include <png.h>

namespace salvol {

namespace {

template <class U>
void put_le(std::string& out, U value) {
    for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
}

template <class U>
U get_le(std::string_view bytes, std::size_t offset) {
    U value = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i)
        value |= static_cast<U>(static_cast<unsigned char>(bytes[offset + i])) << (8 * i);
    return value;
}

} // namespace

std::string encode_volume(const SaliencyVolume& v) {
    const auto& d = v.dims();
    for (auto n : {d.t_bins, d.height, d.width})
        if (n > 0xFFFFFFFFu) throw ValidationError("volume dimension does not fit in 32 bits");

    std::string out;
    out.reserve(volume_header_size + 4 * d.size());
    out.append(volume_magic);
    put_le(out, static_cast<std::uint32_t>(d.t_bins));
    put_le(out, static_cast<std::uint32_t>(d.height));
    put_le(out, static_cast<std::uint32_t>(d.width));
    put_le(out, std::bit_cast<std::uint64_t>(v.dt_s()));
    for (double x : v.values()) put_le(out, std::bit_cast<std::uint32_t>(static_cast<float>(x)));
    return out;
}

SaliencyVolume decode_volume(std::string_view bytes) {
    if (bytes.size() < volume_header_size || bytes.substr(0, 8) != volume_magic)
        throw ParseError(0, "not a SALVOL1 volume");
    VolumeDims d{get_le<std::uint32_t>(bytes, 8), get_le<std::uint32_t>(bytes, 12),
                 get_le<std::uint32_t>(bytes, 16)};
    const double dt = std::bit_cast<double>(get_le<std::uint64_t>(bytes, 20));
    if (d.t_bins == 0 || d.height == 0 || d.width == 0) throw ParseError(0, "volume has a zero dimension");
    if (bytes.size() != volume_header_size + 4 * d.size())
        throw ParseError(0, "volume payload is " + std::to_string(bytes.size() - volume_header_size) +
                                " bytes, expected " + std::to_string(4 * d.size()));

    std::vector<double> values(d.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        values[i] = std::bit_cast<float>(get_le<std::uint32_t>(bytes, volume_header_size + 4 * i));
    return SaliencyVolume(d, dt, std::move(values));
}

void write_volume(const std::string& path, const SaliencyVolume& v) { write_file(path, encode_volume(v)); }

SaliencyVolume read_volume(const std::string& path) { return decode_volume(read_file(path)); }

SaliencyVolume to_file_precision(const SaliencyVolume& v) {
    std::vector<double> values(v.values().begin(), v.values().end());
    for (auto& x : values) x = static_cast<float>(x);
    return SaliencyVolume(v.dims(), v.dt_s(), std::move(values));
}

GrayImage to_heatmap(std::span<const double> values, std::size_t height, std::size_t width) {
    if (values.size() != height * width) throw ValidationError("heatmap size mismatch");
    GrayImage img{height, width, std::vector<std::uint8_t>(values.size(), 0)};
    const double peak = values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
    if (peak <= 0.0) return img;
    for (std::size_t i = 0; i < values.size(); ++i)
        img.pixels[i] = static_cast<std::uint8_t>(std::lround(std::clamp(values[i] / peak, 0.0, 1.0) * 255.0));
    return img;
}

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// Keep libpng quiet; its message goes into the exception instead.
thread_local std::string png_message;

[[noreturn]] void png_error_to_jump(png_structp png, png_const_charp msg) {
    png_message = msg ? msg : "unknown error";
    png_longjmp(png, 1);
}

void png_ignore_warning(png_structp, png_const_charp) {}

} // namespace

void write_png(const std::string& path, const GrayImage& img) {
    if (img.pixels.size() != img.height * img.width || img.height == 0 || img.width == 0)
        throw ValidationError("cannot write an empty or inconsistent image");
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw Error("cannot open '" + path + "' for writing");

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_to_jump, png_ignore_warning);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw Error("libpng initialisation failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw Error("libpng failed writing '" + path + "': " + png_message);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width), static_cast<png_uint_32>(img.height), 8,
                 PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (std::size_t r = 0; r < img.height; ++r)
        png_write_row(png, const_cast<png_bytep>(img.pixels.data() + r * img.width));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

GrayImage read_png(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw Error("cannot open '" + path + "' for reading");

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_to_jump, png_ignore_warning);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error("libpng initialisation failed");
    }
    GrayImage img;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw ParseError(0, "libpng failed reading '" + path + "': " + png_message);
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);
    if (png_get_color_type(png, info) != PNG_COLOR_TYPE_GRAY || png_get_bit_depth(png, info) != 8) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw ParseError(0, "'" + path + "' is not an 8-bit grayscale PNG");
    }
    img.width = png_get_image_width(png, info);
    img.height = png_get_image_height(png, info);
    img.pixels.resize(img.width * img.height);
    for (std::size_t r = 0; r < img.height; ++r) png_read_row(png, img.pixels.data() + r * img.width, nullptr);
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

} // namespace salvol
