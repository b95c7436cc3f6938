#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace texeval {

/// Decoded colour image, row-major interleaved, intensities in [0,1].
class RasterImage {
public:
    RasterImage() = default;
    /// Throws InvalidArgument if the buffer size or any intensity violates the invariants.
    RasterImage(int width, int height, int channels, std::vector<double> data);
    /// Uniform image with every channel set to `value`.
    static RasterImage filled(int width, int height, int channels, double value);

    [[nodiscard]] int width() const noexcept { return width_; }
    [[nodiscard]] int height() const noexcept { return height_; }
    [[nodiscard]] int channels() const noexcept { return channels_; }
    [[nodiscard]] bool empty() const noexcept { return data_.empty(); }
    [[nodiscard]] std::span<const double> data() const noexcept { return data_; }

    [[nodiscard]] double at(int x, int y, int c) const {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
    }

private:
    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<double> data_;
};

/// Single-channel luminance image, row-major, values in [0,1].
class GrayImage {
public:
    GrayImage() = default;
    GrayImage(int width, int height, std::vector<double> data);
    static GrayImage filled(int width, int height, double value);

    [[nodiscard]] int width() const noexcept { return width_; }
    [[nodiscard]] int height() const noexcept { return height_; }
    [[nodiscard]] bool empty() const noexcept { return data_.empty(); }
    [[nodiscard]] std::span<const double> data() const noexcept { return data_; }
    [[nodiscard]] double at(int x, int y) const {
        return data_[static_cast<std::size_t>(y) * width_ + x];
    }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> data_;
};

/// Decoded file plus the quantization it was stored with.
struct DecodedImage {
    RasterImage image;
    int bit_depth = 8;
    /// True when the file itself had a single luminance channel.
    bool stored_gray = false;
};

/// PNG or JPEG, 8 or 16 bit. Gray files are expanded to three equal channels.
/// Throws FileNotFound or DecodeError.
DecodedImage decode_image(const std::filesystem::path& path);
RasterImage load_image(const std::filesystem::path& path);

/// Writes an 8-bit PNG (values rounded to the nearest level). Used by tools and tests.
void save_png(const std::filesystem::path& path, const RasterImage& img);
void save_png(const std::filesystem::path& path, const GrayImage& img);

GrayImage to_grayscale(const RasterImage& img);

/// Per-pixel max over channels of |a - b|. Throws DimensionMismatch.
GrayImage difference_map(const RasterImage& a, const RasterImage& b);

}  // namespace texeval
