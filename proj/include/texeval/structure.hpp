#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "texeval/image.hpp"

namespace texeval {

enum class StructureKind { GradientEdge, ExternalWireframe, ExternalMask };

std::string_view to_string(StructureKind kind) noexcept;

/// Per-pixel structural representation E(I): edge strength or mask coverage in [0,1].
class StructureMap {
public:
    StructureMap() = default;
    StructureMap(int width, int height, std::vector<double> data, StructureKind kind);

    [[nodiscard]] int width() const noexcept { return width_; }
    [[nodiscard]] int height() const noexcept { return height_; }
    [[nodiscard]] StructureKind kind() const noexcept { return kind_; }
    [[nodiscard]] std::span<const double> data() const noexcept { return data_; }
    [[nodiscard]] double at(int x, int y) const {
        return data_[static_cast<std::size_t>(y) * width_ + x];
    }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> data_;
    StructureKind kind_ = StructureKind::GradientEdge;
};

class BinaryMask {
public:
    BinaryMask() = default;
    BinaryMask(int width, int height, std::vector<bool> data);

    [[nodiscard]] int width() const noexcept { return width_; }
    [[nodiscard]] int height() const noexcept { return height_; }
    [[nodiscard]] bool at(int x, int y) const {
        return data_[static_cast<std::size_t>(y) * width_ + x];
    }
    [[nodiscard]] bool at(std::size_t i) const { return data_[i]; }
    [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
    [[nodiscard]] std::size_t count() const noexcept;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<bool> data_;
};

struct EdgeParams {
    double blur_sigma = 1.0;
    int blur_kernel = 5;
    bool normalize = true;

    /// Throws InvalidArgument unless sigma > 0 and the kernel is odd and >= 3.
    void validate() const;
};

/// Built-in deterministic wireframe stand-in: Gaussian blur (mirror borders),
/// Sobel gradient magnitude, optional normalization by the map maximum.
StructureMap extract_gradient_edges(const GrayImage& img, const EdgeParams& params = {});

/// Ingests an externally computed wireframe or mask (white = structure).
/// Throws FileNotFound, DecodeError or NotGrayscale.
StructureMap load_structure_map(const std::filesystem::path& path, StructureKind kind);

/// Pixel is set iff value > threshold.
BinaryMask binarize(const StructureMap& map, double threshold);
BinaryMask binarize(const GrayImage& map, double threshold);

}  // namespace texeval
