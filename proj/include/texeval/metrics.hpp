#pragma once

#include <string>
#include <string_view>

#include "texeval/structure.hpp"

namespace texeval {

/// Windowed SSIM parameters. Defaults are the standard 2004 formulation.
struct SsimParams {
    int window = 11;
    double gaussian_sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 1.0;

    void validate() const;
};

enum class DistanceKind { MaskIoU, WireframeIoU, WireframeSSIM };

struct DistanceVariant {
    DistanceKind kind = DistanceKind::WireframeSSIM;
    /// Used by the IoU variants only.
    double binarize_threshold = 0.2;

    void validate() const;
};

/// CLI spelling: mask-iou, wire-iou, wire-ssim.
std::string_view to_string(DistanceKind kind) noexcept;
DistanceKind parse_distance_kind(std::string_view name);

/// Mean local SSIM over all fully interior window positions (stride 1, no padding).
/// Throws DimensionMismatch or TooSmall.
double ssim(const StructureMap& a, const StructureMap& b, const SsimParams& params = {});

/// |a and b| / |a or b|; two empty masks score 1. Throws DimensionMismatch.
double iou(const BinaryMask& a, const BinaryMask& b);

/// Raw similarity s between source and edited structure, higher is more similar.
double structure_distance(const StructureMap& src_map, const StructureMap& edit_map,
                          const DistanceVariant& variant, const SsimParams& ssim_params = {});

}  // namespace texeval
