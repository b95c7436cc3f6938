#include "texeval/metrics.hpp"

#include <cmath>
#include <vector>

#include "texeval/error.hpp"

namespace texeval {

namespace {

void require_same_size(int wa, int ha, int wb, int hb, const char* what) {
    if (wa != wb || ha != hb) {
        throw Error(ErrorCode::DimensionMismatch,
                    std::string(what) + " needs equal sizes: " + std::to_string(wa) + "x" +
                        std::to_string(ha) + " vs " + std::to_string(wb) + "x" +
                        std::to_string(hb));
    }
}

std::vector<double> gaussian_window(int size, double sigma) {
    const int r = size / 2;
    std::vector<double> k(static_cast<std::size_t>(size));
    double sum = 0.0;
    for (int i = -r; i <= r; ++i) {
        k[i + r] = std::exp(-(i * i) / (2.0 * sigma * sigma));
        sum += k[i + r];
    }
    for (double& v : k) v /= sum;
    return k;
}

// Five weighted moments per valid window position, filtered separably.
struct Moments {
    std::vector<double> mx, my, xx, yy, xy;
};

Moments local_moments(std::span<const double> a, std::span<const double> b, int w, int h,
                      const std::vector<double>& k) {
    const int n = static_cast<int>(k.size());
    const int ow = w - n + 1;
    const int oh = h - n + 1;

    // Horizontal pass, all rows, valid columns only.
    const std::size_t hsize = static_cast<std::size_t>(h) * ow;
    std::vector<double> hx(hsize), hy(hsize), hxx(hsize), hyy(hsize), hxy(hsize);
    for (int y = 0; y < h; ++y) {
        const double* ra = a.data() + static_cast<std::size_t>(y) * w;
        const double* rb = b.data() + static_cast<std::size_t>(y) * w;
        for (int x = 0; x < ow; ++x) {
            double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
            for (int i = 0; i < n; ++i) {
                const double va = ra[x + i];
                const double vb = rb[x + i];
                sx += k[i] * va;
                sy += k[i] * vb;
                sxx += k[i] * (va * va);
                syy += k[i] * (vb * vb);
                sxy += k[i] * (va * vb);
            }
            const std::size_t o = static_cast<std::size_t>(y) * ow + x;
            hx[o] = sx;
            hy[o] = sy;
            hxx[o] = sxx;
            hyy[o] = syy;
            hxy[o] = sxy;
        }
    }

    const std::size_t osize = static_cast<std::size_t>(oh) * ow;
    Moments m{std::vector<double>(osize), std::vector<double>(osize), std::vector<double>(osize),
              std::vector<double>(osize), std::vector<double>(osize)};
    for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x) {
            double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
            for (int i = 0; i < n; ++i) {
                const std::size_t o = static_cast<std::size_t>(y + i) * ow + x;
                sx += k[i] * hx[o];
                sy += k[i] * hy[o];
                sxx += k[i] * hxx[o];
                syy += k[i] * hyy[o];
                sxy += k[i] * hxy[o];
            }
            const std::size_t o = static_cast<std::size_t>(y) * ow + x;
            m.mx[o] = sx;
            m.my[o] = sy;
            m.xx[o] = sxx;
            m.yy[o] = syy;
            m.xy[o] = sxy;
        }
    }
    return m;
}

}  // namespace

void SsimParams::validate() const {
    if (window < 3 || window % 2 == 0) {
        throw Error(ErrorCode::InvalidArgument, "SSIM window must be odd and >= 3");
    }
    if (!(gaussian_sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "SSIM sigma must be > 0");
    if (!(k1 > 0.0) || !(k2 > 0.0)) throw Error(ErrorCode::InvalidArgument, "SSIM k1, k2 must be > 0");
    if (!(dynamic_range > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "SSIM dynamic range must be > 0");
    }
}

void DistanceVariant::validate() const {
    if (!(binarize_threshold >= 0.0 && binarize_threshold <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "binarize threshold must lie in [0,1]");
    }
}

std::string_view to_string(DistanceKind kind) noexcept {
    switch (kind) {
        case DistanceKind::MaskIoU: return "mask-iou";
        case DistanceKind::WireframeIoU: return "wire-iou";
        case DistanceKind::WireframeSSIM: return "wire-ssim";
    }
    return "unknown";
}

DistanceKind parse_distance_kind(std::string_view name) {
    if (name == "mask-iou") return DistanceKind::MaskIoU;
    if (name == "wire-iou") return DistanceKind::WireframeIoU;
    if (name == "wire-ssim") return DistanceKind::WireframeSSIM;
    throw Error(ErrorCode::ConfigError,
                "unknown variant '" + std::string(name) + "' (mask-iou, wire-iou, wire-ssim)");
}

double ssim(const StructureMap& a, const StructureMap& b, const SsimParams& params) {
    params.validate();
    require_same_size(a.width(), a.height(), b.width(), b.height(), "ssim");
    if (a.width() < params.window || a.height() < params.window) {
        throw Error(ErrorCode::TooSmall, "ssim needs maps of at least " +
                                             std::to_string(params.window) + " pixels per side");
    }

    const auto k = gaussian_window(params.window, params.gaussian_sigma);
    const Moments m = local_moments(a.data(), b.data(), a.width(), a.height(), k);
    const double c1 = (params.k1 * params.dynamic_range) * (params.k1 * params.dynamic_range);
    const double c2 = (params.k2 * params.dynamic_range) * (params.k2 * params.dynamic_range);

    double total = 0.0;
    for (std::size_t i = 0; i < m.mx.size(); ++i) {
        const double mx = m.mx[i];
        const double my = m.my[i];
        const double vx = m.xx[i] - mx * mx;
        const double vy = m.yy[i] - my * my;
        const double cxy = m.xy[i] - mx * my;
        // Written so that identical inputs give numerator == denominator bit for bit.
        const double num = (2.0 * mx * my + c1) * (2.0 * cxy + c2);
        const double den = (mx * mx + my * my + c1) * (vx + vy + c2);
        total += num / den;
    }
    return total / static_cast<double>(m.mx.size());
}

double iou(const BinaryMask& a, const BinaryMask& b) {
    require_same_size(a.width(), a.height(), b.width(), b.height(), "iou");
    std::size_t inter = 0;
    std::size_t uni = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const bool pa = a.at(i);
        const bool pb = b.at(i);
        inter += (pa && pb) ? 1 : 0;
        uni += (pa || pb) ? 1 : 0;
    }
    if (uni == 0) return 1.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

double structure_distance(const StructureMap& src_map, const StructureMap& edit_map,
                          const DistanceVariant& variant, const SsimParams& ssim_params) {
    variant.validate();
    require_same_size(src_map.width(), src_map.height(), edit_map.width(), edit_map.height(),
                      "structure_distance");
    switch (variant.kind) {
        case DistanceKind::WireframeSSIM:
            return ssim(edit_map, src_map, ssim_params);
        case DistanceKind::MaskIoU:
        case DistanceKind::WireframeIoU:
            return iou(binarize(edit_map, variant.binarize_threshold),
                       binarize(src_map, variant.binarize_threshold));
    }
    throw Error(ErrorCode::InvalidArgument, "unhandled distance variant");
}

}  // namespace texeval
