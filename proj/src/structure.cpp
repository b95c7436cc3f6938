#include "texeval/structure.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "texeval/error.hpp"

namespace texeval {

namespace {

// Largest possible Sobel magnitude on [0,1] intensities: |gx|,|gy| <= 4.
const double kSobelMax = 4.0 * std::sqrt(2.0);

/// Reflect-101 border: the edge pixel is the mirror axis and is not repeated.
int mirror(int i, int n) {
    if (n == 1) return 0;
    while (i < 0 || i >= n) {
        if (i < 0) i = -i;
        if (i >= n) i = 2 * (n - 1) - i;
    }
    return i;
}

std::vector<double> gaussian_kernel(int size, double sigma) {
    const int radius = size / 2;
    std::vector<double> k(static_cast<std::size_t>(size));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double w = std::exp(-(i * i) / (2.0 * sigma * sigma));
        k[static_cast<std::size_t>(i + radius)] = w;
        sum += w;
    }
    for (double& w : k) w /= sum;
    return k;
}

std::vector<double> blur(std::span<const double> src, int w, int h, const EdgeParams& params) {
    const auto k = gaussian_kernel(params.blur_kernel, params.blur_sigma);
    const int r = params.blur_kernel / 2;
    std::vector<double> tmp(src.size());
    std::vector<double> out(src.size());
    for (int y = 0; y < h; ++y) {
        const double* row = src.data() + static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -r; i <= r; ++i) acc += k[i + r] * row[mirror(x + i, w)];
            tmp[static_cast<std::size_t>(y) * w + x] = acc;
        }
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -r; i <= r; ++i) {
                acc += k[i + r] * tmp[static_cast<std::size_t>(mirror(y + i, h)) * w + x];
            }
            out[static_cast<std::size_t>(y) * w + x] = acc;
        }
    }
    return out;
}

}  // namespace

std::string_view to_string(StructureKind kind) noexcept {
    switch (kind) {
        case StructureKind::GradientEdge: return "gradient-edge";
        case StructureKind::ExternalWireframe: return "external-wireframe";
        case StructureKind::ExternalMask: return "external-mask";
    }
    return "unknown";
}

StructureMap::StructureMap(int width, int height, std::vector<double> data, StructureKind kind)
    : width_(width), height_(height), data_(std::move(data)), kind_(kind) {
    if (width < 0 || height < 0 ||
        static_cast<std::size_t>(width) * height != data_.size()) {
        throw Error(ErrorCode::InvalidArgument, "structure map buffer does not match its size");
    }
    for (double v : data_) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw Error(ErrorCode::InvalidArgument,
                        "structure value outside [0,1]: " + std::to_string(v));
        }
    }
}

BinaryMask::BinaryMask(int width, int height, std::vector<bool> data)
    : width_(width), height_(height), data_(std::move(data)) {
    if (width < 0 || height < 0 ||
        static_cast<std::size_t>(width) * height != data_.size()) {
        throw Error(ErrorCode::InvalidArgument, "mask buffer does not match its size");
    }
}

std::size_t BinaryMask::count() const noexcept {
    return static_cast<std::size_t>(std::count(data_.begin(), data_.end(), true));
}

void EdgeParams::validate() const {
    if (!(blur_sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "blur_sigma must be > 0");
    if (blur_kernel < 3 || blur_kernel % 2 == 0) {
        throw Error(ErrorCode::InvalidArgument, "blur_kernel must be odd and >= 3");
    }
}

StructureMap extract_gradient_edges(const GrayImage& img, const EdgeParams& params) {
    params.validate();
    if (img.empty()) throw Error(ErrorCode::InvalidArgument, "cannot extract edges of an empty image");

    const int w = img.width();
    const int h = img.height();
    const auto smooth = blur(img.data(), w, h, params);
    auto px = [&](int x, int y) {
        return smooth[static_cast<std::size_t>(mirror(y, h)) * w + mirror(x, w)];
    };

    std::vector<double> mag(smooth.size());
    double peak = 0.0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double gx = (px(x + 1, y - 1) + 2.0 * px(x + 1, y) + px(x + 1, y + 1)) -
                              (px(x - 1, y - 1) + 2.0 * px(x - 1, y) + px(x - 1, y + 1));
            const double gy = (px(x - 1, y + 1) + 2.0 * px(x, y + 1) + px(x + 1, y + 1)) -
                              (px(x - 1, y - 1) + 2.0 * px(x, y - 1) + px(x + 1, y - 1));
            const double m = std::sqrt(gx * gx + gy * gy);
            mag[static_cast<std::size_t>(y) * w + x] = m;
            peak = std::max(peak, m);
        }
    }

    const double scale = params.normalize ? peak : kSobelMax;
    if (scale > 0.0) {
        for (double& m : mag) m = std::min(m / scale, 1.0);
    }
    return {w, h, std::move(mag), StructureKind::GradientEdge};
}

StructureMap load_structure_map(const std::filesystem::path& path, StructureKind kind) {
    const DecodedImage decoded = decode_image(path);
    const RasterImage& img = decoded.image;
    std::vector<double> data(static_cast<std::size_t>(img.width()) * img.height());

    const double step = 1.0 / ((1 << decoded.bit_depth) - 1);
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            const double r = img.at(x, y, 0);
            const double g = img.at(x, y, 1);
            const double b = img.at(x, y, 2);
            const double spread = std::max({r, g, b}) - std::min({r, g, b});
            // Spreads are whole multiples of one level; 1.5 levels separates one from two.
            if (spread > step * 1.5) {
                throw Error(ErrorCode::NotGrayscale,
                            path.string() + " has colour at (" + std::to_string(x) + "," +
                                std::to_string(y) + ")");
            }
            data[static_cast<std::size_t>(y) * img.width() + x] = decoded.stored_gray ? r : (r + g + b) / 3.0;
        }
    }
    return {img.width(), img.height(), std::move(data), kind};
}

BinaryMask binarize(const StructureMap& map, double threshold) {
    std::vector<bool> bits(map.data().size());
    for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = map.data()[i] > threshold;
    return {map.width(), map.height(), std::move(bits)};
}

BinaryMask binarize(const GrayImage& map, double threshold) {
    std::vector<bool> bits(map.data().size());
    for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = map.data()[i] > threshold;
    return {map.width(), map.height(), std::move(bits)};
}

}  // namespace texeval
