#include "texeval/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "texeval/error.hpp"

namespace texeval {

namespace {

void check_intensities(std::span<const double> data) {
    for (double v : data) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw Error(ErrorCode::InvalidArgument,
                        "intensity outside [0,1]: " + std::to_string(v));
        }
    }
}

void check_dims(int width, int height, std::size_t expected, std::size_t actual) {
    if (width < 0 || height < 0 || expected != actual) {
        throw Error(ErrorCode::InvalidArgument,
                    "buffer of " + std::to_string(actual) + " values does not match " +
                        std::to_string(width) + "x" + std::to_string(height));
    }
}

double channel_value(const cv::Mat& mat, int y, int x, int c) {
    const int n = mat.channels();
    if (mat.depth() == CV_16U) {
        return mat.ptr<std::uint16_t>(y)[x * n + c] / 65535.0;
    }
    return mat.ptr<std::uint8_t>(y)[x * n + c] / 255.0;
}

std::uint8_t quantize8(double v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

void write_mat(const std::filesystem::path& path, const cv::Mat& mat) {
    bool ok = false;
    try {
        ok = cv::imwrite(path.string(), mat);
    } catch (const cv::Exception& e) {
        throw Error(ErrorCode::EncodeError, path.string() + ": " + e.what());
    }
    if (!ok) throw Error(ErrorCode::EncodeError, "cannot write " + path.string());
}

}  // namespace

RasterImage::RasterImage(int width, int height, int channels, std::vector<double> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
    if (channels != 3 && channels != 4) {
        throw Error(ErrorCode::InvalidArgument, "channels must be 3 or 4");
    }
    check_dims(width, height,
               static_cast<std::size_t>(width) * height * channels, data_.size());
    check_intensities(data_);
}

RasterImage RasterImage::filled(int width, int height, int channels, double value) {
    return {width, height, channels,
            std::vector<double>(static_cast<std::size_t>(width) * height * channels, value)};
}

GrayImage::GrayImage(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
    check_dims(width, height, static_cast<std::size_t>(width) * height, data_.size());
    check_intensities(data_);
}

GrayImage GrayImage::filled(int width, int height, double value) {
    return {width, height, std::vector<double>(static_cast<std::size_t>(width) * height, value)};
}

DecodedImage decode_image(const std::filesystem::path& path) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) {
        throw Error(ErrorCode::FileNotFound, "no such file: " + path.string());
    }
    cv::Mat mat;
    try {
        mat = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
    } catch (const cv::Exception& e) {
        throw Error(ErrorCode::DecodeError, path.string() + ": " + e.what());
    }
    if (mat.empty()) {
        throw Error(ErrorCode::DecodeError, "cannot decode " + path.string());
    }
    if (mat.depth() != CV_8U && mat.depth() != CV_16U) {
        throw Error(ErrorCode::DecodeError, "unsupported sample depth in " + path.string());
    }

    const int n = mat.channels();
    if (n < 1 || n > 4) {
        throw Error(ErrorCode::DecodeError, "unsupported channel count in " + path.string());
    }
    const bool gray = n <= 2;
    const bool alpha = n == 2 || n == 4;
    const int out_channels = alpha ? 4 : 3;

    std::vector<double> data(static_cast<std::size_t>(mat.cols) * mat.rows * out_channels);
    std::size_t i = 0;
    for (int y = 0; y < mat.rows; ++y) {
        for (int x = 0; x < mat.cols; ++x) {
            if (gray) {
                const double v = channel_value(mat, y, x, 0);
                data[i++] = v;
                data[i++] = v;
                data[i++] = v;
                if (alpha) data[i++] = channel_value(mat, y, x, 1);
            } else {
                // OpenCV stores BGR(A).
                data[i++] = channel_value(mat, y, x, 2);
                data[i++] = channel_value(mat, y, x, 1);
                data[i++] = channel_value(mat, y, x, 0);
                if (alpha) data[i++] = channel_value(mat, y, x, 3);
            }
        }
    }
    return {RasterImage(mat.cols, mat.rows, out_channels, std::move(data)),
            mat.depth() == CV_16U ? 16 : 8, gray};
}

RasterImage load_image(const std::filesystem::path& path) { return decode_image(path).image; }

void save_png(const std::filesystem::path& path, const RasterImage& img) {
    const int n = img.channels();
    cv::Mat mat(img.height(), img.width(), n == 4 ? CV_8UC4 : CV_8UC3);
    for (int y = 0; y < img.height(); ++y) {
        auto* row = mat.ptr<std::uint8_t>(y);
        for (int x = 0; x < img.width(); ++x) {
            row[x * n + 0] = quantize8(img.at(x, y, 2));
            row[x * n + 1] = quantize8(img.at(x, y, 1));
            row[x * n + 2] = quantize8(img.at(x, y, 0));
            if (n == 4) row[x * n + 3] = quantize8(img.at(x, y, 3));
        }
    }
    write_mat(path, mat);
}

void save_png(const std::filesystem::path& path, const GrayImage& img) {
    cv::Mat mat(img.height(), img.width(), CV_8UC1);
    for (int y = 0; y < img.height(); ++y) {
        auto* row = mat.ptr<std::uint8_t>(y);
        for (int x = 0; x < img.width(); ++x) row[x] = quantize8(img.at(x, y));
    }
    write_mat(path, mat);
}

GrayImage to_grayscale(const RasterImage& img) {
    const int n = img.channels();
    const auto src = img.data();
    std::vector<double> out(static_cast<std::size_t>(img.width()) * img.height());
    for (std::size_t p = 0; p < out.size(); ++p) {
        const double* px = src.data() + p * n;
        out[p] = std::clamp(0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2], 0.0, 1.0);
    }
    return {img.width(), img.height(), std::move(out)};
}

GrayImage difference_map(const RasterImage& a, const RasterImage& b) {
    if (a.width() != b.width() || a.height() != b.height() || a.channels() != b.channels()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "difference_map needs aligned images: " + std::to_string(a.width()) + "x" +
                        std::to_string(a.height()) + "x" + std::to_string(a.channels()) +
                        " vs " + std::to_string(b.width()) + "x" + std::to_string(b.height()) +
                        "x" + std::to_string(b.channels()));
    }
    const int n = a.channels();
    const auto da = a.data();
    const auto db = b.data();
    std::vector<double> out(static_cast<std::size_t>(a.width()) * a.height());
    for (std::size_t p = 0; p < out.size(); ++p) {
        double m = 0.0;
        // Alpha is ignored here as everywhere else.
        for (int c = 0; c < 3; ++c) m = std::max(m, std::abs(da[p * n + c] - db[p * n + c]));
        out[p] = m;
    }
    return {a.width(), a.height(), std::move(out)};
}

}  // namespace texeval
