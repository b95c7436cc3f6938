#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <unistd.h>

#include "texeval/error.hpp"
#include "texeval/image.hpp"
#include "texeval/structure.hpp"

namespace testing {

// Scratch directory removed on scope exit.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
        path_ = std::filesystem::temp_directory_path() /
                ("texeval-test-" + std::to_string(::getpid()) + "-" + std::to_string(stamp) + "-" +
                 std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    [[nodiscard]] const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

// Code of the Error thrown by f, or nullopt when f returns normally.
inline std::optional<texeval::ErrorCode> code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const texeval::Error& e) {
        return e.code();
    }
    return std::nullopt;
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline texeval::StructureMap random_map(std::mt19937_64& rng, int w, int h) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> v(static_cast<std::size_t>(w) * h);
    for (auto& x : v) x = u(rng);
    return {w, h, std::move(v), texeval::StructureKind::ExternalWireframe};
}

// Smooth random RGB scene: a few blurred rectangles so edges exist.
inline texeval::RasterImage random_scene(std::mt19937_64& rng, int w, int h) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> px(static_cast<std::size_t>(w) * h * 3, 0.5);
    for (int r = 0; r < 6; ++r) {
        const int x0 = static_cast<int>(u(rng) * w), y0 = static_cast<int>(u(rng) * h);
        const int x1 = std::min(w, x0 + 1 + static_cast<int>(u(rng) * w / 2));
        const int y1 = std::min(h, y0 + 1 + static_cast<int>(u(rng) * h / 2));
        const double c[3] = {u(rng), u(rng), u(rng)};
        for (int y = y0; y < y1; ++y)
            for (int x = x0; x < x1; ++x)
                for (int k = 0; k < 3; ++k) px[(static_cast<std::size_t>(y) * w + x) * 3 + k] = c[k];
    }
    return {w, h, 3, std::move(px)};
}

}  // namespace testing
