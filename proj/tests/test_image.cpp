#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "texeval/error.hpp"
#include "texeval/image.hpp"

using namespace texeval;

TEST_CASE("raster invariants") {
    CHECK_THROWS_AS(RasterImage(2, 2, 3, std::vector<double>(11, 0.0)), Error);
    CHECK_THROWS_AS(RasterImage(1, 1, 3, {0.0, 1.5, 0.0}), Error);
    CHECK_THROWS_AS(RasterImage(1, 1, 2, {0.0, 0.0}), Error);
    const auto img = RasterImage::filled(3, 2, 4, 0.25);
    CHECK(img.at(2, 1, 3) == 0.25);
}

TEST_CASE("png round trip keeps 8-bit levels") {
    testing::TempDir dir;
    const double v = 128.0 / 255.0;
    save_png(dir / "g.png", RasterImage::filled(4, 3, 3, v));
    const auto decoded = decode_image(dir / "g.png");
    CHECK(decoded.bit_depth == 8);
    CHECK(decoded.image.width() == 4);
    CHECK(decoded.image.height() == 3);
    for (double x : decoded.image.data()) CHECK(x == doctest::Approx(v).epsilon(1e-12));
}

TEST_CASE("gray files expand to three equal channels") {
    testing::TempDir dir;
    save_png(dir / "g.png", GrayImage(2, 1, {0.0, 1.0}));
    const auto decoded = decode_image(dir / "g.png");
    CHECK(decoded.stored_gray);
    CHECK(decoded.image.channels() == 3);
    CHECK(decoded.image.at(1, 0, 0) == 1.0);
    CHECK(decoded.image.at(1, 0, 2) == 1.0);
    CHECK(decoded.image.at(0, 0, 1) == 0.0);
}

TEST_CASE("channel order survives decode") {
    testing::TempDir dir;
    save_png(dir / "c.png", RasterImage(1, 1, 3, {1.0, 0.0, 0.0}));
    const auto img = load_image(dir / "c.png");
    CHECK(img.at(0, 0, 0) == 1.0);
    CHECK(img.at(0, 0, 2) == 0.0);
}

TEST_CASE("decode errors") {
    testing::TempDir dir;
    try {
        load_image(dir / "missing.png");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::FileNotFound);
    }
    testing::write_file(dir / "junk.png", "not an image");
    try {
        load_image(dir / "junk.png");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DecodeError);
    }
}

TEST_CASE("grayscale uses luma weights") {
    const auto g = to_grayscale(RasterImage(1, 1, 3, {1.0, 0.0, 0.0}));
    CHECK(g.at(0, 0) == doctest::Approx(0.299));
    const auto white = to_grayscale(RasterImage::filled(2, 2, 3, 1.0));
    for (double v : white.data()) CHECK(v <= 1.0);
}

TEST_CASE("difference map takes the max channel and ignores alpha") {
    const RasterImage a(1, 1, 4, {0.2, 0.5, 0.5, 1.0});
    const RasterImage b(1, 1, 4, {0.3, 0.1, 0.5, 0.0});
    CHECK(difference_map(a, b).at(0, 0) == doctest::Approx(0.4));
    try {
        difference_map(RasterImage::filled(2, 2, 3, 0), RasterImage::filled(2, 3, 3, 0));
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DimensionMismatch);
    }
}
