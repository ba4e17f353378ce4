#include <cmath>
#include <cstdint>
#include <vector>

#include <doctest.h>

#include "facebench/core/rng.hpp"
#include "facebench/imaging/codec.hpp"
#include "facebench/imaging/geometry.hpp"
#include "facebench/imaging/image.hpp"

using namespace facebench;

namespace {

// Hand-assembled fixtures so decode tests do not depend on our own encoder.
const std::vector<std::uint8_t> kWhitePng = {137, 80, 78, 71, 13, 10, 26, 10, 0, 0, 0, 13, 73,
    72, 68, 82, 0, 0, 0, 1, 0, 0, 0, 1, 8, 2, 0, 0, 0, 144, 119, 83, 222, 0, 0, 0, 12, 73, 68,
    65, 84, 120, 156, 99, 248, 255, 255, 63, 0, 5, 254, 2, 254, 13, 239, 70, 184, 0, 0, 0, 0,
    73, 69, 78, 68, 174, 66, 96, 130};

const std::vector<std::uint8_t> kBlackPng = {137, 80, 78, 71, 13, 10, 26, 10, 0, 0, 0, 13, 73,
    72, 68, 82, 0, 0, 0, 1, 0, 0, 0, 1, 8, 2, 0, 0, 0, 144, 119, 83, 222, 0, 0, 0, 12, 73, 68,
    65, 84, 120, 156, 99, 96, 96, 96, 0, 0, 0, 4, 0, 1, 246, 23, 56, 85, 0, 0, 0, 0, 73, 69,
    78, 68, 174, 66, 96, 130};

const std::vector<std::uint8_t> kGrayPng = {137, 80, 78, 71, 13, 10, 26, 10, 0, 0, 0, 13, 73,
    72, 68, 82, 0, 0, 0, 1, 0, 0, 0, 1, 8, 0, 0, 0, 0, 58, 126, 155, 85, 0, 0, 0, 10, 73, 68,
    65, 84, 120, 156, 99, 104, 0, 0, 0, 130, 0, 129, 119, 205, 114, 182, 0, 0, 0, 0, 73, 69,
    78, 68, 174, 66, 96, 130};

Image random_image(int w, int h, std::uint64_t seed) {
    Rng rng(seed);
    Image img(w, h);
    for (float& v : img.data()) v = static_cast<float>(rng.uniform());
    return img;
}

Placement full_placement(int w, int h) {
    Placement p;
    p.mask = Mask(w, h, 1.0);
    return p;
}

} // namespace

TEST_CASE("decode maps 8-bit extremes to the unit range") {
    const Image white = decode_image(kWhitePng);
    CHECK(white.width() == 1);
    CHECK(white.height() == 1);
    CHECK(white.at(0, 0, 0) == 1.0f);
    CHECK(white.at(0, 0, 1) == 1.0f);
    CHECK(white.at(0, 0, 2) == 1.0f);

    const Image black = decode_image(kBlackPng);
    CHECK(black.at(0, 0, 0) == 0.0f);
    CHECK(black.at(0, 0, 1) == 0.0f);
    CHECK(black.at(0, 0, 2) == 0.0f);
}

TEST_CASE("grayscale decode replicates to three channels") {
    const Image gray = decode_image(kGrayPng);
    CHECK(gray.at(0, 0, 0) == doctest::Approx(128.0 / 255.0).epsilon(1e-6));
    CHECK(gray.at(0, 0, 0) == gray.at(0, 0, 1));
    CHECK(gray.at(0, 0, 1) == gray.at(0, 0, 2));
}

TEST_CASE("png round trip is lossless at 8-bit resolution") {
    const Image img = random_image(7, 5, 11);
    const Image back = decode_image(encode_png(img));
    REQUIRE(back.same_dims(img));
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            for (int c = 0; c < 3; ++c) {
                const float expected = Image::dequantize(Image::quantize(img.at(x, y, c)));
                CHECK(back.at(x, y, c) == expected);
            }
        }
    }
}

TEST_CASE("jpeg round trip stays within 4/255 per pixel") {
    const Image img = random_image(2, 2, 23);
    const Image back = decode_image(encode_jpeg(img));
    REQUIRE(back.same_dims(img));
    for (int y = 0; y < 2; ++y) {
        for (int x = 0; x < 2; ++x) {
            for (int c = 0; c < 3; ++c) {
                CHECK(std::fabs(back.at(x, y, c) - img.at(x, y, c)) <= 4.0 / 255.0 + 1e-6);
            }
        }
    }
}

TEST_CASE("malformed streams raise decode errors") {
    CHECK_THROWS_AS(decode_image({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}), DecodeError);
    std::vector<std::uint8_t> truncated(kWhitePng.begin(), kWhitePng.begin() + 20);
    CHECK_THROWS_AS(decode_image(truncated), DecodeError);
    CHECK_THROWS_AS(decode_image({}), DecodeError);
}

TEST_CASE("rgba decode preserves alpha and defaults it to opaque") {
    Image img(3, 2);
    std::vector<float> alpha = {0.0f, 0.5f, 1.0f, 0.25f, 0.75f, 1.0f};
    for (int i = 0; i < 6; ++i) img.data()[i * 3] = static_cast<float>(i) / 6.0f;
    const RgbaImage back = decode_image_rgba(encode_png_rgba(img, alpha));
    REQUIRE(back.rgb.same_dims(img));
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        CHECK(back.alpha[i] == doctest::Approx(Image::dequantize(Image::quantize(alpha[i]))));
    }
    const RgbaImage opaque = decode_image_rgba(kWhitePng);
    CHECK(opaque.alpha == std::vector<float>{1.0f});
}

TEST_CASE("blend formula evaluates the documented example") {
    // src 200/255 under asset 100/255 at alpha 0.95 lands on 105/255.
    Image src(1, 1);
    src.set(0, 0, 200.0 / 255.0, 200.0 / 255.0, 200.0 / 255.0);
    Image asset(1, 1);
    asset.set(0, 0, 100.0 / 255.0, 100.0 / 255.0, 100.0 / 255.0);
    const Image out = alpha_blend(src, asset, full_placement(1, 1), 0.95);
    for (int c = 0; c < 3; ++c) {
        CHECK(out.at(0, 0, c) == doctest::Approx(105.0 / 255.0).epsilon(1e-6));
    }
}

TEST_CASE("blend extremes: alpha one copies the asset, alpha zero copies the source") {
    const Image src = random_image(6, 4, 3);
    const Image asset = random_image(6, 4, 4);
    const Placement place = full_placement(6, 4);

    const Image covered = alpha_blend(src, asset, place, 1.0);
    const Image untouched = alpha_blend(src, asset, place, 0.0);
    for (std::size_t i = 0; i < src.data().size(); ++i) {
        CHECK(covered.data()[i] == asset.data()[i]);
        CHECK(untouched.data()[i] == src.data()[i]);
    }
}

TEST_CASE("blend leaves zero-mask pixels bit-exact and stays in bounds") {
    const Image src = random_image(8, 8, 5);
    const Image asset = random_image(8, 8, 6);
    Placement place = full_placement(8, 8);
    for (int y = 0; y < 8; ++y) {
        for (int x = 0; x < 4; ++x) place.mask.at(x, y) = 0.0f; // left half uncovered
    }
    const Image out = alpha_blend(src, asset, place, 0.8);
    for (int y = 0; y < 8; ++y) {
        for (int x = 0; x < 8; ++x) {
            for (int c = 0; c < 3; ++c) {
                if (x < 4) CHECK(out.at(x, y, c) == src.at(x, y, c));
                CHECK(out.at(x, y, c) >= 0.0f);
                CHECK(out.at(x, y, c) <= 1.0f);
            }
        }
    }
}

TEST_CASE("blend rejects bad masks and alphas") {
    const Image src = random_image(4, 4, 7);
    const Image asset = random_image(4, 4, 8);
    Placement wrong;
    wrong.mask = Mask(3, 4, 1.0);
    CHECK_THROWS_AS(alpha_blend(src, asset, wrong, 0.5), ContractViolation);
    CHECK_THROWS_AS(alpha_blend(src, asset, full_placement(4, 4), 1.5), ContractViolation);
    CHECK_THROWS_AS(alpha_blend(src, asset, full_placement(4, 4), -0.1), ContractViolation);
}

TEST_CASE("deblend inverts the worked example") {
    Image blended(1, 1);
    blended.set(0, 0, 105.0 / 255.0, 105.0 / 255.0, 105.0 / 255.0);
    Image asset(1, 1);
    asset.set(0, 0, 100.0 / 255.0, 100.0 / 255.0, 100.0 / 255.0);
    const Image back = analytic_deblend(blended, asset, full_placement(1, 1), 0.95);
    for (int c = 0; c < 3; ++c) {
        CHECK(back.at(0, 0, c) == doctest::Approx(200.0 / 255.0).epsilon(1e-4));
    }
}

TEST_CASE("deblend is exact in real arithmetic at alpha one half") {
    const Image src = random_image(5, 5, 9);
    const Image asset = random_image(5, 5, 10);
    const Placement place = full_placement(5, 5);
    const Image blended = alpha_blend(src, asset, place, 0.5);
    const Image back = analytic_deblend(blended, asset, place, 0.5);
    for (std::size_t i = 0; i < src.data().size(); ++i) {
        CHECK(back.data()[i] == doctest::Approx(src.data()[i]).epsilon(1e-5));
    }
}

TEST_CASE("deblend over an 8-bit round trip stays within 10/255 at alpha 0.95") {
    // Exhaustive over all 256 source values against one asset value.
    const double alpha = 0.95;
    const double asset_value = 100.0 / 255.0;
    Image asset(1, 1);
    asset.set(0, 0, asset_value, asset_value, asset_value);
    const Placement place = full_placement(1, 1);
    int worst_lsb = 0;
    double worst_real = 0.0;
    for (int s = 0; s < 256; ++s) {
        Image src(1, 1);
        const double v = s / 255.0;
        src.set(0, 0, v, v, v);
        Image blended = alpha_blend(src, asset, place, alpha);
        // Quantize to 8 bits as a file write would.
        for (float& f : blended.data()) f = Image::dequantize(Image::quantize(f));
        const Image back = analytic_deblend(blended, asset, place, alpha);
        worst_lsb = std::max(worst_lsb, std::abs(static_cast<int>(Image::quantize(back.at(0, 0, 0))) - s));
        worst_real = std::max(worst_real, std::fabs(static_cast<double>(back.at(0, 0, 0)) - v));
    }
    // The bound is tight: a blend landing exactly on a half step recovers with
    // error of exactly ten steps, so measure at 8-bit resolution.
    CHECK(worst_lsb <= 10);
    CHECK(worst_real <= 10.0 / 255.0 + 1e-5);
}

TEST_CASE("deblend refuses non-invertible alphas") {
    const Image img = random_image(2, 2, 12);
    CHECK_THROWS_AS(analytic_deblend(img, img, full_placement(2, 2), 1.0), ContractViolation);
    CHECK_THROWS_AS(analytic_deblend(img, img, full_placement(2, 2), -0.5), ContractViolation);
}

TEST_CASE("crop_resize full box at native size is the identity") {
    const Image img = random_image(6, 6, 14);
    const Image out = crop_resize(img, Rect{0, 0, 6, 6}, 6);
    for (std::size_t i = 0; i < img.data().size(); ++i) {
        CHECK(out.data()[i] == doctest::Approx(img.data()[i]).epsilon(1e-6));
    }
}

TEST_CASE("crop_resize preserves constant colors") {
    Image img(9, 9);
    for (int y = 0; y < 9; ++y) {
        for (int x = 0; x < 9; ++x) img.set(x, y, 0.25, 0.5, 0.75);
    }
    const Image out = crop_resize(img, Rect{1.5, 2.0, 7.25, 8.0}, 4);
    for (int y = 0; y < 4; ++y) {
        for (int x = 0; x < 4; ++x) {
            CHECK(out.at(x, y, 0) == doctest::Approx(0.25).epsilon(1e-6));
            CHECK(out.at(x, y, 1) == doctest::Approx(0.5).epsilon(1e-6));
            CHECK(out.at(x, y, 2) == doctest::Approx(0.75).epsilon(1e-6));
        }
    }
}

TEST_CASE("crop_resize matches a hand-evaluated bilinear oracle on a 4x4 gradient") {
    Image img(4, 4);
    for (int y = 0; y < 4; ++y) {
        for (int x = 0; x < 4; ++x) {
            const double v = (x + 4.0 * y) / 16.0;
            img.set(x, y, v, v, v);
        }
    }
    const Image out = crop_resize(img, Rect{0, 0, 4, 4}, 2);
    // Output pixel centers map to source coordinates 0.5 and 2.5 on each axis;
    // the oracle below is the textbook two-axis linear interpolation written
    // out directly on the gradient values.
    auto oracle = [&](double sx, double sy) {
        const int x0 = static_cast<int>(std::floor(sx));
        const int y0 = static_cast<int>(std::floor(sy));
        const double fx = sx - x0;
        const double fy = sy - y0;
        auto value = [&](int x, int y) { return (x + 4.0 * y) / 16.0; };
        return (1 - fy) * ((1 - fx) * value(x0, y0) + fx * value(x0 + 1, y0)) +
               fy * ((1 - fx) * value(x0, y0 + 1) + fx * value(x0 + 1, y0 + 1));
    };
    const double coords[2] = {0.5, 2.5};
    for (int y = 0; y < 2; ++y) {
        for (int x = 0; x < 2; ++x) {
            CHECK(out.at(x, y, 0) == doctest::Approx(oracle(coords[x], coords[y])).epsilon(1e-6));
        }
    }
}

TEST_CASE("crop_resize rejects boxes outside the image") {
    const Image img = random_image(4, 4, 15);
    CHECK_THROWS_AS(crop_resize(img, Rect{10, 10, 20, 20}, 2), ContractViolation);
    CHECK_THROWS_AS(crop_resize(img, Rect{-5, -5, -1, -1}, 2), ContractViolation);
}

TEST_CASE("affine similarity composes rotation, scale, and translation") {
    const Affine t = Affine::similarity(2.0, M_PI / 2.0, 10.0, 20.0);
    const Point p = t.apply({1.0, 0.0});
    CHECK(p.x == doctest::Approx(10.0).epsilon(1e-9));
    CHECK(p.y == doctest::Approx(22.0).epsilon(1e-9));

    const Affine inv = t.inverse();
    const Point back = inv.apply(p);
    CHECK(back.x == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(back.y == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("warp_alpha support matches the mapped asset footprint") {
    // 2x2 fully-opaque asset translated to (5,5): coverage must be zero well
    // outside the warped square and positive at its center.
    std::vector<float> alpha(4, 1.0f);
    Affine shift;
    shift.tx = 5.0;
    shift.ty = 5.0;
    const Mask mask = warp_alpha(alpha, 2, 2, shift, 12, 12);
    CHECK(mask.at(5, 5) > 0.5f);
    CHECK(mask.at(0, 0) == 0.0f);
    CHECK(mask.at(11, 11) == 0.0f);
    CHECK(mask.at(9, 5) == 0.0f);
}

TEST_CASE("resize changes dimensions and keeps constants constant") {
    Image img(10, 6);
    for (int y = 0; y < 6; ++y) {
        for (int x = 0; x < 10; ++x) img.set(x, y, 0.6, 0.3, 0.9);
    }
    const Image out = resize(img, 5, 3);
    CHECK(out.width() == 5);
    CHECK(out.height() == 3);
    for (int y = 0; y < 3; ++y) {
        for (int x = 0; x < 5; ++x) {
            CHECK(out.at(x, y, 0) == doctest::Approx(0.6).epsilon(1e-6));
        }
    }
}

TEST_CASE("file io round trips through the filesystem") {
    const Image img = random_image(3, 3, 99);
    const std::string path = "fb_test_io.png";
    save_png(img, path);
    const Image back = load_image(path);
    REQUIRE(back.same_dims(img));
    for (std::size_t i = 0; i < img.data().size(); ++i) {
        const float expected = Image::dequantize(Image::quantize(img.data()[i]));
        CHECK(back.data()[i] == expected);
    }
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_image("definitely_missing_file.png"), IoError);
}
