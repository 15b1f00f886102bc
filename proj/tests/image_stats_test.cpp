#include "learnorder/error.hpp"
#include "learnorder/image.hpp"
#include "learnorder/image_stats.hpp"

#include "oracles.hpp"
#include "scratch_dir.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>

using namespace learnorder;

namespace {

GrayImage random_gray(std::mt19937_64& rng, std::size_t w, std::size_t h, double lo = 0.0,
                      double hi = 255.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> px(w * h);
    for (auto& v : px) v = dist(rng);
    return {w, h, px};
}

GrayImage checkerboard(std::size_t w, std::size_t h) {
    GrayImage img(w, h);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) img(x, y) = (x + y) % 2 ? 255.0 : 0.0;
    }
    return img;
}

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected learnorder::Error";
    return ErrorCode::Io;
}

} // namespace

TEST(Grayscale, LumaWeights) {
    RgbImage img(2, 1);
    img.pixel(0, 0)[0] = 255;
    img.pixel(1, 0)[0] = img.pixel(1, 0)[1] = img.pixel(1, 0)[2] = 255;
    const auto g = to_grayscale(img);
    EXPECT_NEAR(g(0, 0), 76.245, 1e-12);
    EXPECT_NEAR(g(1, 0), 255.0, 1e-12);
}

TEST(Grayscale, RejectsInconsistentRaster) {
    RgbImage img(2, 2);
    img.rgb.pop_back();
    EXPECT_EQ(code_of([&] { to_grayscale(img); }), ErrorCode::UnsupportedFormat);
}

TEST(Resample, AreaAverage) {
    const GrayImage img(4, 2, {0, 2, 4, 6, 8, 10, 12, 14});
    const auto half = resample(img, 2, 1);
    EXPECT_DOUBLE_EQ(half(0, 0), 5.0);
    EXPECT_DOUBLE_EQ(half(1, 0), 9.0);
    const auto same = resample(img, 4, 2);
    EXPECT_EQ(same.pixels(), img.pixels());
}

TEST(Entropy, ConstantImageIsZero) {
    EXPECT_EQ(mean_local_entropy(GrayImage(20, 15, 77.0)), 0.0);
}

TEST(Entropy, CheckerboardIsOneBit) {
    EXPECT_DOUBLE_EQ(mean_local_entropy(checkerboard(16, 16), 10), 1.0);
    EXPECT_DOUBLE_EQ(mean_local_entropy(checkerboard(16, 16), 2), 1.0);
}

TEST(Entropy, MatchesNaiveOracle) {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 10; ++i) {
        const auto img = random_gray(rng, 32, 32);
        for (std::size_t window : {1u, 3u, 10u, 32u}) {
            EXPECT_NEAR(mean_local_entropy(img, window),
                        oracle::mean_local_entropy(img.pixels(), 32, 32, window), 1e-12);
        }
    }
    const auto wide = random_gray(rng, 37, 13);
    EXPECT_NEAR(mean_local_entropy(wide, 5), oracle::mean_local_entropy(wide.pixels(), 37, 13, 5),
                1e-12);
}

TEST(Entropy, BoundedByWindowArea) {
    std::mt19937_64 rng(3);
    const auto img = random_gray(rng, 24, 24);
    EXPECT_LE(mean_local_entropy(img, 10), std::log2(100.0) + 1e-12);
    EXPECT_LE(mean_local_entropy(img, 20), 8.0);
}

TEST(Entropy, HalfUpBinning) {
    // 0.5 bins with 1, 0.49 with 0: a 2x1 window sees two distinct bins
    EXPECT_DOUBLE_EQ(mean_local_entropy(GrayImage(2, 1, {0.49, 0.5}), 1), 0.0);
    EXPECT_DOUBLE_EQ(mean_local_entropy(GrayImage(2, 2, {0.49, 0.5, 0.49, 0.5}), 2), 1.0);
    EXPECT_DOUBLE_EQ(mean_local_entropy(GrayImage(2, 2, {0.0, 0.49, 0.0, 0.49}), 2), 0.0);
}

TEST(Entropy, WindowErrors) {
    EXPECT_EQ(code_of([] { mean_local_entropy(GrayImage(8, 20), 10); }), ErrorCode::WindowTooLarge);
    EXPECT_EQ(code_of([] { mean_local_entropy(GrayImage(8, 8), 0); }), ErrorCode::InvalidArgument);
}

TEST(Gaussian, MatchesBruteForceBlur) {
    std::mt19937_64 rng(8);
    for (double sigma : {0.5, 0.8, 2.0}) {
        const auto img = random_gray(rng, 9, 7);
        const auto fast = gaussian_smooth(img, sigma);
        const auto slow = oracle::gaussian_blur(img.pixels(), 9, 7, sigma);
        for (std::size_t i = 0; i < slow.size(); ++i) EXPECT_NEAR(fast.pixels()[i], slow[i], 1e-9);
    }
}

TEST(Gaussian, PreservesConstantImage) {
    const auto out = gaussian_smooth(GrayImage(5, 4, 42.0), 1.3);
    for (double v : out.pixels()) EXPECT_NEAR(v, 42.0, 1e-12);
    EXPECT_EQ(gaussian_smooth(GrayImage(3, 3, 1.0), 0.0).pixels(), GrayImage(3, 3, 1.0).pixels());
}

TEST(GridEdges, EightConnectedCount) {
    const std::vector<GrayImage> ch{GrayImage(5, 4)};
    const auto edges = grid_edges(ch);
    // horizontal + vertical + two diagonals
    EXPECT_EQ(edges.size(), 4u * 4 + 5u * 3 + 2u * 4 * 3);
    EXPECT_EQ(edges[0].a, 0u);
    EXPECT_EQ(edges[0].b, 1u);
    EXPECT_EQ(edges[1].b, 5u);
}

TEST(Segmentation, UniformImageIsOneSegment) {
    EXPECT_EQ(segment_count(GrayImage(20, 20, 128.0)), 1u);
    RgbImage rgb(12, 9);
    EXPECT_EQ(segment_count(rgb), 1u);
}

TEST(Segmentation, TwoFlatHalves) {
    GrayImage img(20, 20, 0.0);
    for (std::size_t y = 0; y < 20; ++y) {
        for (std::size_t x = 10; x < 20; ++x) img(x, y) = 255.0;
    }
    EXPECT_EQ(segment_count(img, {0.5, 100.0, 30}), 2u);
}

TEST(Segmentation, LimitsOfScale) {
    std::mt19937_64 rng(4);
    const auto img = random_gray(rng, 10, 8);
    EXPECT_EQ(segment_count(img, {0.0, 1e12, 1}), 1u);
    EXPECT_EQ(segment_count(img, {0.0, 0.0, 1}), 80u);
}

TEST(Segmentation, MinSizeRespected) {
    std::mt19937_64 rng(6);
    const auto img = random_gray(rng, 16, 16);
    const auto seg = segment({img}, {0.0, 50.0, 10});
    std::vector<std::size_t> sizes(seg.count, 0);
    for (auto l : seg.labels) ++sizes[l];
    for (auto s : sizes) EXPECT_GE(s, 10u);
    EXPECT_EQ(seg.labels[0], 0u);
}

TEST(Segmentation, MatchesNaiveOracle) {
    std::mt19937_64 rng(31);
    for (int i = 0; i < 30; ++i) {
        const std::size_t w = 1 + rng() % 12, h = 1 + rng() % 12;
        // coarse intensity levels make equal-weight ties common
        std::vector<double> px(w * h);
        for (auto& v : px) v = static_cast<double>((rng() % 5) * 60);
        const GrayImage img(w, h, px);
        const SegmentationParams params{i % 2 ? 0.5 : 0.0, static_cast<double>(rng() % 400),
                                        1 + rng() % 8};
        const auto smooth = gaussian_smooth(img, params.sigma);
        EXPECT_EQ(segment_count(img, params),
                  oracle::segment_count({smooth.pixels()}, w, h, params.scale_k, params.min_size))
            << i;
    }
}

TEST(Dct, ParsevalAndOracle) {
    std::mt19937_64 rng(12);
    for (int i = 0; i < 5; ++i) {
        const std::size_t w = 1 + rng() % 16, h = 1 + rng() % 16;
        const auto img = random_gray(rng, w, h);
        const auto c = dct2(img);
        const auto ref = oracle::dct2(img.pixels(), w, h);
        double ce = 0.0, pe = 0.0;
        for (std::size_t k = 0; k < c.size(); ++k) {
            EXPECT_NEAR(c[k], ref[k], 1e-9);
            ce += c[k] * c[k];
            pe += img.pixels()[k] * img.pixels()[k];
        }
        EXPECT_NEAR(ce, pe, 1e-9 * pe);
    }
}

TEST(Dct, ConstantImageNeedsOneCoefficient) {
    const auto e = dct_energy_percentage(GrayImage(8, 6, 100.0));
    EXPECT_EQ(e.coefficients, 1u);
    EXPECT_EQ(e.fraction, 1.0 / 48.0);
    EXPECT_FALSE(e.degenerate);
}

TEST(Dct, ZeroImageIsDegenerate) {
    const auto e = dct_energy_percentage(GrayImage(4, 4, 0.0));
    EXPECT_TRUE(e.degenerate);
    EXPECT_EQ(e.fraction, 1.0 / 16.0);
}

TEST(Dct, FractionMonotoneInTarget) {
    std::mt19937_64 rng(2);
    const auto img = random_gray(rng, 16, 16);
    double prev = 0.0;
    for (double f : {0.5, 0.9, 0.99, 0.9998, 1.0}) {
        const auto e = dct_energy_percentage(img, f);
        EXPECT_GE(e.fraction, prev);
        EXPECT_GT(e.fraction, 0.0);
        EXPECT_LE(e.fraction, 1.0);
        prev = e.fraction;
    }
}

TEST(Dct, SmoothImagesCompressBetterThanNoise) {
    std::mt19937_64 rng(9);
    GrayImage ramp(16, 16);
    for (std::size_t y = 0; y < 16; ++y) {
        for (std::size_t x = 0; x < 16; ++x) ramp(x, y) = 8.0 * x + 4.0 * y;
    }
    EXPECT_LT(dct_energy_percentage(ramp, 0.99).fraction,
              dct_energy_percentage(random_gray(rng, 16, 16), 0.99).fraction);
}

TEST(Dct, TargetMatchesSortedOracle) {
    std::mt19937_64 rng(21);
    const auto img = random_gray(rng, 16, 16);
    auto coeffs = oracle::dct2(img.pixels(), 16, 16);
    std::vector<double> energy;
    for (double c : coeffs) energy.push_back(c * c);
    std::sort(energy.rbegin(), energy.rend());
    const double total = std::accumulate(energy.begin(), energy.end(), 0.0);
    double run = 0.0;
    std::size_t expect = 0;
    for (std::size_t i = 0; i < energy.size(); ++i) {
        run += energy[i];
        if (std::sqrt(run) >= 0.95 * std::sqrt(total)) {
            expect = i + 1;
            break;
        }
    }
    EXPECT_EQ(dct_energy_percentage(img, 0.95).coefficients, expect);
}

TEST(Dct, RejectsBadFraction) {
    EXPECT_EQ(code_of([] { dct_energy_percentage(GrayImage(2, 2), 0.0); }),
              ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([] { dct_energy_percentage(GrayImage(2, 2), 1.5); }),
              ErrorCode::InvalidArgument);
}

TEST(Sobel, VerticalStepClosedForm) {
    for (std::size_t h : {3u, 6u, 11u}) {
        GrayImage img(8, h, 0.0);
        for (std::size_t y = 0; y < h; ++y) {
            for (std::size_t x = 4; x < 8; ++x) img(x, y) = 255.0;
        }
        // two interior columns straddle the step, each |gx| = 4 * 255
        const double expect = 2.0 * 1020.0 * static_cast<double>(h - 2) / (8.0 * h);
        EXPECT_NEAR(edge_strength_sum(img), expect, 1e-9);
    }
}

TEST(Sobel, LinearInContrastAndMatchesOracle) {
    std::mt19937_64 rng(10);
    const auto img = random_gray(rng, 13, 9, 0.0, 120.0);
    std::vector<double> doubled = img.pixels();
    for (auto& v : doubled) v *= 2.0;
    EXPECT_NEAR(edge_strength_sum(GrayImage(13, 9, doubled)), 2.0 * edge_strength_sum(img), 1e-9);
    EXPECT_NEAR(edge_strength_sum(img), oracle::sobel(img.pixels(), 13, 9), 1e-9);
    EXPECT_EQ(edge_strength_sum(GrayImage(5, 5, 9.0)), 0.0);
}

TEST(Sobel, TooSmall) {
    EXPECT_EQ(code_of([] { edge_strength_sum(GrayImage(2, 5)); }), ErrorCode::ImageTooSmall);
}

TEST(ImageIo, PngRoundTrip) {
    ScratchDir dir("png");
    RgbImage img(5, 3);
    for (std::size_t i = 0; i < img.rgb.size(); ++i) img.rgb[i] = static_cast<std::uint8_t>(i * 7);
    save_png(dir / "a.png", img);
    const auto back = load_image(dir / "a.png");
    EXPECT_EQ(back.width, 5u);
    EXPECT_EQ(back.height, 3u);
    EXPECT_EQ(back.rgb, img.rgb);
}

TEST(ImageIo, DecodeErrors) {
    ScratchDir dir("bad");
    dir.write("text.png", "definitely not an image");
    dir.write("trunc.png", std::string("\x89PNG\r\n\x1a\n", 8) + "garbage");
    EXPECT_EQ(code_of([&] { load_image(dir / "text.png"); }), ErrorCode::UnsupportedFormat);
    EXPECT_EQ(code_of([&] { load_image(dir / "trunc.png"); }), ErrorCode::ImageDecodeError);
    EXPECT_EQ(code_of([&] { load_image(dir / "missing.png"); }), ErrorCode::ImageDecodeError);
}

TEST(ImageIo, DecodesFixtures) {
    const std::filesystem::path data = LEARNORDER_TEST_DATA;
    for (const char* name : {"gradient.jpg", "gradient_progressive.jpg"}) {
        const auto img = load_image(data / name);
        ASSERT_EQ(img.width, 12u) << name;
        ASSERT_EQ(img.height, 10u) << name;
        // lossy, but close to the generating gradient (x*20, y*25, 128)
        EXPECT_NEAR(img.pixel(5, 4)[0], 100, 12) << name;
        EXPECT_NEAR(img.pixel(5, 4)[1], 100, 12) << name;
        EXPECT_NEAR(img.pixel(5, 4)[2], 128, 12) << name;
    }
    const auto gray = load_image(data / "gray.jpg");
    EXPECT_EQ(gray.pixel(3, 3)[0], gray.pixel(3, 3)[1]);
    const auto alpha = load_image(data / "alpha.png");
    EXPECT_EQ(alpha.pixel(0, 0)[0], 0); // fully transparent over black
    EXPECT_EQ(alpha.pixel(2, 0)[0], 40);
    const auto palette = load_image(data / "palette.png");
    EXPECT_EQ(palette.width, 4u);
}
