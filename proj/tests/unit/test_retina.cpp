#include "pulsegabor/retina.hpp"

#include <doctest.h>

#include <cmath>
#include <initializer_list>
#include <vector>

using namespace pulsegabor;

namespace {

int count_pulses(double brightness, double eta, int ticks, std::uint64_t seed = 1) {
    PixelCell cell{0.0, 100.0 / 255.0, eta};
    PixelRng rng(seed, 0);
    std::normal_distribution<double> normal;
    int n = 0;
    for (int t = 0; t < ticks; ++t) {
        const auto r = pixel_step(cell, brightness, 0.001, rng, normal);
        cell = r.cell;
        n += r.fired;
    }
    return n;
}

}  // namespace

TEST_SUITE("retina") {

TEST_CASE("uniform image is unchanged by smoothing") {
    const GreyImage img(9, 7, 123.0);
    const GreyImage s = smooth_image(img, OpticsModel{1.4});
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(s[i] == doctest::Approx(123.0));
}

TEST_CASE("zero sigma is the identity") {
    GreyImage img(5, 5, 0.0);
    img(2, 1) = 200.0;
    img(0, 4) = 17.0;
    const GreyImage s = smooth_image(img, OpticsModel{0.0});
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(s[i] == img[i]);
}

TEST_CASE("single bright pixel becomes the discrete Gaussian blob") {
    // Independent truncated normalized kernel: radius ceil(3 sigma).
    const double sigma = 1.4;
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> taps;
    double total = 0.0;
    for (int x = -radius; x <= radius; ++x) {
        taps.push_back(std::exp(-0.5 * x * x / (sigma * sigma)));
        total += taps.back();
    }
    for (double& t : taps) t /= total;

    GreyImage img(21, 21, 0.0);
    img(10, 10) = 255.0;
    const GreyImage s = smooth_image(img, OpticsModel{sigma});
    CHECK(s(10, 10) == doctest::Approx(taps[radius] * taps[radius] * 255.0));
    CHECK(s(12, 9) == doctest::Approx(taps[radius + 2] * taps[radius - 1] * 255.0));
    CHECK(s(10 + radius + 1, 10) == 0.0);
}

TEST_CASE("dark pixel never fires") {
    CHECK(count_pulses(0.0, 0.0, 5000) == 0);
    CHECK(count_pulses(0.0, 0.2, 5000) == 0);
}

TEST_CASE("noise-free pulse count matches integration of the current") {
    // Brightnesses whose period is a whole number of ticks (10, 20, 50, 100).
    for (double b : {255.0, 127.5, 51.0, 25.5}) {
        const double expected = std::floor(100.0 / 255.0 * b * 2.0);
        CHECK(std::abs(count_pulses(b, 0.0, 2000) - expected) <= 1.0);
    }
}

TEST_CASE("doubling brightness doubles the rate") {
    CHECK(count_pulses(255.0, 0.0, 4000) == 2 * count_pulses(127.5, 0.0, 4000));
    CHECK(count_pulses(102.0, 0.0, 4000) == 2 * count_pulses(51.0, 0.0, 4000));
}

TEST_CASE("rate over brightness is constant within one pulse per window") {
    const double ref = count_pulses(255.0, 0.0, 1000) / 255.0;
    for (double b : {32.0, 64.0, 128.0, 255.0}) CHECK(std::abs(count_pulses(b, 0.0, 1000) - ref * b) <= 1.0);
}

// Reset-to-zero drops on average half a tick of charge per pulse under noise,
// a bias of 0.5 / period; at 50 ticks per pulse that stays inside 2%.
TEST_CASE("noise is unbiased over a fixed seed set") {
    const int clean = count_pulses(51.0, 0.0, 10000);
    double total = 0.0;
    const int seeds = 200;
    for (int s = 1; s <= seeds; ++s) total += count_pulses(51.0, 0.2, 10000, static_cast<std::uint64_t>(s));
    CHECK(std::abs(total / seeds - clean) <= 0.02 * clean);
}

TEST_CASE("retina is deterministic for a fixed seed") {
    GreyImage img(6, 6, 0.0);
    for (std::size_t i = 0; i < img.size(); ++i) img[i] = static_cast<double>(i * 7 % 256);
    RetinaConfig cfg;
    cfg.noise_level = 0.2;
    Retina a(img, cfg, 42, 0.001);
    Retina b(img, cfg, 42, 0.001);
    for (int t = 0; t < 500; ++t) CHECK(a.step() == b.step());
}

TEST_CASE("retina fired addresses are ascending") {
    GreyImage img(8, 8, 255.0);
    Retina r(img, RetinaConfig{}, 3, 0.001);
    for (int t = 0; t < 30; ++t) {
        const auto& f = r.step();
        CHECK(std::is_sorted(f.begin(), f.end()));
    }
}

TEST_CASE("invalid inputs") {
    PixelRng rng(1, 0);
    CHECK_THROWS(pixel_step(PixelCell{}, 300.0, 0.001, rng));
    CHECK_THROWS(OpticsModel{-1.0}.validate());
    CHECK_THROWS(Retina(GreyImage(2, 2, 1.0), RetinaConfig{}, 1, 0.1));
}

}
