#include "pulsegabor/filters.hpp"
#include "pulsegabor/oracle.hpp"

#include <doctest.h>

#include <cmath>
#include <initializer_list>
#include <numbers>
#include <random>

using namespace pulsegabor;

TEST_SUITE("oracle") {

TEST_CASE("delta image returns the kernel rotated by 180 degrees") {
    RealGrid k(3, 3);
    for (std::size_t i = 0; i < 9; ++i) k[i] = static_cast<double>(i) - 4.0;
    RealGrid img(5, 5, 0.0);
    img(2, 2) = 1.0;
    const RealGrid out = convolve2d(img, RealKernel::centered(k));
    REQUIRE(out.width() == 3);
    for (std::size_t y = 0; y < 3; ++y)
        for (std::size_t x = 0; x < 3; ++x) CHECK(out(x, y) == k(2 - x, 2 - y));
}

TEST_CASE("zero-sum kernel on a uniform image gives zeros") {
    const RealGrid img(10, 8, 77.0);
    const RealGrid out = convolve2d(img, gabor_kernel(GaborParams{}));
    for (double v : out.values()) CHECK(std::abs(v) < 1e-9);
}

TEST_CASE("row kernel on a random image matches a brute-force loop") {
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> u(0.0, 255.0);
    RealGrid img(5, 5);
    for (double& v : img.values()) v = u(gen);
    RealGrid k(3, 1);
    k[0] = 1.0;
    k[1] = -2.0;
    k[2] = 1.0;
    const RealGrid out = convolve2d(img, RealKernel::centered(k));
    REQUIRE(out.width() == 3);
    REQUIRE(out.height() == 5);
    for (std::size_t y = 0; y < 5; ++y)
        for (std::size_t x = 0; x < 3; ++x)
            CHECK(out(x, y) == doctest::Approx(img(x, y) - 2.0 * img(x + 1, y) + img(x + 2, y)));
}

TEST_CASE("kernel larger than the image is rejected") {
    CHECK_THROWS_AS(convolve2d(RealGrid(3, 3), RealKernel::centered(RealGrid(5, 5))), std::invalid_argument);
}

TEST_CASE("convolution is linear") {
    std::mt19937 gen(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    RealGrid a(12, 9), b(12, 9), mix(12, 9);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = u(gen);
        b[i] = u(gen);
        mix[i] = 2.5 * a[i] - 0.75 * b[i];
    }
    const RealKernel k = gabor_kernel(GaborParams{.orientation = 0.3, .size = 5});
    const RealGrid ca = convolve2d(a, k), cb = convolve2d(b, k), cm = convolve2d(mix, k);
    for (std::size_t i = 0; i < cm.size(); ++i)
        CHECK(cm[i] == doctest::Approx(2.5 * ca[i] - 0.75 * cb[i]).epsilon(1e-9));
}

TEST_CASE("gabor kernel properties") {
    for (double phase : {0.0, 0.7}) {
        const RealKernel k = gabor_kernel(GaborParams{.orientation = 0.4, .phase = phase, .size = 9});
        double sum = 0.0;
        for (double v : k.coeffs.values()) sum += v;
        CHECK(std::abs(sum) < 1e-12);
    }
    const RealGrid even = gabor_kernel(GaborParams{.orientation = 0.4, .size = 7}).coeffs;
    for (std::size_t y = 0; y < 7; ++y)
        for (std::size_t x = 0; x < 7; ++x) CHECK(even(x, y) == doctest::Approx(even(6 - x, 6 - y)));

    const RealGrid h = gabor_kernel(GaborParams{.orientation = 0.0, .aspect = 0.5, .size = 5}).coeffs;
    const RealGrid v = gabor_kernel(GaborParams{.orientation = std::numbers::pi / 2, .aspect = 0.5, .size = 5}).coeffs;
    for (std::size_t y = 0; y < 5; ++y)
        for (std::size_t x = 0; x < 5; ++x) CHECK(h(x, y) == doctest::Approx(v(y, x)));

    CHECK_THROWS(gabor_kernel(GaborParams{.size = 4}));
    CHECK_THROWS(gabor_kernel(GaborParams{.wavelength = 0.0}));
}

TEST_CASE("gabor kernel matches direct evaluation") {
    const GaborParams p{.wavelength = 4.0, .orientation = 0.0, .sigma = 1.5, .aspect = 0.5, .phase = 0.0, .size = 3};
    double raw[3][3], mean = 0.0;
    for (int y = -1; y <= 1; ++y)
        for (int x = -1; x <= 1; ++x) {
            raw[y + 1][x + 1] = std::exp(-(x * x + 0.25 * y * y) / 4.5) * std::cos(2.0 * std::numbers::pi * x / 4.0);
            mean += raw[y + 1][x + 1] / 9.0;
        }
    const RealGrid k = gabor_kernel(p).coeffs;
    for (std::size_t y = 0; y < 3; ++y)
        for (std::size_t x = 0; x < 3; ++x) CHECK(k(x, y) == doctest::Approx(raw[y][x] - mean));
}

TEST_CASE("compare: identity and negation") {
    RealGrid a(4, 3);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = static_cast<double>(i % 5) - 2.0;
    const auto same = compare(a, a);
    CHECK(same.ncc == doctest::Approx(1.0));
    CHECK(same.mae == 0.0);
    RealGrid neg = a;
    for (double& v : neg.values()) v = -v;
    CHECK(compare(a, neg).ncc == doctest::Approx(-1.0));
    CHECK(compare(a, RealGrid(4, 3, 5.0)).ncc == 0.0);
    CHECK_THROWS(compare(a, RealGrid(3, 4)));
}

// Hand-computed reference values.
TEST_CASE("compare: Pearson on a fixed 3x3 pair") {
    const double av[9] = {1, 2, 3, 4, 5, 6, 7, 8, 9};
    const double bv[9] = {2, 1, 4, 3, 6, 5, 8, 7, 9};
    RealGrid a(3, 3), b(3, 3);
    for (int i = 0; i < 9; ++i) {
        a[i] = av[i];
        b[i] = bv[i];
    }
    // Means: a 45/9 = 5, b 45/9 = 5. Deviations of b: -3,-4,-1,-2,1,0,3,2,4.
    // sum(da*db) = 12+12+2+2+0+0+6+6+16 = 56; sum da^2 = 60; sum db^2 = 60.
    const auto r = compare(a, b);
    CHECK(r.ncc == doctest::Approx(56.0 / 60.0));
    CHECK(r.mae == doctest::Approx(8.0 / 9.0));
    CHECK(r.max_abs == 1.0);
    const auto s = compare(b, a);
    CHECK(s.ncc == r.ncc);
    CHECK(s.mae == r.mae);
}

TEST_CASE("analytic subtractor") {
    CHECK(analytic_subtractor(10, 4) == 6);
    CHECK(analytic_subtractor(4, 10) == 0);
    CHECK(analytic_subtractor(3, 3) == 0);
}

TEST_CASE("mask-path equivalence in integer arithmetic") {
    std::mt19937 gen(5);
    std::uniform_int_distribution<int> pix(0, 255);
    const IntegerMask mask = default_gabor_mask();
    Grid<long long> img(16, 14);
    for (auto& v : img.values()) v = pix(gen);
    Grid<long long> m(mask.coeffs.width(), mask.coeffs.height());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = mask.coeffs[i];
    const Grid<long long> direct = correlate_valid(img, m);
    const Grid<long long> paths = pair_path_response(img, decompose_mask(mask));
    CHECK(direct.values() == paths.values());
}

}
