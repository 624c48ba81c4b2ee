#pragma once

#include "pulsegabor/grid.hpp"

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pulsegabor {

struct RealKernel {
    RealGrid coeffs;
    // Image position of output (0, 0) relative to the kernel's top-left tap.
    std::size_t anchor_x = 0;
    std::size_t anchor_y = 0;

    static RealKernel centered(RealGrid coeffs);
};

// Valid-region correlation: out(x, y) = sum_ij k(i, j) * img(x + i, y + j).
// No kernel flip, so offsets index the image exactly as written.
template <typename T, typename K>
Grid<T> correlate_valid(const Grid<T>& img, const Grid<K>& k) {
    if (k.empty() || k.width() > img.width() || k.height() > img.height())
        throw std::invalid_argument("convolve2d: kernel " + std::to_string(k.width()) + "x" +
                                    std::to_string(k.height()) + " does not fit image " +
                                    std::to_string(img.width()) + "x" + std::to_string(img.height()));
    const std::size_t ow = img.width() - k.width() + 1;
    const std::size_t oh = img.height() - k.height() + 1;
    Grid<T> out(ow, oh, T{});
    for (std::size_t y = 0; y < oh; ++y)
        for (std::size_t x = 0; x < ow; ++x) {
            T acc{};
            for (std::size_t j = 0; j < k.height(); ++j)
                for (std::size_t i = 0; i < k.width(); ++i)
                    acc += static_cast<T>(k(i, j)) * img(x + i, y + j);
            out(x, y) = acc;
        }
    return out;
}

RealGrid convolve2d(const RealGrid& img, const RealKernel& k);

struct GaborParams {
    double wavelength = 6.0;
    double orientation = 0.0;  // radians
    double sigma = 2.0;
    double aspect = 0.5;
    double phase = 0.0;
    std::size_t size = 7;

    void validate() const;
};

// exp(-(x'^2 + aspect^2 y'^2) / (2 sigma^2)) * cos(2 pi x' / wavelength + phase)
// on rotated coordinates, mean-subtracted to an exact-as-possible zero sum.
RealKernel gabor_kernel(const GaborParams& p);

double analytic_subtractor(double r1, double r2);

struct SimilarityReport {
    double ncc = 0.0;
    double mae = 0.0;
    double max_abs = 0.0;
};

// Pearson correlation over all cells (0 when either grid is constant), plus
// mean and max absolute difference.
SimilarityReport compare(const RealGrid& a, const RealGrid& b);

// Elementwise |v|.
RealGrid abs_grid(RealGrid grid);

}  // namespace pulsegabor
