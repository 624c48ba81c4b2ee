#include "pulsegabor/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pulsegabor {

RealKernel RealKernel::centered(RealGrid coeffs) {
    RealKernel k;
    k.anchor_x = coeffs.width() / 2;
    k.anchor_y = coeffs.height() / 2;
    k.coeffs = std::move(coeffs);
    return k;
}

RealGrid convolve2d(const RealGrid& img, const RealKernel& k) {
    for (double v : k.coeffs.values())
        if (!std::isfinite(v)) throw std::invalid_argument("convolve2d: kernel has non-finite values");
    return correlate_valid(img, k.coeffs);
}

void GaborParams::validate() const {
    if (size == 0 || size % 2 == 0) throw std::invalid_argument("gabor: size must be odd");
    if (!(std::isfinite(wavelength) && wavelength > 0.0)) throw std::invalid_argument("gabor: wavelength must be > 0");
    if (!(std::isfinite(sigma) && sigma > 0.0)) throw std::invalid_argument("gabor: sigma must be > 0");
    if (!(std::isfinite(aspect) && aspect > 0.0)) throw std::invalid_argument("gabor: aspect must be > 0");
    if (!std::isfinite(orientation) || !std::isfinite(phase))
        throw std::invalid_argument("gabor: orientation and phase must be finite");
}

RealKernel gabor_kernel(const GaborParams& p) {
    p.validate();
    const int r = static_cast<int>(p.size / 2);
    const double c = std::cos(p.orientation);
    const double s = std::sin(p.orientation);
    RealGrid g(p.size, p.size);
    double sum = 0.0;
    for (int y = -r; y <= r; ++y)
        for (int x = -r; x <= r; ++x) {
            const double xr = x * c + y * s;
            const double yr = -x * s + y * c;
            const double env = std::exp(-(xr * xr + p.aspect * p.aspect * yr * yr) / (2.0 * p.sigma * p.sigma));
            const double v = env * std::cos(2.0 * std::numbers::pi * xr / p.wavelength + p.phase);
            g(static_cast<std::size_t>(x + r), static_cast<std::size_t>(y + r)) = v;
            sum += v;
        }
    const double mean = sum / static_cast<double>(g.size());
    for (double& v : g.values()) v -= mean;
    return RealKernel::centered(std::move(g));
}

double analytic_subtractor(double r1, double r2) {
    if (!(r1 >= 0.0 && r2 >= 0.0)) throw std::invalid_argument("analytic_subtractor: rates must be >= 0");
    return std::max(r1 - r2, 0.0);
}

SimilarityReport compare(const RealGrid& a, const RealGrid& b) {
    if (!a.same_shape(b))
        throw std::invalid_argument("compare: shapes differ (" + std::to_string(a.width()) + "x" +
                                    std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                                    std::to_string(b.height()) + ")");
    SimilarityReport rep;
    const std::size_t n = a.size();
    if (n == 0) return rep;
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
        const double d = std::abs(a[i] - b[i]);
        rep.mae += d;
        rep.max_abs = std::max(rep.max_abs, d);
    }
    rep.mae /= static_cast<double>(n);
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa > 0.0 && sbb > 0.0) rep.ncc = std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
    return rep;
}

RealGrid abs_grid(RealGrid grid) {
    for (double& v : grid.values()) v = std::abs(v);
    return grid;
}

}  // namespace pulsegabor
