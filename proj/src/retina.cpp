#include "pulsegabor/retina.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pulsegabor {

void OpticsModel::validate() const {
    if (!(std::isfinite(sigma) && sigma >= 0.0)) throw std::invalid_argument("optics: sigma must be >= 0");
}

std::vector<double> gaussian_taps(double sigma) {
    OpticsModel{sigma}.validate();
    if (sigma == 0.0) return {1.0};
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> taps(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double v = std::exp(-static_cast<double>(i * i) / (2.0 * sigma * sigma));
        taps[static_cast<std::size_t>(i + radius)] = v;
        sum += v;
    }
    for (double& v : taps) v /= sum;
    return taps;
}

RealGrid smooth_grid(const RealGrid& grid, const OpticsModel& optics) {
    optics.validate();
    if (optics.sigma == 0.0 || grid.empty()) return grid;
    const auto taps = gaussian_taps(optics.sigma);
    const int radius = static_cast<int>(taps.size() / 2);
    const int w = static_cast<int>(grid.width());
    const int h = static_cast<int>(grid.height());

    RealGrid rows(grid.width(), grid.height());
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i)
                acc += taps[static_cast<std::size_t>(i + radius)] * grid(std::clamp(x + i, 0, w - 1), y);
            rows(x, y) = acc;
        }
    RealGrid out(grid.width(), grid.height());
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i)
                acc += taps[static_cast<std::size_t>(i + radius)] * rows(x, std::clamp(y + i, 0, h - 1));
            out(x, y) = acc;
        }
    return out;
}

GreyImage smooth_image(const GreyImage& img, const OpticsModel& optics) {
    RealGrid out = smooth_grid(img, optics);
    // A unit-sum kernel stays inside the input range; clamp rounding noise only.
    for (double& v : out.values()) v = std::clamp(v, 0.0, GreyImage::max_value);
    return GreyImage::from_grid(out);
}

PixelRng::PixelRng(std::uint64_t seed, std::uint64_t stream) : state_(seed) {
    // Decorrelate neighbouring streams by running the index through the mixer.
    PixelRng mix(stream ^ 0x6a09e667f3bcc909ULL);
    state_ = seed ^ mix();
}

PixelRng::result_type PixelRng::operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

void PixelCell::validate() const {
    if (!(std::isfinite(rate_gain) && rate_gain > 0.0)) throw std::invalid_argument("pixel: rate gain must be > 0");
    if (!(std::isfinite(noise_level) && noise_level >= 0.0))
        throw std::invalid_argument("pixel: noise level must be >= 0");
    if (!(accumulator >= 0.0)) throw std::invalid_argument("pixel: accumulator must be >= 0");
}

PixelStepResult pixel_step(PixelCell cell, double brightness, double dt, PixelRng& rng,
                           std::normal_distribution<double>& normal) {
    if (!(brightness >= 0.0 && brightness <= GreyImage::max_value))
        throw std::invalid_argument("pixel: brightness outside [0, 255]");
    double current = cell.rate_gain * brightness;
    if (cell.noise_level > 0.0) current *= 1.0 + cell.noise_level * normal(rng);
    cell.accumulator += std::max(current, 0.0) * dt;
    bool fired = false;
    // Tolerance absorbs summation round-off so integer periods stay exact (ten steps of 0.1 fire on the tenth).
    if (cell.accumulator >= 1.0 - 1e-9) {
        cell.accumulator = 0.0;
        fired = true;
    }
    return {cell, fired};
}

PixelStepResult pixel_step(PixelCell cell, double brightness, double dt, PixelRng& rng) {
    std::normal_distribution<double> normal;
    return pixel_step(cell, brightness, dt, rng, normal);
}

void RetinaConfig::validate() const {
    PixelCell{0.0, rate_gain, noise_level}.validate();
    optics.validate();
}

Retina::Retina(const GreyImage& image, const RetinaConfig& config, std::uint64_t seed, double dt)
    : smoothed_(smooth_image(image, config.optics)), config_(config), dt_(dt) {
    config_.validate();
    if (!(dt > 0.0)) throw std::invalid_argument("retina: dt must be > 0");
    if (config_.rate_gain * GreyImage::max_value * dt > 1.0)
        throw std::invalid_argument("retina: rate gain exceeds one pulse per tick at full brightness");
    cells_.assign(smoothed_.size(), PixelCell{0.0, config_.rate_gain, config_.noise_level});
    rngs_.reserve(smoothed_.size());
    for (std::size_t i = 0; i < smoothed_.size(); ++i) rngs_.emplace_back(seed, i);
    normals_.assign(smoothed_.size(), std::normal_distribution<double>{});
}

const std::vector<std::uint32_t>& Retina::step() {
    fired_.clear();
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        const auto r = pixel_step(cells_[i], smoothed_[i], dt_, rngs_[i], normals_[i]);
        cells_[i] = r.cell;
        if (r.fired) fired_.push_back(static_cast<std::uint32_t>(i));
    }
    return fired_;
}

}  // namespace pulsegabor
