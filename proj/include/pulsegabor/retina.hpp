#pragma once

#include "pulsegabor/grid.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace pulsegabor {

struct OpticsModel {
    double sigma = 1.4;  // pixels; 0 disables smoothing

    void validate() const;
};

// Truncated at +-ceil(3 sigma) and normalized to unit sum. sigma = 0 gives {1}.
std::vector<double> gaussian_taps(double sigma);

// Separable Gaussian blur with clamp-to-border edges.
RealGrid smooth_grid(const RealGrid& grid, const OpticsModel& optics);
GreyImage smooth_image(const GreyImage& img, const OpticsModel& optics);

// Counter-based generator (splitmix64) so every pixel can own a small,
// independently seeded stream.
class PixelRng {
public:
    using result_type = std::uint64_t;

    explicit PixelRng(std::uint64_t seed = 0) : state_(seed) {}
    PixelRng(std::uint64_t seed, std::uint64_t stream);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }
    result_type operator()();

private:
    std::uint64_t state_;
};

struct PixelCell {
    double accumulator = 0.0;
    double rate_gain = 100.0 / 255.0;  // pulses per unit time per brightness unit
    double noise_level = 0.0;          // relative std-dev of the photocurrent

    void validate() const;
};

struct PixelStepResult {
    PixelCell cell;
    bool fired = false;
};

// I = k * B * (1 + eta * xi), clamped at 0. The cell fires once the
// accumulated charge reaches 1 and resets to 0.
PixelStepResult pixel_step(PixelCell cell, double brightness, double dt, PixelRng& rng,
                           std::normal_distribution<double>& normal);
PixelStepResult pixel_step(PixelCell cell, double brightness, double dt, PixelRng& rng);

struct RetinaConfig {
    double rate_gain = 100.0 / 255.0;
    double noise_level = 0.0;
    OpticsModel optics{};

    void validate() const;
};

// Array of pixel cells looking at a (smoothed) image. Pixel address is
// y * width + x.
class Retina {
public:
    Retina(const GreyImage& image, const RetinaConfig& config, std::uint64_t seed, double dt);

    // Advances every pixel by one tick; returns the addresses that fired, ascending.
    const std::vector<std::uint32_t>& step();

    const GreyImage& smoothed() const noexcept { return smoothed_; }
    std::size_t width() const noexcept { return smoothed_.width(); }
    std::size_t height() const noexcept { return smoothed_.height(); }
    std::size_t size() const noexcept { return smoothed_.size(); }

private:
    GreyImage smoothed_;
    RetinaConfig config_;
    double dt_;
    std::vector<PixelCell> cells_;
    std::vector<PixelRng> rngs_;
    std::vector<std::normal_distribution<double>> normals_;
    std::vector<std::uint32_t> fired_;
};

}  // namespace pulsegabor
