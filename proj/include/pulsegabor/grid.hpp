#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pulsegabor {

// Row-major 2-D array. Address of (x, y) is y * width + x.
template <typename T>
class Grid {
public:
    Grid() = default;

    Grid(std::size_t width, std::size_t height, T fill = T{})
        : width_(width), height_(height), values_(width * height, fill) {}

    Grid(std::size_t width, std::size_t height, std::vector<T> values)
        : width_(width), height_(height), values_(std::move(values)) {
        if (values_.size() != width_ * height_)
            throw std::invalid_argument("grid: value count " + std::to_string(values_.size()) +
                                        " does not match " + std::to_string(width_) + "x" +
                                        std::to_string(height_));
    }

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    T& operator()(std::size_t x, std::size_t y) { return values_[y * width_ + x]; }
    const T& operator()(std::size_t x, std::size_t y) const { return values_[y * width_ + x]; }

    T& operator[](std::size_t address) { return values_[address]; }
    const T& operator[](std::size_t address) const { return values_[address]; }

    std::vector<T>& values() noexcept { return values_; }
    const std::vector<T>& values() const noexcept { return values_; }

    bool same_shape(const Grid& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_;
    }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::vector<T> values_;
};

using RealGrid = Grid<double>;

// Greyscale brightness image, values in [0, 255].
class GreyImage : public Grid<double> {
public:
    static constexpr double max_value = 255.0;

    GreyImage() = default;
    GreyImage(std::size_t width, std::size_t height, double fill = 0.0);
    GreyImage(std::size_t width, std::size_t height, std::vector<double> values);

    // Wraps an arbitrary grid, rejecting out-of-range values.
    static GreyImage from_grid(const RealGrid& grid);

private:
    void validate() const;
};

}  // namespace pulsegabor
