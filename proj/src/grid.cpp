#include "pulsegabor/grid.hpp"

#include <cmath>

namespace pulsegabor {

GreyImage::GreyImage(std::size_t width, std::size_t height, double fill)
    : Grid<double>(width, height, fill) {
    validate();
}

GreyImage::GreyImage(std::size_t width, std::size_t height, std::vector<double> values)
    : Grid<double>(width, height, std::move(values)) {
    validate();
}

GreyImage GreyImage::from_grid(const RealGrid& grid) {
    return GreyImage(grid.width(), grid.height(), grid.values());
}

void GreyImage::validate() const {
    if (width() == 0 || height() == 0)
        throw std::invalid_argument("grey image must be at least 1x1");
    for (double v : values()) {
        if (!std::isfinite(v) || v < 0.0 || v > max_value)
            throw std::invalid_argument("grey value out of [0, 255]: " + std::to_string(v));
    }
}

}  // namespace pulsegabor
