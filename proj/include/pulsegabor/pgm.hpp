#pragma once

#include "pulsegabor/grid.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>

namespace pulsegabor {

class PgmError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Binary PGM (P5). Reading accepts maxval <= 255 and rescales to [0, 255];
// plain P2 is accepted as well. Writing always emits P5 with maxval 255,
// rounding half up and clamping.
GreyImage read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const GreyImage& image);

GreyImage decode_pgm(const std::string& bytes);
std::string encode_pgm(const GreyImage& image);

// Linear rescale of an arbitrary real grid so that its maximum maps to 255 and
// 0 maps to 0 (negative values clamp to 0). An all-zero grid stays black.
GreyImage rescale_to_grey(const RealGrid& grid);

}  // namespace pulsegabor
