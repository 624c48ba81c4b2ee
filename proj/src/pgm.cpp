#include "pulsegabor/pgm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

namespace pulsegabor {

namespace {

class HeaderReader {
public:
    explicit HeaderReader(const std::string& bytes) : bytes_(bytes) {}

    std::string token() {
        skip_space_and_comments();
        std::size_t start = pos_;
        while (pos_ < bytes_.size() && !std::isspace(static_cast<unsigned char>(bytes_[pos_])))
            ++pos_;
        if (start == pos_) throw PgmError("pgm: truncated header");
        return bytes_.substr(start, pos_ - start);
    }

    long number() {
        const std::string t = token();
        if (!std::all_of(t.begin(), t.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
            throw PgmError("pgm: expected a number, got '" + t + "'");
        return std::stol(t);
    }

    // Exactly one whitespace byte separates the header from binary data.
    std::size_t binary_start() {
        if (pos_ >= bytes_.size()) throw PgmError("pgm: missing pixel data");
        return pos_ + 1;
    }

    std::size_t position() const { return pos_; }

private:
    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            const char c = bytes_[pos_];
            if (c == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    const std::string& bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

GreyImage decode_pgm(const std::string& bytes) {
    HeaderReader header(bytes);
    const std::string magic = header.token();
    if (magic != "P5" && magic != "P2") throw PgmError("pgm: unsupported magic '" + magic + "'");
    const long width = header.number();
    const long height = header.number();
    const long maxval = header.number();
    if (width < 1 || height < 1) throw PgmError("pgm: empty image");
    if (maxval < 1 || maxval > 255) throw PgmError("pgm: maxval must be in [1, 255]");

    const auto count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    std::vector<double> values(count);
    const double scale = 255.0 / static_cast<double>(maxval);
    if (magic == "P5") {
        const std::size_t start = header.binary_start();
        if (bytes.size() < start + count) throw PgmError("pgm: truncated pixel data");
        for (std::size_t i = 0; i < count; ++i) {
            const auto v = static_cast<unsigned char>(bytes[start + i]);
            if (v > maxval) throw PgmError("pgm: sample exceeds maxval");
            values[i] = v * scale;
        }
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            const long v = header.number();
            if (v > maxval) throw PgmError("pgm: sample exceeds maxval");
            values[i] = static_cast<double>(v) * scale;
        }
    }
    return GreyImage(static_cast<std::size_t>(width), static_cast<std::size_t>(height), std::move(values));
}

std::string encode_pgm(const GreyImage& image) {
    std::ostringstream out;
    out << "P5\n" << image.width() << ' ' << image.height() << "\n255\n";
    std::string data(image.size(), '\0');
    for (std::size_t i = 0; i < image.size(); ++i) {
        const double v = std::clamp(std::floor(image[i] + 0.5), 0.0, 255.0);
        data[i] = static_cast<char>(static_cast<unsigned char>(v));
    }
    out << data;
    return out.str();
}

GreyImage read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PgmError("cannot open image '" + path.string() + "'");
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_pgm(bytes);
}

void write_pgm(const std::filesystem::path& path, const GreyImage& image) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw PgmError("cannot write image '" + path.string() + "'");
    const std::string bytes = encode_pgm(image);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

GreyImage rescale_to_grey(const RealGrid& grid) {
    double max = 0.0;
    for (double v : grid.values()) max = std::max(max, v);
    std::vector<double> values(grid.size(), 0.0);
    if (max > 0.0) {
        for (std::size_t i = 0; i < grid.size(); ++i)
            values[i] = std::floor(std::max(grid[i], 0.0) * 255.0 / max + 0.5);
    }
    return GreyImage(grid.width(), grid.height(), std::move(values));
}

}  // namespace pulsegabor
