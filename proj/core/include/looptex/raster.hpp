#pragma once

#include <cassert>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace looptex {

/// 8-bit single-channel raster, row-major.
///
/// Images as small as 1x1 are representable and writable so that tiny code
/// maps stay first-class values; everything that needs a 3x3 neighborhood
/// (including load_pgm) enforces the 3x3 minimum itself. Instances are
/// immutable after construction and safe to share across threads.
class GrayImage {
public:
    GrayImage(int width, int height, std::vector<std::uint8_t> data);

    static GrayImage constant(int width, int height, std::uint8_t value);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }

    std::uint8_t at(int x, int y) const {
        assert(x >= 0 && x < width_ && y >= 0 && y < height_);
        return data_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                     static_cast<std::size_t>(x)];
    }

    const std::uint8_t* row(int y) const {
        assert(y >= 0 && y < height_);
        return data_.data() + static_cast<std::size_t>(y) * static_cast<std::size_t>(width_);
    }

    std::span<const std::uint8_t> pixels() const noexcept { return data_; }

    bool operator==(const GrayImage&) const = default;

private:
    int width_;
    int height_;
    std::vector<std::uint8_t> data_;
};

/// Gaussian pyramid; level 0 is the original image, each further level is
/// blurred then decimated by 2. Every level is at least 3x3.
struct Pyramid {
    std::vector<GrayImage> levels;
};

/// Loads a binary PGM (magic "P5", maxval 255). '#' comments are accepted
/// between header tokens. Images smaller than 3x3 are rejected.
GrayImage load_pgm(const std::filesystem::path& path);

/// Writes a binary PGM with the exact header "P5\n<w> <h>\n255\n".
/// Round-trips through load_pgm bit-exactly (for images >= 3x3).
void save_pgm(const GrayImage& img, const std::filesystem::path& path);

/// Separable 5-tap binomial blur [1,4,6,4,1]/16, horizontal then vertical,
/// with edge replication at the borders. Intermediate sums stay exact
/// integers; the single final division rounds half-up, which makes the
/// result equal to a dense 2-D convolution with the outer-product kernel.
GrayImage gaussian_blur(const GrayImage& img, int threads = 0);

/// Level 0 is the input; each next level is gaussian_blur followed by
/// decimation keeping even-indexed rows/columns (floor-halved dimensions).
/// Throws if any requested level would fall below 3x3, naming that level.
Pyramid build_pyramid(const GrayImage& img, int levels, int threads = 0);

}  // namespace looptex
