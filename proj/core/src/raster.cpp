#include "looptex/raster.hpp"

#include <algorithm>
#include <fstream>
#include <string>

#include "looptex/error.hpp"
#include "looptex/parallel.hpp"

namespace looptex {

namespace {

constexpr int kBlurTaps[5] = {1, 4, 6, 4, 1};

int clamp_index(int i, int n) { return std::clamp(i, 0, n - 1); }

// Next PGM header token, skipping whitespace and '#' comment lines.
std::string next_header_token(std::istream& in) {
    std::string tok;
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    while (c != EOF && !std::isspace(c) && c != '#') {
        tok.push_back(static_cast<char>(c));
        c = in.get();
    }
    if (c != EOF) in.unget();
    return tok;
}

int parse_header_int(std::istream& in, const char* field) {
    const std::string tok = next_header_token(in);
    if (tok.empty()) throw ParseError(std::string("missing PGM ") + field);
    int value = 0;
    for (char ch : tok) {
        if (ch < '0' || ch > '9')
            throw ParseError(std::string("malformed PGM ") + field + " \"" + tok + "\"");
        value = value * 10 + (ch - '0');
        if (value > 1 << 28) throw ParseError(std::string("PGM ") + field + " out of range");
    }
    return value;
}

}  // namespace

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
    if (width_ < 1 || height_ < 1)
        throw InvalidArgument("image dimensions must be positive");
    if (data_.size() != static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_))
        throw InvalidArgument("pixel buffer size does not match width * height");
}

GrayImage GrayImage::constant(int width, int height, std::uint8_t value) {
    return GrayImage(width, height,
                     std::vector<std::uint8_t>(
                         static_cast<std::size_t>(width) * static_cast<std::size_t>(height),
                         value));
}

GrayImage load_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());

    const std::string magic = next_header_token(in);
    if (magic != "P5") {
        if (magic.size() == 2 && magic[0] == 'P')
            throw ParseError("unsupported PGM variant \"" + magic + "\" in " + path.string() +
                             " (only binary P5 is supported)");
        throw ParseError("malformed PGM magic in " + path.string());
    }

    const int width = parse_header_int(in, "width");
    const int height = parse_header_int(in, "height");
    const int maxval = parse_header_int(in, "maxval");
    if (maxval != 255)
        throw ParseError("unsupported PGM maxval " + std::to_string(maxval) + " in " +
                         path.string() + " (must be 255)");
    if (width < 3 || height < 3)
        throw ParseError("PGM " + path.string() + " is " + std::to_string(width) + "x" +
                         std::to_string(height) + ", below the 3x3 minimum");

    // Exactly one whitespace byte separates the header from the payload.
    const int sep = in.get();
    if (sep == EOF || !std::isspace(sep))
        throw ParseError("missing whitespace after PGM maxval in " + path.string());

    const std::size_t count =
        static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    std::vector<std::uint8_t> data(count);
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(count));
    if (static_cast<std::size_t>(in.gcount()) != count)
        throw ParseError("truncated pixel data in " + path.string() + ": expected " +
                         std::to_string(count) + " bytes, got " + std::to_string(in.gcount()));

    return GrayImage(width, height, std::move(data));
}

void save_pgm(const GrayImage& img, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels().data()),
              static_cast<std::streamsize>(img.pixels().size()));
    if (!out) throw IoError("write failed for " + path.string());
}

GrayImage gaussian_blur(const GrayImage& img, int threads) {
    const int w = img.width();
    const int h = img.height();

    // Horizontal pass keeps raw tap sums (<= 16*255) so the single rounding
    // below matches a dense 2-D convolution exactly.
    std::vector<int> hsum(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
    parallel_for(0, h, threads, [&](int y) {
        const std::uint8_t* src = img.row(y);
        int* dst = hsum.data() + static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w; ++x) {
            int acc = 0;
            for (int t = 0; t < 5; ++t) acc += kBlurTaps[t] * src[clamp_index(x + t - 2, w)];
            dst[x] = acc;
        }
    });

    std::vector<std::uint8_t> out(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
    parallel_for(0, h, threads, [&](int y) {
        std::uint8_t* dst = out.data() + static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w; ++x) {
            int acc = 0;
            for (int t = 0; t < 5; ++t)
                acc += kBlurTaps[t] * hsum[static_cast<std::size_t>(clamp_index(y + t - 2, h)) * w + x];
            // round half-up, then clamp; acc is non-negative
            dst[x] = static_cast<std::uint8_t>(std::min((acc + 128) >> 8, 255));
        }
    });

    return GrayImage(w, h, std::move(out));
}

Pyramid build_pyramid(const GrayImage& img, int levels, int threads) {
    if (levels < 1) throw InvalidArgument("pyramid needs at least 1 level");

    // Validate every level before doing any work.
    int w = img.width(), h = img.height();
    for (int level = 0; level < levels; ++level) {
        if (w < 3 || h < 3)
            throw InvalidArgument("pyramid level " + std::to_string(level) + " would be " +
                                  std::to_string(w) + "x" + std::to_string(h) +
                                  ", below the 3x3 minimum");
        w /= 2;
        h /= 2;
    }

    Pyramid pyr;
    pyr.levels.reserve(static_cast<std::size_t>(levels));
    pyr.levels.push_back(img);
    for (int level = 1; level < levels; ++level) {
        const GrayImage& prev = pyr.levels.back();
        const GrayImage blurred = gaussian_blur(prev, threads);
        const int nw = prev.width() / 2;
        const int nh = prev.height() / 2;
        std::vector<std::uint8_t> data(static_cast<std::size_t>(nw) *
                                       static_cast<std::size_t>(nh));
        for (int y = 0; y < nh; ++y)
            for (int x = 0; x < nw; ++x)
                data[static_cast<std::size_t>(y) * nw + x] = blurred.at(2 * x, 2 * y);
        pyr.levels.emplace_back(nw, nh, std::move(data));
    }
    return pyr;
}

}  // namespace looptex
