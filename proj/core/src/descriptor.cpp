#include "looptex/descriptor.hpp"

#include <cstdio>

#include "looptex/error.hpp"

namespace looptex {

Histogram histogram(const CodeMap& map) {
    if (map.data.empty()) throw InvalidArgument("cannot build a histogram of an empty code map");
    Histogram h;
    h.bins.assign(std::size_t{1} << map.bits, 0.0);
    for (std::uint16_t code : map.data) h.bins[code] += 1.0;
    const double total = static_cast<double>(map.data.size());
    for (double& b : h.bins) b /= total;
    return h;
}

Descriptor describe(const GrayImage& img, const DescribeConfig& cfg, int threads) {
    const Pyramid pyr = build_pyramid(img, cfg.levels, threads);

    Descriptor d;
    d.kind = cfg.kind;
    d.params = cfg.params;
    d.levels = cfg.levels;
    d.bins_per_level = 1 << code_bits(cfg.kind);
    d.values.reserve(static_cast<std::size_t>(cfg.levels) * d.bins_per_level);
    for (const GrayImage& level : pyr.levels) {
        const Histogram h = histogram(code_map(level, cfg.kind, cfg.params, threads));
        d.values.insert(d.values.end(), h.bins.begin(), h.bins.end());
    }
    return d;
}

void write_descriptor_csv_header(std::ostream& os, int vector_length) {
    os << "path,kind,levels";
    for (int i = 0; i < vector_length; ++i) os << ",v" << i;
    os << "\n";
}

void write_descriptor_csv_row(std::ostream& os, std::string_view path, const Descriptor& d) {
    os << path << ',' << kind_name(d.kind) << ',' << d.levels;
    char buf[32];
    for (double v : d.values) {
        std::snprintf(buf, sizeof buf, "%.9g", v);
        os << ',' << buf;
    }
    os << "\n";
}

}  // namespace looptex
