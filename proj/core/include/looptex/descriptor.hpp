#pragma once

#include <ostream>
#include <string_view>
#include <vector>

#include "looptex/kernels.hpp"
#include "looptex/raster.hpp"

namespace looptex {

/// L1-normalized code histogram: bin c = (count of code c) / (map pixels).
struct Histogram {
    std::vector<double> bins;  // 256 bins for 8-bit codes, 512 for MCT
};

Histogram histogram(const CodeMap& map);

struct DescribeConfig {
    DescriptorKind kind = DescriptorKind::Loop;
    KernelParams params;
    int levels = 3;
};

/// Per-image feature vector: the per-level histograms of a Gaussian pyramid,
/// concatenated level 0 first. Each per-level segment is individually
/// L1-normalized so every scale contributes equal total mass.
struct Descriptor {
    DescriptorKind kind = DescriptorKind::Loop;
    KernelParams params;
    int levels = 0;
    int bins_per_level = 0;
    std::vector<double> values;  // levels * bins_per_level entries
};

Descriptor describe(const GrayImage& img, const DescribeConfig& cfg, int threads = 0);

/// Descriptor CSV: header "path,kind,levels,v0,...", then one row per image
/// with vector entries printed to 9 significant digits.
void write_descriptor_csv_header(std::ostream& os, int vector_length);
void write_descriptor_csv_row(std::ostream& os, std::string_view path, const Descriptor& d);

}  // namespace looptex
