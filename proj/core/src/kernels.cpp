#include "looptex/kernels.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <string>

#include "looptex/error.hpp"
#include "looptex/parallel.hpp"

namespace looptex {

namespace {

// Neighbor ring offsets: n=0 at the top-left corner, then clockwise.
constexpr int kNeighborDx[8] = {-1, 0, 1, 1, 1, 0, -1, -1};
constexpr int kNeighborDy[8] = {-1, -1, -1, 0, 1, 1, 1, 0};

int rank_value(int response, RankKey key) {
    return key == RankKey::Signed ? response : std::abs(response);
}

// Tie-break strength: how much direction n differs from its two ring
// neighbors. The more differing direction wins the higher weight.
int tie_strength(const KirschResponses& m, int n) {
    const int prev = m.m[(n + 7) & 7];
    const int next = m.m[(n + 1) & 7];
    return std::max(std::abs(m.m[n] - prev), std::abs(m.m[n] - next));
}

// Total order on directions, weakest first: rank key, then tie strength,
// then direction index. The three fields pack into one integer (key 32
// bits, tie strength 13 bits, index 3 bits) so the sort compares plain
// uint64s instead of re-deriving tie strengths per comparison.
std::array<int, 8> directions_by_rank(const KirschResponses& m, RankKey key) {
    std::array<std::uint64_t, 8> packed;
    for (int n = 0; n < 8; ++n) {
        const auto biased =
            static_cast<std::uint32_t>(rank_value(m.m[n], key)) ^ 0x80000000u;
        packed[n] = (static_cast<std::uint64_t>(biased) << 16) |
                    (static_cast<std::uint64_t>(tie_strength(m, n)) << 3) |
                    static_cast<std::uint64_t>(n);
    }
    // insertion sort; 8 elements
    for (int i = 1; i < 8; ++i) {
        const std::uint64_t v = packed[i];
        int j = i - 1;
        for (; j >= 0 && packed[j] > v; --j) packed[j + 1] = packed[j];
        packed[j + 1] = v;
    }
    std::array<int, 8> order;
    for (int n = 0; n < 8; ++n) order[n] = static_cast<int>(packed[n] & 7);
    return order;
}

void check_k(int k) {
    if (k < 1 || k > 8)
        throw InvalidArgument("ldp threshold rank k must be in 1..8, got " + std::to_string(k));
}

}  // namespace

int code_bits(DescriptorKind kind) { return kind == DescriptorKind::Mct ? 9 : 8; }

const char* kind_name(DescriptorKind kind) {
    switch (kind) {
        case DescriptorKind::Lbp: return "lbp";
        case DescriptorKind::Mct: return "mct";
        case DescriptorKind::Lgp: return "lgp";
        case DescriptorKind::Ldp: return "ldp";
        case DescriptorKind::LdpRi: return "ldp-ri";
        case DescriptorKind::Loop: return "loop";
    }
    return "?";
}

DescriptorKind kind_from_name(std::string_view name) {
    if (name == "lbp") return DescriptorKind::Lbp;
    if (name == "mct") return DescriptorKind::Mct;
    if (name == "lgp") return DescriptorKind::Lgp;
    if (name == "ldp") return DescriptorKind::Ldp;
    if (name == "ldp-ri") return DescriptorKind::LdpRi;
    if (name == "loop") return DescriptorKind::Loop;
    throw InvalidArgument("unknown descriptor kind \"" + std::string(name) +
                          "\" (expected lbp|mct|lgp|ldp|ldp-ri|loop)");
}

const char* rank_key_name(RankKey key) {
    return key == RankKey::Signed ? "signed" : "absolute";
}

RankKey rank_key_from_name(std::string_view name) {
    if (name == "signed") return RankKey::Signed;
    if (name == "absolute") return RankKey::Absolute;
    throw InvalidArgument("unknown rank key \"" + std::string(name) +
                          "\" (expected signed|absolute)");
}

KirschResponses kirsch_responses(const Patch3& p) {
    int total = 0;
    for (int v : p.neighbors) total += v;
    KirschResponses r;
    for (int n = 0; n < 8; ++n) {
        const int arc = p.neighbors[(n + 7) & 7] + p.neighbors[n] + p.neighbors[(n + 1) & 7];
        // 5*arc - 3*(total - arc)
        r.m[n] = 8 * arc - 3 * total;
    }
    return r;
}

std::uint16_t lbp_code(const Patch3& p) {
    std::uint16_t code = 0;
    for (int n = 0; n < 8; ++n)
        if (p.neighbors[n] >= p.center) code |= static_cast<std::uint16_t>(1u << n);
    return code;
}

std::uint16_t mct_code(const Patch3& p) {
    int sum9 = p.center;
    for (int v : p.neighbors) sum9 += v;
    // i >= sum9/9, compared exactly as 9*i >= sum9
    std::uint16_t code = 0;
    for (int n = 0; n < 8; ++n)
        if (9 * p.neighbors[n] >= sum9) code |= static_cast<std::uint16_t>(1u << n);
    if (9 * p.center >= sum9) code |= 1u << 8;
    return code;
}

std::uint16_t lgp_code(const Patch3& p) {
    int g[8];
    int gsum = 0;
    for (int n = 0; n < 8; ++n) {
        g[n] = std::abs(p.neighbors[n] - p.center);
        gsum += g[n];
    }
    // g_n >= gsum/8, compared exactly as 8*g_n >= gsum
    std::uint16_t code = 0;
    for (int n = 0; n < 8; ++n)
        if (8 * g[n] >= gsum) code |= static_cast<std::uint16_t>(1u << n);
    return code;
}

std::uint16_t ldp_code(const KirschResponses& m, int k, RankKey key) {
    check_k(k);
    std::array<int, 8> v;
    for (int n = 0; n < 8; ++n) v[n] = rank_value(m.m[n], key);
    std::array<int, 8> sorted = v;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const int threshold = sorted[k - 1];  // k-th highest
    std::uint16_t code = 0;
    for (int n = 0; n < 8; ++n)
        if (v[n] >= threshold) code |= static_cast<std::uint16_t>(1u << n);
    return code;
}

std::uint16_t ldp_ri_code(const KirschResponses& m, int k, RankKey key) {
    const std::uint16_t base = ldp_code(m, k, key);
    const int strongest = directions_by_rank(m, key)[7];
    // Direction `strongest` lands on the MSB; the rest follow the ring.
    std::uint16_t code = 0;
    for (int n = 0; n < 8; ++n)
        if (base & (1u << n)) code |= static_cast<std::uint16_t>(1u << (7 - ((n - strongest + 8) & 7)));
    return code;
}

RankAssignment rank_exponents(const KirschResponses& m, RankKey key) {
    const std::array<int, 8> order = directions_by_rank(m, key);
    RankAssignment r;
    for (int rank = 0; rank < 8; ++rank) r.w[order[rank]] = rank;
    return r;
}

std::vector<int> tie_break_order(const KirschResponses& m, const std::vector<int>& tied) {
    std::vector<int> order = tied;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const int ta = tie_strength(m, a), tb = tie_strength(m, b);
        if (ta != tb) return ta < tb;
        return a < b;
    });
    return order;
}

std::uint16_t loop_code(const Patch3& p, RankKey key) {
    const RankAssignment ranks = rank_exponents(kirsch_responses(p), key);
    std::uint16_t code = 0;
    for (int n = 0; n < 8; ++n)
        if (p.neighbors[n] >= p.center) code |= static_cast<std::uint16_t>(1u << ranks.w[n]);
    return code;
}

std::uint16_t patch_code(const Patch3& p, DescriptorKind kind, const KernelParams& params) {
    switch (kind) {
        case DescriptorKind::Lbp: return lbp_code(p);
        case DescriptorKind::Mct: return mct_code(p);
        case DescriptorKind::Lgp: return lgp_code(p);
        case DescriptorKind::Ldp: return ldp_code(kirsch_responses(p), params.k, params.rank_key);
        case DescriptorKind::LdpRi:
            return ldp_ri_code(kirsch_responses(p), params.k, params.rank_key);
        case DescriptorKind::Loop: return loop_code(p, params.rank_key);
    }
    throw InvalidArgument("unknown descriptor kind");
}

Patch3 patch_at(const GrayImage& img, int cx, int cy) {
    Patch3 p;
    p.center = img.at(cx, cy);
    for (int n = 0; n < 8; ++n)
        p.neighbors[n] = img.at(cx + kNeighborDx[n], cy + kNeighborDy[n]);
    return p;
}

CodeMap code_map(const GrayImage& img, DescriptorKind kind, const KernelParams& params,
                 int threads) {
    if (img.width() < 3 || img.height() < 3)
        throw InvalidArgument("code map needs at least a 3x3 image, got " +
                              std::to_string(img.width()) + "x" + std::to_string(img.height()));
    if (kind == DescriptorKind::Ldp || kind == DescriptorKind::LdpRi) check_k(params.k);

    CodeMap map;
    map.width = img.width() - 2;
    map.height = img.height() - 2;
    map.bits = code_bits(kind);
    map.data.resize(static_cast<std::size_t>(map.width) * static_cast<std::size_t>(map.height));

    parallel_for(0, map.height, threads, [&](int y) {
        std::uint16_t* dst = map.data.data() + static_cast<std::size_t>(y) * map.width;
        for (int x = 0; x < map.width; ++x)
            dst[x] = patch_code(patch_at(img, x + 1, y + 1), kind, params);
    });
    return map;
}

GrayImage code_map_to_gray(const CodeMap& map) {
    if (map.bits > 8)
        throw InvalidArgument("a " + std::to_string(map.bits) +
                              "-bit code map does not fit an 8-bit image; use raw16 output");
    std::vector<std::uint8_t> data(map.data.size());
    std::transform(map.data.begin(), map.data.end(), data.begin(),
                   [](std::uint16_t v) { return static_cast<std::uint8_t>(v); });
    return GrayImage(map.width, map.height, std::move(data));
}

void save_code_map_raw16(const CodeMap& map, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    for (std::uint16_t v : map.data) {
        const char bytes[2] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8)};
        out.write(bytes, 2);
    }
    if (!out) throw IoError("write failed for " + path.string());

    const std::filesystem::path sidecar = path.string() + ".hdr";
    std::ofstream hdr(sidecar, std::ios::trunc);
    if (!hdr) throw IoError("cannot open " + sidecar.string() + " for writing");
    hdr << "width " << map.width << "\nheight " << map.height << "\nbits " << map.bits << "\n";
    if (!hdr) throw IoError("write failed for " + sidecar.string());
}

CodeMap load_code_map_raw16(const std::filesystem::path& path) {
    const std::filesystem::path sidecar = path.string() + ".hdr";
    std::ifstream hdr(sidecar);
    if (!hdr) throw IoError("cannot open " + sidecar.string());

    CodeMap map;
    std::string field;
    for (const char* expected : {"width", "height", "bits"}) {
        int value = 0;
        if (!(hdr >> field >> value) || field != expected)
            throw ParseError("malformed sidecar " + sidecar.string() + ": expected \"" +
                             expected + " <value>\"");
        if (field == "width") map.width = value;
        else if (field == "height") map.height = value;
        else map.bits = value;
    }
    if (map.width < 1 || map.height < 1 || map.bits < 1 || map.bits > 16)
        throw ParseError("sidecar " + sidecar.string() + " has out-of-range dimensions");

    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    const std::size_t count =
        static_cast<std::size_t>(map.width) * static_cast<std::size_t>(map.height);
    map.data.resize(count);
    std::vector<char> bytes(count * 2);
    in.read(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (static_cast<std::size_t>(in.gcount()) != bytes.size())
        throw ParseError("truncated raw16 payload in " + path.string());
    for (std::size_t i = 0; i < count; ++i) {
        map.data[i] = static_cast<std::uint16_t>(
            static_cast<unsigned char>(bytes[2 * i]) |
            (static_cast<unsigned char>(bytes[2 * i + 1]) << 8));
        if (map.data[i] >= (1u << map.bits))
            throw ParseError("code value exceeds " + std::to_string(map.bits) + " bits in " +
                             path.string());
    }
    return map;
}

}  // namespace looptex
