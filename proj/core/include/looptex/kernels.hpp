#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "looptex/raster.hpp"

namespace looptex {

/// 3x3 intensity neighborhood: center pixel plus the 8 surrounding pixels in
/// a fixed circular order. Neighbor 0 sits at the top-left corner and the
/// ring continues clockwise: up, up-right, right, down-right, down,
/// down-left, left.
struct Patch3 {
    std::uint8_t center = 0;
    std::array<std::uint8_t, 8> neighbors{};
};

/// Signed responses of the 8 Kirsch compass kernels; m[n] is the kernel
/// peaking toward neighbor n. Each value lies in [-3825, 3825].
struct KirschResponses {
    std::array<int, 8> m{};
};

/// Which quantity orders directions when Kirsch responses are ranked.
/// Signed compares the raw responses, Absolute compares their magnitudes.
enum class RankKey { Signed, Absolute };

/// One binarization exponent per direction; always a permutation of {0..7}.
struct RankAssignment {
    std::array<int, 8> w{};
};

enum class DescriptorKind { Lbp, Mct, Lgp, Ldp, LdpRi, Loop };

/// Bits per code: 9 for MCT, 8 for everything else.
int code_bits(DescriptorKind kind);

const char* kind_name(DescriptorKind kind);
DescriptorKind kind_from_name(std::string_view name);

const char* rank_key_name(RankKey key);
RankKey rank_key_from_name(std::string_view name);

/// Knobs shared by the rank-based codes.
struct KernelParams {
    int k = 3;  // LDP / LDP-ri threshold rank, 1..8
    RankKey rank_key = RankKey::Signed;
};

/// Kirsch compass bank over the neighbor ring:
///   m_n = 5*(i_{n-1} + i_n + i_{n+1}) - 3*(sum of the other five neighbors)
/// with ring indices mod 8 and zero weight on the center pixel.
KirschResponses kirsch_responses(const Patch3& p);

/// Classic LBP: bit n set iff i_n >= i_c.
std::uint16_t lbp_code(const Patch3& p);

/// Modified census transform: 9-bit word thresholding every pixel against
/// the mean of all 9 (exact rational comparison). Bits 0..7 are the
/// neighbors, bit 8 is the center.
std::uint16_t mct_code(const Patch3& p);

/// Local gradient pattern: bit n set iff |i_n - i_c| >= mean of the 8
/// absolute gradients (exact rational comparison).
std::uint16_t lgp_code(const Patch3& p);

/// LDP: bit n set iff direction n ranks at least as high as the k-th
/// highest response under `key`. Tie-free inputs set exactly k bits.
std::uint16_t ldp_code(const KirschResponses& m, int k, RankKey key = RankKey::Signed);

/// Rotation-invariant LDP: the LDP word circularly aligned so the strongest
/// direction lands on the most significant bit. Invariant under cyclic
/// shifts of the response vector; tie-free words always lead with a 1.
std::uint16_t ldp_ri_code(const KirschResponses& m, int k, RankKey key = RankKey::Signed);

/// Assigns each direction a distinct exponent in {0..7}; a larger rank key
/// earns a larger exponent. Rank-key ties are ordered by how much the tied
/// response differs from its two ring neighbors (see tie_break_order);
/// residual exact ties give ascending weights to ascending direction index.
RankAssignment rank_exponents(const KirschResponses& m, RankKey key = RankKey::Signed);

/// Orders a set of rank-tied directions from lowest to highest weight.
/// The sort key of direction n is max(|m_n - m_{n-1}|, |m_n - m_{n+1}|)
/// over the ring; a more differing neighborhood wins the higher weight.
std::vector<int> tie_break_order(const KirschResponses& m, const std::vector<int>& tied);

/// LOOP: LBP thresholding with the binarization exponent of each neighbor
/// taken from the rank of its Kirsch response. Rotation invariant by
/// construction for tie-free responses.
std::uint16_t loop_code(const Patch3& p, RankKey key = RankKey::Signed);

/// Dispatches to the code of `kind`.
std::uint16_t patch_code(const Patch3& p, DescriptorKind kind, const KernelParams& params);

/// Extracts the 3x3 patch centered at (cx, cy); the center must be at least
/// one pixel away from every border.
Patch3 patch_at(const GrayImage& img, int cx, int cy);

/// Raster of per-pixel code values. 8-bit kinds fit a PGM; 9-bit MCT maps
/// need the raw16 container below.
struct CodeMap {
    int width = 0;
    int height = 0;
    int bits = 8;
    std::vector<std::uint16_t> data;  // row-major, width*height values

    std::uint16_t at(int x, int y) const {
        return data[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                    static_cast<std::size_t>(x)];
    }
};

/// Applies the per-pixel code at every interior pixel. The output shrinks by
/// one pixel per side: out(x, y) is the code of the patch centered at
/// (x+1, y+1). Border pixels are never patch centers, so no fictitious
/// patterns enter the histograms. Row-parallel; output is bit-identical for
/// any thread count.
CodeMap code_map(const GrayImage& img, DescriptorKind kind,
                 const KernelParams& params = {}, int threads = 0);

/// Converts an 8-bit code map to a writable image; throws for 9-bit maps.
GrayImage code_map_to_gray(const CodeMap& map);

/// Stores a code map as little-endian 16-bit raw values plus a text sidecar
/// "<path>.hdr" with lines "width <w>", "height <h>", "bits <b>".
void save_code_map_raw16(const CodeMap& map, const std::filesystem::path& path);
CodeMap load_code_map_raw16(const std::filesystem::path& path);

}  // namespace looptex
