// Acceptance suite: runs every shipping criterion and prints one pass/fail
// line per criterion. Exit code is the number of failed criteria.

#include <sys/wait.h>

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "looptex/classify.hpp"
#include "looptex/descriptor.hpp"
#include "looptex/error.hpp"
#include "looptex/kernels.hpp"
#include "looptex/parallel.hpp"
#include "looptex/raster.hpp"
#include "looptex/stats.hpp"
#include "support/oracles.hpp"
#include "support/synth.hpp"

using namespace looptex;
namespace lt = looptex::testing;
namespace fs = std::filesystem;

namespace {

void require(bool condition, const std::string& message) {
    if (!condition) throw std::runtime_error(message);
}

std::string fmt(const char* format, ...) {
    char buf[256];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof buf, format, args);
    va_end(args);
    return buf;
}

// ---------------------------------------------------------------------------
// 1. Sign-test golden values: p for 22 wins of 30 at alpha 0.05 over 6
// comparisons.

std::string sign_test_golden() {
    const double p = binom_one_tail(30, 22);
    require(std::abs(p - 0.008063) <= 0.00005, fmt("binom_one_tail(30,22) = %.6f", p));
    const double alpha = bonferroni(0.05, 6);
    require(std::abs(alpha - 0.008333) <= 1e-6, fmt("bonferroni(0.05,6) = %.6f", alpha));

    std::vector<AccuracyRecord> a, b;
    int index = 0;
    for (const char* classifier : {"nn", "crc"}) {
        for (const char* dataset : {"d1", "d2", "d3"}) {
            for (int fold = 0; fold < 5; ++fold, ++index) {
                const bool a_wins = index < 22;
                a.push_back({"loop", classifier, dataset, fold, a_wins ? 90.0 : 70.0, 10, 42});
                b.push_back({"ldp-ri", classifier, dataset, fold, a_wins ? 85.0 : 75.0, 10, 42});
            }
        }
    }
    const SignTestResult r = sign_test(a, b, 0.05, 6);
    require(r.n == 30 && r.wins == 22, "pair counting is off");
    require(r.significant, "22/30 must be significant at 0.05/6");
    return fmt("p=%.6f < alpha=%.6f", r.p_one_tail, r.alpha_corrected);
}

// ---------------------------------------------------------------------------
// 2. LOOP rotation invariance over 10,000 seeded tie-free patches.

std::string loop_rotation_invariance() {
    std::mt19937_64 rng(20240);
    int checked = 0;
    for (int i = 0; i < 10000; ++i) {
        const Patch3 p = lt::random_tie_free_patch(rng);
        const std::uint16_t code = loop_code(p);
        for (int turns = 1; turns <= 3; ++turns) {
            const std::uint16_t rotated = loop_code(lt::rotate_patch(p, turns));
            require(rotated == code,
                    fmt("patch %d: %d-quarter rotation changed %u -> %u", i, turns, code, rotated));
        }
        ++checked;
    }
    return fmt("%d/10000 patches invariant under 90/180/270 deg", checked);
}

// ---------------------------------------------------------------------------
// 3. LBP rotation-variance witness.

std::string lbp_rotation_witness() {
    std::mt19937_64 rng(20241);
    for (int i = 0; i < 10000; ++i) {
        const Patch3 p = lt::random_patch(rng);
        if (lbp_code(lt::rotate_patch(p, 1)) != lbp_code(p))
            return fmt("witness found after %d samples", i + 1);
    }
    throw std::runtime_error("no patch changed its LBP code under rotation");
}

// ---------------------------------------------------------------------------
// 4. LDP-ri structure: leading 1 and cyclic-shift invariance.

std::string ldp_ri_structure() {
    std::mt19937_64 rng(20242);
    for (int i = 0; i < 2000; ++i) {
        const Patch3 p = lt::random_tie_free_patch(rng);
        const KirschResponses m = kirsch_responses(p);
        const int k = 1 + static_cast<int>(rng() % 8);
        const std::uint16_t code = ldp_ri_code(m, k);
        require((code & 0x80) != 0, fmt("sample %d: MSB not set (k=%d)", i, k));
        for (int shift = 0; shift < 8; ++shift) {
            KirschResponses shifted;
            for (int n = 0; n < 8; ++n) shifted.m[(n + shift) % 8] = m.m[n];
            require(ldp_ri_code(shifted, k) == code,
                    fmt("sample %d: cyclic shift %d changed the code", i, shift));
        }
    }
    return "2000 tie-free response sets, all 8 shifts each";
}

// ---------------------------------------------------------------------------
// 5. LDP popcount = k, 1000 tie-free trials per k.

std::string ldp_popcount() {
    std::mt19937_64 rng(20243);
    for (int k = 1; k <= 8; ++k) {
        for (int i = 0; i < 1000; ++i) {
            const KirschResponses m = kirsch_responses(lt::random_tie_free_patch(rng));
            const int ones = std::popcount(ldp_code(m, k));
            require(ones == k, fmt("k=%d trial %d: popcount %d", k, i, ones));
        }
    }
    return "1000 trials per k in 1..8";
}

// ---------------------------------------------------------------------------
// 6. Oracle equivalence on the exhaustive {0,128,255}^9 alphabet.

std::string oracle_equivalence() {
    static constexpr std::uint8_t alphabet[3] = {0, 128, 255};
    long long patches = 0;
    for (int word = 0; word < 19683; ++word) {
        int digits = word;
        Patch3 p;
        p.center = alphabet[digits % 3];
        digits /= 3;
        for (int n = 0; n < 8; ++n) {
            p.neighbors[static_cast<std::size_t>(n)] = alphabet[digits % 3];
            digits /= 3;
        }

        const KirschResponses m = kirsch_responses(p);
        require(m.m == lt::kirsch_oracle(p), fmt("kirsch mismatch at word %d", word));
        require(lbp_code(p) == lt::lbp_oracle(p), fmt("lbp mismatch at word %d", word));
        require(mct_code(p) == lt::mct_oracle(p), fmt("mct mismatch at word %d", word));
        require(lgp_code(p) == lt::lgp_oracle(p), fmt("lgp mismatch at word %d", word));
        for (RankKey key : {RankKey::Signed, RankKey::Absolute}) {
            require(loop_code(p, key) == lt::loop_oracle(p, key),
                    fmt("loop mismatch at word %d", word));
            for (int k = 1; k <= 8; ++k) {
                require(ldp_code(m, k, key) == lt::ldp_oracle(m.m, k, key),
                        fmt("ldp mismatch at word %d k %d", word, k));
                require(ldp_ri_code(m, k, key) == lt::ldp_ri_oracle(m.m, k, key),
                        fmt("ldp-ri mismatch at word %d k %d", word, k));
            }
        }
        ++patches;
    }
    return fmt("%lld patches, six codes + kirsch, both rank keys, k=1..8", patches);
}

// ---------------------------------------------------------------------------
// 7. Tie-break fixture: the worked tied pair orders by the more differing
// ring neighborhood.

std::string tie_break_fixture() {
    // Two -2155 responses: index 2 sits next to -275 (difference 1880),
    // index 1 next to -2035 (difference 120).
    const KirschResponses m{{-2035, -2155, -2155, -275, 100, 500, 900, 1300}};
    const RankAssignment r = rank_exponents(m);
    require(r.w[2] == 1 && r.w[1] == 0,
            fmt("tied pair got w1=%d w2=%d, expected 0 and 1", r.w[1], r.w[2]));
    const std::vector<int> order = tie_break_order(m, {1, 2});
    require(order == std::vector<int>{1, 2}, "tie_break_order disagrees with the fixture");
    return "tied -2155 pair ranks 1880-diff above 120-diff";
}

// ---------------------------------------------------------------------------
// 8. Pipeline smoke benchmark: LOOP vs LBP on 90-degree-rotated test images.

struct SmokeAccuracy {
    double nn = 0.0;
    double crc = 0.0;
};

SmokeAccuracy smoke_accuracy(DescriptorKind kind, const std::vector<GrayImage>& images,
                             const std::vector<std::string>& labels,
                             const std::vector<int>& turns,
                             const std::vector<std::string>& classes, const FoldPlan& plan) {
    DescribeConfig cfg;
    cfg.kind = kind;
    cfg.levels = 3;

    LabeledSet set;
    set.name = "smoke";
    set.classes = classes;
    set.items.resize(images.size());
    std::vector<Descriptor> rotated(images.size());
    parallel_for(0, static_cast<int>(images.size()), 0, [&](int i) {
        const auto idx = static_cast<std::size_t>(i);
        LabeledItem item;
        item.descriptor = describe(images[idx], cfg, 1);
        item.label = labels[idx];
        item.path = std::to_string(i);
        set.items[idx] = std::move(item);
        rotated[idx] = describe(lt::rotate_image(images[idx], turns[idx]), cfg, 1);
    });

    SmokeAccuracy acc;
    for (int f = 0; f < plan.k; ++f) {
        LabeledSet train;
        train.name = set.name;
        train.classes = set.classes;
        std::vector<std::size_t> test;
        for (std::size_t i = 0; i < set.items.size(); ++i) {
            if (plan.assignment[i] == f)
                test.push_back(i);
            else
                train.items.push_back(set.items[i]);
        }
        const CrcClassifier crc(train, 1e-3);
        int nn_correct = 0, crc_correct = 0;
        for (std::size_t i : test) {
            if (nn_classify(train, rotated[i]) == labels[i]) ++nn_correct;
            if (crc.classify(rotated[i]) == labels[i]) ++crc_correct;
        }
        acc.nn += 100.0 * nn_correct / static_cast<double>(test.size());
        acc.crc += 100.0 * crc_correct / static_cast<double>(test.size());
    }
    acc.nn /= plan.k;
    acc.crc /= plan.k;
    return acc;
}

std::string pipeline_smoke() {
    const std::uint64_t seed = 42;
    constexpr int kPerClass = 40;
    constexpr int kSize = 64;

    const std::pair<lt::TextureKind, const char*> class_defs[4] = {
        {lt::TextureKind::FineStripes, "fine"},
        {lt::TextureKind::CoarseStripes, "coarse"},
        {lt::TextureKind::Checker, "checker"},
        {lt::TextureKind::Dots, "dots"},
    };

    std::mt19937_64 rng(seed);
    std::vector<GrayImage> images;
    std::vector<std::string> labels;
    std::vector<std::string> classes;
    for (const auto& [kind, name] : class_defs) {
        classes.push_back(name);
        for (int i = 0; i < kPerClass; ++i) {
            images.push_back(lt::make_texture(kind, kSize, rng));
            labels.push_back(name);
        }
    }
    std::sort(classes.begin(), classes.end());

    // One fixed rotation per test image, the same for every descriptor.
    std::vector<int> turns(images.size());
    for (std::size_t i = 0; i < turns.size(); ++i) {
        std::mt19937_64 r(seed * 1000003 + i);
        turns[i] = static_cast<int>(r() % 4);
    }

    LabeledSet skeleton;
    skeleton.classes = classes;
    skeleton.items.resize(images.size());
    for (std::size_t i = 0; i < images.size(); ++i) skeleton.items[i].label = labels[i];
    const FoldPlan plan = make_fold_plan(skeleton, 5, seed);

    const SmokeAccuracy loop = smoke_accuracy(DescriptorKind::Loop, images, labels, turns,
                                              classes, plan);
    const SmokeAccuracy lbp = smoke_accuracy(DescriptorKind::Lbp, images, labels, turns,
                                             classes, plan);

    require(loop.nn >= lbp.nn,
            fmt("nn: loop %.2f%% fell below lbp %.2f%%", loop.nn, lbp.nn));
    require(loop.crc >= lbp.crc,
            fmt("crc: loop %.2f%% fell below lbp %.2f%%", loop.crc, lbp.crc));
    require(loop.nn - lbp.nn >= 5.0,
            fmt("nn margin %.2f below 5 points (loop %.2f, lbp %.2f)", loop.nn - lbp.nn,
                loop.nn, lbp.nn));
    require(loop.crc - lbp.crc >= 5.0,
            fmt("crc margin %.2f below 5 points (loop %.2f, lbp %.2f)", loop.crc - lbp.crc,
                loop.crc, lbp.crc));
    return fmt("nn: loop %.2f vs lbp %.2f | crc: loop %.2f vs lbp %.2f", loop.nn, lbp.nn,
               loop.crc, lbp.crc);
}

// ---------------------------------------------------------------------------
// 9. cmd_classify determinism, including across parallelism settings.

int run_command(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::string classify_determinism() {
    lt::TempDir tmp("looptex-acceptance");
    std::mt19937_64 rng(20249);
    const fs::path root = tmp.path() / "data";
    fs::create_directories(root / "checker");
    fs::create_directories(root / "stripes");
    for (int i = 0; i < 8; ++i) {
        save_pgm(lt::make_texture(lt::TextureKind::Checker, 32, rng),
                 root / "checker" / (std::to_string(i) + ".pgm"));
        save_pgm(lt::make_texture(lt::TextureKind::FineStripes, 32, rng),
                 root / "stripes" / (std::to_string(i) + ".pgm"));
    }

    auto classify_to = [&](const std::string& name, int threads) {
        const fs::path out = tmp.path() / name;
        const std::string cmd =
            std::string(LOOPTEX_CLI_BIN) + " classify " + root.string() + " --out " +
            out.string() + " --kind loop,lbp --classifier both --levels 2 --folds 4" +
            " --seed 7 --threads " + std::to_string(threads) + " >" +
            (tmp.path() / (name + ".log")).string() + " 2>" +
            (tmp.path() / (name + ".err")).string();
        require(run_command(cmd) == 0, "cmd_classify exited nonzero (" + name + ")");
        return slurp(out);
    };

    const std::string first = classify_to("r1.csv", 1);
    const std::string second = classify_to("r2.csv", 1);
    const std::string third = classify_to("r3.csv", 4);
    require(!first.empty(), "results CSV is empty");
    require(first == second, "same flags produced different CSV bytes");
    require(first == third, "thread count changed the CSV bytes");
    return fmt("3 runs, %zu bytes each, byte-identical (threads 1,1,4)", first.size());
}

// ---------------------------------------------------------------------------
// 10. Histogram/descriptor invariants.

std::string descriptor_invariants() {
    std::mt19937_64 rng(20250);
    int checked = 0;
    for (DescriptorKind kind : {DescriptorKind::Lbp, DescriptorKind::Mct, DescriptorKind::Loop}) {
        for (int levels = 1; levels <= 3; ++levels) {
            const GrayImage img = lt::random_image(24 + static_cast<int>(rng() % 17),
                                                   24 + static_cast<int>(rng() % 17), rng);
            DescribeConfig cfg;
            cfg.kind = kind;
            cfg.levels = levels;
            const Descriptor d = describe(img, cfg);
            const int bins = 1 << code_bits(kind);
            require(d.bins_per_level == bins, "bins_per_level mismatch");
            require(d.values.size() == static_cast<std::size_t>(levels) * bins,
                    fmt("%s levels=%d: length %zu != %d", kind_name(kind), levels,
                        d.values.size(), levels * bins));
            for (int level = 0; level < levels; ++level) {
                double sum = 0.0;
                for (int b = 0; b < bins; ++b) {
                    const double v = d.values[static_cast<std::size_t>(level * bins + b)];
                    require(v >= 0.0, "negative histogram mass");
                    sum += v;
                }
                require(std::abs(sum - 1.0) < 1e-9,
                        fmt("%s level %d sums to %.12f", kind_name(kind), level, sum));
            }
            ++checked;
        }
    }
    return fmt("%d (kind, levels) combinations", checked);
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<std::string()> run;
    };
    const std::vector<Criterion> criteria = {
        {"sign-test golden values (22/30, 0.05/6)", sign_test_golden},
        {"loop rotation invariance (10k tie-free patches)", loop_rotation_invariance},
        {"lbp rotation-variance witness", lbp_rotation_witness},
        {"ldp-ri leading 1 + cyclic-shift invariance", ldp_ri_structure},
        {"ldp popcount equals k (tie-free)", ldp_popcount},
        {"oracle equivalence on {0,128,255}^9", oracle_equivalence},
        {"tie-break fixture (tied -2155 pair)", tie_break_fixture},
        {"pipeline smoke: loop >= lbp + 5 on rotated tests", pipeline_smoke},
        {"cmd_classify determinism across runs and threads", classify_determinism},
        {"histogram/descriptor invariants", descriptor_invariants},
    };

    int failures = 0;
    for (const Criterion& criterion : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        std::string note;
        bool ok = true;
        try {
            note = criterion.run();
        } catch (const std::exception& e) {
            note = e.what();
            ok = false;
        }
        const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
        std::printf("%s  %-52s (%5lld ms)  %s\n", ok ? "PASS" : "FAIL", criterion.name,
                    static_cast<long long>(ms), note.c_str());
        if (!ok) ++failures;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
                criteria.size());
    return failures;
}
