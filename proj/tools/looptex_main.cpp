// Command-line front end: encode, describe, classify, stats, bench.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "looptex/classify.hpp"
#include "looptex/descriptor.hpp"
#include "looptex/error.hpp"
#include "looptex/kernels.hpp"
#include "looptex/parallel.hpp"
#include "looptex/raster.hpp"
#include "looptex/stats.hpp"

namespace fs = std::filesystem;
using namespace looptex;

namespace {

std::vector<DescriptorKind> parse_kinds(const std::string& arg) {
    if (arg == "all")
        return {DescriptorKind::Lbp,   DescriptorKind::Mct,  DescriptorKind::Lgp,
                DescriptorKind::Ldp,   DescriptorKind::LdpRi, DescriptorKind::Loop};
    std::vector<DescriptorKind> kinds;
    std::size_t start = 0;
    while (start <= arg.size()) {
        const std::size_t comma = arg.find(',', start);
        const std::string name =
            arg.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        kinds.push_back(kind_from_name(name));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return kinds;
}

std::vector<ClassifierKind> parse_classifiers(const std::string& arg) {
    if (arg == "both") return {ClassifierKind::Nn, ClassifierKind::Crc};
    return {classifier_from_name(arg)};
}

bool has_pgm_extension(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext == ".pgm";
}

// All PGM files under `input` (or `input` itself), path-sorted.
std::vector<fs::path> collect_pgms(const fs::path& input) {
    std::vector<fs::path> files;
    if (fs::is_directory(input)) {
        for (const auto& entry : fs::recursive_directory_iterator(input))
            if (entry.is_regular_file() && has_pgm_extension(entry.path()))
                files.push_back(entry.path());
        std::sort(files.begin(), files.end());
    } else {
        files.push_back(input);
    }
    return files;
}

struct DescribeOpts {
    std::string kind = "loop";
    int levels = 3;
    int k = 3;
    std::string rank_key = "signed";
    int threads = 0;
};

void add_describe_flags(CLI::App* cmd, DescribeOpts& o) {
    cmd->add_option("--kind", o.kind, "Descriptor kind (lbp|mct|lgp|ldp|ldp-ri|loop)");
    cmd->add_option("--levels", o.levels, "Pyramid levels")->check(CLI::PositiveNumber);
    cmd->add_option("--k", o.k, "LDP threshold rank (1..8)")->check(CLI::Range(1, 8));
    cmd->add_option("--rank-key", o.rank_key, "Kirsch rank key (signed|absolute)");
    cmd->add_option("--threads", o.threads, "Worker threads (0 = hardware)");
}

DescribeConfig to_config(const DescribeOpts& o, DescriptorKind kind) {
    DescribeConfig cfg;
    cfg.kind = kind;
    cfg.params.k = o.k;
    cfg.params.rank_key = rank_key_from_name(o.rank_key);
    cfg.levels = o.levels;
    return cfg;
}

int run_encode(const std::string& input, const std::string& out, const DescribeOpts& o) {
    const DescribeConfig cfg = to_config(o, kind_from_name(o.kind));
    const GrayImage img = load_pgm(input);
    const CodeMap map = code_map(img, cfg.kind, cfg.params, o.threads);

    if (map.bits <= 8)
        save_pgm(code_map_to_gray(map), out);
    else
        save_code_map_raw16(map, out);

    std::printf("map %dx%d bits=%d -> %s\n", map.width, map.height, map.bits, out.c_str());
    const int slice = (1 << map.bits) / 16;
    std::array<std::int64_t, 16> counts{};
    for (std::uint16_t v : map.data) ++counts[static_cast<std::size_t>(v / slice)];
    std::printf("hist16:");
    for (std::int64_t c : counts)
        std::printf(" %.4f", static_cast<double>(c) / static_cast<double>(map.data.size()));
    std::printf("\n");
    return 0;
}

int run_describe(const std::string& input, const std::string& out, const DescribeOpts& o) {
    const DescribeConfig cfg = to_config(o, kind_from_name(o.kind));
    const std::vector<fs::path> files = collect_pgms(input);
    if (files.empty()) throw IoError("no PGM images found under " + input);

    std::ofstream os(out, std::ios::trunc);
    if (!os) throw IoError("cannot open " + out + " for writing");
    write_descriptor_csv_header(os, cfg.levels * (1 << code_bits(cfg.kind)));

    std::vector<std::optional<Descriptor>> results(files.size());
    std::vector<std::string> errors(files.size());
    parallel_for(0, static_cast<int>(files.size()), o.threads, [&](int i) {
        const auto idx = static_cast<std::size_t>(i);
        try {
            results[idx] = describe(load_pgm(files[idx]), cfg, 1);
        } catch (const Error& e) {
            errors[idx] = e.what();
        }
    });

    int failures = 0;
    for (std::size_t i = 0; i < files.size(); ++i) {
        if (results[i]) {
            write_descriptor_csv_row(os, files[i].string(), *results[i]);
        } else {
            std::cerr << "error: " << files[i].string() << ": " << errors[i] << "\n";
            ++failures;
        }
    }
    if (!os) throw IoError("write failed for " + out);
    return failures == 0 ? 0 : 1;
}

int run_classify(const std::string& root, const std::string& out, const DescribeOpts& o,
                 const std::string& kinds_arg, const std::string& classifier_arg, int folds,
                 std::uint64_t seed, double lambda) {
    const std::vector<DescriptorKind> kinds = parse_kinds(kinds_arg);
    const std::vector<ClassifierKind> classifiers = parse_classifiers(classifier_arg);

    std::vector<AccuracyRecord> records;
    for (DescriptorKind kind : kinds) {
        const DescribeConfig cfg = to_config(o, kind);
        LoadReport report;
        const LabeledSet set = load_dataset(root, cfg, &report, o.threads);
        const FoldPlan plan = make_fold_plan(set, folds, seed);
        for (ClassifierKind classifier : classifiers) {
            CrossValidateConfig cv;
            cv.classifier = classifier;
            cv.lambda = lambda;
            cv.descriptor_name = kind_name(kind);
            const std::vector<AccuracyRecord> fold_records = cross_validate(set, plan, cv);
            records.insert(records.end(), fold_records.begin(), fold_records.end());
        }
    }

    std::ofstream os(out, std::ios::trunc);
    if (!os) throw IoError("cannot open " + out + " for writing");
    write_records_csv(os, records);
    if (!os) throw IoError("write failed for " + out);

    // Per (descriptor, classifier) mean +- sample std over folds.
    std::printf("%-8s %-4s %10s %8s %6s\n", "kind", "clf", "mean%", "std", "folds");
    for (DescriptorKind kind : kinds) {
        for (ClassifierKind classifier : classifiers) {
            std::vector<double> accs;
            for (const AccuracyRecord& r : records)
                if (r.descriptor == kind_name(kind) && r.classifier == classifier_name(classifier))
                    accs.push_back(r.accuracy);
            const double mean =
                std::accumulate(accs.begin(), accs.end(), 0.0) / static_cast<double>(accs.size());
            double var = 0.0;
            for (double a : accs) var += (a - mean) * (a - mean);
            const double stddev =
                accs.size() > 1 ? std::sqrt(var / static_cast<double>(accs.size() - 1)) : 0.0;
            std::printf("%-8s %-4s %10.2f %8.2f %6zu\n", kind_name(kind),
                        classifier_name(classifier), mean, stddev, accs.size());
        }
    }
    return 0;
}

int run_stats(const std::string& a_path, const std::string& b_path, double alpha, int m,
              const std::string& out) {
    std::ifstream a_is(a_path);
    if (!a_is) throw IoError("cannot open " + a_path);
    std::ifstream b_is(b_path);
    if (!b_is) throw IoError("cannot open " + b_path);

    const SignTestResult result =
        sign_test(read_records_csv(a_is), read_records_csv(b_is), alpha, m);
    std::cout << format_sign_report(result);
    if (!out.empty()) {
        std::ofstream os(out, std::ios::trunc);
        if (!os) throw IoError("cannot open " + out + " for writing");
        write_sign_csv(os, result);
    }
    return 0;
}

int run_bench(const std::string& input, const DescribeOpts& o, const std::string& kinds_arg,
              int reps) {
    if (reps < 3) throw InvalidArgument("bench needs at least 3 repetitions");
    const std::vector<fs::path> files = collect_pgms(input);
    if (files.empty()) throw IoError("no PGM images found under " + input);

    std::vector<GrayImage> images;
    images.reserve(files.size());
    std::int64_t pixels = 0;
    for (const fs::path& f : files) {
        images.push_back(load_pgm(f));
        pixels += static_cast<std::int64_t>(images.back().width()) * images.back().height();
    }

    const std::vector<DescriptorKind> kinds = parse_kinds(kinds_arg);
    KernelParams params;
    params.k = o.k;
    params.rank_key = rank_key_from_name(o.rank_key);

    std::printf("%zu images, %.2f Mpx total, %d timed reps (median reported)\n", images.size(),
                static_cast<double>(pixels) / 1e6, reps);
    volatile std::uint16_t sink = 0;
    for (DescriptorKind kind : kinds) {
        auto pass = [&] {
            for (const GrayImage& img : images)
                sink = sink + code_map(img, kind, params, o.threads).data.front();
        };
        pass();  // warm
        std::vector<double> rates;
        for (int r = 0; r < reps; ++r) {
            const auto t0 = std::chrono::steady_clock::now();
            pass();
            const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
            rates.push_back(static_cast<double>(pixels) / 1e6 / dt.count());
        }
        std::sort(rates.begin(), rates.end());
        const double median = rates.size() % 2 == 1
                                  ? rates[rates.size() / 2]
                                  : 0.5 * (rates[rates.size() / 2 - 1] + rates[rates.size() / 2]);
        std::printf("%-8s %10.2f Mpx/s\n", kind_name(kind), median);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"LOOP binary descriptor toolkit"};
    app.require_subcommand(1);

    // encode
    auto* encode = app.add_subcommand("encode", "Compute a code map for one image");
    std::string enc_input, enc_out;
    DescribeOpts enc_opts;
    encode->add_option("input", enc_input, "Input PGM")->required();
    encode->add_option("--out", enc_out, "Output map path")->required();
    add_describe_flags(encode, enc_opts);

    // describe
    auto* describe_cmd = app.add_subcommand("describe", "Write descriptor CSV rows for images");
    std::string desc_input, desc_out;
    DescribeOpts desc_opts;
    describe_cmd->add_option("input", desc_input, "Input PGM file or directory")->required();
    describe_cmd->add_option("--out", desc_out, "Output CSV path")->required();
    add_describe_flags(describe_cmd, desc_opts);

    // classify
    auto* classify_cmd =
        app.add_subcommand("classify", "Cross-validated benchmark on a directory-per-class corpus");
    std::string cls_root, cls_out, cls_classifier = "nn";
    DescribeOpts cls_opts;
    int cls_folds = 5;
    std::uint64_t cls_seed = 42;
    double cls_lambda = 1e-3;
    classify_cmd->add_option("root", cls_root, "Dataset root (one subdirectory per class)")
        ->required();
    classify_cmd->add_option("--out", cls_out, "Results CSV path")->required();
    add_describe_flags(classify_cmd, cls_opts);
    classify_cmd->add_option("--classifier", cls_classifier, "Classifier (nn|crc|both)");
    classify_cmd->add_option("--folds", cls_folds, "Cross-validation folds")
        ->check(CLI::Range(2, 1 << 20));
    classify_cmd->add_option("--seed", cls_seed, "Fold shuffle seed");
    classify_cmd->add_option("--lambda", cls_lambda, "CRC regularizer")
        ->check(CLI::NonNegativeNumber);

    // stats
    auto* stats_cmd = app.add_subcommand("stats", "Paired sign binomial test of two results CSVs");
    std::string stats_a, stats_b, stats_out;
    double stats_alpha = 0.05;
    int stats_m = 1;
    stats_cmd->add_option("a", stats_a, "Results CSV for method A")->required();
    stats_cmd->add_option("b", stats_b, "Results CSV for method B")->required();
    stats_cmd->add_option("--alpha", stats_alpha, "Significance level");
    stats_cmd->add_option("--m", stats_m, "Bonferroni comparison count")
        ->check(CLI::PositiveNumber);
    stats_cmd->add_option("--out", stats_out, "Optional CSV twin of the report");

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "Throughput of the per-pixel encoders");
    std::string bench_input;
    DescribeOpts bench_opts;
    bench_opts.kind = "all";
    int bench_reps = 5;
    bench_cmd->add_option("input", bench_input, "Input PGM file or directory")->required();
    add_describe_flags(bench_cmd, bench_opts);
    bench_cmd->add_option("--reps", bench_reps, "Timed repetitions (>= 3)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (encode->parsed()) return run_encode(enc_input, enc_out, enc_opts);
        if (describe_cmd->parsed()) return run_describe(desc_input, desc_out, desc_opts);
        if (classify_cmd->parsed())
            return run_classify(cls_root, cls_out, cls_opts, cls_opts.kind, cls_classifier,
                                cls_folds, cls_seed, cls_lambda);
        if (stats_cmd->parsed()) return run_stats(stats_a, stats_b, stats_alpha, stats_m, stats_out);
        if (bench_cmd->parsed()) return run_bench(bench_input, bench_opts, bench_opts.kind, bench_reps);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
