#include "looptex/classify.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <iostream>
#include <random>

#include "looptex/error.hpp"
#include "looptex/parallel.hpp"

namespace looptex {

namespace fs = std::filesystem;

int LabeledSet::class_index(std::string_view label) const {
    for (std::size_t i = 0; i < classes.size(); ++i)
        if (classes[i] == label) return static_cast<int>(i);
    return -1;
}

namespace {

bool has_pgm_extension(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext == ".pgm";
}

// Fisher-Yates with explicit draws so the plan is identical on every
// platform (std::shuffle leaves the draw algorithm unspecified).
void deterministic_shuffle(std::vector<int>& items, std::mt19937_64& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(items[i - 1], items[j]);
    }
}

}  // namespace

LabeledSet load_dataset(const fs::path& root, const DescribeConfig& cfg, LoadReport* report,
                        int threads) {
    if (!fs::is_directory(root))
        throw IoError("dataset root " + root.string() + " is not a directory");

    std::vector<fs::path> class_dirs;
    for (const auto& entry : fs::directory_iterator(root)) {
        if (entry.is_directory()) {
            class_dirs.push_back(entry.path());
        } else {
            if (report) report->skipped.push_back(entry.path().string());
            std::cerr << "warning: skipping stray file " << entry.path().string() << "\n";
        }
    }
    std::sort(class_dirs.begin(), class_dirs.end());

    LabeledSet set;
    set.name = root.filename().string();
    if (set.name.empty()) set.name = root.parent_path().filename().string();

    std::vector<std::pair<std::string, std::string>> pending;  // (path, label)
    for (const fs::path& dir : class_dirs) {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (entry.is_regular_file() && has_pgm_extension(entry.path())) {
                files.push_back(entry.path());
            } else {
                if (report) report->skipped.push_back(entry.path().string());
                std::cerr << "warning: skipping non-PGM entry " << entry.path().string() << "\n";
            }
        }
        if (files.empty())
            throw DatasetError("class directory " + dir.string() + " contains no PGM images");
        std::sort(files.begin(), files.end());
        const std::string label = dir.filename().string();
        set.classes.push_back(label);
        for (const fs::path& f : files) pending.emplace_back(f.string(), label);
    }

    if (set.classes.size() < 2)
        throw DatasetError("need >= 2 classes, found " + std::to_string(set.classes.size()) +
                           " under " + root.string());

    set.items.resize(pending.size());
    parallel_for(0, static_cast<int>(pending.size()), threads, [&](int i) {
        const auto& [path, label] = pending[static_cast<std::size_t>(i)];
        LabeledItem item;
        item.descriptor = describe(load_pgm(path), cfg, 1);
        item.label = label;
        item.path = path;
        set.items[static_cast<std::size_t>(i)] = std::move(item);
    });
    return set;
}

double chi2_distance(std::span<const double> h, std::span<const double> g) {
    if (h.size() != g.size())
        throw InvalidArgument("chi2 distance needs equal lengths, got " +
                              std::to_string(h.size()) + " and " + std::to_string(g.size()));
    double d = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double sum = h[i] + g[i];
        if (sum > 0.0) {
            const double diff = h[i] - g[i];
            d += diff * diff / sum;
        }
    }
    return d;
}

std::string nn_classify(const LabeledSet& train, const Descriptor& query) {
    if (train.items.empty()) throw InvalidArgument("nn classifier needs a non-empty training set");
    std::size_t best = 0;
    double best_dist = chi2_distance(query.values, train.items[0].descriptor.values);
    for (std::size_t i = 1; i < train.items.size(); ++i) {
        const double d = chi2_distance(query.values, train.items[i].descriptor.values);
        if (d < best_dist) {
            best_dist = d;
            best = i;
        }
    }
    return train.items[best].label;
}

struct CrcClassifier::Impl {
    std::vector<std::string> classes;
    std::vector<int> column_class;  // training column -> class index
    Eigen::MatrixXd columns;        // d x n, one column per training item
    Eigen::LLT<Eigen::MatrixXd> gram_llt;
};

CrcClassifier::CrcClassifier(const LabeledSet& train, double lambda)
    : impl_(std::make_unique<Impl>()) {
    if (train.items.empty()) throw InvalidArgument("crc needs a non-empty training set");
    if (lambda < 0.0) throw InvalidArgument("crc lambda must be >= 0");

    const std::size_t dim = train.items[0].descriptor.values.size();
    impl_->classes = train.classes;
    impl_->columns.resize(static_cast<Eigen::Index>(dim),
                          static_cast<Eigen::Index>(train.items.size()));
    impl_->column_class.reserve(train.items.size());
    for (std::size_t j = 0; j < train.items.size(); ++j) {
        const LabeledItem& item = train.items[j];
        if (item.descriptor.values.size() != dim)
            throw InvalidArgument("training descriptors have mismatched lengths");
        const int cls = train.class_index(item.label);
        if (cls < 0) throw DatasetError("training item label \"" + item.label +
                                        "\" is not in the class list");
        impl_->column_class.push_back(cls);
        impl_->columns.col(static_cast<Eigen::Index>(j)) =
            Eigen::Map<const Eigen::VectorXd>(item.descriptor.values.data(),
                                              static_cast<Eigen::Index>(dim));
    }

    Eigen::MatrixXd gram = impl_->columns.transpose() * impl_->columns;
    gram.diagonal().array() += lambda;
    impl_->gram_llt.compute(gram);
    if (impl_->gram_llt.info() != Eigen::Success)
        throw NumericalError(
            "training Gram matrix is singular; rerun with a regularizer lambda > 0");
}

CrcClassifier::~CrcClassifier() = default;
CrcClassifier::CrcClassifier(CrcClassifier&&) noexcept = default;
CrcClassifier& CrcClassifier::operator=(CrcClassifier&&) noexcept = default;

std::vector<double> CrcClassifier::residuals(const Descriptor& query) const {
    const Eigen::Index dim = impl_->columns.rows();
    if (static_cast<Eigen::Index>(query.values.size()) != dim)
        throw InvalidArgument("query length " + std::to_string(query.values.size()) +
                              " does not match training dimension " + std::to_string(dim));
    const Eigen::Map<const Eigen::VectorXd> y(query.values.data(), dim);

    const Eigen::VectorXd coeffs = impl_->gram_llt.solve(impl_->columns.transpose() * y);

    // Per-class reconstruction from that class's columns and coefficients.
    Eigen::MatrixXd recon = Eigen::MatrixXd::Zero(dim, static_cast<Eigen::Index>(
                                                           impl_->classes.size()));
    for (Eigen::Index j = 0; j < impl_->columns.cols(); ++j)
        recon.col(impl_->column_class[static_cast<std::size_t>(j)]) +=
            coeffs(j) * impl_->columns.col(j);

    std::vector<double> out(impl_->classes.size());
    for (std::size_t c = 0; c < impl_->classes.size(); ++c)
        out[c] = (y - recon.col(static_cast<Eigen::Index>(c))).norm();
    return out;
}

std::string CrcClassifier::classify(const Descriptor& query) const {
    const std::vector<double> res = residuals(query);
    std::size_t best = 0;
    for (std::size_t c = 1; c < res.size(); ++c)
        if (res[c] < res[best]) best = c;
    return impl_->classes[best];
}

std::string crc_classify(const LabeledSet& train, const Descriptor& query, double lambda) {
    return CrcClassifier(train, lambda).classify(query);
}

FoldPlan make_fold_plan(const LabeledSet& set, int k, std::uint64_t seed) {
    if (k < 2) throw InvalidArgument("fold count must be >= 2");
    if (set.items.empty()) throw InvalidArgument("cannot plan folds for an empty set");

    FoldPlan plan;
    plan.k = k;
    plan.seed = seed;
    plan.assignment.assign(set.items.size(), 0);

    std::mt19937_64 rng(seed);
    // The fold counter keeps rotating across classes, so per-class counts
    // differ by at most 1 and folds stay balanced overall (leave-one-out
    // included).
    int next_fold = 0;
    for (const std::string& cls : set.classes) {
        std::vector<int> members;
        for (std::size_t i = 0; i < set.items.size(); ++i)
            if (set.items[i].label == cls) members.push_back(static_cast<int>(i));
        deterministic_shuffle(members, rng);
        for (int idx : members) {
            plan.assignment[static_cast<std::size_t>(idx)] = next_fold;
            next_fold = (next_fold + 1) % k;
        }
    }
    return plan;
}

const char* classifier_name(ClassifierKind c) {
    return c == ClassifierKind::Nn ? "nn" : "crc";
}

ClassifierKind classifier_from_name(std::string_view name) {
    if (name == "nn") return ClassifierKind::Nn;
    if (name == "crc") return ClassifierKind::Crc;
    throw InvalidArgument("unknown classifier \"" + std::string(name) + "\" (expected nn|crc)");
}

std::vector<AccuracyRecord> cross_validate(const LabeledSet& set, const FoldPlan& plan,
                                           const CrossValidateConfig& cfg) {
    if (plan.assignment.size() != set.items.size())
        throw InvalidArgument("fold plan does not match the dataset size");

    // Starvation check before any work: every fold must leave at least one
    // training item per class, and test on at least one item.
    std::vector<int> class_total(set.classes.size(), 0);
    std::vector<std::vector<int>> fold_count(
        static_cast<std::size_t>(plan.k), std::vector<int>(set.classes.size(), 0));
    std::vector<int> fold_total(static_cast<std::size_t>(plan.k), 0);
    for (std::size_t i = 0; i < set.items.size(); ++i) {
        const int fold = plan.assignment[i];
        if (fold < 0 || fold >= plan.k)
            throw InvalidArgument("fold assignment out of range for item " + std::to_string(i));
        const int cls = set.class_index(set.items[i].label);
        if (cls < 0)
            throw DatasetError("item label \"" + set.items[i].label +
                               "\" is not in the class list");
        ++class_total[static_cast<std::size_t>(cls)];
        ++fold_count[static_cast<std::size_t>(fold)][static_cast<std::size_t>(cls)];
        ++fold_total[static_cast<std::size_t>(fold)];
    }
    for (int f = 0; f < plan.k; ++f) {
        if (fold_total[static_cast<std::size_t>(f)] == 0)
            throw DatasetError("fold " + std::to_string(f) + " has no test items");
        for (std::size_t c = 0; c < set.classes.size(); ++c)
            if (class_total[c] - fold_count[static_cast<std::size_t>(f)][c] < 1)
                throw DatasetError("fold " + std::to_string(f) +
                                   " leaves no training items for class " + set.classes[c]);
    }

    std::vector<AccuracyRecord> records;
    records.reserve(static_cast<std::size_t>(plan.k));
    for (int f = 0; f < plan.k; ++f) {
        LabeledSet train;
        train.name = set.name;
        train.classes = set.classes;
        std::vector<const LabeledItem*> test;
        for (std::size_t i = 0; i < set.items.size(); ++i) {
            if (plan.assignment[i] == f)
                test.push_back(&set.items[i]);
            else
                train.items.push_back(set.items[i]);
        }

        int correct = 0;
        if (cfg.classifier == ClassifierKind::Crc) {
            const CrcClassifier model(train, cfg.lambda);
            for (const LabeledItem* item : test)
                if (model.classify(item->descriptor) == item->label) ++correct;
        } else {
            for (const LabeledItem* item : test)
                if (nn_classify(train, item->descriptor) == item->label) ++correct;
        }

        AccuracyRecord rec;
        rec.descriptor = cfg.descriptor_name;
        rec.classifier = classifier_name(cfg.classifier);
        rec.dataset = set.name;
        rec.fold = f;
        rec.accuracy = 100.0 * correct / static_cast<double>(test.size());
        rec.n_test = static_cast<int>(test.size());
        rec.seed = plan.seed;
        records.push_back(std::move(rec));
    }
    return records;
}

}  // namespace looptex
