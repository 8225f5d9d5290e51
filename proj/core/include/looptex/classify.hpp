#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "looptex/descriptor.hpp"
#include "looptex/stats.hpp"

namespace looptex {

struct LabeledItem {
    Descriptor descriptor;
    std::string label;
    std::string path;
};

/// A described dataset: items grouped by class (classes sorted, items
/// path-sorted within each class), so loading is fully deterministic.
struct LabeledSet {
    std::string name;                  // dataset name, the root's basename
    std::vector<std::string> classes;  // sorted, distinct, >= 2 for classification
    std::vector<LabeledItem> items;

    int class_index(std::string_view label) const;
};

struct LoadReport {
    std::vector<std::string> skipped;  // non-PGM files ignored during the scan
};

/// Loads a directory-per-class corpus and describes every PGM image with
/// `cfg`. Non-PGM files are skipped (recorded in `report`, warned on
/// stderr); unreadable or malformed PGMs abort with an error naming the
/// path, as does an empty class directory or a corpus with fewer than two
/// classes.
LabeledSet load_dataset(const std::filesystem::path& root, const DescribeConfig& cfg,
                        LoadReport* report = nullptr, int threads = 0);

/// Chi-squared histogram distance: sum over bins with h_i + g_i > 0 of
/// (h_i - g_i)^2 / (h_i + g_i).
double chi2_distance(std::span<const double> h, std::span<const double> g);

/// Label of the training item closest to the query in chi2_distance;
/// ties go to the earliest item.
std::string nn_classify(const LabeledSet& train, const Descriptor& query);

/// Regularized collaborative-representation classifier. The query is
/// expressed as a ridge-regularized least-squares combination of all
/// training columns jointly; each class is then scored by the residual of
/// its own columns and coefficients, and the smallest residual wins.
class CrcClassifier {
public:
    CrcClassifier(const LabeledSet& train, double lambda);
    ~CrcClassifier();
    CrcClassifier(CrcClassifier&&) noexcept;
    CrcClassifier& operator=(CrcClassifier&&) noexcept;

    /// Per-class reconstruction residuals ||y - X_c a_c||, in class order.
    std::vector<double> residuals(const Descriptor& query) const;

    /// Class with the smallest residual; ties go to the earliest class.
    std::string classify(const Descriptor& query) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// One-shot convenience wrapper around CrcClassifier.
std::string crc_classify(const LabeledSet& train, const Descriptor& query, double lambda);

/// Stratified fold assignment: item index -> fold. Within every class the
/// per-fold counts differ by at most 1, and the plan is a pure function of
/// (set structure, k, seed).
struct FoldPlan {
    int k = 5;
    std::uint64_t seed = 42;
    std::vector<int> assignment;
};

FoldPlan make_fold_plan(const LabeledSet& set, int k, std::uint64_t seed);

enum class ClassifierKind { Nn, Crc };

const char* classifier_name(ClassifierKind c);
ClassifierKind classifier_from_name(std::string_view name);

struct CrossValidateConfig {
    ClassifierKind classifier = ClassifierKind::Nn;
    double lambda = 1e-3;          // CRC regularizer
    std::string descriptor_name;   // recorded into each AccuracyRecord
};

/// K-fold cross-validation: per fold, train on the complement and test on
/// the fold, recording accuracy as a percentage. Errors out before running
/// if any fold would leave a class with no training items (naming class and
/// fold) or would have an empty test set.
std::vector<AccuracyRecord> cross_validate(const LabeledSet& set, const FoldPlan& plan,
                                           const CrossValidateConfig& cfg);

}  // namespace looptex
