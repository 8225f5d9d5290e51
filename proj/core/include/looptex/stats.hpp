#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace looptex {

/// One (descriptor, classifier, dataset, fold) accuracy result.
struct AccuracyRecord {
    std::string descriptor;
    std::string classifier;
    std::string dataset;
    int fold = 0;
    double accuracy = 0.0;  // percent in [0, 100]
    int n_test = 0;
    std::uint64_t seed = 0;
};

/// One-tailed sign-test probability P(X >= wins) for X ~ Binomial(n, 1/2),
/// computed with exact big-integer binomial sums; the only rounding is the
/// final conversion to double (relative error < 1e-15).
double binom_one_tail(int n, int wins);

/// Bonferroni-corrected significance level: alpha / comparisons.
double bonferroni(double alpha, int comparisons);

struct SignTestResult {
    int n = 0;        // informative pairs (ties dropped)
    int wins = 0;     // pairs where method A is strictly better
    int ties = 0;
    double p_one_tail = 1.0;
    double alpha_corrected = 0.0;
    bool significant = false;
    bool informative = false;  // false when every shared pair tied
};

/// Paired sign binomial test of method A against method B. Records pair up
/// by (classifier, dataset, fold); any mismatch between the two sets is an
/// error listing the missing keys. Exact ties are dropped; "wins" counts
/// strictly greater accuracy for A.
SignTestResult sign_test(const std::vector<AccuracyRecord>& a,
                         const std::vector<AccuracyRecord>& b,
                         double alpha, int comparisons);

/// Results CSV with header
/// "descriptor,classifier,dataset,fold,accuracy_percent,n_test,seed";
/// accuracies are written with 2 decimals.
void write_records_csv(std::ostream& os, const std::vector<AccuracyRecord>& records);
std::vector<AccuracyRecord> read_records_csv(std::istream& is);

/// Human-readable significance report (p printed with 6 decimals) and its
/// machine-readable CSV twin.
std::string format_sign_report(const SignTestResult& r);
void write_sign_csv(std::ostream& os, const SignTestResult& r);

}  // namespace looptex
