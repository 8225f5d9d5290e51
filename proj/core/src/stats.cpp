#include "looptex/stats.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <tuple>

#include "looptex/error.hpp"

namespace looptex {

namespace {

using BigInt = boost::multiprecision::cpp_int;

using PairKey = std::tuple<std::string, std::string, int>;  // classifier, dataset, fold

std::string key_string(const PairKey& k) {
    return std::get<0>(k) + "/" + std::get<1>(k) + "/fold" + std::to_string(std::get<2>(k));
}

std::map<PairKey, double> index_records(const std::vector<AccuracyRecord>& records,
                                        const char* which) {
    std::map<PairKey, double> index;
    for (const AccuracyRecord& r : records) {
        PairKey key{r.classifier, r.dataset, r.fold};
        if (!index.emplace(key, r.accuracy).second)
            throw DatasetError(std::string("duplicate key in ") + which + " records: " +
                               key_string(key));
    }
    return index;
}

std::string format_double(const char* fmt, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

}  // namespace

double binom_one_tail(int n, int wins) {
    if (n < 1) throw InvalidArgument("sign test needs at least 1 trial");
    if (wins < 0 || wins > n)
        throw InvalidArgument("wins must be in 0..n, got " + std::to_string(wins));

    // sum_{j=wins}^{n} C(n, j), exactly
    BigInt sum = 0;
    BigInt binom = 1;  // C(n, 0)
    for (int j = 0; j <= n; ++j) {
        if (j >= wins) sum += binom;
        binom = binom * (n - j) / (j + 1);
    }
    // Divide by 2^n: the numerator rounds once to double, the scaling by a
    // power of two is exact.
    return std::ldexp(sum.convert_to<double>(), -n);
}

double bonferroni(double alpha, int comparisons) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw InvalidArgument("alpha must lie strictly between 0 and 1");
    if (comparisons < 1) throw InvalidArgument("comparisons must be >= 1");
    return alpha / comparisons;
}

SignTestResult sign_test(const std::vector<AccuracyRecord>& a,
                         const std::vector<AccuracyRecord>& b,
                         double alpha, int comparisons) {
    const auto ia = index_records(a, "A");
    const auto ib = index_records(b, "B");

    std::string missing;
    for (const auto& [key, acc] : ia)
        if (!ib.count(key)) missing += "\n  missing from B: " + key_string(key);
    for (const auto& [key, acc] : ib)
        if (!ia.count(key)) missing += "\n  missing from A: " + key_string(key);
    if (!missing.empty()) throw DatasetError("sign test key mismatch:" + missing);

    SignTestResult r;
    r.alpha_corrected = bonferroni(alpha, comparisons);
    for (const auto& [key, acc_a] : ia) {
        const double acc_b = ib.at(key);
        if (acc_a > acc_b) ++r.wins;
        else if (acc_a == acc_b) ++r.ties;
    }
    r.n = static_cast<int>(ia.size()) - r.ties;
    r.informative = r.n > 0;
    r.p_one_tail = r.informative ? binom_one_tail(r.n, r.wins) : 1.0;
    r.significant = r.informative && r.p_one_tail < r.alpha_corrected;
    return r;
}

void write_records_csv(std::ostream& os, const std::vector<AccuracyRecord>& records) {
    os << "descriptor,classifier,dataset,fold,accuracy_percent,n_test,seed\n";
    for (const AccuracyRecord& r : records) {
        os << r.descriptor << ',' << r.classifier << ',' << r.dataset << ',' << r.fold << ','
           << format_double("%.2f", r.accuracy) << ',' << r.n_test << ',' << r.seed << "\n";
    }
}

std::vector<AccuracyRecord> read_records_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line))
        throw ParseError("results CSV is empty");
    if (line == "descriptor,classifier,dataset,fold,accuracy_percent,n_test,seed\r")
        line.pop_back();
    if (line != "descriptor,classifier,dataset,fold,accuracy_percent,n_test,seed")
        throw ParseError("unexpected results CSV header: \"" + line + "\"");

    std::vector<AccuracyRecord> records;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream row(line);
        AccuracyRecord r;
        std::string fold, accuracy, n_test, seed;
        if (!std::getline(row, r.descriptor, ',') || !std::getline(row, r.classifier, ',') ||
            !std::getline(row, r.dataset, ',') || !std::getline(row, fold, ',') ||
            !std::getline(row, accuracy, ',') || !std::getline(row, n_test, ',') ||
            !std::getline(row, seed, ','))
            throw ParseError("malformed results CSV row at line " + std::to_string(lineno));
        try {
            r.fold = std::stoi(fold);
            r.accuracy = std::stod(accuracy);
            r.n_test = std::stoi(n_test);
            r.seed = std::stoull(seed);
        } catch (const std::exception&) {
            throw ParseError("malformed numeric field in results CSV at line " +
                             std::to_string(lineno));
        }
        records.push_back(std::move(r));
    }
    return records;
}

std::string format_sign_report(const SignTestResult& r) {
    std::string out;
    out += "sign binomial test (ties dropped)\n";
    out += "  informative pairs n = " + std::to_string(r.n) +
           " (ties: " + std::to_string(r.ties) + ")\n";
    out += "  wins for A          = " + std::to_string(r.wins) + "\n";
    out += "  p (one tail)        = " + format_double("%.6f", r.p_one_tail) + "\n";
    out += "  corrected alpha     = " + format_double("%.6f", r.alpha_corrected) + "\n";
    if (!r.informative)
        out += "  verdict             = no informative pairs\n";
    else
        out += std::string("  verdict             = ") +
               (r.significant ? "significant" : "not significant") + "\n";
    return out;
}

void write_sign_csv(std::ostream& os, const SignTestResult& r) {
    os << "n,wins,ties,p_one_tail,alpha_corrected,significant,informative\n";
    os << r.n << ',' << r.wins << ',' << r.ties << ',' << format_double("%.6f", r.p_one_tail)
       << ',' << format_double("%.6f", r.alpha_corrected) << ',' << (r.significant ? 1 : 0)
       << ',' << (r.informative ? 1 : 0) << "\n";
}

}  // namespace looptex
