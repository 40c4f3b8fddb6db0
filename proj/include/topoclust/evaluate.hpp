#ifndef TOPOCLUST_EVALUATE_HPP
#define TOPOCLUST_EVALUATE_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "topoclust/parallel.hpp"
#include "topoclust/random.hpp"

namespace topoclust {

/// Maps string labels to dense ids in order of first appearance.
inline std::vector<std::size_t> encode_labels(std::span<const std::optional<std::string>> labels) {
    std::vector<std::size_t> ids;
    ids.reserve(labels.size());
    std::map<std::string, std::size_t> table;
    for (const auto& label : labels) {
        if (!label) throw std::invalid_argument("missing ground-truth label");
        const auto [it, inserted] = table.emplace(*label, table.size());
        ids.push_back(it->second);
    }
    return ids;
}

namespace detail {

inline void check_pairing(std::span<const std::size_t> a, std::span<const std::size_t> b) {
    if (a.size() != b.size()) throw std::invalid_argument("length mismatch");
    if (a.empty()) throw std::invalid_argument("empty input");
}

// Purity numerator: sum over clusters of the majority label count. Integer,
// so permutation-test comparisons never hinge on rounding.
inline long long purity_numerator(std::span<const std::size_t> assignments,
                                  std::span<const std::size_t> labels) {
    std::size_t k = 0, m = 0;
    for (std::size_t a : assignments) k = std::max(k, a + 1);
    for (std::size_t l : labels) m = std::max(m, l + 1);
    std::vector<long long> counts(k * m, 0);
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        ++counts[assignments[i] * m + labels[i]];
    }
    long long total = 0;
    for (std::size_t h = 0; h < k; ++h) {
        long long best = 0;
        for (std::size_t j = 0; j < m; ++j) best = std::max(best, counts[h * m + j]);
        total += best;
    }
    return total;
}

}  // namespace detail

/// Fraction of networks whose cluster's majority label matches their own.
inline double purity(std::span<const std::size_t> assignments,
                     std::span<const std::size_t> labels) {
    detail::check_pairing(assignments, labels);
    return static_cast<double>(detail::purity_numerator(assignments, labels)) /
           static_cast<double>(assignments.size());
}

/// p-value of the observed purity under label shuffling: the fraction of
/// permuted labelings whose purity strictly exceeds the observed one.
/// `smoothed` switches to the (b+1)/(n+1) estimator. Batches of permutations
/// run concurrently with per-batch derived seeds; the count is exact either
/// way, so the result is worker-count independent.
inline double permutation_test(std::span<const std::size_t> assignments,
                               std::span<const std::size_t> labels, std::size_t n_perms,
                               std::uint64_t seed, bool smoothed = false,
                               std::size_t threads = 0) {
    detail::check_pairing(assignments, labels);
    if (n_perms == 0) throw std::invalid_argument("n_perms must be positive");
    const long long observed = detail::purity_numerator(assignments, labels);

    constexpr std::size_t batch_size = 1024;
    const std::size_t batches = (n_perms + batch_size - 1) / batch_size;
    std::vector<long long> exceed(batches, 0);
    parallel_for(batches, threads, [&](std::size_t b) {
        Rng rng(derive_seed(seed, b));
        std::vector<std::size_t> shuffled(labels.begin(), labels.end());
        const std::size_t count = std::min(batch_size, n_perms - b * batch_size);
        for (std::size_t p = 0; p < count; ++p) {
            rng.shuffle(std::span<std::size_t>(shuffled));
            if (detail::purity_numerator(assignments, shuffled) > observed) ++exceed[b];
        }
    });
    long long total = 0;
    for (long long e : exceed) total += e;
    if (smoothed) {
        return static_cast<double>(total + 1) / static_cast<double>(n_perms + 1);
    }
    return static_cast<double>(total) / static_cast<double>(n_perms);
}

/// Hubert-Arabie adjusted Rand index. Degenerate pairs of partitions (both
/// all-singletons or both single-cluster) make the correction term equal the
/// index term; that 0/0 is defined as 0 here.
inline double adjusted_rand_index(std::span<const std::size_t> a,
                                  std::span<const std::size_t> b) {
    detail::check_pairing(a, b);
    std::size_t ka = 0, kb = 0;
    for (std::size_t x : a) ka = std::max(ka, x + 1);
    for (std::size_t x : b) kb = std::max(kb, x + 1);
    std::vector<long long> table(ka * kb, 0);
    std::vector<long long> row(ka, 0), col(kb, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        ++table[a[i] * kb + b[i]];
        ++row[a[i]];
        ++col[b[i]];
    }
    const auto choose2 = [](long long x) -> double {
        return 0.5 * static_cast<double>(x) * static_cast<double>(x - 1);
    };
    double index = 0.0;
    for (long long c : table) index += choose2(c);
    double sum_row = 0.0, sum_col = 0.0;
    for (long long c : row) sum_row += choose2(c);
    for (long long c : col) sum_col += choose2(c);
    const double pairs = choose2(static_cast<long long>(a.size()));
    const double expected = sum_row * sum_col / pairs;
    const double maximum = 0.5 * (sum_row + sum_col);
    if (maximum == expected) return 0.0;
    return (index - expected) / (maximum - expected);
}

/// Raw cluster-by-label counts plus the majority label per cluster (ties to
/// the lowest label id; empty cluster maps to -1).
struct ConfusionMatrix {
    std::vector<std::vector<long long>> counts;  // k rows, one per cluster
    std::vector<long long> row_majority;
};

inline ConfusionMatrix confusion_matrix(std::span<const std::size_t> assignments,
                                        std::span<const std::size_t> labels) {
    detail::check_pairing(assignments, labels);
    std::size_t k = 0, m = 0;
    for (std::size_t a : assignments) k = std::max(k, a + 1);
    for (std::size_t l : labels) m = std::max(m, l + 1);
    ConfusionMatrix cm;
    cm.counts.assign(k, std::vector<long long>(m, 0));
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        ++cm.counts[assignments[i]][labels[i]];
    }
    cm.row_majority.assign(k, -1);
    for (std::size_t h = 0; h < k; ++h) {
        long long best = 0;
        for (std::size_t j = 0; j < m; ++j) {
            if (cm.counts[h][j] > best) {
                best = cm.counts[h][j];
                cm.row_majority[h] = static_cast<long long>(j);
            }
        }
    }
    return cm;
}

struct EvalReport {
    double accuracy = 0.0;
    double ari = 0.0;
    std::optional<double> p_value;
    ConfusionMatrix confusion;
    std::optional<std::size_t> n_permutations;
};

inline EvalReport evaluate_clustering(std::span<const std::size_t> assignments,
                                      std::span<const std::size_t> labels,
                                      std::optional<std::size_t> n_perms = std::nullopt,
                                      std::uint64_t seed = 0, std::size_t threads = 0) {
    EvalReport report;
    report.accuracy = purity(assignments, labels);
    report.ari = adjusted_rand_index(assignments, labels);
    report.confusion = confusion_matrix(assignments, labels);
    if (n_perms) {
        report.p_value = permutation_test(assignments, labels, *n_perms, seed, false, threads);
        report.n_permutations = n_perms;
    }
    return report;
}

}  // namespace topoclust

#endif
