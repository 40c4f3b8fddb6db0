#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "oracles.hpp"
#include "topoclust/evaluate.hpp"
#include "topoclust/random.hpp"

using namespace topoclust;

namespace {

std::vector<std::size_t> ids(std::initializer_list<std::size_t> xs) { return xs; }

}  // namespace

TEST_CASE("encode_labels uses first-appearance order") {
    std::vector<std::optional<std::string>> labels{"b", "a", "b", "c", "a"};
    REQUIRE(encode_labels(labels) == ids({0, 1, 0, 2, 1}));

    labels[2] = std::nullopt;
    REQUIRE_THROWS_AS(encode_labels(labels), std::invalid_argument);
}

TEST_CASE("purity counts majority labels per cluster") {
    REQUIRE(purity(ids({0, 1, 2}), ids({0, 1, 2})) == 1.0);
    REQUIRE(purity(ids({0, 0, 1, 1}), ids({0, 0, 0, 1})) == 0.75);

    std::vector<std::size_t> one_cluster(60, 0);
    std::vector<std::size_t> balanced(60);
    for (std::size_t i = 0; i < 60; ++i) balanced[i] = i / 20;
    REQUIRE(purity(one_cluster, balanced) == Catch::Approx(1.0 / 3.0));

    REQUIRE_THROWS_AS(purity(ids({0}), ids({0, 1})), std::invalid_argument);
    REQUIRE_THROWS_AS(purity(ids({}), ids({})), std::invalid_argument);
}

TEST_CASE("purity is invariant to relabeling either side") {
    Rng rng(331);
    std::vector<std::size_t> assignments(30), labels(30);
    for (auto& a : assignments) a = rng.below(4);
    for (auto& l : labels) l = rng.below(3);
    const double base = purity(assignments, labels);

    std::vector<std::size_t> cluster_map{2, 0, 3, 1}, label_map{1, 2, 0};
    std::vector<std::size_t> remapped_a(30), remapped_l(30);
    for (std::size_t i = 0; i < 30; ++i) {
        remapped_a[i] = cluster_map[assignments[i]];
        remapped_l[i] = label_map[labels[i]];
    }
    REQUIRE(purity(remapped_a, labels) == base);
    REQUIRE(purity(assignments, remapped_l) == base);
}

TEST_CASE("permutation test is strict, seeded, and thread-independent") {
    std::vector<std::size_t> labels(30);
    for (std::size_t i = 0; i < 30; ++i) labels[i] = i / 10;

    // Perfect clustering: nothing can strictly exceed purity 1.
    REQUIRE(permutation_test(labels, labels, 500, 1) == 0.0);

    std::vector<std::size_t> rough(30);
    Rng rng(332);
    for (auto& a : rough) a = rng.below(3);
    const double p1 = permutation_test(rough, labels, 2000, 7, false, 1);
    const double p2 = permutation_test(rough, labels, 2000, 7, false, 4);
    REQUIRE(p1 == p2);
    REQUIRE(p1 >= 0.0);
    REQUIRE(p1 <= 1.0);

    // Higher observed purity cannot raise the p-value under the same seed.
    const double p_perfect = permutation_test(labels, labels, 2000, 7);
    REQUIRE(p_perfect <= p1);

    const double smoothed = permutation_test(labels, labels, 99, 1, true);
    REQUIRE(smoothed == Catch::Approx(0.01));

    REQUIRE_THROWS_AS(permutation_test(rough, labels, 0, 1), std::invalid_argument);
}

TEST_CASE("adjusted rand index matches hand-worked and oracle values") {
    REQUIRE(adjusted_rand_index(ids({0, 0, 1, 1}), ids({0, 0, 1, 1})) == 1.0);
    REQUIRE(adjusted_rand_index(ids({0, 0, 1, 1}), ids({1, 1, 0, 0})) == 1.0);
    REQUIRE(adjusted_rand_index(ids({0, 0, 1, 1}), ids({0, 1, 0, 1})) ==
            Catch::Approx(-0.5).margin(1e-15));

    // Degenerate pair: both single-cluster.
    REQUIRE(adjusted_rand_index(ids({0, 0, 0}), ids({0, 0, 0})) == 0.0);
    // Degenerate pair: both all-singletons.
    REQUIRE(adjusted_rand_index(ids({0, 1, 2}), ids({2, 0, 1})) == 0.0);

    REQUIRE_THROWS_AS(adjusted_rand_index(ids({0}), ids({0, 1})), std::invalid_argument);

    Rng rng(333);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::size_t> a(25), b(25);
        for (auto& x : a) x = rng.below(4);
        for (auto& x : b) x = rng.below(3);
        const double lib = adjusted_rand_index(a, b);
        REQUIRE(lib == Catch::Approx(oracle::ari_pairs(a, b)).margin(1e-12));
        REQUIRE(lib == Catch::Approx(adjusted_rand_index(b, a)).margin(1e-12));
    }
}

TEST_CASE("ari is centered near zero against shuffled copies") {
    Rng rng(334);
    std::vector<std::size_t> base(30);
    for (auto& x : base) x = rng.below(3);
    double sum = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<std::size_t> shuffled = base;
        rng.shuffle(std::span<std::size_t>(shuffled));
        sum += adjusted_rand_index(base, shuffled);
    }
    REQUIRE(std::abs(sum / 1000.0) < 0.05);
}

TEST_CASE("confusion matrix counts and majority mapping") {
    const ConfusionMatrix cm = confusion_matrix(ids({0, 0, 1}), ids({0, 1, 1}));
    REQUIRE(cm.counts == std::vector<std::vector<long long>>{{1, 1}, {0, 1}});
    REQUIRE(cm.row_majority == std::vector<long long>{0, 1});  // tie in row 0 -> lowest

    const ConfusionMatrix perfect = confusion_matrix(ids({0, 1, 2}), ids({0, 1, 2}));
    for (std::size_t h = 0; h < 3; ++h) {
        REQUIRE(perfect.row_majority[h] == static_cast<long long>(h));
    }

    const ConfusionMatrix single = confusion_matrix(ids({0, 0, 0}), ids({0, 1, 1}));
    REQUIRE(single.counts == std::vector<std::vector<long long>>{{1, 2}});
    REQUIRE(single.row_majority == std::vector<long long>{1});
}

TEST_CASE("evaluate_clustering assembles a consistent report") {
    const std::vector<std::size_t> assignments = ids({0, 0, 1, 1, 2, 2});
    const std::vector<std::size_t> labels = ids({0, 0, 1, 1, 2, 0});
    const EvalReport report = evaluate_clustering(assignments, labels, 500, 3);

    REQUIRE(report.accuracy == Catch::Approx(purity(assignments, labels)));
    REQUIRE(report.ari == Catch::Approx(adjusted_rand_index(assignments, labels)));
    REQUIRE(report.p_value.has_value());
    REQUIRE(report.n_permutations.value() == 500);

    long long diag = 0;
    for (std::size_t h = 0; h < report.confusion.counts.size(); ++h) {
        long long best = 0;
        for (long long c : report.confusion.counts[h]) best = std::max(best, c);
        diag += best;
    }
    REQUIRE(report.accuracy ==
            Catch::Approx(static_cast<double>(diag) / assignments.size()));

    const EvalReport bare = evaluate_clustering(assignments, labels);
    REQUIRE_FALSE(bare.p_value.has_value());
}
