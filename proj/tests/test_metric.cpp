#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "topoclust/metric.hpp"
#include "topoclust/random.hpp"

using namespace topoclust;

namespace {

Barcode make_barcode(std::size_t n, std::vector<double> births, std::vector<double> deaths) {
    Barcode bc;
    bc.node_count = n;
    bc.births = std::move(births);
    bc.deaths = std::move(deaths);
    return bc;
}

WeightedNetwork permute_nodes(const WeightedNetwork& net, const std::vector<std::size_t>& perm) {
    const std::size_t n = net.node_count();
    std::vector<double> w(net.edge_count());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            w[pair_index(i, j, n)] = net.weight(perm[i], perm[j]);
        }
    }
    return WeightedNetwork(n, std::move(w));
}

}  // namespace

TEST_CASE("lambda validates its range") {
    REQUIRE(Lambda(0.0).value() == 0.0);
    REQUIRE(Lambda(1.0).value() == 1.0);
    REQUIRE_THROWS_AS(Lambda(-0.1), std::invalid_argument);
    REQUIRE_THROWS_AS(Lambda(1.1), std::invalid_argument);
    REQUIRE_THROWS_AS(Lambda(std::nan("")), std::invalid_argument);
}

TEST_CASE("d_top matches the worked example") {
    const Barcode a = make_barcode(3, {1.0, 3.0}, {0.5});
    const Barcode b = make_barcode(3, {2.0, 5.0}, {0.7});
    REQUIRE(d_top_sq(a, b) == Catch::Approx(5.04).margin(1e-12));
    REQUIRE(d_top(a, b) == Catch::Approx(std::sqrt(5.04)).margin(1e-12));
    REQUIRE(d_top(a, a) == 0.0);
}

TEST_CASE("d_top validates its inputs") {
    const Barcode a = make_barcode(3, {1.0, 3.0}, {0.5});
    const Barcode b = make_barcode(4, {1.0, 2.0, 3.0}, {0.1, 0.2, 0.3});
    REQUIRE_THROWS_AS(d_top(a, b), std::invalid_argument);

    const Barcode broken = make_barcode(3, {1.0}, {0.5, 0.6});
    REQUIRE_THROWS_AS(d_top(a, broken), std::invalid_argument);
}

TEST_CASE("closed form equals the exhaustive bijection minimum") {
    Rng rng(505);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 3 + rng.below(2);
        const Barcode a = decompose(oracle::random_network(rng, n));
        const Barcode b = decompose(oracle::random_network(rng, n));
        REQUIRE(std::abs(d_top(a, b) - oracle::dtop_exhaustive(a, b)) <= 1e-12);
    }
}

TEST_CASE("d_top is a metric on fixed-size barcodes") {
    Rng rng(606);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 3 + rng.below(3);
        const Barcode x = decompose(oracle::random_network(rng, n));
        const Barcode y = decompose(oracle::random_network(rng, n));
        const Barcode z = decompose(oracle::random_network(rng, n));
        const double xy = d_top(x, y), yz = d_top(y, z), xz = d_top(x, z);
        REQUIRE(xy >= 0.0);
        REQUIRE(xy == d_top(y, x));
        REQUIRE(xz <= xy + yz + 1e-12);
    }
}

TEST_CASE("d_top ignores node labels") {
    Rng rng(707);
    const WeightedNetwork net = oracle::random_network(rng, 6);
    std::vector<std::size_t> perm{3, 1, 5, 0, 4, 2};
    const WeightedNetwork shuffled = permute_nodes(net, perm);
    REQUIRE(d_top(decompose(net), decompose(shuffled)) == 0.0);
}

TEST_CASE("d_geo_sq sums squared upper-triangular differences") {
    const WeightedNetwork g(3, {1.0, 0.0, 0.0});
    const WeightedNetwork h(3, {3.0, 0.0, 0.0});
    REQUIRE(d_geo_sq(g, g) == 0.0);
    REQUIRE(d_geo_sq(g, h) == 4.0);
    REQUIRE_THROWS_AS(d_geo_sq(g, WeightedNetwork(2, {1.0})), std::invalid_argument);

    Rng rng(808);
    const WeightedNetwork a = oracle::random_network(rng, 5);
    const WeightedNetwork b = oracle::random_network(rng, 5);
    REQUIRE(d_geo_sq(a, b) == Catch::Approx(oracle::geo_sq_dense(a, b)).margin(1e-12));
}

TEST_CASE("d_net_sq mixes the two terms and degenerates exactly") {
    const WeightedNetwork g(3, {3.0, 1.0, 0.5});
    const WeightedNetwork h(3, {2.0, 5.0, 0.7});

    REQUIRE(d_net_sq(g, h, Lambda(0.0)) == d_geo_sq(g, h));
    REQUIRE(d_net_sq(g, h, Lambda(1.0)) == d_top_sq(decompose(g), decompose(h)));
    REQUIRE(d_net_sq(g, h, Lambda(0.5)) == Catch::Approx(11.04).margin(1e-12));

    Rng rng(909);
    for (double lam : {0.25, 0.5, 0.75}) {
        const WeightedNetwork a = oracle::random_network(rng, 5);
        const WeightedNetwork b = oracle::random_network(rng, 5);
        const double expected = (1.0 - lam) * d_geo_sq(a, b) +
                                lam * d_top_sq(decompose(a), decompose(b));
        REQUIRE(d_net_sq(a, b, Lambda(lam)) == Catch::Approx(expected).margin(1e-12));
    }
}

TEST_CASE("distance_matrix trivial shapes") {
    Rng rng(111);
    const WeightedNetwork net = oracle::random_network(rng, 4);
    const std::vector<WeightedNetwork> one{net};
    const DistanceMatrix single = distance_matrix(one, Lambda(0.7));
    REQUIRE(single.size() == 1);
    REQUIRE(single.at(0, 0) == 0.0);

    const std::vector<WeightedNetwork> same{net, net, net};
    const DistanceMatrix zeros = distance_matrix(same, Lambda(0.7));
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) REQUIRE(zeros.at(i, j) == 0.0);
    }

    REQUIRE_THROWS_AS(distance_matrix(std::vector<WeightedNetwork>{}, Lambda(0.5)),
                      std::invalid_argument);
    const std::vector<WeightedNetwork> mixed{net, oracle::random_network(rng, 5)};
    REQUIRE_THROWS_AS(distance_matrix(mixed, Lambda(0.5)), std::invalid_argument);
}

TEST_CASE("distance_matrix is exactly symmetric and worker-independent") {
    Rng rng(222);
    std::vector<WeightedNetwork> nets;
    for (int i = 0; i < 7; ++i) nets.push_back(oracle::random_network(rng, 6));

    for (double lam : {0.0, 0.4, 1.0}) {
        const DistanceMatrix serial = distance_matrix(nets, Lambda(lam), 1);
        const DistanceMatrix parallel = distance_matrix(nets, Lambda(lam), 4);
        REQUIRE(serial.values() == parallel.values());
        for (std::size_t i = 0; i < nets.size(); ++i) {
            REQUIRE(serial.at(i, i) == 0.0);
            for (std::size_t j = 0; j < nets.size(); ++j) {
                REQUIRE(serial.at(i, j) == serial.at(j, i));
            }
        }
        REQUIRE(serial.at(1, 4) == d_net_sq(nets[1], nets[4], Lambda(lam)));
    }
}
