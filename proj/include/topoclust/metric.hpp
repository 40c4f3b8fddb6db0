#ifndef TOPOCLUST_METRIC_HPP
#define TOPOCLUST_METRIC_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "topoclust/filtration.hpp"
#include "topoclust/network.hpp"
#include "topoclust/parallel.hpp"

namespace topoclust {

/// Mixing weight between geometry and topology. 0 is pure edge geometry,
/// 1 is pure topology.
class Lambda {
public:
    explicit Lambda(double value) : value_(value) {
        if (!(value >= 0.0 && value <= 1.0)) {
            throw std::invalid_argument("lambda must lie in [0,1]");
        }
    }
    double value() const { return value_; }

private:
    double value_;
};

/// Squared topological distance between two barcodes on equally many nodes.
///
/// The optimal matching pairs the l-th smallest birth with the l-th smallest
/// birth and likewise for deaths, so the sorted lists give the exact optimum
/// in linear time.
inline double d_top_sq(const Barcode& a, const Barcode& b) {
    if (a.node_count != b.node_count) {
        throw std::invalid_argument("barcodes have different node counts");
    }
    if (a.births.size() != b.births.size() || a.deaths.size() != b.deaths.size()) {
        throw std::invalid_argument("barcode list lengths differ");
    }
    double sum = 0.0;
    for (std::size_t l = 0; l < a.births.size(); ++l) {
        const double d = a.births[l] - b.births[l];
        sum += d * d;
    }
    for (std::size_t l = 0; l < a.deaths.size(); ++l) {
        const double d = a.deaths[l] - b.deaths[l];
        sum += d * d;
    }
    return sum;
}

inline double d_top(const Barcode& a, const Barcode& b) { return std::sqrt(d_top_sq(a, b)); }

/// Squared geometric distance: sum of squared upper-triangular differences.
inline double d_geo_sq(const WeightedNetwork& g, const WeightedNetwork& h) {
    if (g.node_count() != h.node_count()) {
        throw std::invalid_argument("networks have different node counts");
    }
    double sum = 0.0;
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        const double d = g.weights()[e] - h.weights()[e];
        sum += d * d;
    }
    return sum;
}

/// Combined dissimilarity (1-lam) d_geo_sq + lam d_top_sq, with precomputed
/// barcodes. At the endpoints the unused term is skipped entirely so the
/// reductions to plain geometry (lam=0) and pure topology (lam=1) are exact.
inline double d_net_sq(const WeightedNetwork& g, const WeightedNetwork& h, const Barcode& bg,
                       const Barcode& bh, Lambda lam) {
    const double l = lam.value();
    if (l == 0.0) return d_geo_sq(g, h);
    if (l == 1.0) return d_top_sq(bg, bh);
    return (1.0 - l) * d_geo_sq(g, h) + l * d_top_sq(bg, bh);
}

inline double d_net_sq(const WeightedNetwork& g, const WeightedNetwork& h, Lambda lam) {
    if (g.node_count() != h.node_count()) {
        throw std::invalid_argument("networks have different node counts");
    }
    if (lam.value() == 0.0) return d_geo_sq(g, h);
    return d_net_sq(g, h, decompose(g), decompose(h), lam);
}

class DistanceMatrix {
public:
    DistanceMatrix(std::size_t n, std::vector<double> values)
        : size_(n), values_(std::move(values)) {}

    std::size_t size() const { return size_; }
    double at(std::size_t i, std::size_t j) const { return values_[i * size_ + j]; }
    const std::vector<double>& values() const { return values_; }

private:
    std::size_t size_;
    std::vector<double> values_;
};

/// All-pairs d_net_sq. Each barcode is computed once; the upper-triangular
/// pairs are filled by a parallel map with disjoint writes and then mirrored,
/// so the matrix is exactly symmetric and independent of the worker count.
inline DistanceMatrix distance_matrix(std::span<const WeightedNetwork> nets, Lambda lam,
                                      std::size_t threads = 0) {
    const std::size_t n = nets.size();
    if (n == 0) throw std::invalid_argument("distance_matrix needs at least one network");
    for (const WeightedNetwork& net : nets) {
        if (net.node_count() != nets[0].node_count()) {
            throw std::invalid_argument("networks have different node counts");
        }
    }
    std::vector<Barcode> barcodes;
    if (lam.value() > 0.0) {
        barcodes.resize(n);
        parallel_for(n, threads, [&](std::size_t i) { barcodes[i] = decompose(nets[i]); });
    }
    std::vector<double> values(n * n, 0.0);
    const std::size_t pairs = n * (n - 1) / 2;
    parallel_for(pairs, threads, [&](std::size_t p) {
        // Invert p -> (i, j) over the strict upper triangle.
        std::size_t i = 0;
        std::size_t rem = p;
        while (rem >= n - 1 - i) {
            rem -= n - 1 - i;
            ++i;
        }
        const std::size_t j = i + 1 + rem;
        const double d = lam.value() > 0.0
                             ? d_net_sq(nets[i], nets[j], barcodes[i], barcodes[j], lam)
                             : d_geo_sq(nets[i], nets[j]);
        values[i * n + j] = d;
    });
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            values[j * n + i] = values[i * n + j];
        }
    }
    return DistanceMatrix(n, std::move(values));
}

}  // namespace topoclust

#endif
