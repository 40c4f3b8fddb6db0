#ifndef TOPOCLUST_BARYCENTER_HPP
#define TOPOCLUST_BARYCENTER_HPP

#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "topoclust/filtration.hpp"
#include "topoclust/metric.hpp"
#include "topoclust/network.hpp"

namespace topoclust {

/// Cluster representative: a full network when geometry participates, a bare
/// barcode when only topology does.
using Representative = std::variant<WeightedNetwork, Barcode>;

struct InterpolationConfig {
    double step_size = 0.05;
    std::size_t max_iters = 200;
    double rel_tol = 1e-8;

    void validate() const {
        if (!(step_size > 0.0)) throw std::invalid_argument("step_size must be positive");
        if (max_iters == 0) throw std::invalid_argument("max_iters must be positive");
        if (!(rel_tol > 0.0 && rel_tol < 1.0)) {
            throw std::invalid_argument("rel_tol must lie in (0,1)");
        }
    }
};

struct InterpolationResult {
    WeightedNetwork network;
    double objective = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    // Set when 30 step halvings failed to produce a decrease; the result is
    // still the best point seen.
    bool stalled = false;
};

/// Minimizer of the summed squared topological distance: index-wise means of
/// the sorted birth and death lists. Means of sorted sequences stay sorted,
/// so the result is a valid barcode without re-sorting.
inline Barcode topological_centroid(std::span<const Barcode> barcodes) {
    if (barcodes.empty()) {
        throw std::invalid_argument("topological_centroid needs at least one barcode");
    }
    const Barcode& first = barcodes[0];
    for (const Barcode& bc : barcodes) {
        if (bc.node_count != first.node_count) {
            throw std::invalid_argument("barcodes have different node counts");
        }
    }
    Barcode centroid;
    centroid.node_count = first.node_count;
    centroid.births.assign(first.births.size(), 0.0);
    centroid.deaths.assign(first.deaths.size(), 0.0);
    for (const Barcode& bc : barcodes) {
        for (std::size_t l = 0; l < centroid.births.size(); ++l) centroid.births[l] += bc.births[l];
        for (std::size_t l = 0; l < centroid.deaths.size(); ++l) centroid.deaths[l] += bc.deaths[l];
    }
    const double inv = 1.0 / static_cast<double>(barcodes.size());
    for (double& b : centroid.births) b *= inv;
    for (double& d : centroid.deaths) d *= inv;
    return centroid;
}

/// Edge-wise mean network. Node labels of the first input are carried over.
inline WeightedNetwork sample_mean(std::span<const WeightedNetwork> nets) {
    if (nets.empty()) throw std::invalid_argument("sample_mean needs at least one network");
    const std::size_t n = nets[0].node_count();
    for (const WeightedNetwork& net : nets) {
        if (net.node_count() != n) {
            throw std::invalid_argument("networks have different node counts");
        }
    }
    std::vector<double> mean(nets[0].edge_count(), 0.0);
    for (const WeightedNetwork& net : nets) {
        for (std::size_t e = 0; e < mean.size(); ++e) mean[e] += net.weights()[e];
    }
    const double inv = 1.0 / static_cast<double>(nets.size());
    for (double& w : mean) w *= inv;
    return WeightedNetwork(n, std::move(mean), nets[0].node_labels());
}

/// Gradient of d_top(decompose(h), target)^2 with respect to h's weights.
///
/// Each edge weight is exactly one entry of the birth or death list, so the
/// derivative is 2(u - matched value) where the match follows sorted rank
/// within the edge's own list. At weight ties the matching is not unique;
/// the tie-broken decomposition's gradient is used.
inline std::vector<double> grad_dtop_sq(const WeightedNetwork& h, const Barcode& target) {
    if (h.node_count() != target.node_count) {
        throw std::invalid_argument("network and barcode node counts differ");
    }
    const EdgeDecomposition dec = decompose_tagged(h);
    std::vector<double> grad(h.edge_count());
    for (std::size_t e = 0; e < grad.size(); ++e) {
        const double matched = dec.is_birth[e] ? target.births[dec.rank[e]]
                                               : target.deaths[dec.rank[e]];
        grad[e] = 2.0 * (h.weights()[e] - matched);
    }
    return grad;
}

namespace detail {

inline double interp_objective(const std::vector<double>& w, const WeightedNetwork& mean_net,
                               const Barcode& top_centroid, double lam, std::size_t n) {
    WeightedNetwork h(n, w);
    return (1.0 - lam) * d_geo_sq(h, mean_net) + lam * d_top_sq(decompose(h), top_centroid);
}

}  // namespace detail

/// Gradient descent on F(H) = (1-lam) d_geo_sq(H, mean_net)
///                          + lam d_top(decompose(H), top_centroid)^2.
///
/// The step is fixed but halves whenever a step would increase F, and the
/// halved step persists, so accepted objective values are non-increasing by
/// construction. After 30 consecutive failed halvings the descent stops with
/// `stalled` set. Weights are not projected; negative values are legal.
inline InterpolationResult interpolate(const WeightedNetwork& mean_net,
                                       const Barcode& top_centroid, Lambda lam,
                                       const InterpolationConfig& cfg,
                                       const WeightedNetwork& init) {
    const double l = lam.value();
    if (!(l > 0.0 && l < 1.0)) {
        throw std::invalid_argument("interpolate requires lambda strictly inside (0,1)");
    }
    cfg.validate();
    const std::size_t n = mean_net.node_count();
    if (init.node_count() != n || top_centroid.node_count != n) {
        throw std::invalid_argument("interpolate inputs have inconsistent node counts");
    }

    std::vector<double> w = init.weights();
    double f = detail::interp_objective(w, mean_net, top_centroid, l, n);
    double step = cfg.step_size;
    InterpolationResult result{WeightedNetwork(n, w), f, 0, false, false};

    for (std::size_t it = 0; it < cfg.max_iters; ++it) {
        WeightedNetwork current(n, w);
        std::vector<double> grad = grad_dtop_sq(current, top_centroid);
        for (std::size_t e = 0; e < grad.size(); ++e) {
            grad[e] = 2.0 * (1.0 - l) * (w[e] - mean_net.weights()[e]) + l * grad[e];
        }

        std::vector<double> trial(w.size());
        double f_trial = 0.0;
        bool accepted = false;
        for (int halving = 0; halving <= 30; ++halving) {
            for (std::size_t e = 0; e < w.size(); ++e) trial[e] = w[e] - step * grad[e];
            f_trial = detail::interp_objective(trial, mean_net, top_centroid, l, n);
            if (f_trial <= f) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            result.stalled = true;
            break;
        }
        w.swap(trial);
        result.iterations = it + 1;
        const double decrease = f - f_trial;
        f = f_trial;
        if (decrease < cfg.rel_tol * std::max(std::abs(f), 1e-30)) {
            result.converged = true;
            break;
        }
    }

    result.network = WeightedNetwork(n, std::move(w), mean_net.node_labels());
    result.objective = f;
    return result;
}

}  // namespace topoclust

#endif
