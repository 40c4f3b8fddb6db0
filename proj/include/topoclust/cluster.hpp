#ifndef TOPOCLUST_CLUSTER_HPP
#define TOPOCLUST_CLUSTER_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "topoclust/barycenter.hpp"
#include "topoclust/filtration.hpp"
#include "topoclust/metric.hpp"
#include "topoclust/network.hpp"
#include "topoclust/parallel.hpp"
#include "topoclust/random.hpp"

namespace topoclust {

struct ClusterConfig {
    std::size_t k = 1;
    Lambda lambda{0.0};
    std::uint64_t seed = 0;
    std::size_t max_outer_iters = 100;
    InterpolationConfig interp;
    std::size_t restarts = 1;
    std::size_t threads = 0;
};

/// Objective after the assignment half-step and after re-estimation, per
/// outer iteration. On the converged iteration the two values coincide.
struct IterationRecord {
    double after_assignment = 0.0;
    double after_update = 0.0;
};

struct Clustering {
    std::vector<std::size_t> assignments;
    std::vector<Representative> representatives;
    double objective = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<IterationRecord> trace;
    double initial_objective = 0.0;
    std::uint64_t run_seed = 0;
    std::size_t repair_events = 0;
};

/// Uniformly random partition of n items into k non-empty clusters.
///
/// Labelings are drawn uniformly and rejected until every cluster is hit,
/// which is uniform over surjections. k == n short-circuits to a shuffled
/// permutation (the only surjections), and a forced fallback guards the
/// pathological rejection regimes near k == n.
inline std::vector<std::size_t> random_partition(std::size_t n, std::size_t k, Rng& rng) {
    if (k == 0 || k > n) throw std::invalid_argument("need 1 <= k <= n");
    std::vector<std::size_t> assignment(n);
    if (k == n) {
        for (std::size_t i = 0; i < n; ++i) assignment[i] = i;
        rng.shuffle(std::span<std::size_t>(assignment));
        return assignment;
    }
    std::vector<std::uint8_t> hit(k);
    for (int attempt = 0; attempt < 10000; ++attempt) {
        std::fill(hit.begin(), hit.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            assignment[i] = rng.below(k);
            hit[assignment[i]] = 1;
        }
        if (std::all_of(hit.begin(), hit.end(), [](std::uint8_t h) { return h != 0; })) {
            return assignment;
        }
    }
    // Pin one item per cluster, fill the rest uniformly.
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t h = 0; h < k; ++h) assignment[order[h]] = h;
    for (std::size_t i = k; i < n; ++i) assignment[order[i]] = rng.below(k);
    return assignment;
}

namespace detail {

struct ClusterState {
    // Representatives in λ-appropriate form. reps_net holds the network for
    // λ<1; reps_bc holds the barcode for λ>0 (decomposed from reps_net when
    // λ is interior).
    std::vector<WeightedNetwork> reps_net;
    std::vector<Barcode> reps_bc;
};

inline double rep_distance(const ClusterState& state, std::size_t h,
                           const WeightedNetwork& net, const Barcode* bc, double lam) {
    if (lam == 0.0) return d_geo_sq(state.reps_net[h], net);
    if (lam == 1.0) return d_top_sq(state.reps_bc[h], *bc);
    return (1.0 - lam) * d_geo_sq(state.reps_net[h], net) +
           lam * d_top_sq(state.reps_bc[h], *bc);
}

// Cluster-major objective; the fixed summation order keeps the value
// reproducible and comparable against independent recomputation.
inline double state_objective(const ClusterState& state, std::span<const WeightedNetwork> nets,
                              std::span<const Barcode> barcodes,
                              std::span<const std::size_t> assignments, std::size_t k,
                              double lam) {
    double total = 0.0;
    for (std::size_t h = 0; h < k; ++h) {
        for (std::size_t i = 0; i < nets.size(); ++i) {
            if (assignments[i] != h) continue;
            total += rep_distance(state, h, nets[i], lam > 0.0 ? &barcodes[i] : nullptr, lam);
        }
    }
    return total;
}

inline void reestimate(ClusterState& state, std::span<const WeightedNetwork> nets,
                       std::span<const Barcode> barcodes,
                       std::span<const std::size_t> assignments, const ClusterConfig& cfg,
                       bool bootstrap) {
    const double lam = cfg.lambda.value();
    const std::size_t k = cfg.k;
    std::vector<std::vector<std::size_t>> members(k);
    for (std::size_t i = 0; i < nets.size(); ++i) members[assignments[i]].push_back(i);

    parallel_for(k, cfg.threads, [&](std::size_t h) {
        std::vector<WeightedNetwork> cluster_nets;
        std::vector<Barcode> cluster_bcs;
        for (std::size_t i : members[h]) {
            if (lam < 1.0) cluster_nets.push_back(nets[i]);
            if (lam > 0.0) cluster_bcs.push_back(barcodes[i]);
        }
        if (lam == 0.0) {
            state.reps_net[h] = sample_mean(cluster_nets);
        } else if (lam == 1.0) {
            state.reps_bc[h] = topological_centroid(cluster_bcs);
        } else {
            const WeightedNetwork mean = sample_mean(cluster_nets);
            const Barcode centroid = topological_centroid(cluster_bcs);
            const WeightedNetwork& init = bootstrap ? mean : state.reps_net[h];
            InterpolationResult res =
                interpolate(mean, centroid, cfg.lambda, cfg.interp, init);
            state.reps_net[h] = std::move(res.network);
            state.reps_bc[h] = decompose(state.reps_net[h]);
        }
    });
}

inline Clustering cluster_once(std::span<const WeightedNetwork> nets,
                               std::span<const Barcode> barcodes, const ClusterConfig& cfg,
                               std::uint64_t run_seed) {
    const std::size_t n = nets.size();
    const std::size_t k = cfg.k;
    const double lam = cfg.lambda.value();

    Rng rng(run_seed);
    Clustering result;
    result.run_seed = run_seed;
    result.assignments = random_partition(n, k, rng);

    ClusterState state;
    const WeightedNetwork placeholder(nets[0].node_count(),
                                      std::vector<double>(nets[0].edge_count(), 0.0));
    if (lam < 1.0) state.reps_net.assign(k, placeholder);
    if (lam > 0.0) state.reps_bc.assign(k, Barcode{});

    reestimate(state, nets, barcodes, result.assignments, cfg, true);
    result.initial_objective =
        state_objective(state, nets, barcodes, result.assignments, k, lam);

    std::vector<double> dist(n);
    std::vector<std::size_t> proposal(n);
    for (std::size_t it = 1; it <= cfg.max_outer_iters; ++it) {
        parallel_for(n, cfg.threads, [&](std::size_t i) {
            std::size_t best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t h = 0; h < k; ++h) {
                const double d =
                    rep_distance(state, h, nets[i], lam > 0.0 ? &barcodes[i] : nullptr, lam);
                if (d < best_d) {
                    best_d = d;
                    best = h;
                }
            }
            proposal[i] = best;
            dist[i] = best_d;
        });

        // Re-seat one network into each cluster the assignment emptied:
        // the globally worst-fitting network from any cluster that can
        // spare one, ties to the lowest index.
        std::vector<std::size_t> sizes(k, 0);
        for (std::size_t i = 0; i < n; ++i) ++sizes[proposal[i]];
        for (std::size_t h = 0; h < k; ++h) {
            if (sizes[h] != 0) continue;
            std::size_t donor = n;
            for (std::size_t i = 0; i < n; ++i) {
                if (sizes[proposal[i]] < 2) continue;
                if (donor == n || dist[i] > dist[donor]) donor = i;
            }
            --sizes[proposal[donor]];
            proposal[donor] = h;
            sizes[h] = 1;
            dist[donor] = rep_distance(state, h, nets[donor],
                                       lam > 0.0 ? &barcodes[donor] : nullptr, lam);
            ++result.repair_events;
        }

        const double after_assignment =
            state_objective(state, nets, barcodes, proposal, k, lam);
        result.iterations = it;
        if (proposal == result.assignments) {
            result.trace.push_back({after_assignment, after_assignment});
            result.converged = true;
            result.objective = after_assignment;
            break;
        }
        result.assignments = proposal;
        reestimate(state, nets, barcodes, result.assignments, cfg, false);
        const double after_update =
            state_objective(state, nets, barcodes, result.assignments, k, lam);
        result.trace.push_back({after_assignment, after_update});
        result.objective = after_update;
    }

    result.representatives.reserve(k);
    for (std::size_t h = 0; h < k; ++h) {
        if (lam == 1.0) {
            result.representatives.emplace_back(state.reps_bc[h]);
        } else {
            result.representatives.emplace_back(state.reps_net[h]);
        }
    }
    return result;
}

}  // namespace detail

/// Recomputes the clustering objective from scratch. Barcode representatives
/// are only meaningful at λ=1.
inline double objective(std::span<const WeightedNetwork> nets,
                        std::span<const std::size_t> assignments,
                        std::span<const Representative> reps, Lambda lam) {
    if (assignments.size() != nets.size()) {
        throw std::invalid_argument("assignment length does not match network count");
    }
    const double l = lam.value();
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        if (assignments[i] >= reps.size()) {
            throw std::invalid_argument("cluster index out of range");
        }
    }
    std::vector<Barcode> barcodes;
    if (l > 0.0) {
        barcodes.reserve(nets.size());
        for (const WeightedNetwork& net : nets) barcodes.push_back(decompose(net));
    }
    double total = 0.0;
    for (std::size_t h = 0; h < reps.size(); ++h) {
        const WeightedNetwork* rep_net = std::get_if<WeightedNetwork>(&reps[h]);
        const Barcode* rep_bc = std::get_if<Barcode>(&reps[h]);
        if (rep_bc && l != 1.0) {
            throw std::invalid_argument("barcode representative requires lambda == 1");
        }
        Barcode decomposed;
        if (rep_net && l > 0.0) {
            decomposed = decompose(*rep_net);
            rep_bc = &decomposed;
        }
        for (std::size_t i = 0; i < nets.size(); ++i) {
            if (assignments[i] != h) continue;
            if (l == 0.0) {
                total += d_geo_sq(*rep_net, nets[i]);
            } else if (l == 1.0) {
                total += d_top_sq(*rep_bc, barcodes[i]);
            } else {
                total += (1.0 - l) * d_geo_sq(*rep_net, nets[i]) +
                         l * d_top_sq(*rep_bc, barcodes[i]);
            }
        }
    }
    return total;
}

/// Alternating assignment / re-estimation with random-partition init.
///
/// Representatives are the sample mean at λ=0, the topological centroid at
/// λ=1, and the gradient-descent interpolation between the two otherwise
/// (warm-started from the previous representative). Runs `restarts` times
/// with seeds derived from cfg.seed and keeps the lowest objective.
inline Clustering cluster(std::span<const WeightedNetwork> nets, const ClusterConfig& cfg) {
    const std::size_t n = nets.size();
    if (n == 0) throw std::invalid_argument("cluster needs at least one network");
    if (cfg.k == 0 || cfg.k > n) throw std::invalid_argument("need 1 <= k <= #networks");
    if (cfg.max_outer_iters == 0) throw std::invalid_argument("max_outer_iters must be positive");
    if (cfg.restarts == 0) throw std::invalid_argument("restarts must be positive");
    for (const WeightedNetwork& net : nets) {
        if (net.node_count() != nets[0].node_count()) {
            throw std::invalid_argument("networks have different node counts");
        }
    }
    const double lam = cfg.lambda.value();
    if (lam > 0.0 && lam < 1.0) cfg.interp.validate();

    std::vector<Barcode> barcodes;
    if (lam > 0.0) {
        barcodes.resize(n);
        parallel_for(n, cfg.threads, [&](std::size_t i) { barcodes[i] = decompose(nets[i]); });
    }

    Clustering best;
    bool have_best = false;
    for (std::size_t r = 0; r < cfg.restarts; ++r) {
        Clustering run = detail::cluster_once(nets, barcodes, cfg, derive_seed(cfg.seed, r));
        if (!have_best || run.objective < best.objective) {
            best = std::move(run);
            have_best = true;
        }
    }
    return best;
}

}  // namespace topoclust

#endif
