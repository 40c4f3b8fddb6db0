#ifndef TOPOCLUST_FILTRATION_HPP
#define TOPOCLUST_FILTRATION_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "topoclust/network.hpp"

namespace topoclust {

/// Birth-death decomposition of a network's edge weights.
///
/// Births are the weights at which connected components appear as the
/// filtration descends; deaths are the weights at which independent cycles
/// disappear. Counts are fixed by the node count alone:
/// |births| = n-1 and |deaths| = 1 + n(n-3)/2, and together the two lists
/// hold every edge weight exactly once. Both are kept sorted ascending.
struct Barcode {
    std::size_t node_count = 0;
    std::vector<double> births;
    std::vector<double> deaths;
};

struct BettiCurve {
    std::vector<double> thresholds;
    std::vector<long long> beta0;
    std::vector<long long> beta1;
};

/// Per-edge view of the decomposition, for gradients: edge e (in pair_index
/// order) is a birth iff is_birth[e], and rank[e] is its position in the
/// sorted births (resp. deaths) list.
struct EdgeDecomposition {
    Barcode barcode;
    std::vector<std::uint8_t> is_birth;
    std::vector<std::size_t> rank;
};

namespace detail {

class DisjointSet {
public:
    explicit DisjointSet(std::size_t n) : parent_(n), size_(n, 1) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
        return true;
    }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> size_;
};

// Kruskal over all pairs, descending weight, ties by pair index. Fills
// is_birth per edge in pair_index order.
inline std::vector<std::uint8_t> mark_births(const WeightedNetwork& net) {
    const std::size_t n = net.node_count();
    const std::vector<double>& w = net.weights();
    std::vector<std::size_t> order(w.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&w](std::size_t a, std::size_t b) {
        if (w[a] != w[b]) return w[a] > w[b];
        return a < b;
    });
    std::vector<std::size_t> row(w.size());
    for (std::size_t i = 0, e = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j, ++e) row[e] = i;
    }
    DisjointSet ds(n);
    std::vector<std::uint8_t> is_birth(w.size(), 0);
    for (std::size_t e : order) {
        const std::size_t i = row[e];
        const std::size_t j = e - (i * n - i * (i + 1) / 2) + i + 1;
        if (ds.unite(i, j)) is_birth[e] = 1;
    }
    return is_birth;
}

}  // namespace detail

/// Splits the edge-weight multiset into maximum-spanning-tree weights
/// (births) and the rest (deaths). Requires at least two nodes.
inline Barcode decompose(const WeightedNetwork& net) {
    if (net.node_count() < 2) {
        throw std::invalid_argument("decompose requires at least two nodes");
    }
    const std::vector<std::uint8_t> is_birth = detail::mark_births(net);
    Barcode bc;
    bc.node_count = net.node_count();
    bc.births.reserve(net.node_count() - 1);
    bc.deaths.reserve(net.edge_count() - (net.node_count() - 1));
    for (std::size_t e = 0; e < is_birth.size(); ++e) {
        (is_birth[e] ? bc.births : bc.deaths).push_back(net.weights()[e]);
    }
    std::sort(bc.births.begin(), bc.births.end());
    std::sort(bc.deaths.begin(), bc.deaths.end());
    return bc;
}

/// decompose plus the per-edge attribution needed by gradients. rank[e] is
/// stable under weight ties (equal weights ordered by edge index).
inline EdgeDecomposition decompose_tagged(const WeightedNetwork& net) {
    if (net.node_count() < 2) {
        throw std::invalid_argument("decompose requires at least two nodes");
    }
    EdgeDecomposition dec;
    dec.is_birth = detail::mark_births(net);
    const std::vector<double>& w = net.weights();
    dec.barcode.node_count = net.node_count();
    dec.rank.assign(w.size(), 0);

    std::vector<std::size_t> order(w.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&w](std::size_t a, std::size_t b) {
        if (w[a] != w[b]) return w[a] < w[b];
        return a < b;
    });
    std::size_t next_birth = 0, next_death = 0;
    for (std::size_t e : order) {
        if (dec.is_birth[e]) {
            dec.rank[e] = next_birth++;
            dec.barcode.births.push_back(w[e]);
        } else {
            dec.rank[e] = next_death++;
            dec.barcode.deaths.push_back(w[e]);
        }
    }
    return dec;
}

/// Betti numbers along a sorted threshold grid, read off the barcode:
/// beta0(e) = 1 + #{births <= e}, beta1(e) = #{deaths > e}. Edges survive
/// the filtration strictly above the threshold.
inline BettiCurve betti_curve(const Barcode& bc, const std::vector<double>& thresholds) {
    if (!std::is_sorted(thresholds.begin(), thresholds.end())) {
        throw std::invalid_argument("thresholds must be sorted ascending");
    }
    BettiCurve curve;
    curve.thresholds = thresholds;
    curve.beta0.reserve(thresholds.size());
    curve.beta1.reserve(thresholds.size());
    for (double eps : thresholds) {
        const auto born =
            std::upper_bound(bc.births.begin(), bc.births.end(), eps) - bc.births.begin();
        const auto dead =
            std::upper_bound(bc.deaths.begin(), bc.deaths.end(), eps) - bc.deaths.begin();
        curve.beta0.push_back(1 + static_cast<long long>(born));
        curve.beta1.push_back(static_cast<long long>(bc.deaths.size()) -
                              static_cast<long long>(dead));
    }
    return curve;
}

/// Direct Betti computation on the thresholded graph, independent of the
/// barcode path; used to cross-check decompose.
inline std::pair<long long, long long> betti_at(const WeightedNetwork& net, double eps) {
    const std::size_t n = net.node_count();
    detail::DisjointSet ds(n);
    long long kept = 0;
    std::size_t components = n;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (net.weight(i, j) > eps) {
                ++kept;
                if (ds.unite(i, j)) --components;
            }
        }
    }
    const long long beta0 = static_cast<long long>(components);
    const long long beta1 = kept - static_cast<long long>(n) + beta0;
    return {beta0, beta1};
}

inline nlohmann::json barcode_to_json(const Barcode& bc) {
    return nlohmann::json{
        {"node_count", bc.node_count}, {"births", bc.births}, {"deaths", bc.deaths}};
}

inline Barcode barcode_from_json(const nlohmann::json& doc) {
    Barcode bc;
    bc.node_count = doc.at("node_count").get<std::size_t>();
    bc.births = doc.at("births").get<std::vector<double>>();
    bc.deaths = doc.at("deaths").get<std::vector<double>>();
    const std::size_t n = bc.node_count;
    if (n < 2 || bc.births.size() != n - 1 ||
        bc.births.size() + bc.deaths.size() != pair_count(n) ||
        !std::is_sorted(bc.births.begin(), bc.births.end()) ||
        !std::is_sorted(bc.deaths.begin(), bc.deaths.end())) {
        throw std::runtime_error("malformed barcode");
    }
    return bc;
}

inline void save_betti_csv(const BettiCurve& curve, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open file for writing: " + path);
    out << "epsilon,beta0,beta1\n";
    for (std::size_t i = 0; i < curve.thresholds.size(); ++i) {
        out << detail::format_double(curve.thresholds[i]) << ',' << curve.beta0[i] << ','
            << curve.beta1[i] << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace topoclust

#endif
