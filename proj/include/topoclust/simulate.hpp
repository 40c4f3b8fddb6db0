#ifndef TOPOCLUST_SIMULATE_HPP
#define TOPOCLUST_SIMULATE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "topoclust/network.hpp"
#include "topoclust/random.hpp"

namespace topoclust {

struct ModularConfig {
    std::size_t node_count = 0;
    std::size_t modules = 1;
    double within_prob = 0.9;
    double mu = 1.0;
    double sigma = 0.5;
    std::uint64_t seed = 0;

    void validate() const {
        if (node_count == 0) throw std::invalid_argument("node_count must be positive");
        if (modules == 0 || modules > node_count) {
            throw std::invalid_argument("need 1 <= modules <= node_count");
        }
        if (!(within_prob >= 0.0 && within_prob <= 1.0)) {
            throw std::invalid_argument("within_prob must lie in [0,1]");
        }
        if (!std::isfinite(mu)) throw std::invalid_argument("mu must be finite");
        if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
    }
};

/// Per-pair sampling record, exposed for statistical tests: whether the pair
/// is within one module and whether it drew the signal distribution N(mu,.)
/// rather than the noise distribution N(0,.). Indexed in pair_index order.
struct PairDraws {
    std::vector<std::uint8_t> same_module;
    std::vector<std::uint8_t> signal;
};

/// Contiguous module sizes, as even as possible; the remainder goes to the
/// leading modules.
inline std::vector<std::size_t> module_sizes(std::size_t node_count, std::size_t modules) {
    std::vector<std::size_t> sizes(modules, node_count / modules);
    for (std::size_t i = 0; i < node_count % modules; ++i) ++sizes[i];
    return sizes;
}

/// Random modular network: within-module pairs draw N(mu, sigma^2) with
/// probability r and N(0, sigma^2) otherwise; between-module pairs swap the
/// probabilities. Negative weights clamp to zero.
///
/// Each pair owns an RNG stream derived from (seed, pair_index), so the
/// network is identical no matter what order pairs are sampled in.
inline WeightedNetwork simulate_modular(const ModularConfig& cfg, PairDraws* draws = nullptr) {
    cfg.validate();
    const std::size_t n = cfg.node_count;
    std::vector<std::size_t> module_of(n);
    {
        std::size_t node = 0, m = 0;
        for (std::size_t size : module_sizes(n, cfg.modules)) {
            for (std::size_t s = 0; s < size; ++s) module_of[node++] = m;
            ++m;
        }
    }
    std::vector<double> weights(pair_count(n));
    if (draws) {
        draws->same_module.assign(weights.size(), 0);
        draws->signal.assign(weights.size(), 0);
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const std::size_t e = pair_index(i, j, n);
            Rng rng(derive_seed(cfg.seed, e));
            const bool same = module_of[i] == module_of[j];
            const double p_signal = same ? cfg.within_prob : 1.0 - cfg.within_prob;
            const bool signal = rng.uniform01() < p_signal;
            const double w = rng.normal(signal ? cfg.mu : 0.0, cfg.sigma);
            weights[e] = std::max(w, 0.0);
            if (draws) {
                draws->same_module[e] = same ? 1 : 0;
                draws->signal[e] = signal ? 1 : 0;
            }
        }
    }
    return WeightedNetwork(n, std::move(weights));
}

struct GroupSpec {
    std::size_t count = 0;
    ModularConfig config;
    std::string label;  // empty -> "L<position>"
};

struct SimulatedGroups {
    std::vector<WeightedNetwork> networks;
    std::vector<std::string> labels;
};

/// Concatenates simulated groups. Network idx within a group uses seed
/// derive_seed(group seed, idx), so groups and members are independent.
inline SimulatedGroups simulate_groups(std::span<const GroupSpec> groups) {
    if (groups.empty()) throw std::invalid_argument("simulate_groups needs at least one group");
    for (const GroupSpec& g : groups) {
        g.config.validate();
        if (g.count == 0) throw std::invalid_argument("group count must be positive");
        if (g.config.node_count != groups[0].config.node_count) {
            throw std::invalid_argument("groups have different node counts");
        }
    }
    SimulatedGroups out;
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        const GroupSpec& g = groups[gi];
        const std::string label = g.label.empty() ? "L" + std::to_string(gi + 1) : g.label;
        for (std::size_t idx = 0; idx < g.count; ++idx) {
            ModularConfig cfg = g.config;
            cfg.seed = derive_seed(g.config.seed, idx);
            out.networks.push_back(simulate_modular(cfg));
            out.labels.push_back(label);
        }
    }
    return out;
}

}  // namespace topoclust

#endif
