#ifndef TOPOCLUST_EXPERIMENT_HPP
#define TOPOCLUST_EXPERIMENT_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "topoclust/barycenter.hpp"
#include "topoclust/cluster.hpp"
#include "topoclust/evaluate.hpp"
#include "topoclust/filtration.hpp"
#include "topoclust/network.hpp"
#include "topoclust/parallel.hpp"
#include "topoclust/simulate.hpp"

namespace topoclust {

/// Grid experiment: cluster the dataset at every (lambda, seed) pair,
/// evaluate against ground truth, and aggregate per lambda. The dataset is
/// either a manifest on disk or an inline simulation.
struct ExperimentConfig {
    std::string manifest_path;      // exactly one of manifest_path /
    std::vector<GroupSpec> groups;  // groups must be set
    std::size_t k = 1;
    std::vector<double> lambdas;
    std::vector<std::uint64_t> seeds;
    std::size_t perms = 100000;
    std::uint64_t perm_seed = 0;
    std::string output_dir;
    std::size_t max_outer_iters = 100;
    InterpolationConfig interp;
    std::size_t restarts = 1;
    std::size_t threads = 0;

    void validate() const {
        if (manifest_path.empty() == groups.empty()) {
            throw std::invalid_argument("need exactly one of manifest or simulate groups");
        }
        if (k == 0) throw std::invalid_argument("k must be positive");
        if (lambdas.empty()) throw std::invalid_argument("lambdas must be non-empty");
        for (double l : lambdas) {
            Lambda check(l);  // range check
            (void)check;
        }
        if (seeds.empty()) throw std::invalid_argument("seeds must be non-empty");
        if (perms == 0) throw std::invalid_argument("perms must be positive");
        if (output_dir.empty()) throw std::invalid_argument("output_dir must be set");
    }
};

struct RunResult {
    double lambda = 0.0;
    std::uint64_t seed = 0;
    double accuracy = 0.0;
    double ari = 0.0;
    double p_value = 0.0;
    Clustering clustering;
};

struct ExperimentSummary {
    std::vector<RunResult> runs;  // lambda-major grid order
    std::string aggregate_path;
};

inline ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(path + ": config parse error: " + e.what());
    }
    ExperimentConfig cfg;
    try {
        cfg.k = doc.at("k").get<std::size_t>();
        cfg.lambdas = doc.at("lambdas").get<std::vector<double>>();
        const auto& seeds = doc.at("seeds");
        if (seeds.is_array()) {
            cfg.seeds = seeds.get<std::vector<std::uint64_t>>();
        } else {
            const auto count = seeds.at("count").get<std::size_t>();
            const auto base = seeds.at("base").get<std::uint64_t>();
            for (std::size_t j = 0; j < count; ++j) cfg.seeds.push_back(base + j);
        }
        cfg.perms = doc.value("perms", std::size_t{100000});
        cfg.perm_seed = doc.value("perm_seed", std::uint64_t{0});
        cfg.output_dir = doc.at("output_dir").get<std::string>();
        cfg.max_outer_iters = doc.value("max_outer_iters", std::size_t{100});
        cfg.restarts = doc.value("restarts", std::size_t{1});
        cfg.threads = doc.value("threads", std::size_t{0});
        cfg.interp.step_size = doc.value("step_size", cfg.interp.step_size);
        cfg.interp.max_iters = doc.value("interp_max_iters", cfg.interp.max_iters);
        cfg.interp.rel_tol = doc.value("rel_tol", cfg.interp.rel_tol);
        if (doc.contains("manifest")) {
            cfg.manifest_path = doc.at("manifest").get<std::string>();
            // Relative manifest paths resolve against the config location.
            std::filesystem::path p(cfg.manifest_path);
            if (p.is_relative()) {
                cfg.manifest_path = (std::filesystem::path(path).parent_path() / p).string();
            }
        }
        if (doc.contains("simulate")) {
            for (const auto& item : doc.at("simulate").at("groups")) {
                GroupSpec g;
                g.count = item.at("count").get<std::size_t>();
                g.config.node_count = item.at("nodes").get<std::size_t>();
                g.config.modules = item.at("modules").get<std::size_t>();
                g.config.within_prob = item.at("r").get<double>();
                g.config.mu = item.value("mu", 1.0);
                g.config.sigma = item.value("sigma", 0.5);
                g.config.seed = item.value("seed", std::uint64_t{0});
                g.label = item.value("label", std::string{});
                cfg.groups.push_back(std::move(g));
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(path + ": bad config: " + e.what());
    }
    cfg.validate();
    return cfg;
}

namespace detail {

inline double mean_of(std::span<const double> xs) {
    double sum = 0.0;
    for (double x : xs) sum += x;
    return sum / static_cast<double>(xs.size());
}

inline double sample_std(std::span<const double> xs) {
    if (xs.size() < 2) return 0.0;
    const double m = mean_of(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

inline nlohmann::json run_to_json(const RunResult& run, std::size_t perms) {
    nlohmann::json doc;
    doc["lambda"] = run.lambda;
    doc["seed"] = run.seed;
    doc["accuracy"] = run.accuracy;
    doc["ari"] = run.ari;
    doc["p_value"] = run.p_value;
    doc["n_permutations"] = perms;
    doc["assignments"] = run.clustering.assignments;
    doc["objective"] = run.clustering.objective;
    doc["initial_objective"] = run.clustering.initial_objective;
    doc["iterations"] = run.clustering.iterations;
    doc["converged"] = run.clustering.converged;
    doc["repair_events"] = run.clustering.repair_events;
    nlohmann::json trace = nlohmann::json::array();
    for (const IterationRecord& rec : run.clustering.trace) {
        trace.push_back({{"after_assignment", rec.after_assignment},
                         {"after_update", rec.after_update}});
    }
    doc["trace"] = std::move(trace);
    return doc;
}

}  // namespace detail

/// Runs the full grid and writes run_l<i>_s<j>.json per run plus
/// aggregate.csv with per-lambda means and sample standard deviations.
/// Runs execute concurrently (each internally single-threaded), and the
/// aggregate is assembled in grid order, so outputs are byte-identical for
/// any worker budget.
inline ExperimentSummary run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();

    std::vector<WeightedNetwork> nets;
    std::vector<std::size_t> labels;
    if (!cfg.manifest_path.empty()) {
        Dataset dataset = load_dataset(cfg.manifest_path);
        labels = encode_labels(dataset.labels);
        nets = std::move(dataset.networks);
    } else {
        SimulatedGroups sim = simulate_groups(cfg.groups);
        std::vector<std::optional<std::string>> opt_labels(sim.labels.begin(),
                                                           sim.labels.end());
        labels = encode_labels(opt_labels);
        nets = std::move(sim.networks);
    }
    if (cfg.k > nets.size()) throw std::invalid_argument("k exceeds dataset size");

    std::filesystem::create_directories(cfg.output_dir);

    const std::size_t total = cfg.lambdas.size() * cfg.seeds.size();
    ExperimentSummary summary;
    summary.runs.resize(total);
    parallel_for(total, cfg.threads, [&](std::size_t run_index) {
        const std::size_t li = run_index / cfg.seeds.size();
        const std::size_t sj = run_index % cfg.seeds.size();
        RunResult& run = summary.runs[run_index];
        run.lambda = cfg.lambdas[li];
        run.seed = cfg.seeds[sj];

        ClusterConfig ccfg;
        ccfg.k = cfg.k;
        ccfg.lambda = Lambda(run.lambda);
        ccfg.seed = run.seed;
        ccfg.max_outer_iters = cfg.max_outer_iters;
        ccfg.interp = cfg.interp;
        ccfg.restarts = cfg.restarts;
        ccfg.threads = 1;
        run.clustering = cluster(nets, ccfg);

        run.accuracy = purity(run.clustering.assignments, labels);
        run.ari = adjusted_rand_index(run.clustering.assignments, labels);
        run.p_value = permutation_test(run.clustering.assignments, labels, cfg.perms,
                                       derive_seed(cfg.perm_seed, run_index), false, 1);

        const std::string run_path = (std::filesystem::path(cfg.output_dir) /
                                      ("run_l" + std::to_string(li) + "_s" +
                                       std::to_string(sj) + ".json"))
                                         .string();
        std::ofstream out(run_path);
        if (!out) throw std::runtime_error("cannot write " + run_path);
        out << detail::run_to_json(run, cfg.perms).dump(2) << '\n';
    });

    const std::string agg_path =
        (std::filesystem::path(cfg.output_dir) / "aggregate.csv").string();
    std::ofstream agg(agg_path);
    if (!agg) throw std::runtime_error("cannot write " + agg_path);
    agg << "lambda,runs,accuracy_mean,accuracy_std,ari_mean,ari_std,pvalue_mean,pvalue_std\n";
    for (std::size_t li = 0; li < cfg.lambdas.size(); ++li) {
        std::vector<double> acc, ari, pv;
        for (std::size_t sj = 0; sj < cfg.seeds.size(); ++sj) {
            const RunResult& run = summary.runs[li * cfg.seeds.size() + sj];
            acc.push_back(run.accuracy);
            ari.push_back(run.ari);
            pv.push_back(run.p_value);
        }
        agg << detail::format_double(cfg.lambdas[li]) << ',' << cfg.seeds.size() << ','
            << detail::format_double(detail::mean_of(acc)) << ','
            << detail::format_double(detail::sample_std(acc)) << ','
            << detail::format_double(detail::mean_of(ari)) << ','
            << detail::format_double(detail::sample_std(ari)) << ','
            << detail::format_double(detail::mean_of(pv)) << ','
            << detail::format_double(detail::sample_std(pv)) << '\n';
    }
    if (!agg) throw std::runtime_error("write failed: " + agg_path);
    summary.aggregate_path = agg_path;
    return summary;
}

enum class BettiGrid { edges, uniform };

/// Plot-data export: Betti curves for every network and for each label's
/// topological centroid, plus per-index spread of the sorted birth/death
/// values within each label. Unlabeled datasets fall back to a single
/// "all" group; mixing labeled and unlabeled entries is an error.
inline void export_betti(const std::string& manifest_path, const std::string& out_dir,
                         BettiGrid grid = BettiGrid::edges, std::size_t grid_points = 100) {
    Dataset dataset = load_dataset(manifest_path);
    const std::size_t n = dataset.networks.size();

    std::vector<std::string> labels(n);
    bool any_label = false, all_label = true;
    for (std::size_t i = 0; i < n; ++i) {
        if (dataset.labels[i]) {
            labels[i] = *dataset.labels[i];
            any_label = true;
        } else {
            all_label = false;
        }
    }
    if (any_label && !all_label) {
        throw std::runtime_error(manifest_path + ": mixed labeled and unlabeled entries");
    }
    if (!any_label) std::fill(labels.begin(), labels.end(), std::string("all"));

    std::vector<std::string> label_order;
    for (const std::string& l : labels) {
        if (std::find(label_order.begin(), label_order.end(), l) == label_order.end()) {
            label_order.push_back(l);
        }
    }

    std::vector<Barcode> barcodes(n);
    for (std::size_t i = 0; i < n; ++i) barcodes[i] = decompose(dataset.networks[i]);
    std::vector<Barcode> centroids;
    for (const std::string& l : label_order) {
        std::vector<Barcode> group;
        for (std::size_t i = 0; i < n; ++i) {
            if (labels[i] == l) group.push_back(barcodes[i]);
        }
        centroids.push_back(topological_centroid(group));
    }

    std::vector<double> values;
    for (const WeightedNetwork& net : dataset.networks) {
        values.insert(values.end(), net.weights().begin(), net.weights().end());
    }
    for (const Barcode& c : centroids) {
        values.insert(values.end(), c.births.begin(), c.births.end());
        values.insert(values.end(), c.deaths.begin(), c.deaths.end());
    }
    std::sort(values.begin(), values.end());
    std::vector<double> thresholds;
    if (grid == BettiGrid::edges) {
        thresholds = values;
        thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
    } else {
        if (grid_points < 2) throw std::invalid_argument("need at least 2 grid points");
        const double lo = values.front(), hi = values.back();
        for (std::size_t g = 0; g < grid_points; ++g) {
            thresholds.push_back(lo + (hi - lo) * static_cast<double>(g) /
                                          static_cast<double>(grid_points - 1));
        }
    }

    std::filesystem::create_directories(out_dir);
    const std::filesystem::path base(out_dir);

    std::ofstream nets_out(base / "betti_networks.csv");
    if (!nets_out) throw std::runtime_error("cannot write betti_networks.csv");
    nets_out << "network,label,epsilon,beta0,beta1\n";
    for (std::size_t i = 0; i < n; ++i) {
        const BettiCurve curve = betti_curve(barcodes[i], thresholds);
        for (std::size_t g = 0; g < thresholds.size(); ++g) {
            nets_out << i << ',' << labels[i] << ',' << detail::format_double(thresholds[g])
                     << ',' << curve.beta0[g] << ',' << curve.beta1[g] << '\n';
        }
    }

    std::ofstream cent_out(base / "betti_centroids.csv");
    if (!cent_out) throw std::runtime_error("cannot write betti_centroids.csv");
    cent_out << "label,epsilon,beta0,beta1\n";
    for (std::size_t c = 0; c < centroids.size(); ++c) {
        const BettiCurve curve = betti_curve(centroids[c], thresholds);
        for (std::size_t g = 0; g < thresholds.size(); ++g) {
            cent_out << label_order[c] << ',' << detail::format_double(thresholds[g]) << ','
                     << curve.beta0[g] << ',' << curve.beta1[g] << '\n';
        }
    }

    std::ofstream spread_out(base / "betti_spread.csv");
    if (!spread_out) throw std::runtime_error("cannot write betti_spread.csv");
    spread_out << "label,kind,index,mean,std\n";
    for (std::size_t c = 0; c < label_order.size(); ++c) {
        std::vector<const Barcode*> group;
        for (std::size_t i = 0; i < n; ++i) {
            if (labels[i] == label_order[c]) group.push_back(&barcodes[i]);
        }
        const auto emit = [&](const char* kind, std::size_t count,
                              auto&& value_at) {
            std::vector<double> column(group.size());
            for (std::size_t l = 0; l < count; ++l) {
                for (std::size_t g = 0; g < group.size(); ++g) column[g] = value_at(*group[g], l);
                spread_out << label_order[c] << ',' << kind << ',' << l << ','
                           << detail::format_double(detail::mean_of(column)) << ','
                           << detail::format_double(detail::sample_std(column)) << '\n';
            }
        };
        emit("birth", centroids[c].births.size(),
             [](const Barcode& bc, std::size_t l) { return bc.births[l]; });
        emit("death", centroids[c].deaths.size(),
             [](const Barcode& bc, std::size_t l) { return bc.deaths[l]; });
    }
}

}  // namespace topoclust

#endif
