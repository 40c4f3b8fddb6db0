// Command-line front end: simulate / decompose / dist / centroid / cluster /
// eval / experiment / betti. Every error path prints a single
// "topoclust: error <category>: <message>" line and exits nonzero.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "topoclust/topoclust.hpp"

namespace {

using namespace topoclust;

std::string single_line(std::string text) {
    std::replace(text.begin(), text.end(), '\n', ';');
    return text;
}

nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(path + ": parse error: " + e.what());
    }
    return doc;
}

void write_json(const nlohmann::json& doc, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open file for writing: " + path);
    out << doc.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<std::size_t> dataset_labels(const Dataset& dataset,
                                        std::vector<std::string>* names) {
    std::vector<std::size_t> ids =
        encode_labels(std::span<const std::optional<std::string>>(dataset.labels));
    if (names) {
        std::size_t seen = 0;
        for (std::size_t i = 0; i < ids.size(); ++i) {
            if (ids[i] == seen) {
                names->push_back(*dataset.labels[i]);
                ++seen;
            }
        }
    }
    return ids;
}

struct SimulateArgs {
    std::size_t nodes = 60;
    std::string groups = "2:20,3:20,5:20";
    double r = 0.9;
    double mu = 1.0;
    double sigma = 0.5;
    std::uint64_t seed = 0;
    std::string out_dir;
};

void cmd_simulate(const SimulateArgs& args) {
    std::vector<GroupSpec> groups;
    std::stringstream ss(args.groups);
    std::string part;
    std::size_t gi = 0;
    while (std::getline(ss, part, ',')) {
        const std::size_t colon = part.find(':');
        if (colon == std::string::npos) {
            throw std::invalid_argument("bad --groups entry '" + part +
                                        "', expected modules:count");
        }
        GroupSpec g;
        g.config.node_count = args.nodes;
        g.config.modules = static_cast<std::size_t>(std::stoul(part.substr(0, colon)));
        g.count = static_cast<std::size_t>(std::stoul(part.substr(colon + 1)));
        g.config.within_prob = args.r;
        g.config.mu = args.mu;
        g.config.sigma = args.sigma;
        g.config.seed = derive_seed(args.seed, gi);
        groups.push_back(g);
        ++gi;
    }
    if (groups.empty()) throw std::invalid_argument("--groups is empty");

    const SimulatedGroups sim = simulate_groups(groups);
    std::filesystem::create_directories(args.out_dir);
    nlohmann::json manifest;
    manifest["format"] = "dense-csv";
    manifest["entries"] = nlohmann::json::array();
    for (std::size_t i = 0; i < sim.networks.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "net_%04zu.csv", i);
        save_network(sim.networks[i],
                     (std::filesystem::path(args.out_dir) / name).string(),
                     NetworkFormat::dense_csv);
        manifest["entries"].push_back({{"path", name}, {"label", sim.labels[i]}});
    }
    write_json(manifest, (std::filesystem::path(args.out_dir) / "manifest.json").string());
    std::cout << "wrote " << sim.networks.size() << " networks to " << args.out_dir << '\n';
}

void cmd_decompose(const std::string& input, const std::string& format,
                   const std::string& out) {
    const WeightedNetwork net = load_network(input, parse_network_format(format));
    write_json(barcode_to_json(decompose(net)), out);
}

void cmd_dist(const std::string& manifest, double lambda, std::size_t threads,
              const std::string& out) {
    const Dataset dataset = load_dataset(manifest);
    const DistanceMatrix matrix =
        distance_matrix(dataset.networks, Lambda(lambda), threads);
    std::ofstream os(out);
    if (!os) throw std::runtime_error("cannot open file for writing: " + out);
    for (std::size_t i = 0; i < matrix.size(); ++i) {
        for (std::size_t j = 0; j < matrix.size(); ++j) {
            if (j) os << ',';
            os << detail::format_double(matrix.at(i, j));
        }
        os << '\n';
    }
    if (!os) throw std::runtime_error("write failed: " + out);
}

void cmd_centroid(const std::string& manifest, double lambda,
                  const InterpolationConfig& interp, const std::string& out) {
    const Dataset dataset = load_dataset(manifest);
    const Lambda lam(lambda);
    if (lam.value() == 1.0) {
        std::vector<Barcode> barcodes;
        for (const WeightedNetwork& net : dataset.networks) barcodes.push_back(decompose(net));
        write_json(barcode_to_json(topological_centroid(barcodes)), out);
        return;
    }
    const WeightedNetwork mean = sample_mean(dataset.networks);
    if (lam.value() == 0.0) {
        save_network(mean, out, NetworkFormat::dense_csv);
        return;
    }
    std::vector<Barcode> barcodes;
    for (const WeightedNetwork& net : dataset.networks) barcodes.push_back(decompose(net));
    const Barcode centroid = topological_centroid(barcodes);
    const InterpolationResult res = interpolate(mean, centroid, lam, interp, mean);
    save_network(res.network, out, NetworkFormat::dense_csv);
}

struct ClusterArgs {
    std::string manifest;
    std::size_t k = 1;
    double lambda = 1.0;
    std::uint64_t seed = 0;
    std::size_t restarts = 1;
    std::size_t max_iters = 100;
    std::size_t threads = 0;
    InterpolationConfig interp;
    std::string out;
};

void cmd_cluster(const ClusterArgs& args) {
    const Dataset dataset = load_dataset(args.manifest);
    ClusterConfig cfg;
    cfg.k = args.k;
    cfg.lambda = Lambda(args.lambda);
    cfg.seed = args.seed;
    cfg.max_outer_iters = args.max_iters;
    cfg.interp = args.interp;
    cfg.restarts = args.restarts;
    cfg.threads = args.threads;

    const auto start = std::chrono::steady_clock::now();
    const Clustering result = cluster(dataset.networks, cfg);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    nlohmann::json doc;
    doc["k"] = args.k;
    doc["lambda"] = args.lambda;
    doc["seed"] = args.seed;
    doc["restarts"] = args.restarts;
    doc["run_seed"] = result.run_seed;
    doc["assignments"] = result.assignments;
    doc["objective"] = result.objective;
    doc["initial_objective"] = result.initial_objective;
    doc["iterations"] = result.iterations;
    doc["converged"] = result.converged;
    doc["repair_events"] = result.repair_events;
    doc["elapsed_seconds"] = elapsed;
    nlohmann::json trace = nlohmann::json::array();
    for (const IterationRecord& rec : result.trace) {
        trace.push_back({{"after_assignment", rec.after_assignment},
                         {"after_update", rec.after_update}});
    }
    doc["trace"] = std::move(trace);

    nlohmann::json reps = nlohmann::json::array();
    const std::filesystem::path out_path(args.out);
    for (std::size_t h = 0; h < result.representatives.size(); ++h) {
        if (const Barcode* bc = std::get_if<Barcode>(&result.representatives[h])) {
            reps.push_back({{"barcode", barcode_to_json(*bc)}});
        } else {
            const WeightedNetwork& net = std::get<WeightedNetwork>(result.representatives[h]);
            std::filesystem::path rep = out_path;
            rep.replace_extension();
            rep += "_rep" + std::to_string(h) + ".csv";
            save_network(net, rep.string(), NetworkFormat::dense_csv);
            reps.push_back({{"network_csv", rep.filename().string()}});
        }
    }
    doc["representatives"] = std::move(reps);
    write_json(doc, args.out);
}

void cmd_eval(const std::string& run_path, const std::string& manifest, std::size_t perms,
              std::uint64_t seed, bool smoothed, std::size_t threads,
              const std::string& out) {
    const nlohmann::json run = read_json(run_path);
    if (!run.contains("assignments")) {
        throw std::runtime_error(run_path + ": missing 'assignments'");
    }
    const auto assignments = run.at("assignments").get<std::vector<std::size_t>>();
    const Dataset dataset = load_dataset(manifest);
    if (assignments.size() != dataset.networks.size()) {
        throw std::runtime_error("run and manifest disagree on dataset size");
    }
    std::vector<std::string> names;
    const std::vector<std::size_t> labels = dataset_labels(dataset, &names);

    nlohmann::json report;
    report["accuracy"] = purity(assignments, labels);
    report["ari"] = adjusted_rand_index(assignments, labels);
    report["p_value"] = permutation_test(assignments, labels, perms, seed, smoothed, threads);
    report["n_permutations"] = perms;
    const ConfusionMatrix cm = confusion_matrix(assignments, labels);
    report["labels"] = names;
    report["confusion"] = cm.counts;
    report["row_majority"] = cm.row_majority;
    write_json(report, out);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Topology-aware clustering of same-size weighted networks"};
    app.require_subcommand(1);

    SimulateArgs sim;
    CLI::App* simulate = app.add_subcommand("simulate", "Generate random modular networks");
    simulate->add_option("--nodes", sim.nodes, "Nodes per network")->capture_default_str();
    simulate->add_option("--groups", sim.groups, "Comma list of modules:count")
        ->capture_default_str();
    simulate->add_option("--r", sim.r, "Within-module connection probability")
        ->capture_default_str();
    simulate->add_option("--mu", sim.mu, "Signal mean")->capture_default_str();
    simulate->add_option("--sigma", sim.sigma, "Noise level")->capture_default_str();
    simulate->add_option("--seed", sim.seed, "Base seed")->capture_default_str();
    simulate->add_option("--out-dir", sim.out_dir, "Output directory")->required();
    simulate->callback([&] { cmd_simulate(sim); });

    std::string dec_input, dec_format = "dense-csv", dec_out;
    CLI::App* decompose_cmd =
        app.add_subcommand("decompose", "Write a network's barcode as JSON");
    decompose_cmd->add_option("--input", dec_input, "Network file")->required();
    decompose_cmd->add_option("--format", dec_format, "dense-csv or edge-list-tsv")
        ->capture_default_str();
    decompose_cmd->add_option("--out", dec_out, "Output JSON path")->required();
    decompose_cmd->callback([&] { cmd_decompose(dec_input, dec_format, dec_out); });

    std::string dist_manifest, dist_out;
    double dist_lambda = 1.0;
    std::size_t dist_threads = 0;
    CLI::App* dist_cmd = app.add_subcommand("dist", "Pairwise dissimilarity matrix");
    dist_cmd->add_option("--manifest", dist_manifest, "Dataset manifest")->required();
    dist_cmd->add_option("--lambda", dist_lambda, "Topology weight in [0,1]")
        ->capture_default_str();
    dist_cmd->add_option("--threads", dist_threads, "Worker count (0 = auto)")
        ->capture_default_str();
    dist_cmd->add_option("--out", dist_out, "Output CSV path")->required();
    dist_cmd->callback([&] { cmd_dist(dist_manifest, dist_lambda, dist_threads, dist_out); });

    std::string cent_manifest, cent_out;
    double cent_lambda = 1.0;
    InterpolationConfig cent_interp;
    CLI::App* cent_cmd = app.add_subcommand("centroid", "Dataset centroid");
    cent_cmd->add_option("--manifest", cent_manifest, "Dataset manifest")->required();
    cent_cmd->add_option("--lambda", cent_lambda, "Topology weight in [0,1]")
        ->capture_default_str();
    cent_cmd->add_option("--step-size", cent_interp.step_size, "Descent step")
        ->capture_default_str();
    cent_cmd->add_option("--max-iters", cent_interp.max_iters, "Descent iteration cap")
        ->capture_default_str();
    cent_cmd->add_option("--rel-tol", cent_interp.rel_tol, "Relative stopping tolerance")
        ->capture_default_str();
    cent_cmd->add_option("--out", cent_out, "Output path (JSON barcode or CSV network)")
        ->required();
    cent_cmd->callback([&] { cmd_centroid(cent_manifest, cent_lambda, cent_interp, cent_out); });

    ClusterArgs cl;
    CLI::App* cluster_cmd = app.add_subcommand("cluster", "Cluster a dataset");
    cluster_cmd->add_option("--manifest", cl.manifest, "Dataset manifest")->required();
    cluster_cmd->add_option("--k", cl.k, "Number of clusters")->required();
    cluster_cmd->add_option("--lambda", cl.lambda, "Topology weight in [0,1]")
        ->capture_default_str();
    cluster_cmd->add_option("--seed", cl.seed, "RNG seed")->capture_default_str();
    cluster_cmd->add_option("--restarts", cl.restarts, "Independent restarts, best kept")
        ->capture_default_str();
    cluster_cmd->add_option("--max-iters", cl.max_iters, "Outer iteration cap")
        ->capture_default_str();
    cluster_cmd->add_option("--threads", cl.threads, "Worker count (0 = auto)")
        ->capture_default_str();
    cluster_cmd->add_option("--step-size", cl.interp.step_size, "Interpolation step")
        ->capture_default_str();
    cluster_cmd->add_option("--interp-max-iters", cl.interp.max_iters,
                            "Interpolation iteration cap")
        ->capture_default_str();
    cluster_cmd->add_option("--rel-tol", cl.interp.rel_tol, "Interpolation tolerance")
        ->capture_default_str();
    cluster_cmd->add_option("--out", cl.out, "Output run JSON")->required();
    cluster_cmd->callback([&] { cmd_cluster(cl); });

    std::string eval_run, eval_manifest, eval_out;
    std::size_t eval_perms = 100000, eval_threads = 0;
    std::uint64_t eval_seed = 0;
    bool eval_smoothed = false;
    CLI::App* eval_cmd = app.add_subcommand("eval", "Score a run against ground truth");
    eval_cmd->add_option("--run", eval_run, "Run JSON from `cluster`")->required();
    eval_cmd->add_option("--manifest", eval_manifest, "Dataset manifest with labels")
        ->required();
    eval_cmd->add_option("--perms", eval_perms, "Permutation count")->capture_default_str();
    eval_cmd->add_option("--seed", eval_seed, "Permutation seed")->capture_default_str();
    eval_cmd->add_flag("--smoothed", eval_smoothed, "Use the (b+1)/(n+1) p-value estimator");
    eval_cmd->add_option("--threads", eval_threads, "Worker count (0 = auto)")
        ->capture_default_str();
    eval_cmd->add_option("--out", eval_out, "Output report JSON")->required();
    eval_cmd->callback([&] {
        cmd_eval(eval_run, eval_manifest, eval_perms, eval_seed, eval_smoothed, eval_threads,
                 eval_out);
    });

    std::string exp_config;
    CLI::App* exp_cmd = app.add_subcommand("experiment", "Run a (lambda, seed) grid");
    exp_cmd->add_option("--config", exp_config, "Experiment config JSON")->required();
    exp_cmd->callback([&] {
        const ExperimentSummary summary = run_experiment(load_experiment_config(exp_config));
        std::cout << "wrote " << summary.aggregate_path << '\n';
    });

    std::string betti_manifest, betti_out_dir, betti_grid = "edges";
    std::size_t betti_points = 100;
    CLI::App* betti_cmd = app.add_subcommand("betti", "Export Betti-curve plot data");
    betti_cmd->add_option("--manifest", betti_manifest, "Dataset manifest")->required();
    betti_cmd->add_option("--out-dir", betti_out_dir, "Output directory")->required();
    betti_cmd->add_option("--grid", betti_grid, "Threshold grid: edges or uniform")
        ->check(CLI::IsMember({"edges", "uniform"}))
        ->capture_default_str();
    betti_cmd->add_option("--points", betti_points, "Grid size for --grid uniform")
        ->capture_default_str();
    betti_cmd->callback([&] {
        export_betti(betti_manifest, betti_out_dir,
                     betti_grid == "edges" ? BettiGrid::edges : BettiGrid::uniform,
                     betti_points);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "topoclust: error usage: " << single_line(e.what()) << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "topoclust: error invalid-argument: " << single_line(e.what()) << '\n';
        return 1;
    } catch (const std::runtime_error& e) {
        std::cerr << "topoclust: error io: " << single_line(e.what()) << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "topoclust: error internal: " << single_line(e.what()) << '\n';
        return 1;
    }
    return 0;
}
