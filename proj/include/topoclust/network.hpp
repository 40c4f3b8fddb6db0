#ifndef TOPOCLUST_NETWORK_HPP
#define TOPOCLUST_NETWORK_HPP

#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include <json.hpp>

namespace topoclust {

/// Position of unordered pair (i, j), i < j, in row-major upper-triangular
/// storage over n nodes.
inline std::size_t pair_index(std::size_t i, std::size_t j, std::size_t n) {
    return i * n - i * (i + 1) / 2 + (j - i - 1);
}

inline std::size_t pair_count(std::size_t n) { return n * (n - 1) / 2; }

/// Undirected weighted graph on a fixed node set.
///
/// Only the upper triangle is stored, so symmetry is unrepresentable rather
/// than checked, and the diagonal is implicitly zero. Instances are immutable
/// after construction and safe to share between threads.
class WeightedNetwork {
public:
    WeightedNetwork(std::size_t node_count, std::vector<double> weights,
                    std::vector<std::string> node_labels = {})
        : node_count_(node_count),
          weights_(std::move(weights)),
          node_labels_(std::move(node_labels)) {
        if (node_count_ == 0) {
            throw std::invalid_argument("network must have at least one node");
        }
        if (weights_.size() != pair_count(node_count_)) {
            throw std::invalid_argument("weight count does not match node count");
        }
        for (double w : weights_) {
            if (!std::isfinite(w)) {
                throw std::invalid_argument("network weights must be finite");
            }
        }
        if (!node_labels_.empty() && node_labels_.size() != node_count_) {
            throw std::invalid_argument("node label count does not match node count");
        }
    }

    std::size_t node_count() const { return node_count_; }
    std::size_t edge_count() const { return weights_.size(); }
    const std::vector<double>& weights() const { return weights_; }
    const std::vector<std::string>& node_labels() const { return node_labels_; }

    double weight(std::size_t i, std::size_t j) const {
        if (i >= node_count_ || j >= node_count_) {
            throw std::invalid_argument("node index out of range");
        }
        if (i == j) return 0.0;
        if (i > j) std::swap(i, j);
        return weights_[pair_index(i, j, node_count_)];
    }

private:
    std::size_t node_count_;
    std::vector<double> weights_;
    std::vector<std::string> node_labels_;
};

enum class NetworkFormat { dense_csv, edge_list_tsv };

inline NetworkFormat parse_network_format(const std::string& name) {
    if (name == "dense-csv") return NetworkFormat::dense_csv;
    if (name == "edge-list-tsv") return NetworkFormat::edge_list_tsv;
    throw std::runtime_error("unknown network format: " + name);
}

inline std::string format_name(NetworkFormat format) {
    return format == NetworkFormat::dense_csv ? "dense-csv" : "edge-list-tsv";
}

struct ManifestEntry {
    std::string path;
    std::optional<std::string> label;
};

struct DatasetManifest {
    NetworkFormat format = NetworkFormat::dense_csv;
    std::vector<ManifestEntry> entries;
};

struct Dataset {
    std::vector<WeightedNetwork> networks;
    std::vector<std::optional<std::string>> labels;
};

namespace detail {

// Shortest decimal form that round-trips the exact double.
inline std::string format_double(double value) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view text, const std::string& context) {
    // Tolerate surrounding spaces, which hand-edited CSVs tend to have.
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
        text.remove_suffix(1);
    }
    double value = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw std::runtime_error(context + ": cannot parse number '" + std::string(text) + "'");
    }
    if (!std::isfinite(value)) {
        throw std::runtime_error(context + ": non-finite weight");
    }
    return value;
}

inline std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

inline WeightedNetwork load_dense_csv(const std::string& path) {
    std::vector<std::vector<double>> rows;
    std::size_t lineno = 0;
    for (const std::string& line : read_lines(path)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<double> row;
        std::size_t start = 0;
        while (start <= line.size()) {
            const std::size_t comma = line.find(',', start);
            const std::size_t end = comma == std::string::npos ? line.size() : comma;
            row.push_back(parse_double(std::string_view(line).substr(start, end - start),
                                       path + ":" + std::to_string(lineno)));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        rows.push_back(std::move(row));
    }
    const std::size_t n = rows.size();
    if (n == 0) throw std::runtime_error(path + ": empty matrix");
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != n) {
            throw std::runtime_error(path + ": matrix is not square (row " +
                                     std::to_string(i + 1) + " has " +
                                     std::to_string(rows[i].size()) + " of " +
                                     std::to_string(n) + " columns)");
        }
    }
    constexpr double tol = 1e-9;
    std::vector<double> weights;
    weights.reserve(pair_count(n));
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(rows[i][i]) > tol) {
            throw std::runtime_error(path + ": nonzero diagonal at node " + std::to_string(i + 1));
        }
        for (std::size_t j = i + 1; j < n; ++j) {
            if (std::abs(rows[i][j] - rows[j][i]) > tol) {
                throw std::runtime_error(path + ": asymmetric at (" + std::to_string(i + 1) +
                                         "," + std::to_string(j + 1) + ")");
            }
            weights.push_back(rows[i][j]);
        }
    }
    return WeightedNetwork(n, std::move(weights));
}

inline WeightedNetwork load_edge_list_tsv(const std::string& path) {
    const std::vector<std::string> lines = read_lines(path);
    std::size_t n = 0;
    bool have_header = false;
    std::vector<double> weights;
    std::vector<bool> seen;
    std::size_t lineno = 0;
    for (const std::string& line : lines) {
        ++lineno;
        const std::string where = path + ":" + std::to_string(lineno);
        if (line.empty()) continue;
        if (line.rfind("#nodes", 0) == 0) {
            if (have_header) throw std::runtime_error(where + ": repeated #nodes header");
            std::istringstream hs(line.substr(6));
            long declared = 0;
            if (!(hs >> declared) || declared <= 0) {
                throw std::runtime_error(where + ": bad #nodes header");
            }
            n = static_cast<std::size_t>(declared);
            weights.assign(pair_count(n), 0.0);
            seen.assign(pair_count(n), false);
            have_header = true;
            continue;
        }
        if (line[0] == '#') continue;
        if (!have_header) {
            throw std::runtime_error(where + ": edge before #nodes header");
        }
        std::istringstream es(line);
        long a = 0, b = 0;
        std::string wtext;
        if (!(es >> a >> b >> wtext)) {
            throw std::runtime_error(where + ": expected 'i j weight'");
        }
        if (a < 1 || b < 1 || static_cast<std::size_t>(a) > n || static_cast<std::size_t>(b) > n) {
            throw std::runtime_error(where + ": node index out of range");
        }
        if (a == b) throw std::runtime_error(where + ": self-loop not allowed");
        const double w = parse_double(wtext, where);
        std::size_t i = static_cast<std::size_t>(a) - 1;
        std::size_t j = static_cast<std::size_t>(b) - 1;
        if (i > j) std::swap(i, j);
        const std::size_t idx = pair_index(i, j, n);
        if (seen[idx] && weights[idx] != w) {
            throw std::runtime_error(where + ": conflicting duplicate edge (" +
                                     std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
        }
        seen[idx] = true;
        weights[idx] = w;
    }
    if (!have_header) throw std::runtime_error(path + ": missing #nodes header");
    return WeightedNetwork(n, std::move(weights));
}

}  // namespace detail

inline WeightedNetwork load_network(const std::string& path, NetworkFormat format) {
    return format == NetworkFormat::dense_csv ? detail::load_dense_csv(path)
                                              : detail::load_edge_list_tsv(path);
}

inline void save_network(const WeightedNetwork& net, const std::string& path,
                         NetworkFormat format) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open file for writing: " + path);
    const std::size_t n = net.node_count();
    if (format == NetworkFormat::dense_csv) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (j) out << ',';
                out << detail::format_double(net.weight(i, j));
            }
            out << '\n';
        }
    } else {
        out << "#nodes " << n << '\n';
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double w = net.weight(i, j);
                if (w == 0.0) continue;
                out << (i + 1) << '\t' << (j + 1) << '\t' << detail::format_double(w) << '\n';
            }
        }
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline DatasetManifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open manifest: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(path + ": manifest parse error: " + e.what());
    }
    DatasetManifest manifest;
    if (!doc.contains("format") || !doc["format"].is_string()) {
        throw std::runtime_error(path + ": manifest missing 'format'");
    }
    manifest.format = parse_network_format(doc["format"].get<std::string>());
    if (!doc.contains("entries") || !doc["entries"].is_array()) {
        throw std::runtime_error(path + ": manifest missing 'entries'");
    }
    for (const auto& item : doc["entries"]) {
        ManifestEntry entry;
        if (!item.contains("path") || !item["path"].is_string()) {
            throw std::runtime_error(path + ": manifest entry missing 'path'");
        }
        entry.path = item["path"].get<std::string>();
        if (item.contains("label") && !item["label"].is_null()) {
            entry.label = item["label"].get<std::string>();
        }
        manifest.entries.push_back(std::move(entry));
    }
    return manifest;
}

/// Loads every network listed in a manifest. Relative entry paths resolve
/// against the manifest's own directory so a dataset folder can be moved as
/// a unit.
inline Dataset load_dataset(const std::string& manifest_path) {
    const DatasetManifest manifest = load_manifest(manifest_path);
    if (manifest.entries.empty()) {
        throw std::runtime_error(manifest_path + ": empty dataset");
    }
    const std::filesystem::path base = std::filesystem::path(manifest_path).parent_path();
    Dataset dataset;
    for (const ManifestEntry& entry : manifest.entries) {
        std::filesystem::path p(entry.path);
        if (p.is_relative()) p = base / p;
        dataset.networks.push_back(load_network(p.string(), manifest.format));
        dataset.labels.push_back(entry.label);
        if (dataset.networks.back().node_count() != dataset.networks.front().node_count()) {
            throw std::runtime_error(manifest_path + ": networks differ in node count (" +
                                     entry.path + ")");
        }
    }
    return dataset;
}

}  // namespace topoclust

#endif
