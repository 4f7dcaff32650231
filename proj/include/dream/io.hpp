#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dream/dataset.hpp"
#include "dream/errors.hpp"
#include "dream/graph.hpp"
#include "dream/matrix.hpp"
#include "dream/nn.hpp"
#include "dream/sweep.hpp"
#include "dream/trainer.hpp"

namespace dream::io {

// Insertion-ordered JSON keeps output bytes stable across runs.
using json = nlohmann::ordered_json;

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open for writing: " + path);
    out << content;
    if (!out) throw DataError("write failed: " + path);
}

/// %.17g — enough digits for exact double round-trip.
inline std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Graph/dataset JSON
// ---------------------------------------------------------------------------

/// A dataset plus whatever `config` object the producing command embedded.
struct GraphFile {
    Dataset ds;
    json config;  // may be null
};

inline json dataset_to_json(const Dataset& ds, const json& config = nullptr) {
    ds.check_consistent();
    const Graph& g = ds.graph;
    json j;
    j["num_nodes"] = g.num_nodes;
    json edges = json::array();
    for (int u = 0; u < g.num_nodes; ++u)
        for (int v : g.neighbors(u))
            if (u < v) edges.push_back(json::array({u, v}));
    j["edges"] = std::move(edges);
    json feats = json::array();
    for (int i = 0; i < g.num_nodes; ++i) {
        json row = json::array();
        for (int f = 0; f < g.d_in; ++f) row.push_back(g.features(i, f));
        feats.push_back(std::move(row));
    }
    j["features"] = std::move(feats);
    if (!ds.labels.empty()) j["labels"] = ds.labels;
    auto mask_to_json = [](const std::vector<std::uint8_t>& m) {
        json a = json::array();
        for (std::uint8_t b : m) a.push_back(b != 0);
        return a;
    };
    if (!ds.train_mask.empty()) j["train_mask"] = mask_to_json(ds.train_mask);
    if (!ds.val_mask.empty()) j["val_mask"] = mask_to_json(ds.val_mask);
    if (!ds.test_mask.empty()) j["test_mask"] = mask_to_json(ds.test_mask);
    if (ds.has_noise) {
        j["labels_clean"] = ds.labels_clean;
        json cm = json::array();
        for (std::uint8_t b : ds.corrupted) cm.push_back(b != 0);
        j["corrupted_mask"] = std::move(cm);
        j["noise"] = {{"kind", to_string(ds.noise.kind)},
                      {"rate", ds.noise.rate},
                      {"seed", ds.noise.seed}};
    }
    if (!config.is_null()) j["config"] = config;
    return j;
}

inline GraphFile dataset_from_json(const json& j) {
    if (!j.is_object()) throw DataError("graph json: top level must be an object");
    for (const char* key : {"num_nodes", "edges", "features"})
        if (!j.contains(key)) throw DataError(std::string("graph json: missing '") + key + "'");

    GraphFile gf;
    const int n = j.at("num_nodes").get<int>();
    if (n <= 0) throw DataError("graph json: num_nodes must be positive");

    std::vector<std::pair<int, int>> edges;
    for (const auto& e : j.at("edges")) {
        if (!e.is_array() || e.size() != 2)
            throw DataError("graph json: each edge must be a [u,v] pair");
        edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    }

    const auto& feats = j.at("features");
    if (static_cast<int>(feats.size()) != n)
        throw DataError("graph json: features row count != num_nodes");
    const int d_in = feats.empty() ? 0 : static_cast<int>(feats.at(0).size());
    if (d_in <= 0) throw DataError("graph json: features must have at least one column");
    Mat x(n, d_in);
    for (int i = 0; i < n; ++i) {
        const auto& row = feats.at(i);
        if (static_cast<int>(row.size()) != d_in)
            throw DataError("graph json: ragged feature rows");
        for (int f = 0; f < d_in; ++f) x(i, f) = row.at(f).get<double>();
    }
    gf.ds.graph = build_graph(edges, std::move(x));

    auto read_ints = [&](const char* key) {
        std::vector<int> v = j.at(key).get<std::vector<int>>();
        if (static_cast<int>(v.size()) != n)
            throw DataError(std::string("graph json: '") + key + "' length != num_nodes");
        return v;
    };
    auto read_mask = [&](const char* key) {
        std::vector<std::uint8_t> m;
        const auto& a = j.at(key);
        if (static_cast<int>(a.size()) != n)
            throw DataError(std::string("graph json: '") + key + "' length != num_nodes");
        m.reserve(a.size());
        for (const auto& b : a) m.push_back(b.get<bool>() ? 1 : 0);
        return m;
    };
    if (j.contains("labels")) gf.ds.labels = read_ints("labels");
    if (j.contains("train_mask")) gf.ds.train_mask = read_mask("train_mask");
    if (j.contains("val_mask")) gf.ds.val_mask = read_mask("val_mask");
    if (j.contains("test_mask")) gf.ds.test_mask = read_mask("test_mask");
    if (j.contains("labels_clean")) {
        gf.ds.labels_clean = read_ints("labels_clean");
        gf.ds.corrupted = read_mask("corrupted_mask");
        gf.ds.has_noise = true;
        if (j.contains("noise")) {
            const auto& nj = j.at("noise");
            gf.ds.noise.kind = noise_kind_from_string(nj.at("kind").get<std::string>());
            gf.ds.noise.rate = nj.at("rate").get<double>();
            gf.ds.noise.seed = nj.at("seed").get<std::uint64_t>();
        }
    }
    if (j.contains("config")) gf.config = j.at("config");
    gf.ds.check_consistent();
    return gf;
}

inline void save_dataset(const std::string& path, const Dataset& ds,
                         const json& config = nullptr) {
    write_file(path, dataset_to_json(ds, config).dump(2) + "\n");
}

inline GraphFile load_dataset(const std::string& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw DataError("graph json parse error in " + path + ": " + e.what());
    }
    try {
        return dataset_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw DataError("graph json schema error in " + path + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Checkpoints
// ---------------------------------------------------------------------------

/// Weights with 17 significant digits (exact double round-trip). Built by
/// hand so number formatting is pinned regardless of JSON library behavior.
inline std::string checkpoint_to_json(const ModelParams& p, const json& config = nullptr) {
    if (!p.w1.all_finite() || !p.w2.all_finite())
        throw NumericError("checkpoint: non-finite parameter");
    std::string s = "{\n";
    auto mat = [&](const Mat& m) {
        std::string out = "[";
        for (int r = 0; r < m.rows; ++r) {
            if (r) out += ",";
            out += "[";
            for (int c = 0; c < m.cols; ++c) {
                if (c) out += ",";
                out += fmt_g17(m(r, c));
            }
            out += "]";
        }
        out += "]";
        return out;
    };
    s += "  \"w1\": " + mat(p.w1) + ",\n";
    s += "  \"w2\": " + mat(p.w2) + ",\n";
    s += "  \"d\": " + std::to_string(p.w1.cols) + ",\n";
    s += "  \"c\": " + std::to_string(p.w2.cols);
    if (!config.is_null()) s += ",\n  \"config\": " + config.dump();
    s += "\n}\n";
    return s;
}

inline ModelParams checkpoint_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("checkpoint parse error: ") + e.what());
    }
    for (const char* key : {"w1", "w2", "d", "c"})
        if (!j.contains(key)) throw DataError(std::string("checkpoint: missing '") + key + "'");
    auto mat = [&](const json& a) {
        const int rows = static_cast<int>(a.size());
        if (rows == 0) throw DataError("checkpoint: empty weight matrix");
        const int cols = static_cast<int>(a.at(0).size());
        Mat m(rows, cols);
        for (int r = 0; r < rows; ++r) {
            if (static_cast<int>(a.at(r).size()) != cols)
                throw DataError("checkpoint: ragged weight matrix");
            for (int c = 0; c < cols; ++c) m(r, c) = a.at(r).at(c).get<double>();
        }
        return m;
    };
    ModelParams p;
    p.w1 = mat(j.at("w1"));
    p.w2 = mat(j.at("w2"));
    if (p.w1.cols != j.at("d").get<int>() || p.w2.cols != j.at("c").get<int>() ||
        p.w1.cols != p.w2.rows)
        throw DataError("checkpoint: dimension fields disagree with matrices");
    return p;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

inline constexpr const char* kMetricsHeader =
    "epoch,loss,train_acc,val_acc,test_acc,mean_h_clean,mean_h_noisy,wall_ms";
inline constexpr const char* kSweepHeader =
    "noise_kind,rate,seed,method,test_acc_final,test_acc_bestval";

inline std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

/// One row per epoch. Pinned formats: loss and homogeneity means %.10g,
/// accuracies %.6f, wall time %.3f ms. Absent homogeneity means stay empty.
inline std::string metrics_csv(std::span<const EpochMetrics> trace) {
    std::string out = kMetricsHeader;
    out += "\n";
    for (const EpochMetrics& e : trace) {
        out += std::to_string(e.epoch);
        out += "," + fmt("%.10g", e.loss);
        out += "," + fmt("%.6f", e.train_acc);
        out += "," + fmt("%.6f", e.val_acc);
        out += "," + fmt("%.6f", e.test_acc);
        out += ",";
        if (e.mean_h_clean) out += fmt("%.10g", *e.mean_h_clean);
        out += ",";
        if (e.mean_h_noisy) out += fmt("%.10g", *e.mean_h_noisy);
        out += "," + fmt("%.3f", e.wall_ms);
        out += "\n";
    }
    return out;
}

/// Failed cells keep their coordinates and leave both accuracy fields empty.
inline std::string sweep_csv(std::span<const SweepCell> cells) {
    std::string out = kSweepHeader;
    out += "\n";
    for (const SweepCell& c : cells) {
        out += to_string(c.kind);
        out += "," + fmt("%g", c.rate);
        out += "," + std::to_string(c.seed);
        out += "," + c.method;
        if (c.failed) {
            out += ",,";
        } else {
            out += "," + fmt("%.6f", c.test_acc_final);
            out += "," + fmt("%.6f", c.test_acc_bestval);
        }
        out += "\n";
    }
    return out;
}

/// Ablation results share the sweep schema; kind/rate echo the fixed
/// corruption every variant was measured under.
inline std::string ablation_csv(std::span<const AblationCell> cells, const NoiseSpec& noise) {
    std::string out = kSweepHeader;
    out += "\n";
    for (const AblationCell& c : cells) {
        out += to_string(noise.kind);
        out += "," + fmt("%g", noise.rate);
        out += "," + std::to_string(c.seed);
        out += "," + c.variant;
        out += "," + fmt("%.6f", c.test_acc_final);
        out += "," + fmt("%.6f", c.test_acc_bestval);
        out += "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// key=value config files
// ---------------------------------------------------------------------------

/// Flat key=value pairs; blank lines and #-comments skipped; keys are long
/// CLI flag names. Duplicate keys are rejected rather than silently merged.
inline std::vector<std::pair<std::string, std::string>> parse_kv_config(
    const std::string& text, const std::string& origin) {
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::vector<std::pair<std::string, std::string>> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        lineno++;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) +
                              ": expected key=value, got '" + t + "'");
        std::string key = trim(t.substr(0, eq));
        std::string val = trim(t.substr(eq + 1));
        if (key.empty())
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
        for (const auto& [k, v] : kv)
            if (k == key)
                throw ConfigError(origin + ":" + std::to_string(lineno) +
                                  ": duplicate key '" + key + "'");
        kv.emplace_back(std::move(key), std::move(val));
    }
    return kv;
}

}  // namespace dream::io
