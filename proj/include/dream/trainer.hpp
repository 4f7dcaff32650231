#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dream/anchors.hpp"
#include "dream/dataset.hpp"
#include "dream/errors.hpp"
#include "dream/graph.hpp"
#include "dream/nn.hpp"
#include "dream/noise.hpp"
#include "dream/rng.hpp"

namespace dream {

enum class Variant {
    full,
    v1_no_topo,        // proximity anchors only
    v2_no_prox,        // topology anchors only
    v3_no_temp,        // tau forced to 1
    v4_global_pool,    // one pool = all nodes, k_p + k_t selected
    v5_union_pool,     // one pool = C_P union C_T, k_p + k_t selected
    baseline_unweighted,
};

inline std::string to_string(Variant v) {
    switch (v) {
        case Variant::full: return "full";
        case Variant::v1_no_topo: return "v1_no_topo";
        case Variant::v2_no_prox: return "v2_no_prox";
        case Variant::v3_no_temp: return "v3_no_temp";
        case Variant::v4_global_pool: return "v4_global_pool";
        case Variant::v5_union_pool: return "v5_union_pool";
        case Variant::baseline_unweighted: return "baseline";
    }
    return "?";
}

inline Variant variant_from_string(const std::string& s) {
    for (Variant v : {Variant::full, Variant::v1_no_topo, Variant::v2_no_prox,
                      Variant::v3_no_temp, Variant::v4_global_pool, Variant::v5_union_pool})
        if (s == to_string(v)) return v;
    if (s == "baseline_unweighted" || s == "baseline") return Variant::baseline_unweighted;
    throw ConfigError("unknown variant: '" + s + "'");
}

struct TrainConfig {
    int k_p = 15;
    int k_t = 10;
    int d_max = 4;
    double tau = 0.04;
    int hidden = 64;
    double lr = 1e-2;
    int epochs = 500;
    std::uint64_t seed = 1;
    Variant variant = Variant::full;
    bool force_unit_scores = false;  // test hook: keep scoring, weight everything 1

    void validate() const {
        if (epochs < 1) throw ConfigError("train: epochs must be >= 1");
        if (tau <= 0.0) throw ConfigError("train: tau must be > 0");
        if (hidden < 1) throw ConfigError("train: hidden width must be >= 1");
        const bool uses_kp = variant != Variant::v2_no_prox && variant != Variant::baseline_unweighted;
        const bool uses_kt = variant != Variant::v1_no_topo && variant != Variant::baseline_unweighted;
        if (uses_kp && k_p < 1) throw ConfigError("train: k_p must be >= 1");
        if (uses_kt && k_t < 1) throw ConfigError("train: k_t must be >= 1");
    }
};

struct EpochMetrics {
    int epoch = 0;
    double loss = 0.0;
    double train_acc = 0.0, val_acc = 0.0, test_acc = 0.0;
    std::optional<double> mean_h_clean, mean_h_noisy;
    double wall_ms = 0.0;
};

struct RunResult {
    std::vector<EpochMetrics> trace;
    double final_test_acc = 0.0;
    double final_loss = 0.0;
    double bestval_test_acc = 0.0;
    double best_val_acc = 0.0;
    int best_epoch = 0;
    ModelParams best_params;   // snapshot at the best-val epoch
    ModelParams final_params;  // after the last update
    long clamp_count = 0;
    long empty_unions = 0;  // (epoch, node) pairs whose anchor union was empty
    TrainConfig config;
};

/// Fraction of masked nodes whose argmax class matches `labels`. Argmax ties
/// resolve to the lowest class index.
inline double accuracy_from_probs(const Mat& probs, std::span<const int> labels,
                                  std::span<const std::uint8_t> mask) {
    long correct = 0, total = 0;
    for (int i = 0; i < probs.rows; ++i) {
        if (!mask[i]) continue;
        const double* row = probs.row(i);
        int arg = 0;
        for (int c = 1; c < probs.cols; ++c)
            if (row[c] > row[arg]) arg = c;
        total++;
        if (arg == labels[i]) correct++;
    }
    if (total == 0) throw DataError("accuracy: mask selects no nodes");
    return static_cast<double>(correct) / static_cast<double>(total);
}

inline double evaluate(const ModelParams& params, const NormalizedAdjacency& adj,
                       const Mat& features, std::span<const int> labels,
                       std::span<const std::uint8_t> mask) {
    return accuracy_from_probs(forward(params, adj, features).probs, labels, mask);
}

/// Per-epoch loss weights for one variant. `scores` carries the raw
/// homogeneity values for diagnostics; for the unweighted baseline no scoring
/// happens and has_scores is false.
struct EpochWeights {
    std::vector<double> weights;
    std::vector<double> scores;
    std::vector<AnchorSet> anchor_sets;
    bool has_scores = false;
    int empty_unions = 0;
};

/// Resolves a variant into concrete weights from this epoch's
/// representations:
///   full:     dual-standard scores, temperature tau
///   v1:       proximity side only
///   v2:       topology side only
///   v3:       dual-standard with tau = 1
///   v4:       single pool = every node but the target, k_p + k_t anchors
///   v5:       single pool = C_P union C_T, k_p + k_t anchors
///   baseline: all weights 1
inline EpochWeights apply_variant(Variant variant, const CandidateSets& cands, const Mat& z,
                                  int num_nodes, int k_p, int k_t, double tau) {
    EpochWeights ew;
    const std::size_t n = cands.s_nodes.size();
    if (variant == Variant::baseline_unweighted) {
        ew.weights.assign(n, 1.0);
        return ew;
    }

    std::pair<HomogeneityScores, std::vector<AnchorSet>> scored;
    switch (variant) {
        case Variant::full:
            scored = score_all(cands, z, k_p, k_t, tau);
            break;
        case Variant::v1_no_topo:
            scored = score_all(cands, z, k_p, 0, tau);
            break;
        case Variant::v2_no_prox:
            scored = score_all(cands, z, 0, k_t, tau);
            break;
        case Variant::v3_no_temp:
            scored = score_all(cands, z, k_p, k_t, 1.0);
            break;
        case Variant::v4_global_pool: {
            std::vector<std::vector<int>> pools(n);
            for (std::size_t i = 0; i < n; ++i) {
                pools[i].reserve(num_nodes - 1);
                for (int v = 0; v < num_nodes; ++v)
                    if (v != cands.s_nodes[i]) pools[i].push_back(v);
            }
            scored = score_pooled(cands.s_nodes, pools, z, k_p + k_t, tau);
            break;
        }
        case Variant::v5_union_pool: {
            std::vector<std::vector<int>> pools(n);
            for (std::size_t i = 0; i < n; ++i) {
                pools[i].reserve(cands.cp[i].size() + cands.ct[i].size());
                std::set_union(cands.cp[i].begin(), cands.cp[i].end(), cands.ct[i].begin(),
                               cands.ct[i].end(), std::back_inserter(pools[i]));
            }
            scored = score_pooled(cands.s_nodes, pools, z, k_p + k_t, tau);
            break;
        }
        default:
            throw ConfigError("apply_variant: unknown variant");
    }
    ew.scores = scored.first.score;
    ew.weights = scored.first.score;
    ew.anchor_sets = std::move(scored.second);
    ew.has_scores = true;
    ew.empty_unions = scored.first.empty_unions;
    return ew;
}

/// Sink for the optional per-epoch anchor dump.
using AnchorDumpFn = std::function<void(int epoch, std::span<const int> s_nodes,
                                        std::span<const double> scores,
                                        std::span<const AnchorSet> anchor_sets)>;

/// Relation-informed dynamic optimization, one run:
///   initialize parameters; precompute candidate sets once; per epoch do a
///   forward pass, reselect anchors from the fresh representations, score,
///   reweight the cross-entropy, backprop, Adam step.
/// Metrics row e reflects the forward pass of epoch e (parameters after e-1
/// updates); final_* fields come from one extra forward after the last
/// update. Deterministic given (dataset, config).
inline RunResult train(const Dataset& ds, const TrainConfig& cfg,
                       const AnchorDumpFn& dump_anchors = nullptr) {
    cfg.validate();
    ds.check_consistent();
    if (!ds.has_masks()) throw DataError("train: dataset has train/val/test masks missing");

    const std::vector<int> s_nodes = ds.train_nodes();
    if (s_nodes.empty()) throw DataError("train: empty training set");
    const int num_classes = ds.num_classes();
    if (num_classes < 2) throw DataError("train: need at least 2 classes");

    const NormalizedAdjacency adj = normalize_adjacency(ds.graph);

    SplitMix64 rng(cfg.seed);
    ModelParams params = init_params(ds.graph.d_in, cfg.hidden, num_classes, rng);
    AdamState adam(params, cfg.lr);

    const bool needs_candidates =
        cfg.variant != Variant::baseline_unweighted && cfg.variant != Variant::v4_global_pool;
    CandidateSets cands;
    if (needs_candidates)
        cands = build_candidates(ds.graph, s_nodes, ds.labels, cfg.d_max);
    else
        cands.s_nodes = s_nodes;

    // Clean labels for test accuracy; observed labels for train/val.
    std::vector<int> clean(ds.graph.num_nodes);
    for (int i = 0; i < ds.graph.num_nodes; ++i) clean[i] = ds.clean_label(i);

    RunResult res;
    res.config = cfg;
    res.trace.reserve(cfg.epochs);
    res.best_val_acc = -1.0;

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();

        const ForwardCache cache = forward(params, adj, ds.graph.features);
        EpochWeights ew = apply_variant(cfg.variant, cands, cache.z, ds.graph.num_nodes,
                                        cfg.k_p, cfg.k_t, cfg.tau);
        if (cfg.force_unit_scores) ew.weights.assign(s_nodes.size(), 1.0);
        res.empty_unions += ew.empty_unions;

        EpochMetrics em;
        em.epoch = epoch;
        em.loss = weighted_ce_loss(cache, s_nodes, ds.labels, ew.weights, &res.clamp_count);
        if (!std::isfinite(em.loss)) {
            res.trace.push_back(em);
            throw NumericError("train: loss diverged at epoch " + std::to_string(epoch));
        }
        em.train_acc = accuracy_from_probs(cache.probs, ds.labels, ds.train_mask);
        em.val_acc = accuracy_from_probs(cache.probs, ds.labels, ds.val_mask);
        em.test_acc = accuracy_from_probs(cache.probs, clean, ds.test_mask);

        if (ew.has_scores && !ds.corrupted.empty()) {
            double sum_clean = 0.0, sum_noisy = 0.0;
            long n_clean = 0, n_noisy = 0;
            for (std::size_t k = 0; k < s_nodes.size(); ++k) {
                if (ds.corrupted[s_nodes[k]]) {
                    sum_noisy += ew.scores[k];
                    n_noisy++;
                } else {
                    sum_clean += ew.scores[k];
                    n_clean++;
                }
            }
            if (n_clean > 0) em.mean_h_clean = sum_clean / static_cast<double>(n_clean);
            if (n_noisy > 0) em.mean_h_noisy = sum_noisy / static_cast<double>(n_noisy);
        }

        if (dump_anchors && ew.has_scores)
            dump_anchors(epoch, s_nodes, ew.scores, ew.anchor_sets);

        if (em.val_acc > res.best_val_acc) {
            res.best_val_acc = em.val_acc;
            res.best_epoch = epoch;
            res.bestval_test_acc = em.test_acc;
            res.best_params = params;
        }

        const Gradients grads = backward(cache, params, adj, s_nodes, ds.labels, ew.weights);
        adam_step(params, grads, adam);

        em.wall_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
        res.trace.push_back(em);
    }

    const ForwardCache final_cache = forward(params, adj, ds.graph.features);
    res.final_test_acc = accuracy_from_probs(final_cache.probs, clean, ds.test_mask);
    {
        // Final objective value, for convergence checks.
        EpochWeights ew = apply_variant(cfg.variant, cands, final_cache.z, ds.graph.num_nodes,
                                        cfg.k_p, cfg.k_t, cfg.tau);
        if (cfg.force_unit_scores) ew.weights.assign(s_nodes.size(), 1.0);
        res.final_loss = weighted_ce_loss(final_cache, s_nodes, ds.labels, ew.weights);
    }
    res.final_params = std::move(params);
    return res;
}

}  // namespace dream
