#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "dream/errors.hpp"
#include "dream/graph.hpp"
#include "dream/matrix.hpp"

namespace dream {

/// Per-target candidate sets, precomputed once per run and immutable across
/// epochs. For target t (position k in s_nodes):
///   cp[k]: labeled nodes sharing t's observed label, t excluded, sorted.
///   ct[k]: nodes with 1 <= d_G(., t) <= d_max (any node, labeled or not),
///          sorted.
struct CandidateSets {
    std::vector<int> s_nodes;
    std::vector<std::vector<int>> cp;
    std::vector<std::vector<int>> ct;
    int d_max = 0;
};

/// Anchors chosen for one target: proximity side, topology side, and their
/// set union (duplicates count once).
struct AnchorSet {
    std::vector<int> ap;       // ordered by descending similarity, then index
    std::vector<int> at;       // same ordering
    std::vector<int> members;  // union, ascending node index
};

struct HomogeneityScores {
    std::vector<double> score;       // aligned with s_nodes, each in [0,1]
    std::vector<int> anchor_count;   // |union| per target
    double tau = 1.0;
    int empty_unions = 0;            // targets that fell back to score 0
};

inline CandidateSets build_candidates(const Graph& g, std::span<const int> s_nodes,
                                      std::span<const int> y_obs, int d_max) {
    CandidateSets cs;
    cs.d_max = d_max;
    cs.s_nodes.assign(s_nodes.begin(), s_nodes.end());
    cs.cp.resize(s_nodes.size());
    cs.ct.resize(s_nodes.size());
    for (std::size_t k = 0; k < s_nodes.size(); ++k) {
        const int t = s_nodes[k];
        for (int other : s_nodes)
            if (other != t && y_obs[other] == y_obs[t]) cs.cp[k].push_back(other);
        std::sort(cs.cp[k].begin(), cs.cp[k].end());
        for (const auto& [node, d] : bounded_geodesics(g, t, d_max)) cs.ct[k].push_back(node);
    }
    return cs;
}

/// (cos(a,b) + 1) / 2, clamped to [0,1]. If either vector has zero norm the
/// similarity is the uninformative midpoint 0.5 (ReLU can zero out a row).
inline double rescaled_cosine(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DataError("rescaled_cosine: length mismatch");
    const int n = static_cast<int>(a.size());
    const double na = norm2(a.data(), n);
    const double nb = norm2(b.data(), n);
    if (na == 0.0 || nb == 0.0) return 0.5;
    const double c = dot(a.data(), b.data(), n) / (na * nb);
    return std::clamp((c + 1.0) * 0.5, 0.0, 1.0);
}

namespace detail {

/// Row norms of Z, computed once per epoch.
inline std::vector<double> row_norms(const Mat& z) {
    std::vector<double> norms(z.rows);
    for (int i = 0; i < z.rows; ++i) norms[i] = norm2(z.row(i), z.cols);
    return norms;
}

inline double rescaled_cosine_cached(const Mat& z, std::span<const double> norms,
                                     int a, int b) {
    if (norms[a] == 0.0 || norms[b] == 0.0) return 0.5;
    const double c = dot(z.row(a), z.row(b), z.cols) / (norms[a] * norms[b]);
    return std::clamp((c + 1.0) * 0.5, 0.0, 1.0);
}

/// Top-k candidates by (similarity desc, node index asc). Returns all
/// candidates when k >= |candidates|.
inline std::vector<int> select_top_k_cached(const Mat& z, std::span<const double> norms,
                                            int target, std::span<const int> candidates,
                                            int k) {
    std::vector<std::pair<double, int>> scored;
    scored.reserve(candidates.size());
    for (int c : candidates)
        scored.emplace_back(rescaled_cosine_cached(z, norms, target, c), c);
    const auto better = [](const std::pair<double, int>& x, const std::pair<double, int>& y) {
        if (x.first != y.first) return x.first > y.first;
        return x.second < y.second;
    };
    const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), scored.size());
    if (take < scored.size())
        std::nth_element(scored.begin(), scored.begin() + take, scored.end(), better);
    std::sort(scored.begin(), scored.begin() + take, better);
    std::vector<int> out;
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) out.push_back(scored[i].second);
    return out;
}

}  // namespace detail

/// The k candidates maximizing rescaled cosine similarity to the target.
/// Ties broken by ascending node index; output ordered by descending
/// similarity, then ascending index.
inline std::vector<int> select_top_k(int target, std::span<const int> candidates,
                                     const Mat& z, int k) {
    if (k < 1) throw ConfigError("select_top_k: k must be >= 1");
    const auto norms = detail::row_norms(z);
    return detail::select_top_k_cached(z, norms, target, candidates, k);
}

/// Semantic homogeneity: (mean anchor similarity)^(1/tau). An empty anchor
/// set scores 0 -- no relational evidence, no contribution to the loss.
/// Underflow toward 0 for low-similarity targets at small tau is the
/// intended sharpening behavior.
inline double homogeneity(int target, std::span<const int> anchor_union, const Mat& z,
                          double tau) {
    if (tau <= 0.0) throw ConfigError("homogeneity: tau must be > 0");
    if (anchor_union.empty()) return 0.0;
    const auto norms = detail::row_norms(z);
    double sum = 0.0;
    for (int a : anchor_union) sum += detail::rescaled_cosine_cached(z, norms, target, a);
    const double mean = sum / static_cast<double>(anchor_union.size());
    return std::pow(mean, 1.0 / tau);
}

/// Dual-standard scoring for every target: top-k_p from cp and top-k_t from
/// ct independently, set union, then the homogeneity score. Passing k = 0 on
/// either side drops that side (used by ablations). Per-target work is
/// independent; union sums run in ascending node order.
inline std::pair<HomogeneityScores, std::vector<AnchorSet>> score_all(
    const CandidateSets& cands, const Mat& z, int k_p, int k_t, double tau) {
    if (tau <= 0.0) throw ConfigError("score_all: tau must be > 0");
    const auto norms = detail::row_norms(z);
    const std::size_t n = cands.s_nodes.size();

    HomogeneityScores scores;
    scores.tau = tau;
    scores.score.resize(n);
    scores.anchor_count.resize(n);
    std::vector<AnchorSet> anchor_sets(n);

    for (std::size_t k = 0; k < n; ++k) {
        const int t = cands.s_nodes[k];
        AnchorSet& as = anchor_sets[k];
        if (k_p > 0)
            as.ap = detail::select_top_k_cached(z, norms, t, cands.cp[k], k_p);
        if (k_t > 0)
            as.at = detail::select_top_k_cached(z, norms, t, cands.ct[k], k_t);

        as.members.reserve(as.ap.size() + as.at.size());
        as.members.insert(as.members.end(), as.ap.begin(), as.ap.end());
        as.members.insert(as.members.end(), as.at.begin(), as.at.end());
        std::sort(as.members.begin(), as.members.end());
        as.members.erase(std::unique(as.members.begin(), as.members.end()), as.members.end());

        scores.anchor_count[k] = static_cast<int>(as.members.size());
        if (as.members.empty()) {
            scores.score[k] = 0.0;
            scores.empty_unions++;
            continue;
        }
        double sum = 0.0;
        for (int a : as.members) sum += detail::rescaled_cosine_cached(z, norms, t, a);
        const double mean = sum / static_cast<double>(as.members.size());
        scores.score[k] = std::pow(mean, 1.0 / tau);
    }
    return {std::move(scores), std::move(anchor_sets)};
}

/// Single-pool variant scoring (ablations V4/V5): top-k from one pool per
/// target, no union of two standards. The selection lands in AnchorSet::ap.
inline std::pair<HomogeneityScores, std::vector<AnchorSet>> score_pooled(
    std::span<const int> s_nodes, const std::vector<std::vector<int>>& pools, const Mat& z,
    int k, double tau) {
    if (tau <= 0.0) throw ConfigError("score_pooled: tau must be > 0");
    const auto norms = detail::row_norms(z);
    const std::size_t n = s_nodes.size();

    HomogeneityScores scores;
    scores.tau = tau;
    scores.score.resize(n);
    scores.anchor_count.resize(n);
    std::vector<AnchorSet> anchor_sets(n);

    for (std::size_t i = 0; i < n; ++i) {
        const int t = s_nodes[i];
        AnchorSet& as = anchor_sets[i];
        as.ap = detail::select_top_k_cached(z, norms, t, pools[i], k);
        as.members = as.ap;
        std::sort(as.members.begin(), as.members.end());

        scores.anchor_count[i] = static_cast<int>(as.members.size());
        if (as.members.empty()) {
            scores.score[i] = 0.0;
            scores.empty_unions++;
            continue;
        }
        double sum = 0.0;
        for (int a : as.members) sum += detail::rescaled_cosine_cached(z, norms, t, a);
        scores.score[i] = std::pow(sum / static_cast<double>(as.members.size()), 1.0 / tau);
    }
    return {std::move(scores), std::move(anchor_sets)};
}

}  // namespace dream
