#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "dream/errors.hpp"
#include "dream/rng.hpp"

namespace dream {

enum class NoiseKind { uniform, pair, asymmetric };

inline std::string to_string(NoiseKind k) {
    switch (k) {
        case NoiseKind::uniform: return "uniform";
        case NoiseKind::pair: return "pair";
        case NoiseKind::asymmetric: return "asymmetric";
    }
    return "?";
}

inline NoiseKind noise_kind_from_string(const std::string& s) {
    if (s == "uniform") return NoiseKind::uniform;
    if (s == "pair") return NoiseKind::pair;
    if (s == "asymmetric") return NoiseKind::asymmetric;
    throw ConfigError("unknown noise kind: '" + s + "'");
}

struct NoiseSpec {
    NoiseKind kind = NoiseKind::uniform;
    double rate = 0.30;
    std::uint64_t seed = 1;
};

/// Observed vs clean labels over a labeled index set S.
/// corrupted[k] is true iff y_obs[k] != y_clean[k].
struct LabelState {
    std::vector<int> s_nodes;        // sorted labeled indices
    std::vector<int> y_clean;        // aligned with s_nodes
    std::vector<int> y_obs;          // aligned with s_nodes
    std::vector<std::uint8_t> corrupted;
    NoiseSpec spec;
};

namespace detail {

inline void check_noise_inputs(std::span<const int> labels, int num_classes, double rate) {
    if (num_classes < 2)
        throw ConfigError("label noise needs at least 2 classes");
    if (rate < 0.0 || rate > 1.0)
        throw ConfigError("noise rate must lie in [0,1]");
    for (int y : labels)
        if (y < 0 || y >= num_classes)
            throw DataError("label out of range [0," + std::to_string(num_classes) + ")");
}

inline LabelState make_state(std::span<const int> labels, NoiseSpec spec) {
    LabelState st;
    st.spec = spec;
    st.s_nodes.resize(labels.size());
    std::iota(st.s_nodes.begin(), st.s_nodes.end(), 0);
    st.y_clean.assign(labels.begin(), labels.end());
    st.y_obs = st.y_clean;
    st.corrupted.assign(labels.size(), 0);
    return st;
}

}  // namespace detail

/// With probability `rate`, independently per node, replace the label by one
/// drawn uniformly from the other C-1 classes. Decisions are drawn in
/// ascending position order from a single SplitMix64 stream.
inline LabelState corrupt_uniform(std::span<const int> labels, int num_classes,
                                  double rate, std::uint64_t seed) {
    detail::check_noise_inputs(labels, num_classes, rate);
    LabelState st = detail::make_state(labels, {NoiseKind::uniform, rate, seed});
    SplitMix64 rng(seed);
    for (std::size_t k = 0; k < labels.size(); ++k) {
        if (rng.next_double() < rate) {
            // Uniform over the other C-1 classes, never the original.
            int y = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(num_classes - 1)));
            if (y >= st.y_clean[k]) ++y;
            st.y_obs[k] = y;
            st.corrupted[k] = (y != st.y_clean[k]);
        }
    }
    return st;
}

/// With probability `rate`, map class c to (c+1) mod C.
inline LabelState corrupt_pair(std::span<const int> labels, int num_classes,
                               double rate, std::uint64_t seed) {
    detail::check_noise_inputs(labels, num_classes, rate);
    LabelState st = detail::make_state(labels, {NoiseKind::pair, rate, seed});
    SplitMix64 rng(seed);
    for (std::size_t k = 0; k < labels.size(); ++k) {
        if (rng.next_double() < rate) {
            st.y_obs[k] = (st.y_clean[k] + 1) % num_classes;
            st.corrupted[k] = 1;
        }
    }
    return st;
}

/// Class-conditional noise: class c flips to (c+1) mod C with probability
/// rate * (c+1) * 2 / (C+1), clamped to [0,1]. Averaged over balanced
/// classes the flip rate equals `rate`.
inline LabelState corrupt_asymmetric(std::span<const int> labels, int num_classes,
                                     double rate, std::uint64_t seed) {
    detail::check_noise_inputs(labels, num_classes, rate);
    LabelState st = detail::make_state(labels, {NoiseKind::asymmetric, rate, seed});
    std::vector<double> class_rate(num_classes);
    for (int c = 0; c < num_classes; ++c)
        class_rate[c] = std::min(1.0, rate * (c + 1) * 2.0 / (num_classes + 1));
    SplitMix64 rng(seed);
    for (std::size_t k = 0; k < labels.size(); ++k) {
        if (rng.next_double() < class_rate[st.y_clean[k]]) {
            st.y_obs[k] = (st.y_clean[k] + 1) % num_classes;
            st.corrupted[k] = 1;
        }
    }
    return st;
}

inline LabelState corrupt_labels(std::span<const int> labels, int num_classes,
                                 const NoiseSpec& spec) {
    switch (spec.kind) {
        case NoiseKind::uniform:
            return corrupt_uniform(labels, num_classes, spec.rate, spec.seed);
        case NoiseKind::pair:
            return corrupt_pair(labels, num_classes, spec.rate, spec.seed);
        case NoiseKind::asymmetric:
            return corrupt_asymmetric(labels, num_classes, spec.rate, spec.seed);
    }
    throw ConfigError("corrupt_labels: unknown noise kind");
}

}  // namespace dream
