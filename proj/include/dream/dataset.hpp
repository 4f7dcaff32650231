#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dream/errors.hpp"
#include "dream/graph.hpp"
#include "dream/noise.hpp"

namespace dream {

/// A graph plus its label/mask state -- the in-memory image of the graph
/// JSON format. `labels` holds observed labels (-1 = unlabeled); after
/// corruption, `labels_clean` keeps the originals and `corrupted` marks the
/// flipped nodes.
struct Dataset {
    Graph graph;
    std::vector<int> labels;         // observed, length N, -1 = unlabeled
    std::vector<int> labels_clean;   // empty unless corruption metadata present
    std::vector<std::uint8_t> train_mask, val_mask, test_mask;  // may be empty
    std::vector<std::uint8_t> corrupted;                        // empty unless corrupted
    bool has_noise = false;
    NoiseSpec noise;

    bool has_masks() const {
        return !train_mask.empty() && !val_mask.empty() && !test_mask.empty();
    }

    int num_classes() const {
        int c = 0;
        for (int y : labels) c = std::max(c, y + 1);
        if (!labels_clean.empty())
            for (int y : labels_clean) c = std::max(c, y + 1);
        return c;
    }

    std::vector<int> mask_nodes(std::span<const std::uint8_t> mask) const {
        std::vector<int> out;
        for (int i = 0; i < graph.num_nodes; ++i)
            if (mask[i]) out.push_back(i);
        return out;
    }

    std::vector<int> train_nodes() const { return mask_nodes(train_mask); }

    /// Clean label for evaluation: labels_clean when present, else labels.
    int clean_label(int node) const {
        return labels_clean.empty() ? labels[node] : labels_clean[node];
    }

    void check_consistent() const {
        const std::size_t n = static_cast<std::size_t>(graph.num_nodes);
        if (labels.size() != n) throw DataError("dataset: labels length != num_nodes");
        if (!labels_clean.empty() && labels_clean.size() != n)
            throw DataError("dataset: labels_clean length != num_nodes");
        for (const auto* m : {&train_mask, &val_mask, &test_mask})
            if (!m->empty() && m->size() != n)
                throw DataError("dataset: mask length != num_nodes");
        if (has_masks()) {
            for (std::size_t i = 0; i < n; ++i) {
                if (train_mask[i] + val_mask[i] + test_mask[i] > 1)
                    throw DataError("dataset: masks overlap at node " + std::to_string(i));
                if ((train_mask[i] || val_mask[i] || test_mask[i]) && labels[i] < 0)
                    throw DataError("dataset: masked node " + std::to_string(i) + " is unlabeled");
            }
        }
    }
};

/// Applies label corruption to the train and validation nodes, in ascending
/// node order. Test labels are never touched. The input must be clean.
inline Dataset corrupt_dataset(const Dataset& in, const NoiseSpec& spec) {
    if (in.has_noise) throw DataError("corrupt: input already carries noise metadata");
    if (!in.has_masks()) throw DataError("corrupt: input has no train/val/test masks");
    in.check_consistent();

    std::vector<int> target_nodes;
    for (int i = 0; i < in.graph.num_nodes; ++i)
        if ((in.train_mask[i] || in.val_mask[i]) && in.labels[i] >= 0)
            target_nodes.push_back(i);
    std::vector<int> target_labels;
    target_labels.reserve(target_nodes.size());
    for (int node : target_nodes) target_labels.push_back(in.labels[node]);

    const LabelState st = corrupt_labels(target_labels, in.num_classes(), spec);

    Dataset out = in;
    out.labels_clean = in.labels;
    out.corrupted.assign(in.labels.size(), 0);
    out.has_noise = true;
    out.noise = spec;
    for (std::size_t k = 0; k < target_nodes.size(); ++k) {
        out.labels[target_nodes[k]] = st.y_obs[k];
        out.corrupted[target_nodes[k]] = st.corrupted[k];
    }
    return out;
}

}  // namespace dream
