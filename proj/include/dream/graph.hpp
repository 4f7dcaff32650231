#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dream/errors.hpp"
#include "dream/matrix.hpp"

namespace dream {

/// Undirected graph in CSR form plus dense node features.
/// Invariants: both directions of every edge stored, no self-loops,
/// neighbor lists sorted ascending.
struct Graph {
    int num_nodes = 0;
    std::vector<int> row_offsets;  // length num_nodes + 1
    std::vector<int> col_indices;
    Mat features;                  // num_nodes x d_in
    int d_in = 0;

    int degree(int v) const { return row_offsets[v + 1] - row_offsets[v]; }

    std::span<const int> neighbors(int v) const {
        return {col_indices.data() + row_offsets[v],
                static_cast<std::size_t>(degree(v))};
    }

    bool has_edge(int u, int v) const {
        const auto nb = neighbors(u);
        return std::binary_search(nb.begin(), nb.end(), v);
    }
};

/// Kipf-renormalized adjacency D~^{-1/2} (A + I) D~^{-1/2} in CSR form.
/// Self-loop entries are present on every diagonal.
struct NormalizedAdjacency {
    int num_nodes = 0;
    std::vector<int> row_offsets;
    std::vector<int> col_indices;
    std::vector<double> weights;
};

/// Builds the CSR graph from an arbitrary edge list. Duplicate edges and
/// self-loops are dropped; both directions are stored; neighbor lists come
/// out sorted.
inline Graph build_graph(std::span<const std::pair<int, int>> edges, Mat features) {
    const int n = features.rows;
    if (n == 0) throw DataError("build_graph: graph has no nodes");

    std::vector<std::pair<int, int>> dir;
    dir.reserve(edges.size() * 2);
    for (const auto& [u, v] : edges) {
        if (u < 0 || u >= n || v < 0 || v >= n)
            throw DataError("build_graph: edge endpoint out of range: (" +
                            std::to_string(u) + "," + std::to_string(v) +
                            ") with num_nodes=" + std::to_string(n));
        if (u == v) continue;
        dir.emplace_back(u, v);
        dir.emplace_back(v, u);
    }
    std::sort(dir.begin(), dir.end());
    dir.erase(std::unique(dir.begin(), dir.end()), dir.end());

    Graph g;
    g.num_nodes = n;
    g.d_in = features.cols;
    g.features = std::move(features);
    g.row_offsets.assign(static_cast<std::size_t>(n) + 1, 0);
    g.col_indices.reserve(dir.size());
    for (const auto& [u, v] : dir) g.row_offsets[u + 1]++;
    for (int i = 0; i < n; ++i) g.row_offsets[i + 1] += g.row_offsets[i];
    for (const auto& [u, v] : dir) g.col_indices.push_back(v);
    return g;
}

/// Entry (i,j) = 1/sqrt((deg_i + 1)(deg_j + 1)) for every stored edge and
/// every diagonal (i,i). deg is the CSR degree (self-loops excluded).
inline NormalizedAdjacency normalize_adjacency(const Graph& g) {
    NormalizedAdjacency adj;
    adj.num_nodes = g.num_nodes;
    adj.row_offsets.assign(static_cast<std::size_t>(g.num_nodes) + 1, 0);
    adj.col_indices.reserve(g.col_indices.size() + g.num_nodes);
    adj.weights.reserve(g.col_indices.size() + g.num_nodes);

    std::vector<double> inv_sqrt(g.num_nodes);
    for (int i = 0; i < g.num_nodes; ++i)
        inv_sqrt[i] = 1.0 / std::sqrt(static_cast<double>(g.degree(i)) + 1.0);

    for (int i = 0; i < g.num_nodes; ++i) {
        bool placed_diag = false;
        for (int j : g.neighbors(i)) {
            if (!placed_diag && j > i) {
                adj.col_indices.push_back(i);
                adj.weights.push_back(inv_sqrt[i] * inv_sqrt[i]);
                placed_diag = true;
            }
            adj.col_indices.push_back(j);
            adj.weights.push_back(inv_sqrt[i] * inv_sqrt[j]);
        }
        if (!placed_diag) {
            adj.col_indices.push_back(i);
            adj.weights.push_back(inv_sqrt[i] * inv_sqrt[i]);
        }
        adj.row_offsets[i + 1] = static_cast<int>(adj.col_indices.size());
    }
    return adj;
}

/// Unweighted shortest-path hop counts from `source`, restricted to
/// 1 <= d <= d_max. The source itself is excluded. Returned pairs are
/// ordered by ascending node index.
inline std::vector<std::pair<int, std::uint16_t>> bounded_geodesics(const Graph& g,
                                                                    int source,
                                                                    int d_max) {
    constexpr std::uint16_t kUnreached = 0xFFFF;
    std::vector<std::uint16_t> dist(g.num_nodes, kUnreached);
    dist[source] = 0;

    std::vector<int> frontier{source}, next;
    for (int depth = 1; depth <= d_max && !frontier.empty(); ++depth) {
        next.clear();
        for (int u : frontier) {
            for (int v : g.neighbors(u)) {
                if (dist[v] == kUnreached) {
                    dist[v] = static_cast<std::uint16_t>(depth);
                    next.push_back(v);
                }
            }
        }
        frontier.swap(next);
    }

    std::vector<std::pair<int, std::uint16_t>> out;
    for (int v = 0; v < g.num_nodes; ++v)
        if (v != source && dist[v] != kUnreached) out.emplace_back(v, dist[v]);
    return out;
}

/// Sparse-dense product: row i of the result is sum_j w_ij * dense_j.
inline Mat spmm(const NormalizedAdjacency& adj, const Mat& dense) {
    if (dense.rows != adj.num_nodes)
        throw DataError("spmm: dense row count " + std::to_string(dense.rows) +
                        " does not match num_nodes " + std::to_string(adj.num_nodes));
    Mat out(adj.num_nodes, dense.cols);
    for (int i = 0; i < adj.num_nodes; ++i) {
        double* orow = out.row(i);
        for (int e = adj.row_offsets[i]; e < adj.row_offsets[i + 1]; ++e) {
            const double w = adj.weights[e];
            const double* drow = dense.row(adj.col_indices[e]);
            for (int c = 0; c < dense.cols; ++c) orow[c] += w * drow[c];
        }
    }
    return out;
}

}  // namespace dream
