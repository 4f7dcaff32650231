#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "dream/errors.hpp"
#include "dream/graph.hpp"
#include "dream/matrix.hpp"
#include "dream/rng.hpp"

namespace dream {

/// Two-layer GCN: encoder weight W1 (d_in x d) and classifier weight
/// W2 (d x C). No biases, no dropout, no weight decay.
struct ModelParams {
    Mat w1;
    Mat w2;

    int d_in() const { return w1.rows; }
    int hidden() const { return w1.cols; }
    int num_classes() const { return w2.cols; }
};

/// Glorot-uniform initialization, filled row-major from the given stream so
/// runs are reproducible. W1 is drawn before W2.
inline ModelParams init_params(int d_in, int hidden, int num_classes, SplitMix64& rng) {
    ModelParams p{Mat(d_in, hidden), Mat(hidden, num_classes)};
    const auto glorot = [&rng](Mat& w) {
        const double limit = std::sqrt(6.0 / (w.rows + w.cols));
        for (double& v : w.a) v = rng.next_uniform(-limit, limit);
    };
    glorot(p.w1);
    glorot(p.w2);
    return p;
}

/// Every intermediate the backward pass needs.
///   ax     = A^ X            (N x d_in)
///   hidden = A^ X W1         (N x d, pre-activation)
///   z      = ReLU(hidden)    (N x d) -- the representations fed to anchors
///   az     = A^ Z            (N x d)
///   logits = A^ Z W2         (N x C)
///   probs  = row-softmax     (N x C)
struct ForwardCache {
    Mat ax, hidden, z, az, logits, probs;
};

inline ForwardCache forward(const ModelParams& params, const NormalizedAdjacency& adj,
                            const Mat& features) {
    ForwardCache c;
    c.ax = spmm(adj, features);
    c.hidden = matmul(c.ax, params.w1);
    c.z = c.hidden;
    for (double& v : c.z.a) v = std::max(v, 0.0);
    if (!c.z.all_finite()) throw NumericError("forward: non-finite output in layer 1");

    c.az = spmm(adj, c.z);
    c.logits = matmul(c.az, params.w2);
    if (!c.logits.all_finite()) throw NumericError("forward: non-finite output in layer 2");

    // Row softmax with max subtraction.
    c.probs = Mat(c.logits.rows, c.logits.cols);
    for (int i = 0; i < c.logits.rows; ++i) {
        const double* lrow = c.logits.row(i);
        double* prow = c.probs.row(i);
        const double m = *std::max_element(lrow, lrow + c.logits.cols);
        double sum = 0.0;
        for (int j = 0; j < c.logits.cols; ++j) {
            prow[j] = std::exp(lrow[j] - m);
            sum += prow[j];
        }
        for (int j = 0; j < c.logits.cols; ++j) prow[j] /= sum;
    }
    if (!c.probs.all_finite()) throw NumericError("forward: non-finite output in softmax");
    return c;
}

/// Mean reweighted cross entropy over the labeled set:
///   loss = 1/|S| * sum_i w_i * (-log P[s_i, y_{s_i}]).
/// Summation runs in ascending node order regardless of the order of S, so
/// the result is bit-reproducible under permutations of the input.
/// Probabilities are clamped at 1e-12 before the log; clamp_count (optional)
/// reports how often that fired.
inline double weighted_ce_loss(const ForwardCache& cache, std::span<const int> labeled,
                               std::span<const int> labels, std::span<const double> weights,
                               long* clamp_count = nullptr) {
    if (labeled.empty()) throw DataError("weighted_ce_loss: labeled set is empty");
    if (weights.size() != labeled.size())
        throw DataError("weighted_ce_loss: weights/labeled size mismatch");

    std::vector<std::size_t> order(labeled.size());
    std::iota(order.begin(), order.end(), 0);
    if (!std::is_sorted(labeled.begin(), labeled.end()))
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return labeled[a] < labeled[b]; });

    double loss = 0.0;
    for (std::size_t k : order) {
        const int node = labeled[k];
        const int y = labels[node];
        if (y < 0 || y >= cache.probs.cols)
            throw DataError("weighted_ce_loss: label out of range at node " + std::to_string(node));
        double p = cache.probs(node, y);
        if (p < 1e-12) {
            p = 1e-12;
            if (clamp_count) ++(*clamp_count);
        }
        loss += weights[k] * -std::log(p);
    }
    return loss / static_cast<double>(labeled.size());
}

struct Gradients {
    Mat w1;
    Mat w2;
};

/// Exact analytic gradient of weighted_ce_loss with respect to W1 and W2.
/// The weights are constants here; no gradient flows through the
/// homogeneity scores. Derivation (A^ symmetric):
///   dL/dlogits[s] = w_s/|S| * (P[s] - onehot(y_s))      rows off S are zero
///   dW2 = (A^ Z)^T G
///   dZ  = A^ (G W2^T), masked by hidden > 0
///   dW1 = (A^ X)^T dZ
inline Gradients backward(const ForwardCache& cache, const ModelParams& params,
                          const NormalizedAdjacency& adj, std::span<const int> labeled,
                          std::span<const int> labels, std::span<const double> weights) {
    if (cache.probs.rows != adj.num_nodes || cache.z.cols != params.w1.cols ||
        cache.probs.cols != params.w2.cols)
        throw DataError("backward: cache does not match parameters (stale cache?)");
    if (weights.size() != labeled.size())
        throw DataError("backward: weights/labeled size mismatch");

    const double inv_s = 1.0 / static_cast<double>(labeled.size());
    Mat g(cache.probs.rows, cache.probs.cols);
    for (std::size_t k = 0; k < labeled.size(); ++k) {
        const int node = labeled[k];
        const double coef = weights[k] * inv_s;
        const double* prow = cache.probs.row(node);
        double* grow = g.row(node);
        for (int c = 0; c < g.cols; ++c) grow[c] = coef * prow[c];
        grow[labels[node]] -= coef;
    }

    Gradients grads;
    grads.w2 = matmul_at_b(cache.az, g);

    Mat dz = spmm(adj, matmul_a_bt(g, params.w2));
    for (std::size_t i = 0; i < dz.a.size(); ++i)
        if (cache.hidden.a[i] <= 0.0) dz.a[i] = 0.0;

    grads.w1 = matmul_at_b(cache.ax, dz);
    return grads;
}

/// Adam with bias correction (beta1 = 0.9, beta2 = 0.999, eps = 1e-8).
struct AdamState {
    double lr = 1e-2;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    long step = 0;
    Mat m1, v1;  // moments for W1
    Mat m2, v2;  // moments for W2

    AdamState() = default;
    AdamState(const ModelParams& params, double learning_rate)
        : lr(learning_rate),
          m1(params.w1.rows, params.w1.cols),
          v1(params.w1.rows, params.w1.cols),
          m2(params.w2.rows, params.w2.cols),
          v2(params.w2.rows, params.w2.cols) {}
};

inline void adam_step(ModelParams& params, const Gradients& grads, AdamState& state) {
    if (!grads.w1.same_shape(params.w1) || !grads.w2.same_shape(params.w2))
        throw DataError("adam_step: gradient shapes disagree with parameters");
    if (!grads.w1.all_finite() || !grads.w2.all_finite())
        throw NumericError("adam_step: non-finite gradient");

    state.step++;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    const auto update = [&](Mat& w, const Mat& grad, Mat& m, Mat& v) {
        for (std::size_t i = 0; i < w.a.size(); ++i) {
            const double gi = grad.a[i];
            m.a[i] = state.beta1 * m.a[i] + (1.0 - state.beta1) * gi;
            v.a[i] = state.beta2 * v.a[i] + (1.0 - state.beta2) * gi * gi;
            const double mhat = m.a[i] / bc1;
            const double vhat = v.a[i] / bc2;
            w.a[i] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
        }
    };
    update(params.w1, grads.w1, state.m1, state.v1);
    update(params.w2, grads.w2, state.m2, state.v2);
}

/// Central-difference check of the analytic gradient over every parameter
/// entry. Relative error uses an absolute floor of 1e-6 so that entries whose
/// analytic and numeric values are both ~0 do not blow up the ratio.
inline double gradcheck(const ModelParams& params, const NormalizedAdjacency& adj,
                        const Mat& features, std::span<const int> labeled,
                        std::span<const int> labels, std::span<const double> weights,
                        double h) {
    ModelParams p = params;
    const ForwardCache cache = forward(p, adj, features);
    const Gradients analytic = backward(cache, p, adj, labeled, labels, weights);

    const auto loss_at = [&]() {
        return weighted_ce_loss(forward(p, adj, features), labeled, labels, weights);
    };
    double max_rel = 0.0;
    const auto check = [&](Mat& w, const Mat& grad) {
        for (std::size_t i = 0; i < w.a.size(); ++i) {
            const double orig = w.a[i];
            w.a[i] = orig + h;
            const double lp = loss_at();
            w.a[i] = orig - h;
            const double lm = loss_at();
            w.a[i] = orig;
            const double numeric = (lp - lm) / (2.0 * h);
            const double denom = std::max(1e-6, std::abs(numeric) + std::abs(grad.a[i]));
            max_rel = std::max(max_rel, std::abs(numeric - grad.a[i]) / denom);
        }
    };
    check(p.w1, analytic.w1);
    check(p.w2, analytic.w2);
    return max_rel;
}

}  // namespace dream
