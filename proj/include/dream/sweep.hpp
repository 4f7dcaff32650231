#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "dream/dataset.hpp"
#include "dream/errors.hpp"
#include "dream/noise.hpp"
#include "dream/trainer.hpp"

namespace dream {

/// One (noise kind, rate, seed, method) measurement.
struct SweepCell {
    NoiseKind kind = NoiseKind::uniform;
    double rate = 0.0;
    std::uint64_t seed = 0;
    std::string method;
    double test_acc_final = 0.0;
    double test_acc_bestval = 0.0;
    double final_loss = 0.0;  // not serialized; convergence sanity checks
    bool failed = false;      // run aborted; accuracy fields are meaningless
    std::string error;
};

struct SweepSpec {
    std::vector<NoiseKind> kinds{NoiseKind::uniform};
    std::vector<double> rates{0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    std::vector<Variant> methods{Variant::full, Variant::baseline_unweighted};
    int jobs = 1;

    void validate() const {
        if (kinds.empty() || rates.empty() || seeds.empty() || methods.empty())
            throw ConfigError("sweep: kinds/rates/seeds/methods must be non-empty");
        for (double r : rates)
            if (r < 0.0 || r > 1.0) throw ConfigError("sweep: rate outside [0,1]");
        if (jobs < 1) throw ConfigError("sweep: jobs must be >= 1");
    }
};

namespace detail {

/// Executes independent cell closures, each writing only its own result
/// slot, so the assembled output order never depends on scheduling.
inline void run_indexed(int jobs, std::size_t n, const std::function<void(std::size_t)>& work) {
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) work(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) work(i);
    };
    std::vector<std::thread> pool;
    const int t = std::min<int>(jobs, static_cast<int>(n));
    pool.reserve(t);
    for (int k = 0; k < t; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

}  // namespace detail

/// Runs the full grid on a clean dataset. Every cell re-corrupts the clean
/// labels with the cell seed and trains with the same seed, so cells are
/// independent; a diverged cell is marked failed and the rest continue.
inline std::vector<SweepCell> sweep(const Dataset& clean, const SweepSpec& spec,
                                    const TrainConfig& base) {
    spec.validate();
    if (clean.has_noise) throw DataError("sweep: expected a clean (uncorrupted) dataset");
    std::vector<SweepCell> out;
    for (NoiseKind kind : spec.kinds)
        for (double rate : spec.rates)
            for (std::uint64_t seed : spec.seeds)
                for (Variant method : spec.methods) {
                    SweepCell cell;
                    cell.kind = kind;
                    cell.rate = rate;
                    cell.seed = seed;
                    cell.method = to_string(method);
                    out.push_back(cell);
                }
    const std::vector<Variant> methods = spec.methods;
    detail::run_indexed(spec.jobs, out.size(), [&](std::size_t i) {
        SweepCell& cell = out[i];
        try {
            const Dataset noisy =
                cell.rate > 0.0
                    ? corrupt_dataset(clean, NoiseSpec{cell.kind, cell.rate, cell.seed})
                    : clean;
            TrainConfig cfg = base;
            cfg.seed = cell.seed;
            cfg.variant = methods[i % methods.size()];
            const RunResult r = train(noisy, cfg);
            cell.test_acc_final = r.final_test_acc;
            cell.test_acc_bestval = r.bestval_test_acc;
            cell.final_loss = r.final_loss;
        } catch (const std::exception& e) {
            // A diverged cell must not sink the rest of the grid.
            cell.failed = true;
            cell.error = e.what();
        }
    });
    return out;
}

/// Mean/std of best-val test accuracy across seeds for one
/// (kind, rate, method) group, in grid order. Failed cells are skipped.
struct SweepAggregate {
    NoiseKind kind = NoiseKind::uniform;
    double rate = 0.0;
    std::string method;
    int n = 0;
    double mean = 0.0;
    double stddev = 0.0;  // population std over seeds
};

inline std::vector<SweepAggregate> aggregate_sweep(std::span<const SweepCell> cells) {
    std::vector<SweepAggregate> groups;
    auto find = [&](const SweepCell& c) -> SweepAggregate& {
        for (auto& g : groups)
            if (g.kind == c.kind && g.rate == c.rate && g.method == c.method) return g;
        groups.push_back({c.kind, c.rate, c.method, 0, 0.0, 0.0});
        return groups.back();
    };
    for (const auto& c : cells) {
        if (c.failed) continue;
        SweepAggregate& g = find(c);
        g.n++;
        g.mean += c.test_acc_bestval;
    }
    for (auto& g : groups)
        if (g.n > 0) g.mean /= g.n;
    for (const auto& c : cells) {
        if (c.failed) continue;
        SweepAggregate& g = find(c);
        const double d = c.test_acc_bestval - g.mean;
        g.stddev += d * d;
    }
    for (auto& g : groups)
        if (g.n > 0) g.stddev = std::sqrt(g.stddev / g.n);
    return groups;
}

/// One ablation measurement: variant x seed at a fixed corruption.
struct AblationCell {
    std::string variant;
    std::uint64_t seed = 0;
    double test_acc_final = 0.0;
    double test_acc_bestval = 0.0;
};

inline std::vector<AblationCell> ablate(const Dataset& clean, const NoiseSpec& noise,
                                        std::span<const Variant> variants,
                                        std::span<const std::uint64_t> seeds,
                                        const TrainConfig& base, int jobs = 1) {
    if (clean.has_noise) throw DataError("ablate: expected a clean (uncorrupted) dataset");
    if (variants.empty() || seeds.empty())
        throw ConfigError("ablate: variants/seeds must be non-empty");
    if (jobs < 1) throw ConfigError("ablate: jobs must be >= 1");
    std::vector<AblationCell> out(variants.size() * seeds.size());
    std::vector<std::string> errors(out.size());
    detail::run_indexed(jobs, out.size(), [&](std::size_t i) {
        try {
            const std::uint64_t seed = seeds[i / variants.size()];
            const Variant v = variants[i % variants.size()];
            NoiseSpec cell_noise = noise;
            cell_noise.seed = seed;
            const Dataset noisy = noise.rate > 0.0 ? corrupt_dataset(clean, cell_noise) : clean;
            TrainConfig cfg = base;
            cfg.seed = seed;
            cfg.variant = v;
            const RunResult r = train(noisy, cfg);
            out[i] = {to_string(v), seed, r.final_test_acc, r.bestval_test_acc};
        } catch (const std::exception& e) {
            errors[i] = e.what();  // exceptions must not escape worker threads
        }
    });
    for (const std::string& e : errors)
        if (!e.empty()) throw NumericError("ablate: cell failed: " + e);
    return out;
}

}  // namespace dream
