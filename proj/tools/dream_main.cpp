// Command-line front end: synth | corrupt | train | sweep | ablate.
//
// Config resolution order for every subcommand: built-in defaults, then
// `--config FILE` (flat key=value, keys are the long flag names), then
// explicit flags. The resolved values and each one's source are embedded in
// every artifact this tool writes.
//
// Exit codes: 0 ok, 2 usage/config, 3 data, 4 numeric failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dream/dream.hpp"

namespace {

using dream::ConfigError;
using json = dream::io::json;

long long parse_ll(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long long x = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing junk");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "': not an integer: '" + v + "'");
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const unsigned long long x = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing junk");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "': not an unsigned integer: '" + v + "'");
    }
}

double parse_d(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing junk");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "': not a number: '" + v + "'");
    }
}

std::vector<std::string> split_csv(const std::string& key, const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s + ",") {
        if (ch == ',') {
            if (cur.empty())
                throw ConfigError("config: key '" + key + "': empty list item in '" + s + "'");
            out.push_back(cur);
            cur.clear();
        } else if (ch != ' ' && ch != '\t') {
            cur += ch;
        }
    }
    return out;
}

/// One overridable setting: its flag name and how to assign it from text.
struct Key {
    std::string name;
    std::function<void(const std::string&)> set;
};

/// default < config file < explicit flag; records where each value came from.
std::map<std::string, std::string> resolve_config(CLI::App* sub, const std::string& config_path,
                                                  const std::vector<Key>& keys) {
    std::map<std::string, std::string> prov;
    for (const Key& k : keys) prov[k.name] = "default";
    if (!config_path.empty()) {
        const std::string text = dream::io::read_file(config_path);
        for (const auto& [k, v] : dream::io::parse_kv_config(text, config_path)) {
            const Key* found = nullptr;
            for (const Key& key : keys)
                if (key.name == k) {
                    found = &key;
                    break;
                }
            if (!found) throw ConfigError(config_path + ": unknown key '" + k + "'");
            if (sub->count("--" + k) > 0) continue;  // explicit flag wins
            found->set(v);
            prov[k] = "file";
        }
    }
    for (const Key& k : keys)
        if (sub->count("--" + k.name) > 0) prov[k.name] = "flag";
    return prov;
}

json provenance_json(const std::map<std::string, std::string>& prov,
                     const std::vector<Key>& keys) {
    json p;
    for (const Key& k : keys) p[k.name] = prov.at(k.name);
    return p;
}

void refuse_overwrite(const std::string& path, bool force) {
    if (!force && std::filesystem::exists(path))
        throw ConfigError("refusing to overwrite existing file " + path + " (pass --force)");
}

// Shared training hyperparameter flags.
struct TrainFlags {
    long long k_p = 15, k_t = 10, d_max = 4, hidden = 64, epochs = 500;
    double tau = 0.04, lr = 1e-2;
    std::uint64_t seed = 1;
    std::string variant = "full";
};

void add_train_flags(CLI::App* sub, TrainFlags& f, bool with_seed_and_variant) {
    sub->add_option("--k-p", f.k_p, "proximity anchors per node");
    sub->add_option("--k-t", f.k_t, "topology anchors per node");
    sub->add_option("--d-max", f.d_max, "geodesic radius for topology candidates");
    sub->add_option("--tau", f.tau, "homogeneity temperature");
    sub->add_option("--hidden", f.hidden, "hidden layer width");
    sub->add_option("--lr", f.lr, "Adam learning rate");
    sub->add_option("--epochs", f.epochs, "training epochs");
    if (with_seed_and_variant) {
        sub->add_option("--seed", f.seed, "run seed");
        sub->add_option("--variant", f.variant,
                        "full | v1_no_topo | v2_no_prox | v3_no_temp | v4_global_pool | "
                        "v5_union_pool | baseline_unweighted");
    }
}

void train_keys(TrainFlags& f, std::vector<Key>& keys, bool with_seed_and_variant) {
    keys.push_back({"k-p", [&f](const std::string& v) { f.k_p = parse_ll("k-p", v); }});
    keys.push_back({"k-t", [&f](const std::string& v) { f.k_t = parse_ll("k-t", v); }});
    keys.push_back({"d-max", [&f](const std::string& v) { f.d_max = parse_ll("d-max", v); }});
    keys.push_back({"tau", [&f](const std::string& v) { f.tau = parse_d("tau", v); }});
    keys.push_back({"hidden", [&f](const std::string& v) { f.hidden = parse_ll("hidden", v); }});
    keys.push_back({"lr", [&f](const std::string& v) { f.lr = parse_d("lr", v); }});
    keys.push_back({"epochs", [&f](const std::string& v) { f.epochs = parse_ll("epochs", v); }});
    if (with_seed_and_variant) {
        keys.push_back({"seed", [&f](const std::string& v) { f.seed = parse_u64("seed", v); }});
        keys.push_back({"variant", [&f](const std::string& v) { f.variant = v; }});
    }
}

dream::TrainConfig to_train_config(const TrainFlags& f) {
    dream::TrainConfig cfg;
    cfg.k_p = static_cast<int>(f.k_p);
    cfg.k_t = static_cast<int>(f.k_t);
    cfg.d_max = static_cast<int>(f.d_max);
    cfg.tau = f.tau;
    cfg.hidden = static_cast<int>(f.hidden);
    cfg.lr = f.lr;
    cfg.epochs = static_cast<int>(f.epochs);
    cfg.seed = f.seed;
    cfg.variant = dream::variant_from_string(f.variant);
    return cfg;
}

void train_config_json(const TrainFlags& f, json& cfg, bool with_seed_and_variant) {
    cfg["k-p"] = f.k_p;
    cfg["k-t"] = f.k_t;
    cfg["d-max"] = f.d_max;
    cfg["tau"] = f.tau;
    cfg["hidden"] = f.hidden;
    cfg["lr"] = f.lr;
    cfg["epochs"] = f.epochs;
    if (with_seed_and_variant) {
        cfg["seed"] = f.seed;
        cfg["variant"] = f.variant;
    }
}

// ---------------------------------------------------------------------------

struct SynthArgs {
    dream::SynthSpec spec;
    long long n = 600, c = 3, m = 2, d_in = 16;
    std::string out, config_path;
    bool force = false;
};

void setup_synth(CLI::App& app, std::shared_ptr<SynthArgs> a) {
    CLI::App* sub = app.add_subcommand("synth", "generate a planted-partition benchmark graph");
    sub->add_option("--n", a->n, "number of nodes");
    sub->add_option("--c", a->c, "number of classes");
    sub->add_option("--m", a->m, "sub-communities per class");
    sub->add_option("--p-in", a->spec.p_in, "edge probability within a block");
    sub->add_option("--p-mid", a->spec.p_mid, "edge probability same class, different block");
    sub->add_option("--p-out", a->spec.p_out, "edge probability across classes");
    sub->add_option("--d-in", a->d_in, "feature dimension");
    sub->add_option("--sigma-sep", a->spec.sigma_sep, "class mean separation");
    sub->add_option("--sigma-feat", a->spec.sigma_feat, "feature noise scale");
    sub->add_option("--train-frac", a->spec.train_frac, "training fraction per class");
    sub->add_option("--val-frac", a->spec.val_frac, "validation fraction per class");
    sub->add_option("--seed", a->spec.seed, "generator seed");
    sub->add_option("-o,--out", a->out, "output graph JSON path")->required();
    sub->add_flag("--force", a->force, "overwrite an existing output file");
    sub->add_option("--config", a->config_path, "key=value config file");

    sub->callback([sub, a] {
        auto& s = a->spec;
        std::vector<Key> keys;
        keys.push_back({"n", [a](const std::string& v) { a->n = parse_ll("n", v); }});
        keys.push_back({"c", [a](const std::string& v) { a->c = parse_ll("c", v); }});
        keys.push_back({"m", [a](const std::string& v) { a->m = parse_ll("m", v); }});
        keys.push_back({"p-in", [&s](const std::string& v) { s.p_in = parse_d("p-in", v); }});
        keys.push_back({"p-mid", [&s](const std::string& v) { s.p_mid = parse_d("p-mid", v); }});
        keys.push_back({"p-out", [&s](const std::string& v) { s.p_out = parse_d("p-out", v); }});
        keys.push_back({"d-in", [a](const std::string& v) { a->d_in = parse_ll("d-in", v); }});
        keys.push_back(
            {"sigma-sep", [&s](const std::string& v) { s.sigma_sep = parse_d("sigma-sep", v); }});
        keys.push_back({"sigma-feat",
                        [&s](const std::string& v) { s.sigma_feat = parse_d("sigma-feat", v); }});
        keys.push_back({"train-frac",
                        [&s](const std::string& v) { s.train_frac = parse_d("train-frac", v); }});
        keys.push_back(
            {"val-frac", [&s](const std::string& v) { s.val_frac = parse_d("val-frac", v); }});
        keys.push_back({"seed", [&s](const std::string& v) { s.seed = parse_u64("seed", v); }});
        keys.push_back({"out", [a](const std::string& v) { a->out = v; }});
        const auto prov = resolve_config(sub, a->config_path, keys);

        s.num_nodes = static_cast<int>(a->n);
        s.num_classes = static_cast<int>(a->c);
        s.subcommunities = static_cast<int>(a->m);
        s.d_in = static_cast<int>(a->d_in);

        refuse_overwrite(a->out, a->force);
        const dream::Dataset ds = dream::generate(s);
        if (ds.graph.row_offsets.back() == 0)
            std::cerr << "warning: generated graph has no edges\n";

        json cfg;
        cfg["command"] = "synth";
        cfg["n"] = a->n;
        cfg["c"] = a->c;
        cfg["m"] = a->m;
        cfg["p-in"] = s.p_in;
        cfg["p-mid"] = s.p_mid;
        cfg["p-out"] = s.p_out;
        cfg["d-in"] = a->d_in;
        cfg["sigma-sep"] = s.sigma_sep;
        cfg["sigma-feat"] = s.sigma_feat;
        cfg["train-frac"] = s.train_frac;
        cfg["val-frac"] = s.val_frac;
        cfg["seed"] = s.seed;
        cfg["out"] = a->out;
        cfg["provenance"] = provenance_json(prov, keys);
        dream::io::save_dataset(a->out, ds, cfg);
        std::cerr << "wrote " << a->out << " (" << s.num_nodes << " nodes)\n";
    });
}

struct CorruptArgs {
    std::string in, out, kind = "uniform", config_path;
    double rate = 0.30;
    std::uint64_t seed = 1;
    bool force = false;
};

void setup_corrupt(CLI::App& app, std::shared_ptr<CorruptArgs> a) {
    CLI::App* sub = app.add_subcommand("corrupt", "inject label noise into train/val labels");
    sub->add_option("-i,--in", a->in, "input graph JSON (clean labels)")->required();
    sub->add_option("-o,--out", a->out, "output graph JSON path")->required();
    sub->add_option("--kind", a->kind, "uniform | pair | asymmetric");
    sub->add_option("--rate", a->rate, "corruption probability");
    sub->add_option("--seed", a->seed, "noise seed");
    sub->add_flag("--force", a->force, "overwrite an existing output file");
    sub->add_option("--config", a->config_path, "key=value config file");

    sub->callback([sub, a] {
        std::vector<Key> keys;
        keys.push_back({"in", [a](const std::string& v) { a->in = v; }});
        keys.push_back({"out", [a](const std::string& v) { a->out = v; }});
        keys.push_back({"kind", [a](const std::string& v) { a->kind = v; }});
        keys.push_back({"rate", [a](const std::string& v) { a->rate = parse_d("rate", v); }});
        keys.push_back({"seed", [a](const std::string& v) { a->seed = parse_u64("seed", v); }});
        const auto prov = resolve_config(sub, a->config_path, keys);

        refuse_overwrite(a->out, a->force);
        const dream::NoiseSpec ns{dream::noise_kind_from_string(a->kind), a->rate, a->seed};
        const dream::io::GraphFile gf = dream::io::load_dataset(a->in);
        const dream::Dataset noisy = dream::corrupt_dataset(gf.ds, ns);

        json cfg;
        cfg["command"] = "corrupt";
        cfg["in"] = a->in;
        cfg["out"] = a->out;
        cfg["kind"] = a->kind;
        cfg["rate"] = a->rate;
        cfg["seed"] = a->seed;
        cfg["provenance"] = provenance_json(prov, keys);
        if (!gf.config.is_null()) cfg["parent"] = gf.config;
        dream::io::save_dataset(a->out, noisy, cfg);

        long flipped = 0;
        for (std::uint8_t b : noisy.corrupted) flipped += b;
        std::cerr << "wrote " << a->out << " (" << flipped << " labels corrupted)\n";
    });
}

struct TrainArgs {
    TrainFlags tf;
    std::string in, out_dir, dump_anchors, config_path;
    bool force = false;
};

void setup_train(CLI::App& app, std::shared_ptr<TrainArgs> a) {
    CLI::App* sub = app.add_subcommand("train", "train one model; write metrics, checkpoint, summary");
    sub->add_option("-i,--in", a->in, "input graph JSON")->required();
    sub->add_option("--out-dir", a->out_dir, "directory for metrics.csv/checkpoint.json/summary.json")
        ->required();
    add_train_flags(sub, a->tf, /*with_seed_and_variant=*/true);
    sub->add_option("--dump-anchors", a->dump_anchors,
                    "write per-epoch anchor selections to this JSON-lines file");
    sub->add_flag("--force", a->force, "overwrite existing output files");
    sub->add_option("--config", a->config_path, "key=value config file");

    sub->callback([sub, a] {
        std::vector<Key> keys;
        keys.push_back({"in", [a](const std::string& v) { a->in = v; }});
        keys.push_back({"out-dir", [a](const std::string& v) { a->out_dir = v; }});
        train_keys(a->tf, keys, true);
        keys.push_back({"dump-anchors", [a](const std::string& v) { a->dump_anchors = v; }});
        const auto prov = resolve_config(sub, a->config_path, keys);

        const dream::TrainConfig cfg = to_train_config(a->tf);
        cfg.validate();

        std::filesystem::create_directories(a->out_dir);
        const std::string metrics_path = a->out_dir + "/metrics.csv";
        const std::string checkpoint_path = a->out_dir + "/checkpoint.json";
        const std::string summary_path = a->out_dir + "/summary.json";
        for (const std::string& p : {metrics_path, checkpoint_path, summary_path})
            refuse_overwrite(p, a->force);
        if (!a->dump_anchors.empty()) refuse_overwrite(a->dump_anchors, a->force);

        const dream::io::GraphFile gf = dream::io::load_dataset(a->in);

        std::ofstream dump;
        dream::AnchorDumpFn sink = nullptr;
        if (!a->dump_anchors.empty()) {
            dump.open(a->dump_anchors, std::ios::binary | std::ios::trunc);
            if (!dump) throw dream::DataError("cannot open for writing: " + a->dump_anchors);
            sink = [&dump](int epoch, std::span<const int> s_nodes,
                           std::span<const double> scores,
                           std::span<const dream::AnchorSet> anchor_sets) {
                for (std::size_t i = 0; i < s_nodes.size(); ++i) {
                    json rec;
                    rec["epoch"] = epoch;
                    rec["node"] = s_nodes[i];
                    rec["score"] = scores[i];
                    rec["anchors_p"] = anchor_sets[i].ap;
                    rec["anchors_t"] = anchor_sets[i].at;
                    dump << rec.dump() << "\n";
                }
            };
        }

        dream::RunResult res = dream::train(gf.ds, cfg, sink);

        json cj;
        cj["command"] = "train";
        cj["in"] = a->in;
        cj["out-dir"] = a->out_dir;
        train_config_json(a->tf, cj, true);
        cj["dump-anchors"] = a->dump_anchors;
        cj["provenance"] = provenance_json(prov, keys);
        if (!gf.config.is_null()) cj["parent"] = gf.config;

        dream::io::write_file(metrics_path, dream::io::metrics_csv(res.trace));
        dream::io::write_file(checkpoint_path, dream::io::checkpoint_to_json(res.best_params, cj));

        json summary;
        summary["method"] = to_string(cfg.variant);
        summary["final_test_acc"] = res.final_test_acc;
        summary["final_loss"] = res.final_loss;
        summary["bestval_test_acc"] = res.bestval_test_acc;
        summary["best_val_acc"] = res.best_val_acc;
        summary["best_epoch"] = res.best_epoch;
        summary["epochs"] = cfg.epochs;
        summary["prob_clamp_events"] = res.clamp_count;
        summary["empty_anchor_unions"] = res.empty_unions;
        summary["artifacts"] = {{"metrics", "metrics.csv"}, {"checkpoint", "checkpoint.json"}};
        summary["config"] = cj;
        dream::io::write_file(summary_path, summary.dump(2) + "\n");

        if (res.empty_unions > 0)
            std::cerr << "warning: " << res.empty_unions
                      << " empty anchor unions (those nodes got weight 0)\n";
        std::printf("final_test_acc=%.6f bestval_test_acc=%.6f best_epoch=%d\n",
                    res.final_test_acc, res.bestval_test_acc, res.best_epoch);
    });
}

struct EvalArgs {
    std::string in, checkpoint, mask = "test";
};

void setup_eval(CLI::App& app, std::shared_ptr<EvalArgs> a) {
    CLI::App* sub = app.add_subcommand("eval", "score a saved checkpoint on one mask");
    sub->add_option("-i,--in", a->in, "input graph JSON")->required();
    sub->add_option("--checkpoint", a->checkpoint, "checkpoint JSON from train")->required();
    sub->add_option("--mask", a->mask, "train | val | test (test scores against clean labels)")
        ->check(CLI::IsMember({"train", "val", "test"}));

    sub->callback([a] {
        const dream::io::GraphFile gf = dream::io::load_dataset(a->in);
        const dream::ModelParams params =
            dream::io::checkpoint_from_json(dream::io::read_file(a->checkpoint));
        if (params.w1.rows != gf.ds.graph.features.cols)
            throw dream::DataError("checkpoint input width " + std::to_string(params.w1.rows) +
                                   " does not match graph feature width " +
                                   std::to_string(gf.ds.graph.features.cols));
        const dream::NormalizedAdjacency adj = dream::normalize_adjacency(gf.ds.graph);
        const std::vector<std::uint8_t>& mask = a->mask == "train" ? gf.ds.train_mask
                                               : a->mask == "val"  ? gf.ds.val_mask
                                                                   : gf.ds.test_mask;
        if (mask.empty()) throw dream::DataError("graph has no " + a->mask + " mask");
        // Test accuracy is measured against uncorrupted labels; train/val see
        // whatever labels a corrupt pass left behind.
        std::vector<int> labels = gf.ds.labels;
        if (a->mask == "test" && !gf.ds.labels_clean.empty()) labels = gf.ds.labels_clean;
        const double acc =
            dream::evaluate(params, adj, gf.ds.graph.features, labels, mask);
        std::printf("%s_acc=%.6f n=%zu\n", a->mask.c_str(), acc,
                    gf.ds.mask_nodes(mask).size());
    });
}

struct SweepArgs {
    TrainFlags tf;
    std::string in, out, kinds = "uniform", rates = "0,0.1,0.2,0.3,0.4,0.5",
                         seeds = "1,2,3,4,5", methods = "full,baseline", config_path;
    long long jobs = 1;
    bool force = false;
};

void setup_sweep(CLI::App& app, std::shared_ptr<SweepArgs> a) {
    CLI::App* sub =
        app.add_subcommand("sweep", "noise kind x rate x seed grid, full vs baseline");
    sub->add_option("-i,--in", a->in, "input graph JSON (clean labels)")->required();
    sub->add_option("-o,--out", a->out, "output CSV path")->required();
    sub->add_option("--kinds", a->kinds, "comma list of noise kinds");
    sub->add_option("--rates", a->rates, "comma list of corruption rates");
    sub->add_option("--seeds", a->seeds, "comma list of seeds");
    sub->add_option("--methods", a->methods, "comma list of methods (variants)");
    sub->add_option("--jobs", a->jobs, "cells trained in parallel");
    add_train_flags(sub, a->tf, /*with_seed_and_variant=*/false);
    sub->add_flag("--force", a->force, "overwrite an existing output file");
    sub->add_option("--config", a->config_path, "key=value config file");

    sub->callback([sub, a] {
        std::vector<Key> keys;
        keys.push_back({"in", [a](const std::string& v) { a->in = v; }});
        keys.push_back({"out", [a](const std::string& v) { a->out = v; }});
        keys.push_back({"kinds", [a](const std::string& v) { a->kinds = v; }});
        keys.push_back({"rates", [a](const std::string& v) { a->rates = v; }});
        keys.push_back({"seeds", [a](const std::string& v) { a->seeds = v; }});
        keys.push_back({"methods", [a](const std::string& v) { a->methods = v; }});
        keys.push_back({"jobs", [a](const std::string& v) { a->jobs = parse_ll("jobs", v); }});
        train_keys(a->tf, keys, false);
        const auto prov = resolve_config(sub, a->config_path, keys);

        dream::SweepSpec spec;
        spec.kinds.clear();
        for (const auto& k : split_csv("kinds", a->kinds))
            spec.kinds.push_back(dream::noise_kind_from_string(k));
        spec.rates.clear();
        for (const auto& r : split_csv("rates", a->rates))
            spec.rates.push_back(parse_d("rates", r));
        spec.seeds.clear();
        for (const auto& s : split_csv("seeds", a->seeds))
            spec.seeds.push_back(parse_u64("seeds", s));
        spec.methods.clear();
        for (const auto& m : split_csv("methods", a->methods))
            spec.methods.push_back(dream::variant_from_string(m));
        spec.jobs = static_cast<int>(a->jobs);

        refuse_overwrite(a->out, a->force);
        const std::string run_path = a->out + ".run.json";
        refuse_overwrite(run_path, a->force);

        const dream::io::GraphFile gf = dream::io::load_dataset(a->in);
        const dream::TrainConfig base = to_train_config(a->tf);
        const std::vector<dream::SweepCell> cells = dream::sweep(gf.ds, spec, base);
        dream::io::write_file(a->out, dream::io::sweep_csv(cells));

        json cj;
        cj["command"] = "sweep";
        cj["in"] = a->in;
        cj["out"] = a->out;
        cj["kinds"] = a->kinds;
        cj["rates"] = a->rates;
        cj["seeds"] = a->seeds;
        cj["methods"] = a->methods;
        cj["jobs"] = a->jobs;
        train_config_json(a->tf, cj, false);
        cj["provenance"] = provenance_json(prov, keys);
        if (!gf.config.is_null()) cj["parent"] = gf.config;
        json run;
        run["config"] = cj;
        long failed = 0;
        for (const auto& c : cells)
            if (c.failed) failed++;
        run["cells"] = static_cast<long long>(cells.size());
        run["failed_cells"] = failed;
        dream::io::write_file(run_path, run.dump(2) + "\n");

        for (const auto& c : cells)
            if (c.failed)
                std::cerr << "warning: cell (" << to_string(c.kind) << "," << c.rate << ","
                          << c.seed << "," << c.method << ") failed: " << c.error << "\n";
        std::cerr << "wrote " << a->out << " (" << cells.size() << " cells, " << failed
                  << " failed)\n";
    });
}

struct AblateArgs {
    TrainFlags tf;
    std::string in, out, kind = "uniform", seeds = "1,2,3,4,5", config_path;
    std::string variants =
        "full,v1_no_topo,v2_no_prox,v3_no_temp,v4_global_pool,v5_union_pool,baseline";
    double rate = 0.30;
    long long jobs = 1;
    bool force = false;
};

void setup_ablate(CLI::App& app, std::shared_ptr<AblateArgs> a) {
    CLI::App* sub = app.add_subcommand("ablate", "variant x seed grid at one fixed corruption");
    sub->add_option("-i,--in", a->in, "input graph JSON (clean labels)")->required();
    sub->add_option("-o,--out", a->out, "output CSV path")->required();
    sub->add_option("--kind", a->kind, "noise kind");
    sub->add_option("--rate", a->rate, "corruption probability");
    sub->add_option("--seeds", a->seeds, "comma list of seeds");
    sub->add_option("--variants", a->variants, "comma list of variants");
    sub->add_option("--jobs", a->jobs, "cells trained in parallel");
    add_train_flags(sub, a->tf, /*with_seed_and_variant=*/false);
    sub->add_flag("--force", a->force, "overwrite an existing output file");
    sub->add_option("--config", a->config_path, "key=value config file");

    sub->callback([sub, a] {
        std::vector<Key> keys;
        keys.push_back({"in", [a](const std::string& v) { a->in = v; }});
        keys.push_back({"out", [a](const std::string& v) { a->out = v; }});
        keys.push_back({"kind", [a](const std::string& v) { a->kind = v; }});
        keys.push_back({"rate", [a](const std::string& v) { a->rate = parse_d("rate", v); }});
        keys.push_back({"seeds", [a](const std::string& v) { a->seeds = v; }});
        keys.push_back({"variants", [a](const std::string& v) { a->variants = v; }});
        keys.push_back({"jobs", [a](const std::string& v) { a->jobs = parse_ll("jobs", v); }});
        train_keys(a->tf, keys, false);
        const auto prov = resolve_config(sub, a->config_path, keys);

        std::vector<dream::Variant> variants;
        for (const auto& v : split_csv("variants", a->variants))
            variants.push_back(dream::variant_from_string(v));
        std::vector<std::uint64_t> seeds;
        for (const auto& s : split_csv("seeds", a->seeds))
            seeds.push_back(parse_u64("seeds", s));

        refuse_overwrite(a->out, a->force);
        const std::string run_path = a->out + ".run.json";
        refuse_overwrite(run_path, a->force);

        const dream::io::GraphFile gf = dream::io::load_dataset(a->in);
        const dream::NoiseSpec noise{dream::noise_kind_from_string(a->kind), a->rate, 0};
        const dream::TrainConfig base = to_train_config(a->tf);
        const std::vector<dream::AblationCell> cells =
            dream::ablate(gf.ds, noise, variants, seeds, base, static_cast<int>(a->jobs));
        dream::io::write_file(a->out, dream::io::ablation_csv(cells, noise));

        json cj;
        cj["command"] = "ablate";
        cj["in"] = a->in;
        cj["out"] = a->out;
        cj["kind"] = a->kind;
        cj["rate"] = a->rate;
        cj["seeds"] = a->seeds;
        cj["variants"] = a->variants;
        cj["jobs"] = a->jobs;
        train_config_json(a->tf, cj, false);
        cj["provenance"] = provenance_json(prov, keys);
        if (!gf.config.is_null()) cj["parent"] = gf.config;
        json run;
        run["config"] = cj;
        run["cells"] = static_cast<long long>(cells.size());
        dream::io::write_file(run_path, run.dump(2) + "\n");
        std::cerr << "wrote " << a->out << " (" << cells.size() << " cells)\n";
    });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"semantic-homogeneity reweighted GCN training under label noise"};
    app.require_subcommand(1);

    auto synth_args = std::make_shared<SynthArgs>();
    auto corrupt_args = std::make_shared<CorruptArgs>();
    auto train_args = std::make_shared<TrainArgs>();
    auto eval_args = std::make_shared<EvalArgs>();
    auto sweep_args = std::make_shared<SweepArgs>();
    auto ablate_args = std::make_shared<AblateArgs>();
    setup_synth(app, synth_args);
    setup_corrupt(app, corrupt_args);
    setup_train(app, train_args);
    setup_eval(app, eval_args);
    setup_sweep(app, sweep_args);
    setup_ablate(app, ablate_args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);  // prints help or the parse error
        return code == 0 ? 0 : 2;
    } catch (const dream::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const dream::DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const dream::NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
