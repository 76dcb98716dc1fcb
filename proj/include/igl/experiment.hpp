#pragma once

// Experiment runner: config, per-seed orchestration, and report files.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "igl/analysis.hpp"
#include "igl/baselines.hpp"
#include "igl/config.hpp"
#include "igl/core.hpp"
#include "igl/e2g.hpp"
#include "igl/envs.hpp"
#include "igl/idx.hpp"
#include "igl/models.hpp"
#include "igl/objective.hpp"

namespace igl {

inline constexpr const char* kVersion = "0.1.0";

struct MnistPaths {
    std::string train_images, train_labels, test_images, test_labels;
    bool configured() const { return !train_images.empty() || !train_labels.empty(); }
};

struct ExperimentConfig {
    std::string name;  // table.csv row label; defaults to algo
    std::string env = "blob";
    std::string algo = "igl-batch";
    std::vector<std::uint64_t> seeds{1};
    std::size_t samples = 60000;  // batch algorithms
    std::string out_dir = "runs";
    MnistPaths mnist;
    int shift_radius = 0;
    std::uint64_t blob_geometry_seed = kDefaultBlobGeometrySeed;
    std::size_t blob_contexts = 60000;
    std::size_t blob_feedback = 100000;
    std::size_t test_size = 10000;
    std::size_t eval_mc = 10000;
    OptConfig opt;
    E2GConfig e2g;
    KMeansOptions kmeans;

    std::string label() const { return name.empty() ? algo : name; }

    void validate() const {
        static const std::vector<std::string> algos{"sup", "cb", "cb-online", "igl-batch", "e2g", "cb-kmeans"};
        if (std::find(algos.begin(), algos.end(), algo) == algos.end())
            throw ValidationError("unknown algo '" + algo + "'");
        if (seeds.empty()) throw ValidationError("at least one seed is required");
        if (shift_radius < 0) throw ValidationError("shift_radius must be >= 0");
        const bool known_env = env == "blob" || env == "mnist" || env == "env1" || env == "env2" || env == "tab2x3" ||
                               env.rfind("family:", 0) == 0 || env.rfind("tabular:", 0) == 0;
        if (!known_env) throw ValidationError("unknown env '" + env + "'");
        if (env.rfind("family:", 0) == 0) {
            const auto m = detail::parse_u64(env.substr(7), "env");
            if (m > 9) throw ValidationError("family member must be in 0..9");
        }
        if (mnist.configured() && (mnist.train_images.empty() || mnist.train_labels.empty()))
            throw ValidationError("mnist.train_images and mnist.train_labels must be given together");
        if (!mnist.test_images.empty() != !mnist.test_labels.empty())
            throw ValidationError("mnist.test_images and mnist.test_labels must be given together");
        opt.validate();
        E2GConfig e = e2g;
        e.total_rounds = std::max<std::uint64_t>(1, e.total_rounds);  // rounds = 0 yields an empty run
        e.validate();
    }
};

inline ExperimentConfig experiment_config_from(KeyValueFile& kv) {
    ExperimentConfig c;
    if (auto v = kv.get_string("name")) c.name = *v;
    if (auto v = kv.get_string("env")) c.env = *v;
    if (auto v = kv.get_string("algo")) c.algo = *v;
    if (auto v = kv.get_u64_list("seeds")) c.seeds = *v;
    if (auto v = kv.get_u64("samples")) c.samples = static_cast<std::size_t>(*v);
    if (auto v = kv.get_u64("rounds")) c.e2g.total_rounds = *v;
    if (auto v = kv.get_string("out")) c.out_dir = *v;
    if (auto v = kv.get_u64("shift_radius")) c.shift_radius = static_cast<int>(*v);
    if (auto v = kv.get_u64("test_size")) c.test_size = static_cast<std::size_t>(*v);
    if (auto v = kv.get_u64("eval_mc")) c.eval_mc = static_cast<std::size_t>(*v);
    if (auto v = kv.get_string("mnist.train_images")) c.mnist.train_images = *v;
    if (auto v = kv.get_string("mnist.train_labels")) c.mnist.train_labels = *v;
    if (auto v = kv.get_string("mnist.test_images")) c.mnist.test_images = *v;
    if (auto v = kv.get_string("mnist.test_labels")) c.mnist.test_labels = *v;
    if (auto v = kv.get_u64("blob.geometry_seed")) c.blob_geometry_seed = *v;
    if (auto v = kv.get_u64("blob.contexts")) c.blob_contexts = static_cast<std::size_t>(*v);
    if (auto v = kv.get_u64("blob.feedback")) c.blob_feedback = static_cast<std::size_t>(*v);

    if (auto v = kv.get_double("opt.step_size")) c.opt.step_size = *v;
    if (auto v = kv.get_double("opt.momentum")) c.opt.momentum = *v;
    if (auto v = kv.get_u64("opt.minibatch")) c.opt.minibatch = static_cast<std::size_t>(*v);
    if (auto v = kv.get_u64("opt.epochs")) c.opt.epochs = static_cast<std::size_t>(*v);
    if (auto v = kv.get_u64("opt.max_steps")) c.opt.max_steps = static_cast<std::size_t>(*v);
    if (auto v = kv.get_double("opt.restart_threshold")) c.opt.restart_threshold = *v;
    if (auto v = kv.get_u64("opt.max_restarts")) c.opt.max_restarts = static_cast<std::size_t>(*v);
    if (auto v = kv.get_double("opt.init_scale")) c.opt.init_scale = *v;
    if (auto v = kv.get_bool("opt.sign_corrector")) c.opt.sign_corrector = *v;
    if (auto v = kv.get_bool("opt.corrector_each_epoch")) c.opt.corrector_each_epoch = *v;

    if (auto v = kv.get_double("e2g.eta")) c.e2g.eta = *v;
    if (auto v = kv.get_double("e2g.iota")) c.e2g.iota = *v;
    if (auto v = kv.get_u64("e2g.warmup")) c.e2g.warmup_override = *v;
    if (auto v = kv.get_u64("e2g.max_steps")) c.e2g.max_steps = *v;
    if (auto v = kv.get_u64("e2g.update_every")) c.e2g.update_every = *v;
    if (auto v = kv.get_u64("e2g.refit_epochs")) c.e2g.refit_epochs = static_cast<std::size_t>(*v);
    if (auto v = kv.get_bool("e2g.data_driven_warmup")) c.e2g.data_driven_warmup = *v;
    if (auto v = kv.get_double("e2g.v_bad_bound")) c.e2g.v_bad_bound = *v;

    if (auto v = kv.get_u64("kmeans.n_init")) c.kmeans.n_init = static_cast<std::size_t>(*v);
    if (auto v = kv.get_u64("kmeans.max_iter")) c.kmeans.max_iter = static_cast<std::size_t>(*v);
    kv.require_all_consumed();
    return c;
}

inline ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    auto kv = KeyValueFile::load(path);
    return experiment_config_from(kv);
}

/// IGL_SEED=<n> replaces the configured seed list with {n}.
inline void apply_env_overrides(ExperimentConfig& cfg) {
    if (const char* s = std::getenv("IGL_SEED"); s != nullptr && *s != '\0')
        cfg.seeds = {detail::parse_u64(s, "IGL_SEED")};
}

inline nlohmann::ordered_json to_json(const ExperimentConfig& c) {
    nlohmann::ordered_json j;
    j["name"] = c.label();
    j["env"] = c.env;
    j["algo"] = c.algo;
    j["seeds"] = c.seeds;
    j["samples"] = c.samples;
    j["shift_radius"] = c.shift_radius;
    j["test_size"] = c.test_size;
    j["eval_mc"] = c.eval_mc;
    j["mnist"] = {{"train_images", c.mnist.train_images},
                  {"train_labels", c.mnist.train_labels},
                  {"test_images", c.mnist.test_images},
                  {"test_labels", c.mnist.test_labels}};
    j["blob"] = {{"geometry_seed", c.blob_geometry_seed}, {"contexts", c.blob_contexts}, {"feedback", c.blob_feedback}};
    nlohmann::ordered_json o;
    o["step_size"] = c.opt.step_size;
    o["momentum"] = c.opt.momentum;
    o["minibatch"] = c.opt.minibatch;
    o["epochs"] = c.opt.epochs;
    o["max_steps"] = c.opt.max_steps;
    o["restart_threshold"] = c.opt.restart_threshold ? nlohmann::ordered_json(*c.opt.restart_threshold) : nullptr;
    o["max_restarts"] = c.opt.max_restarts;
    o["init_scale"] = c.opt.init_scale;
    o["sign_corrector"] = c.opt.sign_corrector;
    o["corrector_each_epoch"] = c.opt.corrector_each_epoch;
    j["opt"] = o;
    nlohmann::ordered_json e;
    e["eta"] = c.e2g.eta;
    e["iota"] = c.e2g.iota;
    e["warmup"] = c.e2g.warmup_override ? nlohmann::ordered_json(*c.e2g.warmup_override) : nullptr;
    e["rounds"] = c.e2g.total_rounds;
    e["max_steps"] = c.e2g.max_steps ? nlohmann::ordered_json(*c.e2g.max_steps) : nullptr;
    e["update_every"] = c.e2g.update_every;
    e["refit_epochs"] = c.e2g.refit_epochs;
    e["data_driven_warmup"] = c.e2g.data_driven_warmup;
    e["v_bad_bound"] = c.e2g.v_bad_bound ? nlohmann::ordered_json(*c.e2g.v_bad_bound) : nullptr;
    j["e2g"] = e;
    j["kmeans"] = {{"n_init", c.kmeans.n_init}, {"max_iter", c.kmeans.max_iter}};
    return j;
}

// ---------------------------------------------------------------------------
// Environments
// ---------------------------------------------------------------------------

struct ImageData {
    std::shared_ptr<const LabeledDataset> contexts;
    std::shared_ptr<const LabeledDataset> feedback;
    std::shared_ptr<const LabeledDataset> test;
    std::string source;  // "mnist" or "blob"
};

inline ImageData load_mnist_data(const MnistPaths& p) {
    ImageData d;
    auto train = std::make_shared<const LabeledDataset>(load_idx(p.train_images, p.train_labels));
    d.contexts = train;
    d.feedback = train;
    d.test = p.test_images.empty() ? train
                                   : std::make_shared<const LabeledDataset>(load_idx(p.test_images, p.test_labels));
    d.source = "mnist";
    return d;
}

inline ImageData make_blob_data(const ExperimentConfig& cfg, std::uint64_t seed) {
    const auto g = make_blob_geometry(cfg.blob_geometry_seed);
    RngStream root(seed, detail::fnv1a("data"));
    RngStream rc = fork_rng(root, "contexts"), rf = fork_rng(root, "feedback"), rt = fork_rng(root, "test");
    ImageData d;
    d.contexts = std::make_shared<const LabeledDataset>(make_blob_digits(g, cfg.blob_contexts, rc));
    d.feedback = std::make_shared<const LabeledDataset>(make_blob_digits(g, cfg.blob_feedback, rf));
    d.test = std::make_shared<const LabeledDataset>(make_blob_digits(g, cfg.test_size, rt));
    d.source = "blob";
    return d;
}

struct BuiltEnv {
    std::unique_ptr<Environment> env;
    std::shared_ptr<const LabeledDataset> test;  // null on tabular envs
    std::string source;
};

inline bool is_tabular_env(const std::string& env) { return env == "tab2x3" || env.rfind("tabular:", 0) == 0; }

inline BuiltEnv build_env(const ExperimentConfig& cfg, std::uint64_t seed, const std::optional<ImageData>& mnist) {
    BuiltEnv b;
    if (cfg.env == "tab2x3") {
        b.env = make_tabular_env(tab_2x3());
        b.source = "tabular";
        return b;
    }
    if (cfg.env.rfind("tabular:", 0) == 0) {
        b.env = make_tabular_env(load_tabular_spec(cfg.env.substr(8)));
        b.source = "tabular";
        return b;
    }
    const ImageData data = mnist ? *mnist : make_blob_data(cfg, seed);
    b.test = data.test;
    b.source = data.source;
    if (cfg.env == "blob" || cfg.env == "mnist") {
        b.env = make_mnist_env(data.contexts, *data.feedback, cfg.shift_radius);
    } else if (cfg.env == "env1") {
        b.env = make_ambiguity_env(AmbiguityVariant::env1(), data.contexts, *data.feedback, cfg.shift_radius);
    } else if (cfg.env == "env2") {
        b.env = make_ambiguity_env(AmbiguityVariant::env2(), data.contexts, *data.feedback, cfg.shift_radius);
    } else {
        const int m = static_cast<int>(detail::parse_u64(cfg.env.substr(7), "env"));
        b.env = make_ambiguity_env(AmbiguityVariant::family(m), data.contexts, *data.feedback, cfg.shift_radius);
    }
    return b;
}

// ---------------------------------------------------------------------------
// Runs
// ---------------------------------------------------------------------------

struct SeedSummary {
    std::uint64_t seed = 0;
    bool ok = true;
    std::string error;
    double accuracy = 0.0;     // percent; tabular envs report 100 * V(greedy)
    double final_value = 0.0;  // oracle V of the greedy policy
    double final_regret = 0.0;
    std::uint32_t restarts = 0;
    bool restart_exhausted = false;
    std::uint64_t interactions = 0;
    std::optional<double> indicator;
    double seconds = 0.0;  // timing.json only
};

struct RunManifest {
    nlohmann::ordered_json config;
    std::string version = kVersion;
    std::string data_source;
    std::vector<SeedSummary> seeds;
    std::size_t n_ok = 0;
    std::optional<double> mean, std;
    double wall_clock_seconds = 0.0;
};

struct ExperimentOutput {
    RunManifest manifest;
    std::vector<RunRecord> records;  // aligned with manifest.seeds
};

inline double greedy_value(const EnvOracle& oracle, const LinearSoftmaxPolicy& pi, std::size_t n_mc, RngStream& rng) {
    return oracle_value(oracle, pi, n_mc, rng, PolicyMode::greedy);
}

/// One seed of `cfg`. Throws on any failure; run_experiment records it.
inline RunRecord run_seed(const ExperimentConfig& cfg, std::uint64_t seed, const std::optional<ImageData>& mnist,
                          SeedSummary& out, std::string& source) {
    auto built = build_env(cfg, seed, mnist);
    source = built.source;
    Environment& env = *built.env;
    const EnvOracle oracle(env);
    const std::size_t k = env.k_actions();

    OptConfig opt = cfg.opt;
    opt.seed = RngStream(seed, detail::fnv1a("opt"));
    RngStream rng(seed, detail::fnv1a("run"));
    RngStream eval_rng(seed, detail::fnv1a("eval"));

    PolicyEvaluator evaluate = [&](const LinearSoftmaxPolicy& pi) {
        if (built.test) return policy_accuracy(pi, *built.test);
        return 100.0 * exact_value(*oracle.tabular(), tabulate_greedy(*oracle.tabular(), pi));
    };

    RunRecord rec;
    std::optional<LinearSoftmaxPolicy> policy;
    const bool online = cfg.algo == "e2g" || cfg.algo == "cb-online";
    const bool empty_run = online ? cfg.e2g.total_rounds == 0 : cfg.samples == 0;

    if (empty_run) {
        // nothing to learn from
    } else if (cfg.algo == "sup") {
        RngStream srng = fork_rng(rng, "sup");
        std::vector<FeatureVector> xs;
        std::vector<int> labels;
        xs.reserve(cfg.samples);
        labels.reserve(cfg.samples);
        for (std::size_t i = 0; i < cfg.samples; ++i) {
            auto ctx = env.sample_context(srng);
            std::size_t best = 0;
            for (std::size_t a = 1; a < k; ++a)
                if (oracle.reward_prob(ctx, a) > oracle.reward_prob(ctx, best)) best = a;
            xs.push_back(ctx.features());
            labels.push_back(static_cast<int>(best));
        }
        policy = train_supervised(xs, labels, k, opt);
    } else if (cfg.algo == "cb") {
        auto batch = collect_uniform(env, cfg.samples, rng);
        auto fit = train_cb(batch.log, batch.rewards, opt);
        rec = std::move(batch.record);
        rec.restarts = fit.restarts_used;
        rec.restart_exhausted = fit.exhausted;
        out.indicator = fit.indicator;
        policy = std::move(fit.policy);
    } else if (cfg.algo == "igl-batch") {
        auto batch = collect_uniform(env, cfg.samples, rng);
        auto fit = train_with_restarts(batch.log, opt);
        rec = std::move(batch.record);
        rec.restarts = fit.restarts_used;
        rec.restart_exhausted = fit.exhausted;
        out.indicator = fit.indicator;
        policy = std::move(fit.policy);
    } else if (cfg.algo == "cb-kmeans") {
        CbKMeansConfig kc;
        kc.samples = cfg.samples;
        kc.opt = opt;
        kc.kmeans = cfg.kmeans;
        auto res = run_cb_with_kmeans(env, kc, rng);
        rec = std::move(res.record);
        out.indicator = res.fit.indicator;
        policy = std::move(res.policy);
    } else {
        E2GConfig ec = cfg.e2g;
        ec.k_actions = k;
        ec.opt = opt;
        if (cfg.algo == "e2g") {
            auto res = run_e2g(env, ec, rng, evaluate);
            rec = std::move(res.record);
            policy = std::move(res.policy);
        } else {
            auto res = run_cb(env, ec, rng, evaluate);
            rec = std::move(res.record);
            policy = std::move(res.policy);
        }
        for (auto it = rec.entries.rbegin(); it != rec.entries.rend(); ++it)
            if (it->indicator) {
                out.indicator = it->indicator;
                break;
            }
    }

    rec.v_star = oracle.tabular() ? optimal_value(*oracle.tabular()) : 1.0;
    if (policy) {
        rec.final_accuracy = evaluate(*policy);
        rec.final_value = greedy_value(oracle, *policy, cfg.eval_mc, eval_rng);
        if (!online) rec.evals.push_back({rec.entries.size(), rec.final_accuracy});
    }
    out.accuracy = rec.final_accuracy;
    out.final_value = rec.final_value;
    const auto regret = rec.cumulative_regret();
    out.final_regret = regret.empty() ? 0.0 : regret.back();
    out.restarts = rec.restarts;
    out.restart_exhausted = rec.restart_exhausted;
    out.interactions = rec.entries.size();
    return rec;
}

inline ExperimentOutput run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentOutput res;
    res.manifest.config = to_json(cfg);

    std::optional<ImageData> mnist;
    std::string mnist_error;
    const bool image_env = !is_tabular_env(cfg.env);
    if (image_env && cfg.mnist.configured()) {
        try {
            mnist = load_mnist_data(cfg.mnist);
        } catch (const std::exception& e) {
            mnist_error = e.what();
        }
    }

    for (std::uint64_t seed : cfg.seeds) {
        SeedSummary s;
        s.seed = seed;
        RunRecord rec;
        const auto ts = std::chrono::steady_clock::now();
        try {
            if (!mnist_error.empty()) throw DataError(mnist_error);
            std::string source;
            rec = run_seed(cfg, seed, mnist, s, source);
            res.manifest.data_source = source;
        } catch (const std::exception& e) {
            s = SeedSummary{};
            s.seed = seed;
            s.ok = false;
            s.error = e.what();
            rec = RunRecord{};
        }
        s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - ts).count();
        res.manifest.seeds.push_back(s);
        res.records.push_back(std::move(rec));
    }

    std::vector<double> acc;
    for (const auto& s : res.manifest.seeds)
        if (s.ok) acc.push_back(s.accuracy);
    res.manifest.n_ok = acc.size();
    if (!acc.empty()) {
        double m = 0.0;
        for (double a : acc) m += a;
        m /= static_cast<double>(acc.size());
        double v = 0.0;
        for (double a : acc) v += (a - m) * (a - m);
        res.manifest.mean = m;
        res.manifest.std = acc.size() > 1 ? std::sqrt(v / static_cast<double>(acc.size() - 1)) : 0.0;
    }
    res.manifest.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

/// Shortest round-trip decimal form.
inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0";
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open " + path.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw DataError("write failed: " + path.string());
}

inline nlohmann::ordered_json to_json(const RunManifest& m) {
    nlohmann::ordered_json j;
    j["artifact"] = "igl";
    j["version"] = m.version;
    j["data_source"] = m.data_source;
    j["config"] = m.config;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& s : m.seeds) {
        nlohmann::ordered_json r;
        r["seed"] = s.seed;
        r["status"] = s.ok ? "ok" : "error";
        r["error"] = s.ok ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(s.error);
        r["accuracy"] = s.accuracy;
        r["final_value"] = s.final_value;
        r["final_regret"] = s.final_regret;
        r["restarts"] = s.restarts;
        r["restart_exhausted"] = s.restart_exhausted;
        r["interactions"] = s.interactions;
        r["indicator"] = s.indicator ? nlohmann::ordered_json(*s.indicator) : nullptr;
        rows.push_back(r);
    }
    j["seeds"] = rows;
    j["aggregate"] = {{"metric", "accuracy"},
                      {"n_ok", m.n_ok},
                      {"mean", m.mean ? nlohmann::ordered_json(*m.mean) : nullptr},
                      {"std", m.std ? nlohmann::ordered_json(*m.std) : nullptr}};
    return j;
}

inline std::string run_csv(const RunRecord& rec) {
    std::ostringstream os;
    os << "round,mode,action,reward,cum_regret,indicator\n";
    double acc = 0.0;
    for (const auto& e : rec.entries) {
        acc += rec.v_star - static_cast<double>(e.oracle_reward);
        os << e.round << ',' << to_string(e.mode) << ',' << e.action << ',' << e.oracle_reward << ','
           << format_number(acc) << ',';
        if (e.indicator) os << format_number(*e.indicator);
        os << '\n';
    }
    return os.str();
}

inline std::string table_csv(const std::string& algo, const RunManifest& m) {
    std::string s = "algo,mean,std\n" + algo + ",";
    if (m.mean) s += format_number(*m.mean);
    s += ",";
    if (m.std) s += format_number(*m.std);
    return s + "\n";
}

/// Interaction index t against the seed-mean cumulative regret and the
/// seed-mean of the latest accuracy evaluation. At most ~max_rows rows.
inline std::string curves_csv(const std::vector<RunRecord>& records, std::size_t max_rows = 1000) {
    std::size_t len = 0;
    for (const auto& r : records) len = std::max(len, r.entries.size());
    std::ostringstream os;
    os << "round,mean_cum_regret,mean_accuracy\n";
    if (len == 0) return os.str();
    const std::size_t stride = std::max<std::size_t>(1, (len + max_rows - 1) / max_rows);
    std::vector<std::vector<double>> regret;
    for (const auto& r : records) regret.push_back(r.cumulative_regret());
    std::vector<std::size_t> eval_pos(records.size(), 0);
    for (std::size_t t = stride; ; t += stride) {
        if (t > len) t = len;
        double rs = 0.0, as = 0.0;
        std::size_t rn = 0, an = 0;
        for (std::size_t s = 0; s < records.size(); ++s) {
            const auto& rec = records[s];
            if (rec.entries.size() < t) continue;
            rs += regret[s][t - 1];
            ++rn;
            const auto round = rec.entries[t - 1].round;
            auto& p = eval_pos[s];
            while (p < rec.evals.size() && rec.evals[p].round <= round) ++p;
            if (p > 0) {
                as += rec.evals[p - 1].accuracy;
                ++an;
            }
        }
        os << t << ',' << format_number(rs / static_cast<double>(rn)) << ',';
        if (an > 0) os << format_number(as / static_cast<double>(an));
        os << '\n';
        if (t == len) break;
    }
    return os.str();
}

/// summary.json, run_<seed>.csv per seed, table.csv, curves.csv, timing.json.
inline void write_report(const RunManifest& manifest, const std::vector<RunRecord>& records,
                         const std::filesystem::path& out_dir) {
    if (records.size() != manifest.seeds.size()) throw ValidationError("write_report: one record per seed required");
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw DataError("cannot create " + out_dir.string() + ": " + ec.message());
    write_text_file(out_dir / "summary.json", to_json(manifest).dump(2) + "\n");
    for (std::size_t i = 0; i < records.size(); ++i)
        write_text_file(out_dir / ("run_" + std::to_string(manifest.seeds[i].seed) + ".csv"), run_csv(records[i]));
    const std::string algo = manifest.config.contains("name") ? manifest.config["name"].get<std::string>() : "run";
    write_text_file(out_dir / "table.csv", table_csv(algo, manifest));
    std::vector<RunRecord> ok;
    for (std::size_t i = 0; i < records.size(); ++i)
        if (manifest.seeds[i].ok) ok.push_back(records[i]);
    write_text_file(out_dir / "curves.csv", curves_csv(ok));
    nlohmann::ordered_json t;
    t["wall_clock_seconds"] = manifest.wall_clock_seconds;
    nlohmann::ordered_json per = nlohmann::ordered_json::array();
    for (const auto& s : manifest.seeds) per.push_back({{"seed", s.seed}, {"seconds", s.seconds}});
    t["per_seed"] = per;
    write_text_file(out_dir / "timing.json", t.dump(2) + "\n");
}

}  // namespace igl
