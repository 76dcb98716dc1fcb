#pragma once

// Comparison arms: supervised logistic regression, contextual bandits with the
// true reward, and a CB learner fed by an imbalanced 2-means reward decoder.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "igl/core.hpp"
#include "igl/e2g.hpp"
#include "igl/envs.hpp"
#include "igl/models.hpp"
#include "igl/objective.hpp"

namespace igl {

// ---------------------------------------------------------------------------
// Supervised
// ---------------------------------------------------------------------------

/// Multinomial logistic regression by minibatch momentum descent on cross-entropy.
inline LinearSoftmaxPolicy train_supervised(std::span<const FeatureVector> contexts, std::span<const int> labels,
                                            std::size_t k, const OptConfig& cfg) {
    cfg.validate();
    if (contexts.size() != labels.size()) throw DimensionError("train_supervised: contexts and labels differ in length");
    if (contexts.empty()) throw ValidationError("train_supervised: no data");
    for (int l : labels)
        if (l < 0 || static_cast<std::size_t>(l) >= k)
            throw RangeError("train_supervised: label " + std::to_string(l) + " outside [0, " + std::to_string(k) + ")");
    const std::size_t d = contexts.front().size();
    RngStream rng = fork_rng(cfg.seed, "supervised");
    RngStream init_rng = fork_rng(cfg.seed, "init");
    auto policy = make_policy(k, d, init_rng, cfg.init_scale);

    std::vector<double> gw(policy.weights.size()), gb(k), vw(gw.size(), 0.0), vb(k, 0.0), p(k);
    std::vector<std::size_t> order(contexts.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::size_t steps = 0;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t start = 0; start < order.size(); start += cfg.minibatch) {
            if (cfg.max_steps > 0 && steps >= cfg.max_steps) break;
            const std::size_t len = std::min(cfg.minibatch, order.size() - start);
            std::fill(gw.begin(), gw.end(), 0.0);
            std::fill(gb.begin(), gb.end(), 0.0);
            const double inv = 1.0 / static_cast<double>(len);
            for (std::size_t t = 0; t < len; ++t) {
                const std::size_t i = order[start + t];
                const auto& x = contexts[i];
                policy_probs(policy, x, p);
                for (std::size_t a = 0; a < k; ++a) {
                    // d(-log p_label)/dz_a = (p_a - 1[a = label]) / temperature
                    const double dz = (p[a] - (static_cast<int>(a) == labels[i] ? 1.0 : 0.0)) * inv / policy.temperature;
                    double* g = gw.data() + a * d;
                    for (std::size_t j = 0; j < d; ++j) g[j] += dz * x[j];
                    gb[a] += dz;
                }
            }
            if (!all_finite(gw) || !all_finite(gb)) throw NumericError("train_supervised: non-finite gradient");
            for (std::size_t j = 0; j < gw.size(); ++j) {
                vw[j] = cfg.momentum * vw[j] + gw[j];
                policy.weights[j] -= cfg.step_size * vw[j];
            }
            for (std::size_t a = 0; a < k; ++a) {
                vb[a] = cfg.momentum * vb[a] + gb[a];
                policy.bias[a] -= cfg.step_size * vb[a];
            }
            ++steps;
        }
    }
    return policy;
}

// ---------------------------------------------------------------------------
// Contextual bandit with observed reward
// ---------------------------------------------------------------------------

/// (1/n) sum (K pi(a_i|x_i) - 1) r_i on uniform-behavior data.
inline double cb_indicator(const InteractionLog& log, std::span<const int> rewards, const LinearSoftmaxPolicy& policy) {
    if (log.empty()) throw ValidationError("cb_indicator: empty log");
    const auto k = static_cast<double>(log.k_actions());
    std::vector<double> p(policy.k_actions);
    double total = 0.0;
    for (std::size_t i = 0; i < log.size(); ++i) {
        if (rewards[i] == 0) continue;
        policy_probs(policy, log[i].context, p);
        total += (k * p[log[i].action] - 1.0) * rewards[i];
    }
    return total / static_cast<double>(log.size());
}

/// Ascent on the IPS value (1/n) sum r_i pi(a_i|x_i) / d(a_i|x_i), starting from `policy`.
inline LinearSoftmaxPolicy optimize_cb(const InteractionLog& log, std::span<const int> rewards,
                                       LinearSoftmaxPolicy policy, const OptConfig& cfg) {
    cfg.validate();
    if (log.empty()) throw ValidationError("optimize_cb: empty log");
    if (rewards.size() != log.size()) throw DimensionError("optimize_cb: one reward per logged item required");
    RngStream rng = fork_rng(cfg.seed, "optimize_cb");
    std::vector<double> gw(policy.weights.size()), gb(policy.bias.size()), vw(gw.size(), 0.0), vb(gb.size(), 0.0),
        p(policy.k_actions);
    std::vector<std::size_t> order(log.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::size_t steps = 0;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t start = 0; start < order.size(); start += cfg.minibatch) {
            if (cfg.max_steps > 0 && steps >= cfg.max_steps) break;
            const std::size_t len = std::min(cfg.minibatch, order.size() - start);
            std::fill(gw.begin(), gw.end(), 0.0);
            std::fill(gb.begin(), gb.end(), 0.0);
            const double inv = 1.0 / static_cast<double>(len);
            for (std::size_t t = 0; t < len; ++t) {
                const std::size_t i = order[start + t];
                if (rewards[i] == 0) continue;
                const auto& it = log[i];
                policy_probs(policy, it.context, p);
                accumulate_policy_prob_gradient(policy, it.context, p, it.action, rewards[i] / it.behavior_prob * inv,
                                                gw, gb);
            }
            if (!all_finite(gw) || !all_finite(gb)) throw NumericError("optimize_cb: non-finite gradient");
            for (std::size_t j = 0; j < gw.size(); ++j) {
                vw[j] = cfg.momentum * vw[j] + gw[j];
                policy.weights[j] += cfg.step_size * vw[j];
            }
            for (std::size_t a = 0; a < gb.size(); ++a) {
                vb[a] = cfg.momentum * vb[a] + gb[a];
                policy.bias[a] += cfg.step_size * vb[a];
            }
            ++steps;
        }
    }
    return policy;
}

struct CbFit {
    LinearSoftmaxPolicy policy;
    std::uint32_t restarts_used = 0;
    bool exhausted = false;
    double indicator = 0.0;
};

/// optimize_cb from fresh initializations until cb_indicator clears the
/// restart threshold.
inline CbFit train_cb(const InteractionLog& log, std::span<const int> rewards, const OptConfig& cfg) {
    if (log.empty()) throw ValidationError("train_cb: empty log");
    const double threshold = cfg.threshold_for(log.k_actions());
    CbFit best;
    bool have = false;
    for (std::uint32_t attempt = 0; attempt <= cfg.max_restarts; ++attempt) {
        OptConfig c = cfg;
        c.seed = fork_rng(cfg.seed, "restart-" + std::to_string(attempt));
        RngStream init_rng = fork_rng(c.seed, "init");
        auto pol = optimize_cb(log, rewards, make_policy(log.k_actions(), log.context_dim(), init_rng, cfg.init_scale), c);
        const double ind = cb_indicator(log, rewards, pol);
        if (!have || ind > best.indicator) {
            best.policy = std::move(pol);
            best.indicator = ind;
            have = true;
        }
        best.restarts_used = attempt;
        if (ind > threshold) return best;
    }
    best.exhausted = true;
    return best;
}

/// Epoch-greedy learner that sees the true reward of exploration actions.
class CbLearner {
public:
    static constexpr bool kNeedsReward = true;

    explicit CbLearner(const E2GConfig& cfg) : cfg_(cfg) {}

    FitOutcome fit(const InteractionLog& log, std::span<const int> rewards, bool warmup, std::uint64_t round) {
        FitOutcome out;
        OptConfig opt = cfg_.opt;
        opt.seed = fork_rng(cfg_.opt.seed, "fit-" + std::to_string(round));
        if (warmup || !policy_) {
            auto res = train_cb(log, rewards, opt);
            out.restarts = res.restarts_used;
            out.exhausted = res.exhausted;
            policy_ = std::move(res.policy);
        } else {
            opt.epochs = cfg_.refit_epochs;
            policy_ = optimize_cb(log, rewards, *policy_, opt);
        }
        out.indicator = cb_indicator(log, rewards, *policy_);
        out.warmup_passed = true;
        return out;
    }

    const LinearSoftmaxPolicy* policy() const { return policy_ ? &*policy_ : nullptr; }

private:
    E2GConfig cfg_;
    std::optional<LinearSoftmaxPolicy> policy_;
};

struct CbRunResult {
    RunRecord record;
    std::optional<LinearSoftmaxPolicy> policy;
};

/// Online contextual bandit on the same epoch-greedy schedule as E2G, using
/// the exact reward of each exploration action.
inline CbRunResult run_cb(Environment& env, const E2GConfig& cfg, RngStream& rng, const PolicyEvaluator& evaluate = {}) {
    CbLearner learner(cfg);
    CbRunResult out;
    out.record = run_epoch_greedy(env, cfg, rng, learner, evaluate);
    if (learner.policy()) out.policy = *learner.policy();
    return out;
}

// ---------------------------------------------------------------------------
// Imbalanced 2-means reward decoder
// ---------------------------------------------------------------------------

/// Size-constrained 2-means. Cluster 1 (the minority, decoded as r = 1) holds
/// round(n * minority_fraction) points on the training data.
struct KMeansDecoder {
    std::array<FeatureVector, 2> centroids;
    double minority_fraction = 0.1;
    int reward_cluster = 1;
    double threshold = 0.0;  // on dist(y, c0) - dist(y, c1)
    bool degenerate = false;
    std::size_t minority_size = 0;
    double sse = 0.0;
    std::vector<int> assignment;  // training points

    double margin(std::span<const double> y) const {
        double d0 = 0.0, d1 = 0.0;
        for (std::size_t j = 0; j < y.size(); ++j) {
            d0 += (y[j] - centroids[0][j]) * (y[j] - centroids[0][j]);
            d1 += (y[j] - centroids[1][j]) * (y[j] - centroids[1][j]);
        }
        return std::sqrt(d0) - std::sqrt(d1);
    }

    /// 1 if y falls on the minority side of the learned margin threshold.
    int predict(std::span<const double> y) const {
        if (degenerate) return 0;
        return margin(y) > threshold ? reward_cluster : 1 - reward_cluster;
    }
};

struct KMeansOptions {
    std::size_t max_iter = 100;
    std::size_t n_init = 30;
};

inline KMeansDecoder imbalanced_kmeans(std::span<const FeatureVector> feedbacks, double minority_fraction,
                                       RngStream& rng, KMeansOptions opts = {}) {
    const std::size_t n = feedbacks.size();
    if (n < 2) throw ValidationError("imbalanced_kmeans: need at least 2 points");
    if (!(minority_fraction > 0.0 && minority_fraction <= 0.5))
        throw ValidationError("imbalanced_kmeans: minority_fraction must lie in (0, 0.5]");
    const std::size_t d = feedbacks.front().size();
    for (const auto& y : feedbacks)
        if (y.size() != d) throw DimensionError("imbalanced_kmeans: inconsistent dimensions");

    KMeansDecoder best;
    best.minority_fraction = minority_fraction;
    const bool all_same = std::all_of(feedbacks.begin(), feedbacks.end(),
                                      [&](const FeatureVector& y) { return y == feedbacks.front(); });
    if (all_same) {
        best.degenerate = true;
        best.centroids = {feedbacks.front(), feedbacks.front()};
        best.assignment.assign(n, 0);
        return best;
    }

    const auto m = static_cast<std::size_t>(std::clamp<double>(std::round(static_cast<double>(n) * minority_fraction), 1.0,
                                                               static_cast<double>(n - 1)));
    best.sse = std::numeric_limits<double>::infinity();
    KMeansDecoder cur;
    cur.minority_fraction = minority_fraction;
    std::vector<double> margins(n);
    std::vector<std::size_t> order(n);
    std::vector<int> assign(n), prev(n);
    std::vector<double> d2(n);

    for (std::size_t init = 0; init < std::max<std::size_t>(1, opts.n_init); ++init) {
        // k-means++ seeding: second centroid drawn proportional to squared distance
        const auto p = static_cast<std::size_t>(rng.uniform_int(n));
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < d; ++j) s += (feedbacks[i][j] - feedbacks[p][j]) * (feedbacks[i][j] - feedbacks[p][j]);
            d2[i] = s;
        }
        const auto q = rng.categorical(d2);
        cur.centroids = {feedbacks[p], feedbacks[q]};
        std::fill(prev.begin(), prev.end(), -1);

        for (std::size_t iter = 0; iter < std::max<std::size_t>(1, opts.max_iter); ++iter) {
            for (std::size_t i = 0; i < n; ++i) margins[i] = cur.margin(feedbacks[i]);
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return margins[a] > margins[b]; });
            std::fill(assign.begin(), assign.end(), 0);
            for (std::size_t r = 0; r < m; ++r) assign[order[r]] = 1;
            if (assign == prev) break;
            prev = assign;
            std::array<FeatureVector, 2> c{FeatureVector(d, 0.0), FeatureVector(d, 0.0)};
            std::array<std::size_t, 2> cnt{0, 0};
            for (std::size_t i = 0; i < n; ++i) {
                auto& dst = c[static_cast<std::size_t>(assign[i])];
                for (std::size_t j = 0; j < d; ++j) dst[j] += feedbacks[i][j];
                ++cnt[static_cast<std::size_t>(assign[i])];
            }
            for (int s = 0; s < 2; ++s)
                for (double& v : c[s]) v /= static_cast<double>(cnt[s]);
            cur.centroids = std::move(c);
        }

        for (std::size_t i = 0; i < n; ++i) margins[i] = cur.margin(feedbacks[i]);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return margins[a] > margins[b]; });
        std::fill(assign.begin(), assign.end(), 0);
        for (std::size_t r = 0; r < m; ++r) assign[order[r]] = 1;
        cur.threshold = 0.5 * (margins[order[m - 1]] + margins[order[m]]);
        cur.sse = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& c = cur.centroids[static_cast<std::size_t>(assign[i])];
            for (std::size_t j = 0; j < d; ++j) cur.sse += (feedbacks[i][j] - c[j]) * (feedbacks[i][j] - c[j]);
        }
        if (cur.sse < best.sse) {
            best = cur;
            best.assignment = assign;
            best.minority_size = m;
        }
    }
    return best;
}

struct CbKMeansConfig {
    std::size_t samples = 60000;
    OptConfig opt;
    KMeansOptions kmeans;
};

struct CbKMeansResult {
    RunRecord record;
    LinearSoftmaxPolicy policy;
    KMeansDecoder decoder;
    CbFit fit;
};

/// Uniform log -> imbalanced 2-means on the feedbacks (minority fraction 1/K)
/// -> decoded rewards -> contextual-bandit training on the decoded rewards.
inline CbKMeansResult run_cb_with_kmeans(Environment& env, const CbKMeansConfig& cfg, RngStream& rng) {
    auto batch = collect_uniform(env, cfg.samples, rng);
    CbKMeansResult out;
    out.record = std::move(batch.record);
    if (batch.log.size() < 2) throw ValidationError("run_cb_with_kmeans: need at least 2 samples");
    std::vector<FeatureVector> ys;
    ys.reserve(batch.log.size());
    for (const auto& it : batch.log) ys.push_back(it.feedback);
    RngStream km_rng = split_rng(rng, "kmeans");
    out.decoder = imbalanced_kmeans(ys, 1.0 / static_cast<double>(env.k_actions()), km_rng, cfg.kmeans);
    std::vector<int> decoded(ys.size());
    for (std::size_t i = 0; i < ys.size(); ++i) decoded[i] = out.decoder.predict(ys[i]);
    out.fit = train_cb(batch.log, decoded, cfg.opt);
    out.policy = out.fit.policy;
    out.record.restarts = out.fit.restarts_used;
    out.record.restart_exhausted = out.fit.exhausted;
    return out;
}

}  // namespace igl
