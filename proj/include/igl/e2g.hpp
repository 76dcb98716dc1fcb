#pragma once

// Online explore-exploit-ground learning: one uniform exploration step per
// round, periodic refits of (pi, psi) on the exploration log, and greedy
// exploitation on an epoch-greedy schedule after warm-up.

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "igl/analysis.hpp"
#include "igl/core.hpp"
#include "igl/envs.hpp"
#include "igl/models.hpp"
#include "igl/objective.hpp"

namespace igl {

struct E2GConfig {
    std::size_t k_actions = 10;
    double eta = 0.5;
    double iota = 1.0;
    std::optional<std::uint64_t> warmup_override;
    std::uint64_t total_rounds = 10000;
    std::optional<std::uint64_t> max_steps;  // cap on interactions (explore + exploit)
    std::uint64_t update_every = 100;
    std::size_t refit_epochs = 5;    // warm-started refits after warm-up
    bool data_driven_warmup = false;
    std::optional<double> v_bad_bound;  // default 1/K
    OptConfig opt;

    void validate() const {
        if (!(eta > 0.0)) throw ValidationError("E2GConfig: eta must be positive");
        if (!(iota > 0.0)) throw ValidationError("E2GConfig: iota must be positive");
        if (total_rounds == 0) throw ValidationError("E2GConfig: total_rounds must be >= 1");
        if (update_every == 0) throw ValidationError("E2GConfig: update_every must be >= 1");
        opt.validate();
    }

    double warmup_threshold() const {
        if (warmup_override) return static_cast<double>(*warmup_override);
        const auto k = static_cast<double>(k_actions);
        return 2.0 * k * k / (eta * eta);
    }

    // 2K^2/eta^2 is often an integer up to rounding (eta = 0.2 gives 449.99...)
    bool warming_up(std::uint64_t i) const {
        const double t = warmup_threshold();
        return static_cast<double>(i) <= t + 1e-9 * std::max(1.0, t);
    }
};

/// ceil(2 K^2 iota / eta^2).
inline std::uint64_t warmup_length(std::size_t k, double eta, double iota) {
    if (!(eta > 0.0) || !(iota > 0.0)) throw ValidationError("warmup_length: eta and iota must be positive");
    const auto kd = static_cast<double>(k);
    const double t0 = 2.0 * kd * kd * iota / (eta * eta);
    return static_cast<std::uint64_t>(std::ceil(t0 - 1e-9 * std::max(1.0, t0)));
}

/// Exploitation steps after exploration round i: 0 during warm-up, then
/// floor(sqrt(i / (K iota))).
inline std::uint64_t schedule_n_i(std::uint64_t i, const E2GConfig& cfg) {
    if (i < 1) throw ValidationError("schedule_n_i: rounds are 1-based");
    if (cfg.warming_up(i)) return 0;
    const double v = std::sqrt(static_cast<double>(i) / (static_cast<double>(cfg.k_actions) * cfg.iota));
    return static_cast<std::uint64_t>(std::floor(v + 1e-12));
}

inline bool warmup_check(double indicator_value, double v_bad_bound, double eps_d, std::size_t k) {
    return indicator_value > v_bad_bound + static_cast<double>(k) * eps_d;
}

/// Data-driven end of warm-up: indicator(log, pi, psi) > V(pi_bad) bound + K eps_D.
inline bool warmup_check(const InteractionLog& log, const LinearSoftmaxPolicy& policy,
                         const LinearSigmoidDecoder& decoder, double v_bad_bound, double eps_d, std::size_t k) {
    return warmup_check(indicator(log, policy, decoder), v_bad_bound, eps_d, k);
}

struct FitOutcome {
    std::optional<double> indicator;
    std::uint32_t restarts = 0;
    bool exhausted = false;
    bool warmup_passed = false;
};

/// Called at each refit with the current greedy policy; returns accuracy in percent.
using PolicyEvaluator = std::function<double(const LinearSoftmaxPolicy&)>;

/// The shared epoch-greedy loop. `Learner` provides
///   static constexpr bool kNeedsReward;
///   FitOutcome fit(const InteractionLog&, std::span<const int> rewards, bool warmup, std::uint64_t round);
///   const LinearSoftmaxPolicy* policy() const;
/// Rewards are recorded through the oracle for reporting; they reach the
/// learner only when kNeedsReward is set (the contextual-bandit baseline).
template <class Learner>
RunRecord run_epoch_greedy(Environment& env, const E2GConfig& cfg, RngStream& rng, Learner& learner,
                           const PolicyEvaluator& evaluate = {}) {
    if (cfg.total_rounds == 0) return {};  // T = 0: nothing to run
    cfg.validate();
    const std::size_t k = env.k_actions();
    if (cfg.k_actions != k) throw ValidationError("E2GConfig: k_actions does not match the environment");
    const EnvOracle oracle(env);
    RngStream env_rng = split_rng(rng, "env");
    RngStream act_rng = split_rng(rng, "explore");

    RunRecord rec;
    InteractionLog log(k);
    std::vector<int> rewards;
    std::uint64_t steps = 0;
    std::uint32_t restarts = 0;
    bool warmup_done = false;
    auto out_of_steps = [&] { return cfg.max_steps && steps >= *cfg.max_steps; };

    for (std::uint64_t i = 1; i <= cfg.total_rounds; ++i) {
        if (out_of_steps()) break;
        const auto ctx = env.sample_context(env_rng);
        const auto a = static_cast<std::size_t>(act_rng.uniform_int(k));
        auto y = env.step(ctx, a, env_rng);
        ++steps;
        log.append({ctx.features(), a, std::move(y), 1.0 / static_cast<double>(k)});
        if constexpr (Learner::kNeedsReward) rewards.push_back(oracle.last_reward());
        rec.entries.push_back({i, Mode::explore, a, oracle.last_reward(), std::nullopt, restarts});

        const bool in_warmup =
            cfg.data_driven_warmup ? !warmup_done : cfg.warming_up(i);
        if (i % cfg.update_every == 0) {
            const auto fit = learner.fit(log, rewards, in_warmup || learner.policy() == nullptr, i);
            restarts += fit.restarts;
            if (fit.exhausted) rec.restart_exhausted = true;
            if (fit.warmup_passed) warmup_done = true;
            rec.entries.back().indicator = fit.indicator;
            rec.entries.back().restart_count = restarts;
            if (evaluate && learner.policy()) rec.evals.push_back({i, evaluate(*learner.policy())});
        }

        const LinearSoftmaxPolicy* pi = learner.policy();
        if (pi == nullptr) continue;
        if (cfg.data_driven_warmup && !warmup_done) continue;
        const std::uint64_t n_i = cfg.data_driven_warmup
                                      ? static_cast<std::uint64_t>(std::floor(
                                            std::sqrt(static_cast<double>(i) / (static_cast<double>(k) * cfg.iota)) +
                                            1e-12))
                                      : schedule_n_i(i, cfg);
        for (std::uint64_t j = 0; j < n_i && !out_of_steps(); ++j) {
            const auto c = env.sample_context(env_rng);
            const auto act = policy_greedy(*pi, c.features());
            (void)env.step(c, act, env_rng);
            ++steps;
            rec.entries.push_back({i, Mode::exploit, act, oracle.last_reward(), std::nullopt, restarts});
        }
    }
    rec.restarts = restarts;
    return rec;
}

/// Joint (pi, psi) learner: adaptive restarts during warm-up, warm-started
/// refits afterwards.
class E2GLearner {
public:
    static constexpr bool kNeedsReward = false;

    explicit E2GLearner(const E2GConfig& cfg) : cfg_(cfg) {}

    FitOutcome fit(const InteractionLog& log, std::span<const int>, bool warmup, std::uint64_t round) {
        FitOutcome out;
        OptConfig opt = cfg_.opt;
        opt.seed = fork_rng(cfg_.opt.seed, "fit-" + std::to_string(round));
        if (warmup || !policy_) {
            auto res = train_with_restarts(log, opt);
            out.restarts = res.restarts_used;
            out.exhausted = res.exhausted;
            policy_ = std::move(res.policy);
            decoder_ = std::move(res.decoder);
        } else {
            opt.epochs = cfg_.refit_epochs;
            auto res = optimize_joint(log, *policy_, decoder_, opt);
            policy_ = std::move(res.policy);
            decoder_ = std::move(res.decoder);
        }
        out.indicator = indicator(log, *policy_, decoder_);
        if (cfg_.data_driven_warmup) {
            const double v_bad = cfg_.v_bad_bound.value_or(1.0 / static_cast<double>(log.k_actions()));
            out.warmup_passed = warmup_check(*out.indicator, v_bad, epsilon_d(static_cast<double>(log.size()), cfg_.iota),
                                             log.k_actions());
        }
        return out;
    }

    const LinearSoftmaxPolicy* policy() const { return policy_ ? &*policy_ : nullptr; }
    const LinearSigmoidDecoder& decoder() const { return decoder_; }

private:
    E2GConfig cfg_;
    std::optional<LinearSoftmaxPolicy> policy_;
    LinearSigmoidDecoder decoder_;
};

struct E2GResult {
    RunRecord record;
    std::optional<LinearSoftmaxPolicy> policy;
    LinearSigmoidDecoder decoder;
};

inline E2GResult run_e2g(Environment& env, const E2GConfig& cfg, RngStream& rng, const PolicyEvaluator& evaluate = {}) {
    E2GLearner learner(cfg);
    E2GResult out;
    out.record = run_epoch_greedy(env, cfg, rng, learner, evaluate);
    if (learner.policy()) out.policy = *learner.policy();
    out.decoder = learner.decoder();
    return out;
}

}  // namespace igl
