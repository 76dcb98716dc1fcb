#pragma once

// Importance-weighted value estimates, the decoded-value-difference objective,
// and its minibatch optimization with adaptive restarts.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "igl/core.hpp"
#include "igl/models.hpp"

namespace igl {

namespace detail {
inline void require_nonempty(const InteractionLog& log, const char* what) {
    if (log.empty()) throw ValidationError(std::string(what) + ": empty log");
}
}  // namespace detail

/// (1/n) sum pi(a_i|x_i) / d(a_i|x_i) * psi(y_i).
inline double estimate_v(const InteractionLog& log, const LinearSoftmaxPolicy& policy,
                         const LinearSigmoidDecoder& decoder) {
    detail::require_nonempty(log, "estimate_v");
    std::vector<double> p(policy.k_actions);
    double total = 0.0;
    for (const auto& it : log) {
        policy_probs(policy, it.context, p);
        total += p[it.action] / it.behavior_prob * decoder_predict(decoder, it.feedback);
    }
    return total / static_cast<double>(log.size());
}

/// (1/n) sum psi(y_i): the uniform policy's decoded value on uniform-behavior data.
inline double estimate_v_bad(const InteractionLog& log, const LinearSigmoidDecoder& decoder) {
    detail::require_nonempty(log, "estimate_v_bad");
    double total = 0.0;
    for (const auto& it : log) total += decoder_predict(decoder, it.feedback);
    return total / static_cast<double>(log.size());
}

struct EstimateReport {
    double v_hat_pi = 0.0;
    double v_hat_bad = 0.0;
    double objective = 0.0;
    std::size_t n = 0;
};

inline EstimateReport estimate(const InteractionLog& log, const LinearSoftmaxPolicy& policy,
                               const LinearSigmoidDecoder& decoder) {
    EstimateReport r;
    r.v_hat_pi = estimate_v(log, policy, decoder);
    r.v_hat_bad = estimate_v_bad(log, decoder);
    r.objective = r.v_hat_pi - r.v_hat_bad;
    r.n = log.size();
    return r;
}

/// Restart indicator on uniform-behavior data:
/// (1/n) sum K pi(a_i|x_i) psi(y_i) - (1/n) sum psi(y_i).
inline double indicator(const InteractionLog& log, const LinearSoftmaxPolicy& policy,
                        const LinearSigmoidDecoder& decoder) {
    detail::require_nonempty(log, "indicator");
    const auto k = static_cast<double>(log.k_actions());
    std::vector<double> p(policy.k_actions);
    double total = 0.0;
    for (const auto& it : log) {
        policy_probs(policy, it.context, p);
        const double psi = decoder_predict(decoder, it.feedback);
        total += (k * p[it.action] - 1.0) * psi;
    }
    return total / static_cast<double>(log.size());
}

/// High-probability lower bound on V(pi) given the indicator, valid when the
/// decoder has positive slope.
inline double value_certificate(double indicator_value, std::size_t k, double eps_d, double delta_psi_star,
                                double v_bad) {
    if (!(delta_psi_star > 0.0)) throw ValidationError("value_certificate: delta_psi_star must be positive");
    return (indicator_value - static_cast<double>(k) * eps_d) / delta_psi_star + v_bad;
}

// ---------------------------------------------------------------------------
// Optimization
// ---------------------------------------------------------------------------

struct OptConfig {
    double step_size = 0.05;
    double momentum = 0.9;
    std::size_t minibatch = 128;
    std::size_t epochs = 30;
    std::size_t max_steps = 0;  // 0: no cap beyond epochs
    std::optional<double> restart_threshold;  // default 1/K + 0.05
    std::size_t max_restarts = 10;
    double init_scale = 0.01;
    bool sign_corrector = true;
    /// Also run the corrector after every epoch; a flip re-initializes the
    /// policy, which was fitted against the mirrored decoder.
    bool corrector_each_epoch = true;
    RngStream seed{0, 0};

    void validate() const {
        if (!(step_size > 0.0)) throw ValidationError("OptConfig: step_size must be positive");
        if (!(momentum >= 0.0 && momentum < 1.0)) throw ValidationError("OptConfig: momentum must lie in [0, 1)");
        if (minibatch < 1) throw ValidationError("OptConfig: minibatch must be >= 1");
    }

    double threshold_for(std::size_t k) const {
        return restart_threshold.value_or(1.0 / static_cast<double>(k) + 0.05);
    }
};

struct TraceRow {
    std::size_t epoch = 0;
    double objective = 0.0;
    double v_hat = 0.0;
    double v_bad = 0.0;
    std::uint32_t restarts = 0;
};

using OptTrace = std::vector<TraceRow>;

inline void write_trace_csv(std::ostream& out, const OptTrace& trace) {
    out << "epoch,objective,v_hat,v_bad,restarts\n";
    for (const auto& r : trace)
        out << r.epoch << ',' << r.objective << ',' << r.v_hat << ',' << r.v_bad << ',' << r.restarts << '\n';
}

/// Gradient of the per-item mean of (w_i pi(a_i|x_i) - 1) psi(y_i), with
/// w_i = 1 / d(a_i|x_i), over the items selected by `idx`.
struct JointGradient {
    std::vector<double> policy_w;
    std::vector<double> policy_b;
    std::vector<double> decoder_w;
    double decoder_b = 0.0;
    double value = 0.0;

    JointGradient(const LinearSoftmaxPolicy& p, const LinearSigmoidDecoder& d)
        : policy_w(p.weights.size(), 0.0), policy_b(p.bias.size(), 0.0), decoder_w(d.weights.size(), 0.0) {}

    void clear() {
        std::fill(policy_w.begin(), policy_w.end(), 0.0);
        std::fill(policy_b.begin(), policy_b.end(), 0.0);
        std::fill(decoder_w.begin(), decoder_w.end(), 0.0);
        decoder_b = 0.0;
        value = 0.0;
    }

    bool finite() const {
        return all_finite(policy_w) && all_finite(policy_b) && all_finite(decoder_w) && std::isfinite(decoder_b);
    }
};

inline void joint_gradient(const InteractionLog& log, std::span<const std::size_t> idx,
                           const LinearSoftmaxPolicy& policy, const LinearSigmoidDecoder& decoder,
                           JointGradient& g, std::vector<double>& probs_scratch) {
    g.clear();
    if (idx.empty()) return;
    const double inv_n = 1.0 / static_cast<double>(idx.size());
    probs_scratch.resize(policy.k_actions);
    for (std::size_t i : idx) {
        const auto& it = log[i];
        policy_probs(policy, it.context, probs_scratch);
        const double w = 1.0 / it.behavior_prob;
        const double pa = probs_scratch[it.action];
        const double coef = w * pa - 1.0;
        const double psi = accumulate_decoder_gradient(decoder, it.feedback, coef * inv_n, g.decoder_w, g.decoder_b);
        accumulate_policy_prob_gradient(policy, it.context, probs_scratch, it.action, w * psi * inv_n, g.policy_w,
                                        g.policy_b);
        g.value += coef * psi * inv_n;
    }
}

inline JointGradient joint_gradient(const InteractionLog& log, const LinearSoftmaxPolicy& policy,
                                    const LinearSigmoidDecoder& decoder) {
    std::vector<std::size_t> idx(log.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    JointGradient g(policy, decoder);
    std::vector<double> scratch;
    joint_gradient(log, idx, policy, decoder, g, scratch);
    return g;
}

namespace detail {

/// Heavy-ball ascent state for one parameter block.
struct Velocity {
    std::vector<double> v;
    explicit Velocity(std::size_t n = 0) : v(n, 0.0) {}
    void step(std::vector<double>& theta, const std::vector<double>& grad, double lr, double mu) {
        for (std::size_t i = 0; i < theta.size(); ++i) {
            v[i] = mu * v[i] + grad[i];
            theta[i] += lr * v[i];
        }
    }
};

inline std::vector<std::size_t> iota_indices(std::size_t n) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    return idx;
}

}  // namespace detail

struct JointResult {
    LinearSoftmaxPolicy policy;
    LinearSigmoidDecoder decoder;
    OptTrace trace;
};

/// Minibatch momentum ascent on estimate_v - estimate_v_bad over both
/// parameter blocks, followed by the sign corrector.
inline JointResult optimize_joint(const InteractionLog& log, LinearSoftmaxPolicy policy,
                                  LinearSigmoidDecoder decoder, const OptConfig& cfg) {
    detail::require_nonempty(log, "optimize_joint");
    cfg.validate();
    if (policy.dim != log.context_dim() || decoder.dim() != log.feedback_dim())
        throw DimensionError("optimize_joint: model dimensions do not match the log");

    RngStream rng = fork_rng(cfg.seed, "optimize_joint");
    JointGradient g(policy, decoder);
    std::vector<double> scratch;
    detail::Velocity vw(policy.weights.size()), vb(policy.bias.size()), dw(decoder.weights.size());
    double db_vel = 0.0;
    auto order = detail::iota_indices(log.size());

    JointResult out;
    std::size_t steps = 0;
    const bool capped = cfg.max_steps > 0;
    for (std::size_t epoch = 0; epoch < cfg.epochs && !(capped && steps >= cfg.max_steps); ++epoch) {
        rng.shuffle(order);
        for (std::size_t start = 0; start < order.size(); start += cfg.minibatch) {
            if (capped && steps >= cfg.max_steps) break;
            const std::size_t len = std::min(cfg.minibatch, order.size() - start);
            joint_gradient(log, std::span<const std::size_t>(order.data() + start, len), policy, decoder, g, scratch);
            if (!g.finite())
                throw NumericError("optimize_joint: non-finite gradient at epoch " + std::to_string(epoch) +
                                   ", step " + std::to_string(steps));
            vw.step(policy.weights, g.policy_w, cfg.step_size, cfg.momentum);
            vb.step(policy.bias, g.policy_b, cfg.step_size, cfg.momentum);
            dw.step(decoder.weights, g.decoder_w, cfg.step_size, cfg.momentum);
            db_vel = cfg.momentum * db_vel + g.decoder_b;
            decoder.bias += cfg.step_size * db_vel;
            ++steps;
        }
        if (cfg.sign_corrector && cfg.corrector_each_epoch) {
            const bool before = decoder.flipped;
            decoder = apply_sign_corrector(std::move(decoder), log);
            if (decoder.flipped != before) {
                std::fill(policy.weights.begin(), policy.weights.end(), 0.0);
                std::fill(policy.bias.begin(), policy.bias.end(), 0.0);
                std::fill(vw.v.begin(), vw.v.end(), 0.0);
                std::fill(vb.v.begin(), vb.v.end(), 0.0);
            }
        }
        const auto rep = estimate(log, policy, decoder);
        out.trace.push_back({epoch + 1, rep.objective, rep.v_hat_pi, rep.v_hat_bad, 0});
    }
    if (cfg.sign_corrector && steps > 0) decoder = apply_sign_corrector(std::move(decoder), log);
    out.policy = std::move(policy);
    out.decoder = std::move(decoder);
    return out;
}

struct RestartResult {
    LinearSoftmaxPolicy policy;
    LinearSigmoidDecoder decoder;
    std::uint32_t restarts_used = 0;
    bool exhausted = false;
    double indicator = 0.0;
    OptTrace trace;
};

/// Fresh initialization plus optimize_joint, repeated until the indicator
/// clears the threshold or the restart budget runs out. Returns the
/// best-indicator pair seen.
inline RestartResult train_with_restarts(const InteractionLog& log, const OptConfig& cfg,
                                         double policy_temperature = 1.0, double decoder_temperature = 0.1) {
    detail::require_nonempty(log, "train_with_restarts");
    const double threshold = cfg.threshold_for(log.k_actions());
    RestartResult best;
    bool have = false;
    for (std::uint32_t attempt = 0; attempt <= cfg.max_restarts; ++attempt) {
        OptConfig c = cfg;
        c.seed = fork_rng(cfg.seed, "restart-" + std::to_string(attempt));
        RngStream init_rng = fork_rng(c.seed, "init");
        auto pol = make_policy(log.k_actions(), log.context_dim(), init_rng, cfg.init_scale, policy_temperature);
        auto dec = make_decoder(log.feedback_dim(), init_rng, cfg.init_scale, decoder_temperature);
        auto res = optimize_joint(log, std::move(pol), std::move(dec), c);
        const double ind = indicator(log, res.policy, res.decoder);
        for (auto& row : res.trace) {
            row.restarts = attempt;
            best.trace.push_back(row);
        }
        if (!have || ind > best.indicator) {
            best.policy = std::move(res.policy);
            best.decoder = std::move(res.decoder);
            best.indicator = ind;
            have = true;
        }
        best.restarts_used = attempt;
        if (ind > threshold) {
            best.exhausted = false;
            return best;
        }
    }
    best.exhausted = true;
    return best;
}

}  // namespace igl
