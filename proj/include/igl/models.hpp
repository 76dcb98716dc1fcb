#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "igl/core.hpp"

namespace igl {

/// Linear softmax policy: pi(.|x) = softmax((W x + b) / temperature).
struct LinearSoftmaxPolicy {
    std::size_t k_actions = 0;
    std::size_t dim = 0;
    std::vector<double> weights;  // k_actions x dim, row-major
    std::vector<double> bias;     // k_actions
    double temperature = 1.0;

    LinearSoftmaxPolicy() = default;
    LinearSoftmaxPolicy(std::size_t k, std::size_t d, double temp = 1.0)
        : k_actions(k), dim(d), weights(k * d, 0.0), bias(k, 0.0), temperature(temp) {
        if (k < 2) throw ValidationError("LinearSoftmaxPolicy: K must be >= 2");
        if (!(temp > 0.0)) throw ValidationError("LinearSoftmaxPolicy: temperature must be positive");
    }

    std::span<const double> row(std::size_t a) const { return {weights.data() + a * dim, dim}; }
    std::size_t num_params() const { return weights.size() + bias.size(); }
};

/// Linear sigmoid reward decoder: psi(y) = sigmoid((w.y + b) / temperature),
/// or 1 - that when `flipped`.
struct LinearSigmoidDecoder {
    std::vector<double> weights;
    double bias = 0.0;
    double temperature = 0.1;
    bool flipped = false;

    LinearSigmoidDecoder() = default;
    explicit LinearSigmoidDecoder(std::size_t d, double temp = 0.1)
        : weights(d, 0.0), temperature(temp) {
        if (!(temp > 0.0)) throw ValidationError("LinearSigmoidDecoder: temperature must be positive");
    }

    std::size_t dim() const { return weights.size(); }
    std::size_t num_params() const { return weights.size() + 1; }
};

inline double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// ---------------------------------------------------------------------------
// Policy
// ---------------------------------------------------------------------------

inline void policy_logits(const LinearSoftmaxPolicy& policy, std::span<const double> context,
                          std::span<double> out) {
    if (context.size() != policy.dim)
        throw DimensionError("policy: context has dimension " + std::to_string(context.size()) +
                             ", expected " + std::to_string(policy.dim));
    for (std::size_t a = 0; a < policy.k_actions; ++a)
        out[a] = dot(policy.row(a), context) + policy.bias[a];
}

inline std::vector<double> policy_logits(const LinearSoftmaxPolicy& policy,
                                         std::span<const double> context) {
    std::vector<double> z(policy.k_actions);
    policy_logits(policy, context, z);
    return z;
}

/// In-place softmax of logits / temperature.
inline void softmax_inplace(std::span<double> z, double temperature) {
    double zmax = z[0];
    for (double v : z) zmax = std::max(zmax, v);
    double total = 0.0;
    for (double& v : z) {
        v = std::exp((v - zmax) / temperature);
        total += v;
    }
    for (double& v : z) v /= total;
}

inline void policy_probs(const LinearSoftmaxPolicy& policy, std::span<const double> context,
                         std::span<double> out) {
    policy_logits(policy, context, out);
    softmax_inplace(out, policy.temperature);
}

inline std::vector<double> policy_probs(const LinearSoftmaxPolicy& policy,
                                        std::span<const double> context) {
    std::vector<double> p(policy.k_actions);
    policy_probs(policy, context, p);
    return p;
}

/// Argmax of the logits; ties go to the lowest action index.
inline std::size_t argmax_lowest(std::span<const double> values) {
    std::size_t best = 0;
    for (std::size_t a = 1; a < values.size(); ++a)
        if (values[a] > values[best]) best = a;
    return best;
}

inline std::size_t policy_greedy(const LinearSoftmaxPolicy& policy, std::span<const double> context) {
    return argmax_lowest(policy_logits(policy, context));
}

/// Accumulates scale * d pi(action|x) / d(W, b) into (grad_w, grad_b).
/// `probs` must hold pi(.|x).
inline void accumulate_policy_prob_gradient(const LinearSoftmaxPolicy& policy,
                                            std::span<const double> context,
                                            std::span<const double> probs, std::size_t action,
                                            double scale, std::span<double> grad_w,
                                            std::span<double> grad_b) {
    const double pa = probs[action];
    for (std::size_t k = 0; k < policy.k_actions; ++k) {
        const double dz = scale * pa * ((k == action ? 1.0 : 0.0) - probs[k]) / policy.temperature;
        if (dz == 0.0) continue;
        double* gw = grad_w.data() + k * policy.dim;
        for (std::size_t j = 0; j < policy.dim; ++j) gw[j] += dz * context[j];
        grad_b[k] += dz;
    }
}

// ---------------------------------------------------------------------------
// Decoder
// ---------------------------------------------------------------------------

inline double decoder_score(const LinearSigmoidDecoder& decoder, std::span<const double> feedback) {
    if (feedback.size() != decoder.weights.size())
        throw DimensionError("decoder: feedback has dimension " + std::to_string(feedback.size()) +
                             ", expected " + std::to_string(decoder.weights.size()));
    return dot(decoder.weights, feedback) + decoder.bias;
}

inline double decoder_predict(const LinearSigmoidDecoder& decoder, std::span<const double> feedback) {
    const double p = sigmoid(decoder_score(decoder, feedback) / decoder.temperature);
    return decoder.flipped ? 1.0 - p : p;
}

/// Accumulates scale * d psi(y) / d(w, b); returns psi(y).
inline double accumulate_decoder_gradient(const LinearSigmoidDecoder& decoder,
                                          std::span<const double> feedback, double scale,
                                          std::span<double> grad_w, double& grad_b) {
    const double p = sigmoid(decoder_score(decoder, feedback) / decoder.temperature);
    double d = p * (1.0 - p) / decoder.temperature;
    if (decoder.flipped) d = -d;
    const double g = scale * d;
    if (g != 0.0) {
        for (std::size_t j = 0; j < feedback.size(); ++j) grad_w[j] += g * feedback[j];
        grad_b += g;
    }
    return decoder.flipped ? 1.0 - p : p;
}

/// Data-driven corrector: flips the decoder when more than half of the logged
/// feedbacks decode above 0.5. Assumes the log came from the uniform policy.
inline LinearSigmoidDecoder apply_sign_corrector(LinearSigmoidDecoder decoder,
                                                 const InteractionLog& log) {
    if (log.empty()) throw ValidationError("apply_sign_corrector: empty log");
    std::size_t above = 0;
    for (const auto& it : log)
        if (decoder_predict(decoder, it.feedback) > 0.5) ++above;
    const double sign = static_cast<double>(above) / static_cast<double>(log.size());
    if (sign > 0.5) decoder.flipped = !decoder.flipped;
    return decoder;
}

// ---------------------------------------------------------------------------
// Initialization
// ---------------------------------------------------------------------------

/// `count` entries i.i.d. uniform on [-scale, scale]; scale 0 gives zeros.
inline std::vector<double> init_params(std::size_t count, RngStream& rng, double scale) {
    if (scale < 0.0) throw ValidationError("init_params: scale must be >= 0");
    std::vector<double> out(count, 0.0);
    if (scale == 0.0) return out;
    for (double& v : out) v = rng.uniform(-scale, scale);
    return out;
}

inline LinearSoftmaxPolicy make_policy(std::size_t k, std::size_t d, RngStream& rng, double scale,
                                       double temperature = 1.0) {
    LinearSoftmaxPolicy p(k, d, temperature);
    p.weights = init_params(k * d, rng, scale);
    p.bias = init_params(k, rng, scale);
    return p;
}

inline LinearSigmoidDecoder make_decoder(std::size_t d, RngStream& rng, double scale,
                                         double temperature = 0.1) {
    LinearSigmoidDecoder dec(d, temperature);
    dec.weights = init_params(d, rng, scale);
    dec.bias = init_params(1, rng, scale)[0];
    return dec;
}

}  // namespace igl
