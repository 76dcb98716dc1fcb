#pragma once

// Sample-complexity calculators and oracle-side evaluation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "igl/core.hpp"
#include "igl/envs.hpp"
#include "igl/models.hpp"

namespace igl {

struct TheoryConfig {
    double card_pi = 1.0;
    double card_psi = 1.0;
    double delta = 0.05;
    double iota = 1.0;
    /// Replaces log(2 |Pi| |Psi| / delta) for infinite classes.
    std::optional<double> log_complexity;

    double log_term() const {
        if (log_complexity) return *log_complexity;
        if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("TheoryConfig: delta must lie in (0, 1)");
        return std::log(2.0 * card_pi * card_psi / delta);
    }
};

/// sqrt(4 r2 L / n) + rmax L / (3 n), with L the log-complexity term.
inline double epsilon_stat(double n, double ratio_l2, double ratio_max, const TheoryConfig& cfg) {
    if (!(n >= 1.0)) throw ValidationError("epsilon_stat: n must be >= 1");
    const double L = cfg.log_term();
    return std::sqrt(4.0 * ratio_l2 * L / n) + ratio_max * L / (3.0 * n);
}

inline double epsilon_d(double n, double iota) {
    if (!(n >= 1.0)) throw ValidationError("epsilon_d: n must be >= 1");
    return std::sqrt(iota / (2.0 * n));
}

/// Smallest n with epsilon_stat(n) <= eta / 2 (doubling, then bisection).
inline std::uint64_t min_samples_identifiable(double eta, double ratio_l2, double ratio_max, const TheoryConfig& cfg) {
    if (!(eta > 0.0)) throw ValidationError("min_samples_identifiable: eta must be positive");
    const double target = eta / 2.0;
    auto ok = [&](std::uint64_t n) { return epsilon_stat(static_cast<double>(n), ratio_l2, ratio_max, cfg) <= target; };
    if (ok(1)) return 1;
    std::uint64_t hi = 2;
    while (!ok(hi)) {
        if (hi > (std::uint64_t{1} << 62)) throw NumericError("min_samples_identifiable: no finite n found");
        hi *= 2;
    }
    std::uint64_t lo = hi / 2;  // !ok(lo)
    while (hi - lo > 1) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        (ok(mid) ? hi : lo) = mid;
    }
    return hi;
}

/// Delta psi = E[psi(y) | r = 1] - E[psi(y) | r = 0]. Exact on tabular
/// environments, otherwise n_mc conditional draws per reward value.
inline double delta_psi_oracle(const EnvOracle& oracle, const LinearSigmoidDecoder& decoder, std::size_t n_mc,
                               RngStream& rng) {
    if (const auto* spec = oracle.tabular()) {
        bool any0 = false, any1 = false;
        for (std::size_t x = 0; x < spec->n_contexts; ++x) {
            if (spec->context_probs[x] == 0.0) continue;
            for (double r : spec->reward_table[x]) {
                any1 = any1 || r > 0.0;
                any0 = any0 || r < 1.0;
            }
        }
        if (!any0 || !any1) throw ValidationError("delta_psi_oracle: a reward value never occurs, conditional undefined");
        return exact_delta_psi(*spec, tabulate(*spec, decoder));
    }
    if (n_mc == 0) throw ValidationError("delta_psi_oracle: n_mc must be positive");
    double m[2] = {0.0, 0.0};
    for (int r = 0; r < 2; ++r) {
        for (std::size_t i = 0; i < n_mc; ++i) m[r] += decoder_predict(decoder, oracle.sample_feedback(r, rng));
        m[r] /= static_cast<double>(n_mc);
    }
    return m[1] - m[0];
}

struct Assumption2Report {
    double v_star = 0.0;
    double v_bad = 0.0;
    double delta_psi_star = 0.0;
    double eta_max = 0.0;
    bool holds = false;
};

/// Brute-force check of the identifiability gap over finite classes.
inline Assumption2Report verify_assumption2(const TabularEnvSpec& spec, const std::vector<PolicyTable>& policies,
                                            const std::vector<DecoderTable>& decoders) {
    if (policies.empty() || decoders.empty()) throw ValidationError("verify_assumption2: empty class");
    Assumption2Report r;
    r.v_star = -1.0;
    for (const auto& p : policies) r.v_star = std::max(r.v_star, exact_value(spec, p));
    r.v_bad = exact_value(spec, uniform_policy_table(spec));
    r.delta_psi_star = -2.0;
    for (const auto& d : decoders) r.delta_psi_star = std::max(r.delta_psi_star, exact_delta_psi(spec, d));
    r.eta_max = (r.v_star - r.v_bad) * r.delta_psi_star - r.v_bad;
    r.holds = r.eta_max > 0.0;
    return r;
}

/// Decoders taking values {0, 1/m, ..., 1} on each alphabet symbol.
inline std::vector<DecoderTable> decoder_grid(std::size_t alphabet_size, std::size_t m) {
    if (m == 0) throw ValidationError("decoder_grid: m must be positive");
    std::vector<DecoderTable> out;
    std::vector<std::size_t> level(alphabet_size, 0);
    while (true) {
        DecoderTable d(alphabet_size);
        for (std::size_t y = 0; y < alphabet_size; ++y) d[y] = static_cast<double>(level[y]) / static_cast<double>(m);
        out.push_back(std::move(d));
        std::size_t i = 0;
        while (i < alphabet_size && ++level[i] > m) level[i++] = 0;
        if (i == alphabet_size) break;
    }
    return out;
}

/// Partial sums of (v_star - r_t).
inline std::vector<double> empirical_regret(const RunRecord& record, double v_star) {
    std::vector<double> out;
    out.reserve(record.entries.size());
    double acc = 0.0;
    for (const auto& e : record.entries) {
        acc += v_star - static_cast<double>(e.oracle_reward);
        out.push_back(acc);
    }
    return out;
}

/// Percentage of items where the greedy action equals the label.
inline double policy_accuracy(const LinearSoftmaxPolicy& policy, const LabeledDataset& test) {
    if (test.size() == 0) throw ValidationError("policy_accuracy: empty test set");
    std::size_t hits = 0;
    std::vector<double> z(policy.k_actions);
    for (std::size_t i = 0; i < test.size(); ++i) {
        const int label = test.labels[i];
        if (label < 0 || static_cast<std::size_t>(label) >= policy.k_actions)
            throw RangeError("policy_accuracy: label out of range");
        policy_logits(policy, test.images[i], z);
        if (argmax_lowest(z) == static_cast<std::size_t>(label)) ++hits;
    }
    return 100.0 * static_cast<double>(hits) / static_cast<double>(test.size());
}

}  // namespace igl
