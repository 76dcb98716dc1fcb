#pragma once

// Simulated interaction-grounded environments. Learners get an `Environment&`,
// which yields contexts and feedback only. The latent reward is reachable
// through `EnvOracle`, which evaluation code constructs explicitly.

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "igl/core.hpp"
#include "igl/idx.hpp"
#include "igl/models.hpp"

namespace igl {

class Environment;
class EnvOracle;

/// A drawn context. The features are public; the key identifying the latent
/// state (context index, image label) is visible only to the environment and
/// its oracle.
class Context {
public:
    const FeatureVector& features() const noexcept { return features_; }

private:
    friend class Environment;
    friend class EnvOracle;
    Context(FeatureVector f, std::size_t key) : features_(std::move(f)), key_(key) {}

    FeatureVector features_;
    std::size_t key_;
};

// ---------------------------------------------------------------------------
// Tabular environments
// ---------------------------------------------------------------------------

struct TabularEnvSpec {
    std::size_t n_contexts = 0;
    std::size_t k_actions = 0;
    std::vector<double> context_probs;               // d0
    std::vector<std::vector<double>> reward_table;   // R(x, a)
    std::vector<FeatureVector> feedback_alphabet;
    std::array<std::vector<double>, 2> feedback_given_reward;  // P(y | r = 0), P(y | r = 1)
    /// Optional full law P(y | x, a, r) indexed by (x * K + a) * 2 + r. When
    /// empty, feedback depends on the reward only.
    std::vector<std::vector<double>> feedback_law;

    std::size_t alphabet_size() const { return feedback_alphabet.size(); }

    const std::vector<double>& law(std::size_t x, std::size_t a, int r) const {
        if (feedback_law.empty()) return feedback_given_reward[static_cast<std::size_t>(r)];
        return feedback_law[(x * k_actions + a) * 2 + static_cast<std::size_t>(r)];
    }
};

namespace detail {

inline void check_simplex(const std::vector<double>& p, std::size_t n, const std::string& what) {
    if (p.size() != n)
        throw ValidationError(what + ": expected " + std::to_string(n) + " entries, got " +
                              std::to_string(p.size()));
    double total = 0.0;
    for (double v : p) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError(what + ": negative or non-finite entry");
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-12) throw ValidationError(what + ": does not sum to 1");
}

}  // namespace detail

inline void validate(const TabularEnvSpec& s) {
    if (s.n_contexts == 0) throw ValidationError("tabular spec: n_contexts must be positive");
    if (s.k_actions < 2) throw ValidationError("tabular spec: K must be >= 2");
    detail::check_simplex(s.context_probs, s.n_contexts, "context_probs");
    if (s.reward_table.size() != s.n_contexts) throw ValidationError("reward_table: wrong row count");
    for (const auto& row : s.reward_table) {
        if (row.size() != s.k_actions) throw ValidationError("reward_table: wrong column count");
        for (double v : row)
            if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("reward_table: entries must lie in [0, 1]");
    }
    if (s.feedback_alphabet.empty()) throw ValidationError("feedback_alphabet: empty");
    for (const auto& f : s.feedback_alphabet) {
        if (f.size() != s.feedback_alphabet.front().size())
            throw ValidationError("feedback_alphabet: inconsistent dimensions");
        if (!all_finite(f)) throw ValidationError("feedback_alphabet: non-finite entry");
    }
    detail::check_simplex(s.feedback_given_reward[0], s.alphabet_size(), "P(y|r=0)");
    detail::check_simplex(s.feedback_given_reward[1], s.alphabet_size(), "P(y|r=1)");
    if (!s.feedback_law.empty()) {
        if (s.feedback_law.size() != s.n_contexts * s.k_actions * 2)
            throw ValidationError("feedback_law: expected n_contexts * K * 2 rows");
        for (const auto& row : s.feedback_law) detail::check_simplex(row, s.alphabet_size(), "feedback_law");
    }
}

/// Reference instance: 2 uniform contexts, K = 3, R(c0,a0) = R(c1,a1) = 1,
/// alphabet {f0, f1} one-hot, P(f1|r=1) = 0.9, P(f1|r=0) = 0.1.
inline TabularEnvSpec tab_2x3() {
    TabularEnvSpec s;
    s.n_contexts = 2;
    s.k_actions = 3;
    s.context_probs = {0.5, 0.5};
    s.reward_table = {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}};
    s.feedback_alphabet = {{1.0, 0.0}, {0.0, 1.0}};
    s.feedback_given_reward[0] = {0.9, 0.1};
    s.feedback_given_reward[1] = {0.1, 0.9};
    return s;
}

/// Policy and decoder in table form, for exact enumeration.
using PolicyTable = std::vector<std::vector<double>>;  // [x][a]
using DecoderTable = std::vector<double>;              // psi(alphabet[y])

inline FeatureVector one_hot(std::size_t n, std::size_t i) {
    FeatureVector v(n, 0.0);
    v[i] = 1.0;
    return v;
}

inline PolicyTable tabulate(const TabularEnvSpec& s, const LinearSoftmaxPolicy& policy) {
    PolicyTable t(s.n_contexts);
    for (std::size_t x = 0; x < s.n_contexts; ++x) t[x] = policy_probs(policy, one_hot(s.n_contexts, x));
    return t;
}

inline PolicyTable tabulate_greedy(const TabularEnvSpec& s, const LinearSoftmaxPolicy& policy) {
    PolicyTable t(s.n_contexts, std::vector<double>(s.k_actions, 0.0));
    for (std::size_t x = 0; x < s.n_contexts; ++x) t[x][policy_greedy(policy, one_hot(s.n_contexts, x))] = 1.0;
    return t;
}

inline DecoderTable tabulate(const TabularEnvSpec& s, const LinearSigmoidDecoder& decoder) {
    DecoderTable t;
    t.reserve(s.alphabet_size());
    for (const auto& f : s.feedback_alphabet) t.push_back(decoder_predict(decoder, f));
    return t;
}

inline PolicyTable uniform_policy_table(const TabularEnvSpec& s) {
    return PolicyTable(s.n_contexts, std::vector<double>(s.k_actions, 1.0 / static_cast<double>(s.k_actions)));
}

/// All K^n deterministic policies.
inline std::vector<PolicyTable> deterministic_policies(const TabularEnvSpec& s) {
    std::vector<PolicyTable> out;
    std::vector<std::size_t> choice(s.n_contexts, 0);
    while (true) {
        PolicyTable t(s.n_contexts, std::vector<double>(s.k_actions, 0.0));
        for (std::size_t x = 0; x < s.n_contexts; ++x) t[x][choice[x]] = 1.0;
        out.push_back(std::move(t));
        std::size_t i = 0;
        while (i < s.n_contexts && ++choice[i] == s.k_actions) choice[i++] = 0;
        if (i == s.n_contexts) break;
    }
    return out;
}

/// V(pi) = E_{x ~ d0, a ~ pi}[R(x, a)].
inline double exact_value(const TabularEnvSpec& s, const PolicyTable& pi) {
    double v = 0.0;
    for (std::size_t x = 0; x < s.n_contexts; ++x)
        for (std::size_t a = 0; a < s.k_actions; ++a) v += s.context_probs[x] * pi[x][a] * s.reward_table[x][a];
    return v;
}

inline double optimal_value(const TabularEnvSpec& s) {
    double v = 0.0;
    for (std::size_t x = 0; x < s.n_contexts; ++x)
        v += s.context_probs[x] * *std::max_element(s.reward_table[x].begin(), s.reward_table[x].end());
    return v;
}

/// V(pi, psi) = E[psi(y)] under d0 x pi, enumerating (x, a, r, y) with the
/// full feedback law.
inline double exact_decoded_value(const TabularEnvSpec& s, const PolicyTable& pi, const DecoderTable& psi) {
    double v = 0.0;
    for (std::size_t x = 0; x < s.n_contexts; ++x)
        for (std::size_t a = 0; a < s.k_actions; ++a) {
            const double pxa = s.context_probs[x] * pi[x][a];
            if (pxa == 0.0) continue;
            const double rp = s.reward_table[x][a];
            for (int r = 0; r < 2; ++r) {
                const double pr = r == 1 ? rp : 1.0 - rp;
                if (pr == 0.0) continue;
                const auto& law = s.law(x, a, r);
                double e = 0.0;
                for (std::size_t y = 0; y < s.alphabet_size(); ++y) e += law[y] * psi[y];
                v += pxa * pr * e;
            }
        }
    return v;
}

/// L(pi, psi) = V(pi, psi) - V(pi_bad, psi) with pi_bad uniform.
inline double exact_objective(const TabularEnvSpec& s, const PolicyTable& pi, const DecoderTable& psi) {
    return exact_decoded_value(s, pi, psi) - exact_decoded_value(s, uniform_policy_table(s), psi);
}

/// Delta psi = E[psi | r = 1] - E[psi | r = 0] under the reward-only law.
inline double exact_delta_psi(const TabularEnvSpec& s, const DecoderTable& psi) {
    double d = 0.0;
    for (std::size_t y = 0; y < s.alphabet_size(); ++y)
        d += psi[y] * (s.feedback_given_reward[1][y] - s.feedback_given_reward[0][y]);
    return d;
}

struct ConditionalIndependenceReport {
    bool holds = true;
    double max_violation = 0.0;
};

/// max over reachable (x, a, r, y) of |P(y | x, a, r) - P(y | r)|, where P(y | r)
/// mixes over d0 x uniform.
inline ConditionalIndependenceReport check_conditional_independence(const TabularEnvSpec& s) {
    validate(s);
    const double pa = 1.0 / static_cast<double>(s.k_actions);
    std::array<std::vector<double>, 2> marginal{std::vector<double>(s.alphabet_size(), 0.0),
                                                std::vector<double>(s.alphabet_size(), 0.0)};
    std::array<double, 2> mass{0.0, 0.0};
    for (std::size_t x = 0; x < s.n_contexts; ++x)
        for (std::size_t a = 0; a < s.k_actions; ++a)
            for (int r = 0; r < 2; ++r) {
                const double rp = r == 1 ? s.reward_table[x][a] : 1.0 - s.reward_table[x][a];
                const double w = s.context_probs[x] * pa * rp;
                if (w == 0.0) continue;
                mass[r] += w;
                const auto& law = s.law(x, a, r);
                for (std::size_t y = 0; y < s.alphabet_size(); ++y) marginal[r][y] += w * law[y];
            }
    for (int r = 0; r < 2; ++r)
        if (mass[r] > 0.0)
            for (double& v : marginal[r]) v /= mass[r];

    ConditionalIndependenceReport rep;
    for (std::size_t x = 0; x < s.n_contexts; ++x)
        for (std::size_t a = 0; a < s.k_actions; ++a)
            for (int r = 0; r < 2; ++r) {
                const double rp = r == 1 ? s.reward_table[x][a] : 1.0 - s.reward_table[x][a];
                if (s.context_probs[x] * rp == 0.0) continue;
                const auto& law = s.law(x, a, r);
                for (std::size_t y = 0; y < s.alphabet_size(); ++y)
                    rep.max_violation = std::max(rep.max_violation, std::abs(law[y] - marginal[r][y]));
            }
    rep.holds = rep.max_violation <= 1e-12;
    return rep;
}

// ---------------------------------------------------------------------------
// Environment interface
// ---------------------------------------------------------------------------

class Environment {
public:
    virtual ~Environment() = default;

    virtual std::size_t k_actions() const = 0;
    virtual std::size_t context_dim() const = 0;
    virtual std::size_t feedback_dim() const = 0;

    virtual Context sample_context(RngStream& rng) const = 0;

    /// Draws r ~ Bernoulli(R(x, a)) and then y ~ P(y | x, a, r). Only y is
    /// returned; r goes to the oracle trace.
    FeatureVector step(const Context& ctx, std::size_t action, RngStream& rng) {
        if (action >= k_actions())
            throw RangeError("step: action " + std::to_string(action) + " >= K = " + std::to_string(k_actions()));
        const int r = rng.uniform() < reward_prob(ctx, action) ? 1 : 0;
        last_feedback_tag_ = -1;
        auto y = emit_feedback(ctx, action, r, rng);
        last_reward_ = r;
        ++steps_;
        reward_sum_ += static_cast<std::uint64_t>(r);
        return y;
    }

protected:
    static Context make_context(FeatureVector f, std::size_t key) { return {std::move(f), key}; }
    static std::size_t key_of(const Context& c) { return c.key_; }
    void set_feedback_tag(int tag) const { last_feedback_tag_ = tag; }

private:
    friend class EnvOracle;

    virtual double reward_prob(const Context& ctx, std::size_t action) const = 0;
    virtual FeatureVector sample_feedback(int reward, RngStream& rng) const = 0;
    virtual FeatureVector emit_feedback(const Context&, std::size_t, int reward, RngStream& rng) const {
        return sample_feedback(reward, rng);
    }
    virtual const TabularEnvSpec* tabular_spec() const { return nullptr; }

    int last_reward_ = 0;
    mutable int last_feedback_tag_ = -1;
    std::uint64_t steps_ = 0;
    std::uint64_t reward_sum_ = 0;
};

/// Evaluation-only handle onto an environment's latent reward.
class EnvOracle {
public:
    explicit EnvOracle(const Environment& env) : env_(&env) {}

    std::size_t k_actions() const { return env_->k_actions(); }
    int last_reward() const { return env_->last_reward_; }
    /// Label of the pool the last feedback was drawn from (-1 if untagged).
    int last_feedback_tag() const { return env_->last_feedback_tag_; }
    std::uint64_t steps() const { return env_->steps_; }
    std::uint64_t reward_sum() const { return env_->reward_sum_; }
    double reward_prob(const Context& ctx, std::size_t action) const { return env_->reward_prob(ctx, action); }
    std::size_t context_key(const Context& ctx) const { return ctx.key_; }
    FeatureVector sample_feedback(int reward, RngStream& rng) const { return env_->sample_feedback(reward, rng); }
    const TabularEnvSpec* tabular() const { return env_->tabular_spec(); }
    Context sample_context(RngStream& rng) const { return env_->sample_context(rng); }

private:
    const Environment* env_;
};

class TabularEnv final : public Environment {
public:
    explicit TabularEnv(TabularEnvSpec spec) : spec_(std::move(spec)) { validate(spec_); }

    const TabularEnvSpec& spec() const { return spec_; }
    std::size_t k_actions() const override { return spec_.k_actions; }
    std::size_t context_dim() const override { return spec_.n_contexts; }
    std::size_t feedback_dim() const override { return spec_.feedback_alphabet.front().size(); }

    Context sample_context(RngStream& rng) const override {
        const std::size_t x = rng.categorical(spec_.context_probs);
        return make_context(one_hot(spec_.n_contexts, x), x);
    }

private:
    double reward_prob(const Context& ctx, std::size_t a) const override {
        return spec_.reward_table[key_of(ctx)][a];
    }
    FeatureVector sample_feedback(int r, RngStream& rng) const override {
        const auto y = rng.categorical(spec_.feedback_given_reward[static_cast<std::size_t>(r)]);
        set_feedback_tag(static_cast<int>(y));
        return spec_.feedback_alphabet[y];
    }
    FeatureVector emit_feedback(const Context& ctx, std::size_t a, int r, RngStream& rng) const override {
        const auto y = rng.categorical(spec_.law(key_of(ctx), a, r));
        set_feedback_tag(static_cast<int>(y));
        return spec_.feedback_alphabet[y];
    }
    const TabularEnvSpec* tabular_spec() const override { return &spec_; }

    TabularEnvSpec spec_;
};

/// Enumerable environments only; sampled ones raise UnsupportedError.
inline ConditionalIndependenceReport check_conditional_independence(const Environment& env) {
    const auto* spec = EnvOracle(env).tabular();
    if (spec == nullptr) throw UnsupportedError("check_conditional_independence: environment is not tabular");
    return check_conditional_independence(*spec);
}

inline std::unique_ptr<TabularEnv> make_tabular_env(TabularEnvSpec spec) {
    return std::make_unique<TabularEnv>(std::move(spec));
}

// ---------------------------------------------------------------------------
// Image-pool environments (MNIST feedback, ambiguity family)
// ---------------------------------------------------------------------------

using ImagePool = std::shared_ptr<const std::vector<FeatureVector>>;

struct PoolComponent {
    double weight = 1.0;
    ImagePool pool;
    int digit = -1;
};

/// Contexts are drawn uniformly from a labeled pool; reward is label
/// correctness; feedback is drawn from a per-reward mixture of image pools.
struct PoolEnvSpec {
    std::shared_ptr<const LabeledDataset> contexts;
    std::array<std::vector<PoolComponent>, 2> feedback;  // index = reward
    std::size_t k_actions = 10;
    int shift_radius = 0;
};

class PoolEnv final : public Environment {
public:
    explicit PoolEnv(PoolEnvSpec spec) : spec_(std::move(spec)) {
        if (!spec_.contexts || spec_.contexts->size() == 0) throw DataError("PoolEnv: empty context pool");
        for (int r = 0; r < 2; ++r) {
            if (spec_.feedback[r].empty()) throw DataError("PoolEnv: no feedback pool for reward " + std::to_string(r));
            for (const auto& c : spec_.feedback[r]) {
                if (!c.pool || c.pool->empty())
                    throw DataError("PoolEnv: empty feedback pool for digit " + std::to_string(c.digit));
                weights_[r].push_back(c.weight);
            }
        }
        for (int label : spec_.contexts->labels)
            if (label < 0 || static_cast<std::size_t>(label) >= spec_.k_actions)
                throw DataError("PoolEnv: context label out of range");
        if (spec_.shift_radius > 0 && spec_.contexts->image_side == 0)
            throw ValidationError("PoolEnv: shift augmentation needs square images");
    }

    const PoolEnvSpec& spec() const { return spec_; }
    std::size_t k_actions() const override { return spec_.k_actions; }
    std::size_t context_dim() const override { return spec_.contexts->dim(); }
    std::size_t feedback_dim() const override { return spec_.feedback[0].front().pool->front().size(); }

    Context sample_context(RngStream& rng) const override {
        const auto i = static_cast<std::size_t>(rng.uniform_int(spec_.contexts->size()));
        return make_context(augment(spec_.contexts->images[i], rng), i);
    }

private:
    double reward_prob(const Context& ctx, std::size_t a) const override {
        return spec_.contexts->labels[key_of(ctx)] == static_cast<int>(a) ? 1.0 : 0.0;
    }
    FeatureVector sample_feedback(int r, RngStream& rng) const override {
        const auto& mix = spec_.feedback[static_cast<std::size_t>(r)];
        const auto c = mix.size() == 1 ? 0 : rng.categorical(weights_[r]);
        const auto& pool = *mix[c].pool;
        const auto i = static_cast<std::size_t>(rng.uniform_int(pool.size()));
        set_feedback_tag(mix[c].digit);
        return augment(pool[i], rng);
    }

    FeatureVector augment(const FeatureVector& img, RngStream& rng) const {
        if (spec_.shift_radius == 0) return img;
        return augment_shift(img, rng, spec_.shift_radius, spec_.contexts->image_side);
    }

    PoolEnvSpec spec_;
    std::array<std::vector<double>, 2> weights_;
};

/// All images of `digit` in `ds`.
inline ImagePool digit_pool(const LabeledDataset& ds, int digit) {
    auto pool = std::make_shared<std::vector<FeatureVector>>();
    for (std::size_t i = 0; i < ds.size(); ++i)
        if (ds.labels[i] == digit) pool->push_back(ds.images[i]);
    if (pool->empty()) throw DataError("no images with label " + std::to_string(digit));
    return pool;
}

/// Reward 1 shows a "1" image, reward 0 a "0" image.
inline std::unique_ptr<PoolEnv> make_mnist_env(std::shared_ptr<const LabeledDataset> contexts,
                                               const LabeledDataset& feedback_images, int shift_radius = 0) {
    PoolEnvSpec s;
    s.contexts = std::move(contexts);
    s.feedback[1] = {{1.0, digit_pool(feedback_images, 1), 1}};
    s.feedback[0] = {{1.0, digit_pool(feedback_images, 0), 0}};
    s.shift_radius = shift_radius;
    return std::make_unique<PoolEnv>(std::move(s));
}

/// ENV(1), ENV(2), or member i of the ten-environment family.
struct AmbiguityVariant {
    enum class Kind { env1, env2, family } kind = Kind::env1;
    int member = 0;  // family only

    static AmbiguityVariant env1() { return {Kind::env1, 0}; }
    static AmbiguityVariant env2() { return {Kind::env2, 0}; }
    static AmbiguityVariant family(int i) { return {Kind::family, i}; }
};

inline std::unique_ptr<PoolEnv> make_ambiguity_env(AmbiguityVariant v, std::shared_ptr<const LabeledDataset> contexts,
                                                   const LabeledDataset& feedback_images, int shift_radius = 0) {
    PoolEnvSpec s;
    s.contexts = std::move(contexts);
    s.shift_radius = shift_radius;
    switch (v.kind) {
        case AmbiguityVariant::Kind::env1:
            s.feedback[0] = {{8.0 / 9.0, digit_pool(feedback_images, 0), 0},
                             {1.0 / 9.0, digit_pool(feedback_images, 1), 1}};
            s.feedback[1] = {{1.0, digit_pool(feedback_images, 2), 2}};
            break;
        case AmbiguityVariant::Kind::env2:
            s.feedback[0] = {{8.0 / 9.0, digit_pool(feedback_images, 0), 0},
                             {1.0 / 9.0, digit_pool(feedback_images, 2), 2}};
            s.feedback[1] = {{1.0, digit_pool(feedback_images, 1), 1}};
            break;
        case AmbiguityVariant::Kind::family: {
            if (v.member < 0 || v.member > 9) throw ValidationError("family member must be in 0..9");
            for (int d = 0; d < 10; ++d)
                if (d != v.member) s.feedback[0].push_back({1.0 / 9.0, digit_pool(feedback_images, d), d});
            s.feedback[1] = {{1.0, digit_pool(feedback_images, v.member), v.member}};
            break;
        }
    }
    return std::make_unique<PoolEnv>(std::move(s));
}

// ---------------------------------------------------------------------------
// Synthetic blob digits
// ---------------------------------------------------------------------------

/// Ten unit-variance Gaussian classes in 64 dimensions; each mean lies at
/// distance 6 from the origin along a direction fixed by `geometry_seed`.
struct BlobGeometry {
    static constexpr std::size_t kClasses = 10;
    static constexpr std::size_t kDim = 64;
    static constexpr double kRadius = 6.0;
    std::vector<FeatureVector> means;
};

inline constexpr std::uint64_t kDefaultBlobGeometrySeed = 20210611;

inline BlobGeometry make_blob_geometry(std::uint64_t geometry_seed = kDefaultBlobGeometrySeed) {
    RngStream rng(geometry_seed, detail::fnv1a("blob-geometry"));
    BlobGeometry g;
    for (std::size_t c = 0; c < BlobGeometry::kClasses; ++c) {
        FeatureVector m(BlobGeometry::kDim);
        double norm = 0.0;
        for (double& v : m) {
            v = rng.normal();
            norm += v * v;
        }
        norm = std::sqrt(norm);
        for (double& v : m) v *= BlobGeometry::kRadius / norm;
        g.means.push_back(std::move(m));
    }
    return g;
}

/// n samples with labels uniform over the ten classes.
inline LabeledDataset make_blob_digits(const BlobGeometry& g, std::size_t n, RngStream& rng) {
    LabeledDataset ds;
    ds.images.reserve(n);
    ds.labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = static_cast<std::size_t>(rng.uniform_int(BlobGeometry::kClasses));
        FeatureVector x = g.means[c];
        for (double& v : x) v += rng.normal();
        ds.images.push_back(std::move(x));
        ds.labels.push_back(static_cast<int>(c));
    }
    return ds;
}

// ---------------------------------------------------------------------------
// Oracle evaluation
// ---------------------------------------------------------------------------

enum class PolicyMode { stochastic, greedy };

/// Tabular: exact V(pi). Otherwise a Monte Carlo estimate over n_mc contexts
/// (actions integrated exactly).
inline double oracle_value(const EnvOracle& oracle, const LinearSoftmaxPolicy& policy,
                           std::size_t n_mc, RngStream& rng, PolicyMode mode = PolicyMode::stochastic) {
    if (const auto* spec = oracle.tabular())
        return exact_value(*spec, mode == PolicyMode::greedy ? tabulate_greedy(*spec, policy) : tabulate(*spec, policy));
    if (n_mc == 0) throw ValidationError("oracle_value: n_mc must be positive");
    double total = 0.0;
    std::vector<double> p(policy.k_actions);
    for (std::size_t i = 0; i < n_mc; ++i) {
        const auto ctx = oracle.sample_context(rng);
        if (mode == PolicyMode::greedy) {
            total += oracle.reward_prob(ctx, policy_greedy(policy, ctx.features()));
        } else {
            policy_probs(policy, ctx.features(), p);
            for (std::size_t a = 0; a < p.size(); ++a) total += p[a] * oracle.reward_prob(ctx, a);
        }
    }
    return total / static_cast<double>(n_mc);
}

// ---------------------------------------------------------------------------
// Batch data collection
// ---------------------------------------------------------------------------

struct UniformBatch {
    InteractionLog log;
    std::vector<int> rewards;  // oracle-side; learners that may see rewards read these
    RunRecord record;
};

/// n interactions under the uniform policy. Rewards are read through the
/// oracle for the record.
inline UniformBatch collect_uniform(Environment& env, std::size_t n, RngStream& rng) {
    const EnvOracle oracle(env);
    RngStream env_rng = split_rng(rng, "env");
    RngStream act_rng = split_rng(rng, "explore");
    const std::size_t k = env.k_actions();
    UniformBatch out{InteractionLog(k), {}, {}};
    out.log.reserve(n);
    out.rewards.reserve(n);
    out.record.entries.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto ctx = env.sample_context(env_rng);
        const auto a = static_cast<std::size_t>(act_rng.uniform_int(k));
        auto y = env.step(ctx, a, env_rng);
        out.log.append({ctx.features(), a, std::move(y), 1.0 / static_cast<double>(k)});
        out.rewards.push_back(oracle.last_reward());
        out.record.entries.push_back({i + 1, Mode::explore, a, oracle.last_reward(), std::nullopt, 0});
    }
    return out;
}

}  // namespace igl
