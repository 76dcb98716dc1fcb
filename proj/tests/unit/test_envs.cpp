#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <memory>
#include <random>

#include "igl/envs.hpp"
#include "support.hpp"

using namespace igl;

namespace {

// Ten labels, `per` images each. Image i of label c is one_hot(10, c) plus a
// small per-image offset so pools hold distinct vectors.
LabeledDataset tiny_digits(std::size_t per = 4, int skip = -1) {
    LabeledDataset ds;
    for (int c = 0; c < 10; ++c) {
        if (c == skip) continue;
        for (std::size_t i = 0; i < per; ++i) {
            auto v = one_hot(10, static_cast<std::size_t>(c));
            v[(static_cast<std::size_t>(c) + 1) % 10] = 0.01 * static_cast<double>(i);
            ds.images.push_back(v);
            ds.labels.push_back(c);
        }
    }
    return ds;
}

std::shared_ptr<const LabeledDataset> shared(LabeledDataset ds) {
    return std::make_shared<const LabeledDataset>(std::move(ds));
}

// feedback tags over n steps where every chosen action is correct, or wrong
std::map<int, int> tag_counts(Environment& env, bool correct, int n, std::uint64_t seed) {
    const EnvOracle oracle(env);
    RngStream rng(seed, 0);
    std::map<int, int> out;
    for (int i = 0; i < n; ++i) {
        const auto c = env.sample_context(rng);
        std::size_t a = 0;
        while ((oracle.reward_prob(c, a) == 1.0) != correct) ++a;
        env.step(c, a, rng);
        ++out[oracle.last_feedback_tag()];
    }
    return out;
}

}  // namespace

TEST(TabularEnvTest, ContextFrequencies) {
    auto env = make_tabular_env(tab_2x3());
    const EnvOracle oracle(*env);
    RngStream rng(1, 0);
    int zeros = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) zeros += oracle.context_key(env->sample_context(rng)) == 0;
    EXPECT_NEAR(zeros / double(n), 0.5, 4.0 * std::sqrt(0.25 / n));
}

TEST(TabularEnvTest, StepRewardFrequency) {
    TabularEnvSpec s = tab_2x3();
    s.n_contexts = 1;
    s.context_probs = {1.0};
    s.reward_table = {{0.9, 0.0, 0.0}};
    auto env = make_tabular_env(s);
    const EnvOracle oracle(*env);
    RngStream rng(2, 0);
    const int n = 20000;
    int hits = 0;
    for (int i = 0; i < n; ++i) {
        env->step(env->sample_context(rng), 0, rng);
        hits += oracle.last_reward();
    }
    EXPECT_NEAR(hits / double(n), 0.9, 4.0 * std::sqrt(0.09 / n));
    EXPECT_EQ(oracle.steps(), static_cast<std::uint64_t>(n));
    EXPECT_EQ(oracle.reward_sum(), static_cast<std::uint64_t>(hits));
}

TEST(TabularEnvTest, FeedbackDependsOnRewardOnly) {
    auto env = make_tabular_env(tab_2x3());
    const EnvOracle oracle(*env);
    RngStream rng(3, 0);
    // P(f1 | r=1) should be 0.9 and P(f1 | r=0) 0.1
    int n1 = 0, f1r1 = 0, n0 = 0, f1r0 = 0;
    for (int i = 0; i < 30000; ++i) {
        const auto c = env->sample_context(rng);
        const auto y = env->step(c, rng.uniform_int(3), rng);
        if (oracle.last_reward()) {
            ++n1;
            f1r1 += y[1] == 1.0;
        } else {
            ++n0;
            f1r0 += y[1] == 1.0;
        }
    }
    EXPECT_NEAR(f1r1 / double(n1), 0.9, 0.02);
    EXPECT_NEAR(f1r0 / double(n0), 0.1, 0.01);
}

TEST(TabularEnvTest, StepRejectsBadAction) {
    auto env = make_tabular_env(tab_2x3());
    RngStream rng(1, 0);
    EXPECT_THROW(env->step(env->sample_context(rng), 3, rng), RangeError);
}

TEST(TabularEnvTest, ReferenceValues) {
    const auto s = tab_2x3();
    EXPECT_NEAR(exact_value(s, uniform_policy_table(s)), 1.0 / 3.0, 1e-15);
    EXPECT_DOUBLE_EQ(optimal_value(s), 1.0);
    // psi = identity on the second coordinate
    EXPECT_NEAR(exact_delta_psi(s, {0.0, 1.0}), 0.8, 1e-15);
    EXPECT_NEAR(testing_support::enum_delta_psi(s, {0.0, 1.0}), 0.8, 1e-15);
}

TEST(TabularEnvTest, MalformedSpecsRejected) {
    auto s = tab_2x3();
    s.context_probs = {0.5, 0.6};
    EXPECT_THROW(make_tabular_env(s), ValidationError);
    s = tab_2x3();
    s.feedback_given_reward[1] = {0.2, 0.9};
    EXPECT_THROW(make_tabular_env(s), ValidationError);
    s = tab_2x3();
    s.reward_table[0][1] = 1.5;
    EXPECT_THROW(make_tabular_env(s), ValidationError);
    s = tab_2x3();
    s.context_probs = {-0.5, 1.5};
    EXPECT_THROW(make_tabular_env(s), ValidationError);
    s = tab_2x3();
    s.k_actions = 1;
    EXPECT_THROW(validate(s), ValidationError);
}

TEST(TabularEnvTest, DeterministicPolicyCount) {
    const auto s = tab_2x3();
    const auto all = deterministic_policies(s);
    EXPECT_EQ(all.size(), 9u);
    double best = 0.0;
    for (const auto& p : all) best = std::max(best, exact_value(s, p));
    EXPECT_DOUBLE_EQ(best, 1.0);
}

TEST(ConditionalIndependence, ReferenceHolds) {
    const auto rep = check_conditional_independence(tab_2x3());
    EXPECT_TRUE(rep.holds);
    EXPECT_EQ(rep.max_violation, 0.0);
}

TEST(ConditionalIndependence, ContextDependentLawViolates) {
    auto s = tab_2x3();
    // feedback under r=1 differs between the two contexts
    s.feedback_law.assign(s.n_contexts * s.k_actions * 2, {0.9, 0.1});
    for (std::size_t a = 0; a < 3; ++a) {
        s.feedback_law[(0 * 3 + a) * 2 + 1] = {0.1, 0.9};
        s.feedback_law[(1 * 3 + a) * 2 + 1] = {0.5, 0.5};
    }
    const auto rep = check_conditional_independence(s);
    EXPECT_FALSE(rep.holds);
    EXPECT_NEAR(rep.max_violation, 0.2, 1e-12);
}

TEST(ConditionalIndependence, ExplicitLawEqualToReducedHolds) {
    auto s = tab_2x3();
    for (std::size_t i = 0; i < s.n_contexts * s.k_actions; ++i) {
        s.feedback_law.push_back(s.feedback_given_reward[0]);
        s.feedback_law.push_back(s.feedback_given_reward[1]);
    }
    EXPECT_TRUE(check_conditional_independence(s).holds);
}

TEST(ConditionalIndependence, SampledEnvUnsupported) {
    const auto digits = tiny_digits();
    auto env = make_mnist_env(shared(digits), digits);
    EXPECT_THROW(check_conditional_independence(*env), UnsupportedError);
    auto tab = make_tabular_env(tab_2x3());
    EXPECT_TRUE(check_conditional_independence(*tab).holds);
}

TEST(PoolEnvTest, MnistCorrectActionShowsOne) {
    const auto digits = tiny_digits();
    auto env = make_mnist_env(shared(digits), digits);
    const auto right = tag_counts(*env, true, 300, 4);
    ASSERT_EQ(right.size(), 1u);
    EXPECT_EQ(right.begin()->first, 1);
    const auto wrong = tag_counts(*env, false, 300, 5);
    ASSERT_EQ(wrong.size(), 1u);
    EXPECT_EQ(wrong.begin()->first, 0);
}

TEST(PoolEnvTest, ContextRewardIsLabelMatch) {
    const auto digits = tiny_digits();
    auto env = make_mnist_env(shared(digits), digits);
    const EnvOracle oracle(*env);
    RngStream rng(6, 0);
    for (int i = 0; i < 50; ++i) {
        const auto c = env->sample_context(rng);
        const int label = digits.labels[oracle.context_key(c)];
        for (std::size_t a = 0; a < 10; ++a)
            EXPECT_EQ(oracle.reward_prob(c, a), static_cast<int>(a) == label ? 1.0 : 0.0);
    }
}

TEST(PoolEnvTest, FamilyZeroWrongActionUniformOverOthers) {
    const auto digits = tiny_digits();
    auto env = make_ambiguity_env(AmbiguityVariant::family(0), shared(digits), digits);
    const int n = 18000;
    const auto tags = tag_counts(*env, false, n, 7);
    EXPECT_EQ(tags.count(0), 0u);
    ASSERT_EQ(tags.size(), 9u);
    const double p = 1.0 / 9.0, se = std::sqrt(p * (1 - p) / n);
    for (const auto& [d, c] : tags) {
        EXPECT_GE(d, 1);
        EXPECT_NEAR(c / double(n), p, 4.0 * se) << "digit " << d;
    }
    const auto right = tag_counts(*env, true, 200, 8);
    ASSERT_EQ(right.size(), 1u);
    EXPECT_EQ(right.begin()->first, 0);
}

TEST(PoolEnvTest, FamilyMembersDifferInRewardDigit) {
    const auto digits = tiny_digits();
    auto e3 = make_ambiguity_env(AmbiguityVariant::family(3), shared(digits), digits);
    auto e7 = make_ambiguity_env(AmbiguityVariant::family(7), shared(digits), digits);
    EXPECT_EQ(tag_counts(*e3, true, 100, 9).begin()->first, 3);
    EXPECT_EQ(tag_counts(*e7, true, 100, 9).begin()->first, 7);
    EXPECT_THROW(make_ambiguity_env(AmbiguityVariant::family(10), shared(digits), digits), ValidationError);
}

TEST(PoolEnvTest, AmbiguousPairSharesMarginals) {
    const auto digits = tiny_digits();
    // uniform actions over K = 10: P(r=1) = 0.1
    for (auto v : {AmbiguityVariant::env1(), AmbiguityVariant::env2()}) {
        auto env = make_ambiguity_env(v, shared(digits), digits);
        RngStream rng(10, 0);
        const EnvOracle oracle(*env);
        std::map<int, int> tags;
        const int n = 40000;
        for (int i = 0; i < n; ++i) {
            env->step(env->sample_context(rng), rng.uniform_int(10), rng);
            ++tags[oracle.last_feedback_tag()];
        }
        EXPECT_EQ(tags.size(), 3u);
        EXPECT_NEAR(tags[0] / double(n), 0.8, 0.01);
        EXPECT_NEAR(tags[1] / double(n), 0.1, 0.01);
        EXPECT_NEAR(tags[2] / double(n), 0.1, 0.01);
    }
}

TEST(PoolEnvTest, AmbiguousPairSwapsRewardDigit) {
    const auto digits = tiny_digits();
    auto e1 = make_ambiguity_env(AmbiguityVariant::env1(), shared(digits), digits);
    auto e2 = make_ambiguity_env(AmbiguityVariant::env2(), shared(digits), digits);
    EXPECT_EQ(tag_counts(*e1, true, 100, 11).begin()->first, 2);
    EXPECT_EQ(tag_counts(*e2, true, 100, 11).begin()->first, 1);
}

TEST(PoolEnvTest, MissingDigitPoolIsDataError) {
    const auto digits = tiny_digits();
    const auto no_two = tiny_digits(4, 2);
    EXPECT_THROW(make_ambiguity_env(AmbiguityVariant::env1(), shared(digits), no_two), DataError);
    EXPECT_THROW(make_mnist_env(shared(LabeledDataset{}), digits), DataError);
    EXPECT_NO_THROW(make_mnist_env(shared(digits), no_two));
}

TEST(OracleValue, TabularExact) {
    auto env = make_tabular_env(tab_2x3());
    const EnvOracle oracle(*env);
    RngStream rng(1, 0);
    LinearSoftmaxPolicy uniform(3, 2);
    EXPECT_NEAR(oracle_value(oracle, uniform, 0, rng), 1.0 / 3.0, 1e-15);
    LinearSoftmaxPolicy best(3, 2);
    best.weights = {1, 0, 0, 1, 0, 0};
    EXPECT_DOUBLE_EQ(oracle_value(oracle, best, 0, rng, PolicyMode::greedy), 1.0);
    // stochastic V of a softmax policy against the test-side enumerator
    const auto table = tabulate(env->spec(), best);
    EXPECT_NEAR(oracle_value(oracle, best, 0, rng), testing_support::enum_value(env->spec(), table), 1e-15);
}

TEST(OracleValue, PerfectClassifierOnOneHotData) {
    LabeledDataset ds;
    for (int c = 0; c < 10; ++c)
        for (int i = 0; i < 3; ++i) {
            ds.images.push_back(one_hot(10, static_cast<std::size_t>(c)));
            ds.labels.push_back(c);
        }
    auto env = make_mnist_env(shared(ds), ds);
    const EnvOracle oracle(*env);
    LinearSoftmaxPolicy p(10, 10);
    for (std::size_t a = 0; a < 10; ++a) p.weights[a * 10 + a] = 1.0;
    RngStream rng(12, 0);
    EXPECT_DOUBLE_EQ(oracle_value(oracle, p, 500, rng, PolicyMode::greedy), 1.0);
    LinearSoftmaxPolicy uniform(10, 10);
    EXPECT_NEAR(oracle_value(oracle, uniform, 500, rng), 0.1, 1e-12);
    EXPECT_THROW(oracle_value(oracle, p, 0, rng), ValidationError);
}

TEST(Blobs, GeometryIsPinnedAndRadial) {
    const auto g = make_blob_geometry();
    ASSERT_EQ(g.means.size(), 10u);
    for (const auto& m : g.means) {
        double n = 0.0;
        for (double v : m) n += v * v;
        EXPECT_NEAR(std::sqrt(n), 6.0, 1e-12);
    }
    const auto g2 = make_blob_geometry();
    EXPECT_EQ(g.means, g2.means);
    RngStream a(1, 0), b(1, 0);
    const auto d1 = make_blob_digits(g, 50, a);
    const auto d2 = make_blob_digits(g, 50, b);
    EXPECT_EQ(d1.images, d2.images);
    EXPECT_EQ(d1.labels, d2.labels);
}

TEST(CollectUniform, ShapesAndPropensities) {
    auto env = make_tabular_env(tab_2x3());
    RngStream rng(13, 0);
    const auto b = collect_uniform(*env, 300, rng);
    EXPECT_EQ(b.log.size(), 300u);
    EXPECT_EQ(b.rewards.size(), 300u);
    EXPECT_EQ(b.record.entries.size(), 300u);
    for (const auto& it : b.log) EXPECT_DOUBLE_EQ(it.behavior_prob, 1.0 / 3.0);
    for (std::size_t i = 0; i < 300; ++i) EXPECT_EQ(b.record.entries[i].oracle_reward, b.rewards[i]);
}
