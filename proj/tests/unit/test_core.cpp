#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "igl/core.hpp"

using namespace igl;

TEST(Rng, SameSeedAndStreamReproduce) {
    RngStream a(11, 5), b(11, 5);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, SplitmixMatchesPublishedValue) {
    // first output of splitmix64 from state 0
    std::uint64_t s = 0;
    EXPECT_EQ(detail::splitmix64(s), 0xe220a8397b1dcdafULL);
}

TEST(Rng, ForkSameLabelIdentical) {
    RngStream p(3, 0);
    auto a = fork_rng(p, "env");
    auto b = fork_rng(p, "env");
    for (int i = 0; i < 50; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, ForkDistinctLabelsDiffer) {
    RngStream p(3, 0);
    auto a = fork_rng(p, "env");
    auto b = fork_rng(p, "opt");
    int same = 0;
    for (int i = 0; i < 4; ++i) same += a.next_u64() == b.next_u64();
    EXPECT_EQ(same, 0);
}

TEST(Rng, ForkIndependentOfParentDraws) {
    RngStream p(3, 0);
    auto a = fork_rng(p, "env");
    (void)p.next_u64();
    auto b = fork_rng(p, "env");
    EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, SplitAdvancesParent) {
    RngStream p(3, 0), q(3, 0);
    auto a = split_rng(p, "env");
    auto b = split_rng(p, "env");
    EXPECT_NE(a.next_u64(), b.next_u64());
    RngStream r(3, 0);
    EXPECT_EQ(split_rng(q, "env").next_u64(), split_rng(r, "env").next_u64());  // same history, same child
}

TEST(Rng, GoldenSequenceIsPinned) {
    // portability: these values must not change across platforms or builds
    RngStream p(7, 0);
    auto c = fork_rng(p, "env");
    EXPECT_EQ(c.next_u64(), 15919148224853206198ull);
    EXPECT_EQ(c.next_u64(), 5816981847810863607ull);
    EXPECT_EQ(c.next_u64(), 6095333894373191625ull);
    RngStream r(42, 3);
    EXPECT_EQ(r.next_u64(), 16155003913189609677ull);
}

TEST(Rng, UniformRangeAndMean) {
    RngStream r(1, 1);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = r.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
    }
    // 3 standard errors of a U(0,1) mean
    EXPECT_NEAR(sum / n, 0.5, 3.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST(Rng, UniformIntBoundsAndFrequencies) {
    RngStream r(2, 1);
    std::vector<int> counts(7, 0);
    const int n = 70000;
    for (int i = 0; i < n; ++i) {
        const auto v = r.uniform_int(7);
        ASSERT_LT(v, 7u);
        ++counts[v];
    }
    const double p = 1.0 / 7.0, se = std::sqrt(p * (1 - p) / n);
    for (int c : counts) EXPECT_NEAR(static_cast<double>(c) / n, p, 4.0 * se);
    EXPECT_THROW(r.uniform_int(0), RangeError);
}

TEST(Rng, NormalMoments) {
    RngStream r(3, 1);
    const int n = 200000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = r.normal();
        s += z;
        s2 += z * z;
    }
    EXPECT_NEAR(s / n, 0.0, 4.0 / std::sqrt(n));
    EXPECT_NEAR(s2 / n, 1.0, 4.0 * std::sqrt(2.0 / n));
}

TEST(Rng, CategoricalFrequencies) {
    RngStream r(4, 1);
    const std::vector<double> w{1.0, 3.0, 0.0, 6.0};
    std::vector<int> counts(4, 0);
    const int n = 100000;
    for (int i = 0; i < n; ++i) ++counts[r.categorical(w)];
    EXPECT_EQ(counts[2], 0);
    EXPECT_NEAR(counts[0] / double(n), 0.1, 0.006);
    EXPECT_NEAR(counts[1] / double(n), 0.3, 0.006);
    EXPECT_NEAR(counts[3] / double(n), 0.6, 0.006);
    const std::vector<double> zero{0.0, 0.0};
    EXPECT_THROW(r.categorical(zero), ValidationError);
}

TEST(Rng, ShuffleIsPermutation) {
    RngStream r(5, 1);
    std::vector<int> v(100);
    std::iota(v.begin(), v.end(), 0);
    auto w = v;
    r.shuffle(w);
    EXPECT_NE(v, w);
    std::sort(w.begin(), w.end());
    EXPECT_EQ(v, w);
}

namespace {
InteractionLog make_log(std::size_t n, std::size_t k = 3) {
    InteractionLog log(k);
    for (std::size_t i = 0; i < n; ++i)
        log.append({{static_cast<double>(i), 1.0}, i % k, {0.5}, 1.0 / static_cast<double>(k)});
    return log;
}
}  // namespace

TEST(InteractionLogTest, AppendValidates) {
    InteractionLog log(3);
    EXPECT_THROW(log.append({{1.0}, 3, {0.0}, 0.5}), RangeError);
    EXPECT_THROW(log.append({{1.0}, 0, {0.0}, 0.0}), ValidationError);
    EXPECT_THROW(log.append({{1.0}, 0, {0.0}, 1.5}), ValidationError);
    log.append({{1.0}, 0, {0.0}, 0.5});
    EXPECT_THROW(log.append({{1.0, 2.0}, 0, {0.0}, 0.5}), DimensionError);
    EXPECT_THROW(log.append({{1.0}, 0, {0.0, 1.0}, 0.5}), DimensionError);
    EXPECT_THROW(InteractionLog(1), ValidationError);
}

TEST(InteractionLogTest, AppendNeverMutatesExistingItems) {
    auto log = make_log(3);
    const auto first = log[0];
    log.append({{9.0, 9.0}, 2, {0.1}, 1.0 / 3.0});
    EXPECT_EQ(log[0].context, first.context);
    EXPECT_EQ(log[0].action, first.action);
    EXPECT_EQ(log[0].feedback, first.feedback);
    EXPECT_EQ(log.size(), 4u);
}

TEST(LogWindow, WholeLogIsIdentity) {
    auto log = make_log(5);
    auto w = log_window(log, 0, log.size());
    ASSERT_EQ(w.size(), 5u);
    for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(w[i].context, log[i].context);
}

TEST(LogWindow, EmptyWindowKeepsK) {
    auto log = make_log(5);
    auto w = log_window(log, 3, 3);
    EXPECT_EQ(w.size(), 0u);
    EXPECT_EQ(w.k_actions(), 3u);
    EXPECT_EQ(w.context_dim(), 2u);
    EXPECT_EQ(w.feedback_dim(), 1u);
}

TEST(LogWindow, MiddleRange) {
    auto log = make_log(5);
    auto w = log_window(log, 1, 4);
    ASSERT_EQ(w.size(), 3u);
    EXPECT_EQ(w[0].context[0], 1.0);
    EXPECT_EQ(w[1].context[0], 2.0);
    EXPECT_EQ(w[2].context[0], 3.0);
}

TEST(LogWindow, OutOfRangeThrows) {
    auto log = make_log(5);
    EXPECT_THROW(log_window(log, 4, 3), RangeError);
    EXPECT_THROW(log_window(log, 0, 6), RangeError);
}

TEST(RunRecordTest, CumulativeRegretNonDecreasing) {
    RunRecord rec;
    RngStream r(9, 0);
    for (std::uint64_t i = 1; i <= 200; ++i)
        rec.entries.push_back({i, Mode::explore, 0, r.bernoulli(0.4) ? 1 : 0, std::nullopt, 0});
    const auto c = rec.cumulative_regret();
    ASSERT_EQ(c.size(), 200u);
    for (std::size_t i = 1; i < c.size(); ++i) EXPECT_GE(c[i], c[i - 1]);
}

TEST(RunRecordTest, ModeNames) {
    EXPECT_STREQ(to_string(Mode::explore), "explore");
    EXPECT_STREQ(to_string(Mode::exploit), "exploit");
}
