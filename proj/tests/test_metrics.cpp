#include <algorithm>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "tpbsim/metrics.hpp"
#include "tpbsim/population.hpp"

using namespace tpb;

namespace {

std::vector<double> binomial_series(std::size_t len, int n, double p, std::uint64_t seed) {
    RandomStream rng(seed);
    std::vector<double> s(len);
    for (auto& v : s) {
        int k = 0;
        for (int i = 0; i < n; ++i) k += rng.uniform() < p;
        v = static_cast<double>(k) / n;
    }
    return s;
}

}  // namespace

TEST(DetectTransition, ConstantSeries) {
    const std::vector<double> ones(301, 1.0), zeros(301, 0.0);
    auto a = detect_transition(ones);
    EXPECT_EQ(a.regime, Regime::FullAdoption);
    EXPECT_EQ(a.transition_time, 0u);
    EXPECT_EQ(a.terminal_rate, 1.0);
    auto r = detect_transition(zeros);
    EXPECT_EQ(r.regime, Regime::FullRejection);
    EXPECT_EQ(r.transition_time, 0u);
}

TEST(DetectTransition, FirstTimeThatStaysSaturated) {
    std::vector<double> s{0.1, 0.5, 0.99, 0.5, 0.98, 0.99, 1.0, 1.0};
    DetectionParams det;
    det.window = 3;
    const auto o = detect_transition(s, det);
    EXPECT_EQ(o.regime, Regime::FullAdoption);
    EXPECT_EQ(o.transition_time, 4u);

    // still dropping at the end: no transition yet
    s.push_back(0.9);
    EXPECT_NE(detect_transition(s, det).regime, Regime::FullAdoption);
}

TEST(DetectTransition, NoiseDominatedBinomial) {
    // stddev sqrt(0.25 / 300) ~ 0.0289 is above the 0.015 noise floor
    const auto s = binomial_series(301, 300, 0.5, 42);
    const auto o = detect_transition(s);
    EXPECT_EQ(o.regime, Regime::NoiseDominated);
    EXPECT_FALSE(o.transition_time);
    EXPECT_NEAR(o.band_mean, 0.5, 0.02);
    EXPECT_NEAR(o.band_stddev, 0.0289, 0.008);
}

TEST(DetectTransition, NoiseDominatedSimulatedNearRandomChoice) {
    auto c = PopulationConfig::defaults_for(BehaviorType::Beneficial);
    c.seed = 4;
    const auto traj = run(c, ModelParams{0.7, 0.1, 1.0, BehaviorType::Beneficial}, 300);
    EXPECT_EQ(detect_transition(traj).regime, Regime::NoiseDominated);
}

TEST(DetectTransition, QuietPlateauIsStalemate) {
    std::vector<double> s(301, 0.1);
    for (std::size_t t = 0; t < s.size(); t += 7) s[t] = 0.1033333;
    EXPECT_EQ(detect_transition(s).regime, Regime::Stalemate);
}

TEST(DetectTransition, Errors) {
    const std::vector<double> s(10, 0.5);
    DetectionParams det;
    EXPECT_THROW(detect_transition(s, det), ConfigError);  // window 50 > 10
    det.window = 5;
    det.reject_threshold = 0.9;
    det.adopt_threshold = 0.1;
    EXPECT_THROW(detect_transition(s, det), ConfigError);
    EXPECT_THROW(detect_transition(std::vector<double>{}, DetectionParams{0.97, 0.03, 1, 0.015}), ConfigError);
}

TEST(DetectTransition, AppendingSaturatedValuesKeepsTime) {
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> s;
        const std::size_t rise = 20 + gen() % 100;
        for (std::size_t t = 0; t < rise; ++t) s.push_back(static_cast<double>(gen() % 290) / 300.0);
        for (int t = 0; t < 60; ++t) s.push_back(1.0);
        const auto base = detect_transition(s);
        ASSERT_EQ(base.regime, Regime::FullAdoption);
        for (int extra = 0; extra < 30; ++extra) s.push_back(1.0);
        ASSERT_EQ(detect_transition(s).transition_time, base.transition_time);
    }
}

TEST(DetectTransition, TotalClassification) {
    std::mt19937_64 gen(9);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> s(60);
        for (auto& v : s) v = static_cast<double>(gen() % 301) / 300.0;
        const auto o = detect_transition(s);
        const bool transitioned = o.regime == Regime::FullAdoption || o.regime == Regime::FullRejection;
        ASSERT_EQ(transitioned, o.transition_time.has_value());
        ASSERT_EQ(o.terminal_rate, s.back());
    }
}

TEST(AdoptionRate, Examples) {
    EXPECT_EQ(adoption_rate(std::vector<int>{1, 1, 1, 1}), 1.0);
    EXPECT_EQ(adoption_rate(std::vector<int>{0, 0, 0, 0}), 0.0);
    std::vector<int> v(270, 0);
    v.insert(v.end(), 30, 1);
    EXPECT_EQ(adoption_rate(v), 30.0 / 300.0);
    EXPECT_NEAR(adoption_rate(v), 0.1, 1e-16);
    EXPECT_THROW(adoption_rate(std::vector<int>{}), ConfigError);
    EXPECT_THROW(adoption_rate(std::vector<int>{0, 2}), DomainError);
}

TEST(Quantile, LowerNearestRank) {
    const std::vector<double> two{0.2, 0.4};
    EXPECT_EQ(nearest_rank_quantile(two, 0.5), 0.2);
    const std::vector<double> ten{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    EXPECT_EQ(nearest_rank_quantile(ten, 0.1), 1);
    EXPECT_EQ(nearest_rank_quantile(ten, 0.5), 5);
    EXPECT_EQ(nearest_rank_quantile(ten, 0.9), 9);
    EXPECT_EQ(nearest_rank_quantile(ten, 0.0), 1);
    EXPECT_EQ(nearest_rank_quantile(ten, 1.0), 10);
}

TEST(SummarizeEnsemble, SingleTrajectory) {
    auto c = PopulationConfig::defaults_for(BehaviorType::Beneficial);
    c.seed = 2;
    const std::vector<Trajectory> trajs{run(c, ModelParams{0.7, 5, 1, BehaviorType::Beneficial}, 100)};
    const auto s = summarize_ensemble(trajs);
    EXPECT_EQ(s.median_series(), trajs[0].y_avg);
    EXPECT_EQ(s.replicates, 1u);
}

TEST(SummarizeEnsemble, TieRuleAndCounts) {
    const std::vector<std::vector<double>> series{std::vector<double>(60, 0.2), std::vector<double>(60, 0.4)};
    const auto s = summarize_series(series);
    for (const auto& b : s.per_step) {
        EXPECT_EQ(b.median, 0.2);
        EXPECT_EQ(b.q10, 0.2);
        EXPECT_EQ(b.q90, 0.4);
    }
    std::size_t total = 0;
    for (auto c : s.regime_counts) total += c;
    EXPECT_EQ(total, 2u);
}

TEST(SummarizeEnsemble, Errors) {
    EXPECT_THROW(summarize_series(std::vector<std::vector<double>>{}), ConfigError);
    const std::vector<std::vector<double>> mismatched{std::vector<double>(60, 0.2), std::vector<double>(61, 0.4)};
    EXPECT_THROW(summarize_series(mismatched), ConfigError);
    auto c = PopulationConfig::defaults_for(BehaviorType::Beneficial);
    const std::vector<Trajectory> mixed{run(c, ModelParams{0.7, 5, 1, BehaviorType::Beneficial}, 60),
                                        run(c, ModelParams{0.3, 5, 1, BehaviorType::Beneficial}, 60)};
    EXPECT_THROW(summarize_ensemble(mixed), ConfigError);
}

TEST(SummarizeEnsemble, PermutationInvariantAndOrdered) {
    std::mt19937_64 gen(13);
    std::vector<std::vector<double>> series;
    for (int r = 0; r < 25; ++r) {
        std::vector<double> s(80);
        double v = 0.1;
        for (auto& x : s) {
            v = std::clamp(v + (static_cast<double>(gen() % 21) - 8.0) / 300.0, 0.0, 1.0);
            x = v;
        }
        series.push_back(s);
    }
    const auto a = summarize_series(series);
    for (const auto& b : a.per_step) {
        ASSERT_LE(b.q10, b.median);
        ASSERT_LE(b.median, b.q90);
    }
    for (int k = 0; k < 10; ++k) {
        std::shuffle(series.begin(), series.end(), gen);
        const auto b = summarize_series(series);
        ASSERT_EQ(a.regime_counts, b.regime_counts);
        ASSERT_EQ(a.median_series(), b.median_series());
        ASSERT_EQ(a.transition_time.has_value(), b.transition_time.has_value());
        if (a.transition_time) ASSERT_EQ(a.transition_time->median, b.transition_time->median);
        for (std::size_t t = 0; t < a.per_step.size(); ++t) {
            ASSERT_EQ(a.per_step[t].q10, b.per_step[t].q10);
            ASSERT_EQ(a.per_step[t].q90, b.per_step[t].q90);
        }
    }
}
