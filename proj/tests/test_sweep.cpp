#include <atomic>
#include <map>
#include <stdexcept>
#include <tuple>

#include <gtest/gtest.h>

#include "tpbsim/sweep.hpp"

using namespace tpb;

namespace {

Scenario scenario(BehaviorType b, double phi, double beta, std::size_t replicates = 50, std::int64_t horizon = 300) {
    Scenario s;
    s.params = {phi, beta, 1.0, b};
    s.config = PopulationConfig::defaults_for(b);
    s.horizon = horizon;
    s.replicates = replicates;
    s.base_seed = 99;
    return s;
}

EnsembleSummary counts(std::size_t fa, std::size_t fr, std::size_t st, std::size_t nd) {
    EnsembleSummary s;
    s.regime_counts = {fa, fr, st, nd};
    s.replicates = fa + fr + st + nd;
    return s;
}

}  // namespace

TEST(ParallelFor, VisitsEveryIndexOnceAndPropagatesErrors) {
    for (std::size_t threads : {1u, 2u, 4u, 0u}) {
        std::vector<std::atomic<int>> hits(1000);
        parallel_for(hits.size(), threads, [&](std::size_t i) { ++hits[i]; });
        for (auto& h : hits) ASSERT_EQ(h.load(), 1);
    }
    EXPECT_THROW(parallel_for(100, 3, [](std::size_t i) {
                     if (i == 42) throw std::runtime_error("boom");
                 }),
                 std::runtime_error);
}

TEST(RunEnsemble, SingleReplicate) {
    const auto res = run_ensemble(scenario(BehaviorType::Beneficial, 0.7, 5, 1, 100));
    ASSERT_EQ(res.trajectories.size(), 1u);
    EXPECT_EQ(res.summary.median_series(), res.trajectories[0].y_avg);
}

TEST(RunEnsemble, DeterministicAndThreadIndependent) {
    const auto s = scenario(BehaviorType::Beneficial, 0.7, 5, 12, 120);
    const auto a = run_ensemble(s, 1);
    const auto b = run_ensemble(s, 1);
    const auto c = run_ensemble(s, 4);
    for (std::size_t r = 0; r < s.replicates; ++r) {
        EXPECT_EQ(a.trajectories[r].y_avg, b.trajectories[r].y_avg);
        EXPECT_EQ(a.trajectories[r].y_avg, c.trajectories[r].y_avg);
        EXPECT_EQ(a.trajectories[r].config.seed, s.replicate_seed(r));
    }
    EXPECT_EQ(a.summary.median_series(), c.summary.median_series());
}

TEST(RunEnsemble, ReplicateMatchesStandaloneRun) {
    const auto s = scenario(BehaviorType::Harmful, 0.7, 10, 3, 50);
    const auto res = run_ensemble(s);
    PopulationConfig cfg = s.config;
    cfg.seed = derive_seed(s.base_seed, 2);
    EXPECT_EQ(run(cfg, s.params, 50).y_avg, res.trajectories[2].y_avg);
}

TEST(RunEnsemble, SlowerAdoptionAtLowAttitudeWeight) {
    const auto res = run_ensemble(scenario(BehaviorType::Beneficial, 0.3, 5));
    EXPECT_GE(res.summary.fraction(Regime::FullAdoption), 0.8);
    ASSERT_TRUE(res.summary.transition_time);
    EXPECT_GE(res.summary.transition_time->median, 44);
    EXPECT_LE(res.summary.transition_time->median, 176);
}

TEST(Scenario, Validation) {
    auto s = scenario(BehaviorType::Beneficial, 0.7, 5);
    s.replicates = 0;
    EXPECT_THROW(s.validate(), ConfigError);
    s = scenario(BehaviorType::Beneficial, 0.7, 5);
    s.config.behavior = BehaviorType::Harmful;
    EXPECT_THROW(s.validate(), ConfigError);
    s = scenario(BehaviorType::Beneficial, 0.7, 5, 1, 10);
    EXPECT_THROW(s.validate(), ConfigError);  // window 50 > 11 points
}

TEST(ClassifyRegime, ModeAndTies) {
    EXPECT_EQ(classify_regime(counts(50, 0, 0, 0)), Regime::FullAdoption);
    EXPECT_EQ(classify_regime(counts(25, 0, 25, 0)), Regime::Stalemate);
    EXPECT_EQ(classify_regime(counts(25, 25, 0, 0)), Regime::Stalemate);
    EXPECT_EQ(classify_regime(counts(0, 30, 10, 10)), Regime::FullRejection);
    EXPECT_EQ(classify_regime(counts(0, 0, 1, 49)), Regime::NoiseDominated);
    // plurality below the majority fraction
    EXPECT_EQ(classify_regime(counts(20, 15, 0, 15)), Regime::Stalemate);
    EXPECT_EQ(classify_regime(counts(20, 15, 0, 15), 0.4), Regime::FullAdoption);
}

TEST(ClassifyRegime, HarmfulConformityStalls) {
    const auto res = run_ensemble(scenario(BehaviorType::Harmful, 0.3, 10));
    EXPECT_NE(classify_regime(res.summary), Regime::FullRejection);
    EXPECT_GE(res.summary.terminal_median(), 0.6);
}

TEST(GridSpec, CellsInRowMajorOrder) {
    GridSpec g;
    g.base = scenario(BehaviorType::Beneficial, 0.7, 5, 2, 60);
    g.axes = {{Axis::Phi, {0.3, 0.7}}, {Axis::Beta, {5, 10, 20}}};
    ASSERT_EQ(g.cell_count(), 6u);
    EXPECT_EQ(g.cell(0).params.phi, 0.3);
    EXPECT_EQ(g.cell(0).params.beta, 5);
    EXPECT_EQ(g.cell(2).params.beta, 20);
    EXPECT_EQ(g.cell(3).params.phi, 0.7);
    EXPECT_EQ(g.cell(5).params.beta, 20);
}

TEST(GridSpec, Validation) {
    GridSpec g;
    g.base = scenario(BehaviorType::Beneficial, 0.7, 5, 2, 60);
    EXPECT_THROW(g.validate(), ConfigError);  // no axes
    g.axes = {{Axis::Phi, {}}};
    EXPECT_THROW(g.validate(), ConfigError);
    g.axes = {{Axis::Phi, {0.3}}, {Axis::Phi, {0.7}}};
    EXPECT_THROW(g.validate(), ConfigError);
    g.axes = {{Axis::Phi, {0.3, 1.3}}};
    EXPECT_THROW(g.validate(), ConfigError);
    g.axes = {{Axis::Phi, std::vector<double>(200, 0.5)}, {Axis::Beta, std::vector<double>(200, 5.0)}};
    EXPECT_THROW(g.validate(), ConfigError);  // 40000 > 10000
    g.max_cells = 40000;
    EXPECT_NO_THROW(g.validate());
}

TEST(SweepGrid, FourCellsOfBeneficialGrid) {
    GridSpec g;
    g.base = scenario(BehaviorType::Beneficial, 0.7, 5, 20, 300);
    g.axes = {{Axis::Phi, {0.3, 0.7}}, {Axis::Beta, {5, 10}}};
    const auto rows = sweep_grid(g);
    ASSERT_EQ(rows.size(), 4u);
    // (0.3,5) adopts, (0.3,10) rejects, (0.7,5) adopts fastest
    EXPECT_EQ(rows[0].modal_regime, Regime::FullAdoption);
    EXPECT_EQ(rows[1].modal_regime, Regime::FullRejection);
    EXPECT_EQ(rows[2].modal_regime, Regime::FullAdoption);
    EXPECT_LT(*rows[2].median_transition_time(), *rows[0].median_transition_time());
    EXPECT_LT(*rows[2].median_transition_time(), rows[3].median_transition_time().value_or(1e9));
}

// A cell's result depends only on its parameter tuple, not on its position.
TEST(SweepGrid, SeedStabilityAndCellIndependence) {
    GridSpec g;
    g.base = scenario(BehaviorType::Beneficial, 0.7, 5, 4, 80);
    g.axes = {{Axis::Phi, {0.3, 0.7}}, {Axis::Beta, {5, 10}}};
    GridSpec swapped = g;
    swapped.axes = {{Axis::Beta, {10, 5}}, {Axis::Phi, {0.7, 0.3}}};
    GridSpec trimmed = g;
    trimmed.axes = {{Axis::Phi, {0.7}}, {Axis::Beta, {10}}};

    auto key = [](const SweepRow& r) { return std::tuple(r.scenario.params.phi, r.scenario.params.beta); };
    std::map<std::tuple<double, double>, std::vector<double>> by_key;
    for (const auto& r : sweep_grid(g)) by_key[key(r)] = r.summary.median_series();
    for (const auto& r : sweep_grid(swapped)) EXPECT_EQ(by_key.at(key(r)), r.summary.median_series());
    for (const auto& r : sweep_grid(trimmed)) EXPECT_EQ(by_key.at(key(r)), r.summary.median_series());
}

TEST(SweepGrid, AlphaAndLambdaAxesKeepRegime) {
    GridSpec g;
    g.base = scenario(BehaviorType::Beneficial, 0.7, 5, 30, 300);
    g.axes = {{Axis::Alpha, {0.6, 0.75, 0.9}}};
    const auto rows = sweep_grid(g);
    for (const auto& r : rows) EXPECT_EQ(r.modal_regime, Regime::FullAdoption);
    EXPECT_LT(*rows[0].median_transition_time(), *rows[2].median_transition_time());

    g.axes = {{Axis::Lambda, {0.5, 1, 2}}};
    const auto lrows = sweep_grid(g);
    for (const auto& r : lrows) EXPECT_EQ(r.modal_regime, Regime::FullAdoption);
    EXPECT_GT(*lrows[0].median_transition_time(), *lrows[2].median_transition_time());
}
