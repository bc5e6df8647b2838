#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tpbsim/error.hpp"
#include "tpbsim/population.hpp"

namespace tpb {

enum class Regime { FullAdoption, FullRejection, Stalemate, NoiseDominated };

inline constexpr std::array<Regime, 4> kAllRegimes{Regime::FullAdoption, Regime::FullRejection, Regime::Stalemate,
                                                   Regime::NoiseDominated};

inline std::string_view to_string(Regime r) noexcept {
    switch (r) {
        case Regime::FullAdoption: return "full_adoption";
        case Regime::FullRejection: return "full_rejection";
        case Regime::Stalemate: return "stalemate";
        case Regime::NoiseDominated: return "noise_dominated";
    }
    return "unknown";
}

/// Thresholds that operationalize "full" adoption/rejection. With n = 300 the
/// defaults leave nine agents of slack, which must cover the logit ceiling
/// 1 - sigma(beta) (two agents on average at beta = 5) plus its noise.
struct DetectionParams {
    double adopt_threshold = 0.97;
    double reject_threshold = 0.03;
    std::size_t window = 50;
    double noise_floor = 0.015;  // stddev of y_avg over the final window

    void validate() const {
        if (!(adopt_threshold >= 0.0 && adopt_threshold <= 1.0 && reject_threshold >= 0.0 && reject_threshold <= 1.0))
            throw ConfigError("detection thresholds must lie in [0,1]");
        if (!(reject_threshold < adopt_threshold))
            throw ConfigError("reject_threshold must be < adopt_threshold");
        if (window < 1) throw ConfigError("window must be >= 1");
        if (!(noise_floor >= 0.0)) throw ConfigError("noise_floor must be >= 0");
    }

    bool operator==(const DetectionParams&) const = default;
};

struct TransitionOutcome {
    Regime regime = Regime::Stalemate;
    std::optional<std::size_t> transition_time;  // set iff FullAdoption or FullRejection
    double terminal_rate = 0.0;
    double band_mean = 0.0;    // over the final window
    double band_stddev = 0.0;  // population stddev over the final window
};

namespace detail {

// First t from which pred holds through the end of the series.
template <typename Pred>
std::optional<std::size_t> saturated_from(std::span<const double> s, Pred pred) {
    std::size_t t = s.size();
    while (t > 0 && pred(s[t - 1])) --t;
    if (t == s.size()) return std::nullopt;
    return t;
}

}  // namespace detail

inline TransitionOutcome detect_transition(std::span<const double> series, const DetectionParams& det = {}) {
    det.validate();
    if (series.empty()) throw ConfigError("detect_transition: empty series");
    if (det.window > series.size()) throw ConfigError("detect_transition: window exceeds trajectory length");

    TransitionOutcome out;
    out.terminal_rate = series.back();
    const auto tail = series.last(det.window);
    double sum = 0.0;
    for (double v : tail) sum += v;
    out.band_mean = sum / static_cast<double>(tail.size());
    double ss = 0.0;
    for (double v : tail) ss += (v - out.band_mean) * (v - out.band_mean);
    out.band_stddev = std::sqrt(ss / static_cast<double>(tail.size()));

    if (auto t = detail::saturated_from(series, [&](double v) { return v >= det.adopt_threshold; })) {
        out.regime = Regime::FullAdoption;
        out.transition_time = t;
    } else if (auto t = detail::saturated_from(series, [&](double v) { return v <= det.reject_threshold; })) {
        out.regime = Regime::FullRejection;
        out.transition_time = t;
    } else if (out.band_stddev > det.noise_floor && out.band_mean > det.reject_threshold &&
               out.band_mean < det.adopt_threshold) {
        out.regime = Regime::NoiseDominated;
    } else {
        out.regime = Regime::Stalemate;
    }
    return out;
}

inline TransitionOutcome detect_transition(const Trajectory& traj, const DetectionParams& det = {}) {
    return detect_transition(std::span<const double>(traj.y_avg), det);
}

// Exact mean of a binary action vector.
inline double adoption_rate(std::span<const int> actions) {
    if (actions.empty()) throw ConfigError("adoption_rate: empty action list");
    std::size_t ones = 0;
    for (int y : actions) {
        if (y != 0 && y != 1) throw DomainError("adoption_rate: actions must be 0 or 1");
        ones += static_cast<std::size_t>(y);
    }
    return static_cast<double>(ones) / static_cast<double>(actions.size());
}

/// Lower nearest-rank quantile: the element of rank ceil(q * N) in sorted
/// order (rank 1 for q = 0). Never interpolates, so the result is always
/// one of the inputs.
inline double nearest_rank_quantile(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw ConfigError("quantile of empty sample");
    const double n = static_cast<double>(sorted.size());
    auto rank = static_cast<std::ptrdiff_t>(std::ceil(q * n - 1e-9));
    rank = std::clamp<std::ptrdiff_t>(rank, 1, static_cast<std::ptrdiff_t>(sorted.size()));
    return sorted[static_cast<std::size_t>(rank - 1)];
}

struct QuantileBand {
    double q10 = 0.0;
    double median = 0.0;
    double q90 = 0.0;
};

struct TransitionTimeStats {
    double median = 0.0;
    double q25 = 0.0;
    double q75 = 0.0;
};

struct EnsembleSummary {
    std::vector<QuantileBand> per_step;  // indexed by t
    std::array<std::size_t, 4> regime_counts{};  // indexed by Regime
    std::optional<TransitionTimeStats> transition_time;  // over replicates that transitioned
    std::vector<TransitionOutcome> outcomes;  // per replicate, input order
    std::size_t replicates = 0;

    std::size_t count(Regime r) const noexcept { return regime_counts[static_cast<std::size_t>(r)]; }
    double fraction(Regime r) const noexcept {
        return replicates == 0 ? 0.0 : static_cast<double>(count(r)) / static_cast<double>(replicates);
    }
    double terminal_median() const noexcept { return per_step.empty() ? 0.0 : per_step.back().median; }
    std::vector<double> median_series() const {
        std::vector<double> m;
        m.reserve(per_step.size());
        for (const auto& b : per_step) m.push_back(b.median);
        return m;
    }
};

inline EnsembleSummary summarize_series(std::span<const std::vector<double>> series, const DetectionParams& det = {}) {
    if (series.empty()) throw ConfigError("summarize_ensemble: no trajectories");
    const std::size_t len = series.front().size();
    for (const auto& s : series)
        if (s.size() != len) throw ConfigError("summarize_ensemble: trajectories have different lengths");

    EnsembleSummary out;
    out.replicates = series.size();
    out.per_step.resize(len);
    std::vector<double> column(series.size());
    for (std::size_t t = 0; t < len; ++t) {
        for (std::size_t r = 0; r < series.size(); ++r) column[r] = series[r][t];
        std::sort(column.begin(), column.end());
        out.per_step[t] = {nearest_rank_quantile(column, 0.1), nearest_rank_quantile(column, 0.5),
                           nearest_rank_quantile(column, 0.9)};
    }

    std::vector<double> times;
    out.outcomes.reserve(series.size());
    for (const auto& s : series) {
        const auto o = detect_transition(std::span<const double>(s), det);
        ++out.regime_counts[static_cast<std::size_t>(o.regime)];
        if (o.transition_time) times.push_back(static_cast<double>(*o.transition_time));
        out.outcomes.push_back(o);
    }
    if (!times.empty()) {
        std::sort(times.begin(), times.end());
        out.transition_time = TransitionTimeStats{nearest_rank_quantile(times, 0.5),
                                                  nearest_rank_quantile(times, 0.25),
                                                  nearest_rank_quantile(times, 0.75)};
    }
    return out;
}

inline EnsembleSummary summarize_ensemble(std::span<const Trajectory> trajs, const DetectionParams& det = {}) {
    if (trajs.empty()) throw ConfigError("summarize_ensemble: no trajectories");
    for (const auto& tr : trajs)
        if (!(tr.params == trajs.front().params))
            throw ConfigError("summarize_ensemble: trajectories have different model parameters");
    std::vector<std::vector<double>> series;
    series.reserve(trajs.size());
    for (const auto& tr : trajs) series.push_back(tr.y_avg);
    return summarize_series(series, det);
}

}  // namespace tpb
