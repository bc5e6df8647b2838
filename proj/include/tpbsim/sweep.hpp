#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "tpbsim/error.hpp"
#include "tpbsim/metrics.hpp"
#include "tpbsim/model.hpp"
#include "tpbsim/population.hpp"
#include "tpbsim/rng.hpp"

namespace tpb {

// Worker count for `requested` (0 = hardware concurrency).
inline std::size_t resolve_threads(std::size_t requested) noexcept {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

/// Calls fn(i) for every i in [0, count) on up to `threads` workers.
/// Callers write results into slot i, so output order never depends on
/// scheduling. The first exception thrown by any task is rethrown.
inline void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn) {
    threads = std::min(resolve_threads(threads), count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    {
        std::vector<std::jthread> workers;
        workers.reserve(threads);
        for (std::size_t w = 0; w < threads; ++w) {
            workers.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        std::lock_guard lock(error_mutex);
                        if (!error) error = std::current_exception();
                        next = count;
                    }
                }
            });
        }
    }
    if (error) std::rethrow_exception(error);
}

struct Scenario {
    ModelParams params;
    PopulationConfig config;  // config.seed is ignored; replicates derive their own
    std::int64_t horizon = 300;
    std::size_t replicates = 50;
    std::uint64_t base_seed = 0;
    DetectionParams detection;

    // Seed of replicate r.
    std::uint64_t replicate_seed(std::size_t r) const noexcept { return derive_seed(base_seed, r); }

    void validate() const {
        params.validate();
        config.validate();
        detection.validate();
        if (config.behavior != params.behavior) throw ConfigError("config and params disagree on behavior");
        if (horizon < 1) throw ConfigError("horizon must be >= 1");
        if (replicates < 1) throw ConfigError("replicates must be >= 1");
        if (detection.window > static_cast<std::size_t>(horizon) + 1)
            throw ConfigError("detection.window must not exceed horizon + 1");
    }

    bool operator==(const Scenario&) const = default;
};

struct EnsembleResult {
    std::vector<Trajectory> trajectories;  // ordered by replicate index
    EnsembleSummary summary;
};

inline EnsembleResult run_ensemble(const Scenario& scenario, std::size_t threads = 1, bool record_states = false) {
    scenario.validate();
    EnsembleResult out;
    out.trajectories.resize(scenario.replicates);
    parallel_for(scenario.replicates, threads, [&](std::size_t r) {
        PopulationConfig cfg = scenario.config;
        cfg.seed = scenario.replicate_seed(r);
        out.trajectories[r] = run(cfg, scenario.params, scenario.horizon, record_states);
    });
    out.summary = summarize_ensemble(out.trajectories, scenario.detection);
    return out;
}

/// Modal regime over replicates. Returns Stalemate when the mode is tied
/// or when its share falls below `majority_fraction`.
inline Regime classify_regime(const EnsembleSummary& summary, double majority_fraction = 0.5) {
    std::size_t best = 0;
    std::size_t ties = 0;
    Regime mode = Regime::Stalemate;
    for (Regime r : kAllRegimes) {
        const std::size_t c = summary.count(r);
        if (c > best) {
            best = c;
            mode = r;
            ties = 1;
        } else if (c == best && c > 0) {
            ++ties;
        }
    }
    if (ties != 1 || summary.replicates == 0) return Regime::Stalemate;
    if (static_cast<double>(best) < majority_fraction * static_cast<double>(summary.replicates))
        return Regime::Stalemate;
    return mode;
}

enum class Axis { Phi, Beta, Lambda, Alpha };

inline std::string_view to_string(Axis a) noexcept {
    switch (a) {
        case Axis::Phi: return "phi";
        case Axis::Beta: return "beta";
        case Axis::Lambda: return "lambda";
        case Axis::Alpha: return "alpha";
    }
    return "unknown";
}

inline std::optional<Axis> parse_axis(std::string_view s) noexcept {
    if (s == "phi") return Axis::Phi;
    if (s == "beta") return Axis::Beta;
    if (s == "lambda") return Axis::Lambda;
    if (s == "alpha") return Axis::Alpha;
    return std::nullopt;
}

struct GridAxis {
    Axis axis = Axis::Phi;
    std::vector<double> values;

    bool operator==(const GridAxis&) const = default;
};

inline void set_axis(Scenario& s, Axis axis, double v) {
    switch (axis) {
        case Axis::Phi: s.params.phi = v; break;
        case Axis::Beta: s.params.beta = v; break;
        case Axis::Lambda: s.params.lambda = v; break;
        case Axis::Alpha: s.config.alpha = v; break;
    }
}

inline constexpr std::size_t kDefaultMaxCells = 10000;

struct GridSpec {
    std::vector<GridAxis> axes;  // first axis varies slowest
    Scenario base;               // values for every parameter not on an axis
    std::size_t max_cells = kDefaultMaxCells;

    std::size_t cell_count() const noexcept {
        std::size_t n = 1;
        for (const auto& a : axes) n *= a.values.size();
        return n;
    }

    // Scenario of cell `index` in row-major order over `axes`.
    Scenario cell(std::size_t index) const {
        Scenario s = base;
        for (auto it = axes.rbegin(); it != axes.rend(); ++it) {
            const std::size_t k = it->values.size();
            set_axis(s, it->axis, it->values[index % k]);
            index /= k;
        }
        return s;
    }

    void validate() const {
        if (axes.empty()) throw ConfigError("grid needs at least one axis");
        for (std::size_t i = 0; i < axes.size(); ++i) {
            if (axes[i].values.empty()) throw ConfigError("grid axis '" + std::string(to_string(axes[i].axis)) + "' is empty");
            for (std::size_t j = 0; j < i; ++j)
                if (axes[j].axis == axes[i].axis)
                    throw ConfigError("grid axis '" + std::string(to_string(axes[i].axis)) + "' given twice");
        }
        // Overflow-safe product check against the cap.
        std::size_t n = 1;
        for (const auto& a : axes) {
            if (n > max_cells / a.values.size() + 1) throw ConfigError("grid exceeds max_cells");
            n *= a.values.size();
        }
        if (n > max_cells)
            throw ConfigError("grid has " + std::to_string(n) + " cells, above max_cells = " + std::to_string(max_cells));
        base.validate();
        for (std::size_t i = 0; i < n; ++i) cell(i).validate();
    }

    bool operator==(const GridSpec&) const = default;
};

/// Seed of a grid cell, keyed by the canonical parameter tuple
/// (behavior, phi, beta, lambda, alpha) rather than the cell's position, so
/// reordering or trimming axes leaves every cell's results unchanged.
inline std::uint64_t cell_seed(std::uint64_t base_seed, const Scenario& s) {
    std::uint64_t h = mix64(base_seed);
    h = hash_combine(h, static_cast<std::uint64_t>(s.params.behavior));
    h = hash_combine(h, s.params.phi);
    h = hash_combine(h, s.params.beta);
    h = hash_combine(h, s.params.lambda);
    h = hash_combine(h, s.config.alpha);
    return h;
}

struct SweepRow {
    Scenario scenario;  // resolved cell, base_seed = cell seed
    EnsembleSummary summary;
    Regime modal_regime = Regime::Stalemate;

    std::optional<double> median_transition_time() const {
        if (!summary.transition_time) return std::nullopt;
        return summary.transition_time->median;
    }
    double terminal_median() const noexcept { return summary.terminal_median(); }
};

inline std::vector<SweepRow> sweep_grid(const GridSpec& grid, std::size_t threads = 1) {
    grid.validate();
    std::vector<SweepRow> rows;
    const std::size_t cells = grid.cell_count();
    rows.reserve(cells);
    for (std::size_t i = 0; i < cells; ++i) {
        Scenario s = grid.cell(i);
        s.base_seed = cell_seed(grid.base.base_seed, s);
        EnsembleResult res = run_ensemble(s, threads);
        SweepRow row{s, std::move(res.summary), Regime::Stalemate};
        row.modal_regime = classify_regime(row.summary);
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace tpb
