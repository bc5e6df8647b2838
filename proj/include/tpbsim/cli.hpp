#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "tpbsim/config.hpp"
#include "tpbsim/csv.hpp"
#include "tpbsim/error.hpp"
#include "tpbsim/manifest.hpp"
#include "tpbsim/metrics.hpp"
#include "tpbsim/sweep.hpp"
#include "tpbsim/svg.hpp"

namespace tpb {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int validation = 1;
inline constexpr int io = 2;
}  // namespace exit_code

struct OutputOptions {
    bool svg = true;
    bool snapshot_states = false;
    std::size_t threads = 1;
};

inline std::string replicate_table_csv(const Scenario& s, const EnsembleSummary& summary) {
    std::string out = "replicate,seed,regime,transition_time,terminal_rate\n";
    for (std::size_t r = 0; r < summary.outcomes.size(); ++r) {
        const auto& o = summary.outcomes[r];
        out += std::to_string(r) + "," + std::to_string(s.replicate_seed(r)) + "," + std::string(to_string(o.regime)) +
               "," + (o.transition_time ? std::to_string(*o.transition_time) : std::string()) + "," +
               format_rate(o.terminal_rate) + "\n";
    }
    return out;
}

/// Output files of `run`, in manifest order. Replicate 0 provides the
/// single-run trajectory; the quantile table is added when R > 1.
inline std::vector<OutputFile> run_outputs(const Scenario& s, const OutputOptions& opt, EnsembleSummary* summary_out = nullptr) {
    EnsembleResult res = run_ensemble(s, opt.threads, false);
    std::vector<OutputFile> files;
    files.push_back({"trajectory.csv", trajectory_csv(res.trajectories.front())});
    if (s.replicates > 1) files.push_back({"ensemble.csv", ensemble_csv(res.summary)});
    files.push_back({"replicates.csv", replicate_table_csv(s, res.summary)});
    if (opt.snapshot_states) {
        PopulationConfig cfg = s.config;
        cfg.seed = s.replicate_seed(0);
        files.push_back({"states.csv", states_csv(run(cfg, s.params, s.horizon, true))});
    }
    if (opt.svg) {
        const std::string label = phi_beta_label(s.params.phi, s.params.beta);
        std::vector<PlotSeries> series;
        if (s.replicates > 1) series.push_back({label + " median", res.summary.median_series()});
        else series.push_back({label, res.trajectories.front().y_avg});
        files.push_back({"trajectory.svg", render_plot_svg(series)});
    }
    if (summary_out) *summary_out = std::move(res.summary);
    return files;
}

// Legend label of a sweep cell: phi and beta, plus any other swept axis.
inline std::string cell_label(const GridSpec& g, const Scenario& cell) {
    std::string label = phi_beta_label(cell.params.phi, cell.params.beta);
    char buf[48];
    for (const auto& ax : g.axes) {
        if (ax.axis == Axis::Lambda) std::snprintf(buf, sizeof buf, ", \xCE\xBB=%g", cell.params.lambda);
        else if (ax.axis == Axis::Alpha) std::snprintf(buf, sizeof buf, ", \xCE\xB1=%g", cell.config.alpha);
        else continue;
        label.insert(label.size() - 1, buf);
    }
    return label;
}

inline std::vector<OutputFile> sweep_outputs(const GridSpec& g, const OutputOptions& opt,
                                             std::vector<SweepRow>* rows_out = nullptr) {
    std::vector<SweepRow> rows = sweep_grid(g, opt.threads);
    std::vector<OutputFile> files;
    files.push_back({"phase_table.csv", phase_table_csv(rows)});
    if (opt.svg) {
        std::vector<PlotSeries> series;
        for (const auto& row : rows) series.push_back({cell_label(g, row.scenario), row.summary.median_series()});
        files.push_back({"phase_medians.svg", render_plot_svg(series)});
    }
    if (rows_out) *rows_out = std::move(rows);
    return files;
}

inline void write_outputs(const std::filesystem::path& dir, const std::vector<OutputFile>& files) {
    for (const auto& f : files) write_file(dir / f.name, f.bytes);
}

/// Resolves a config argument: an existing path, the path with ".yaml"
/// appended, or the name of a bundled config.
inline std::filesystem::path resolve_config_path(const std::string& arg) {
    namespace fs = std::filesystem;
    std::vector<fs::path> candidates{arg, arg + ".yaml"};
#ifdef TPBSIM_CONFIG_DIR
    candidates.push_back(fs::path(TPBSIM_CONFIG_DIR) / arg);
    candidates.push_back(fs::path(TPBSIM_CONFIG_DIR) / (arg + ".yaml"));
#endif
    for (const auto& c : candidates)
        if (fs::is_regular_file(c)) return c;
    throw IoError("config '" + arg + "' not found");
}

namespace detail {

inline void print_summary(std::ostream& out, const EnsembleSummary& s) {
    out << "replicates: " << s.replicates << "\n";
    for (Regime r : kAllRegimes) out << "  " << to_string(r) << ": " << s.count(r) << "\n";
    if (s.transition_time)
        out << "median transition time: " << s.transition_time->median << " (IQR " << s.transition_time->q25 << "-"
            << s.transition_time->q75 << ")\n";
    out << "terminal median y_avg: " << format_rate(s.terminal_median()) << "\n";
}

inline void print_rows(std::ostream& out, const std::vector<SweepRow>& rows) {
    for (const auto& row : rows) {
        char buf[200];
        std::snprintf(buf, sizeof buf, "phi=%-5g beta=%-5g lambda=%-4g alpha=%-5g %-16s t=%-6s terminal=%s\n",
                      row.scenario.params.phi, row.scenario.params.beta, row.scenario.params.lambda,
                      row.scenario.config.alpha, std::string(to_string(row.modal_regime)).c_str(),
                      row.median_transition_time() ? std::to_string(static_cast<long long>(*row.median_transition_time())).c_str() : "-",
                      format_rate(row.terminal_median()).c_str());
        out << buf;
    }
}

}  // namespace detail

/// Entry point of the tpbsim tool. Exit codes: 0 success, 1 usage or
/// validation error (including replay digest mismatch), 2 I/O error.
inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Agent-based attitude/intention/behavior simulator", "tpbsim"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    std::string config_arg;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> replicates;
    std::size_t threads = 1;
    bool svg = true;
    bool snapshot = false;
    std::optional<std::size_t> max_cells;
    std::string manifest_arg;
    std::string replay_out;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_arg, "Scenario or grid file (YAML), or a bundled config name")->required();
        sub->add_option("--out", out_dir, "Output directory")->capture_default_str();
        sub->add_option("--seed", seed, "Base seed, overrides the config");
        sub->add_option("--replicates", replicates, "Replicates per scenario, overrides the config")->check(CLI::PositiveNumber);
        sub->add_option("--threads", threads, "Worker threads (0 = all cores)")->envname("TPB_SIM_THREADS");
        sub->add_flag("--svg,!--no-svg", svg, "Write an SVG line chart (default on)");
    };
    auto* run_cmd = app.add_subcommand("run", "Run one scenario: trajectory CSV, optional SVG, manifest");
    add_common(run_cmd);
    run_cmd->add_flag("--snapshot-states", snapshot, "Also write every agent's state per step for replicate 0");
    auto* sweep_cmd = app.add_subcommand("sweep", "Run a parameter grid: phase table CSV, optional SVG, manifest");
    add_common(sweep_cmd);
    sweep_cmd->add_option("--max-cells", max_cells, "Override the grid cell cap")->check(CLI::PositiveNumber);
    auto* replay_cmd = app.add_subcommand("replay", "Regenerate outputs from a manifest and verify digests");
    replay_cmd->add_option("--manifest", manifest_arg, "manifest.json written by run or sweep")->required();
    replay_cmd->add_option("--out", replay_out, "Also write the regenerated files here");
    replay_cmd->add_option("--threads", threads, "Worker threads (0 = all cores)")->envname("TPB_SIM_THREADS");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return exit_code::ok;
        }
        err << "error: " << e.what() << "\n\n" << app.help();
        return exit_code::validation;
    }

    try {
        if (replay_cmd->parsed()) {
            const std::filesystem::path mpath = manifest_arg;
            const RunManifest m = load_manifest(mpath);
            if (m.tool_version != kToolVersion)
                err << "warning: manifest written by " << m.tool << " " << m.tool_version << ", replaying with "
                    << kToolVersion << "\n";
            const ParsedConfig cfg = parse_config(m.resolved_config);
            const OutputOptions opt{m.svg, m.snapshot_states, threads};
            std::vector<OutputFile> files;
            if (m.command == "run") {
                const auto* s = std::get_if<Scenario>(&cfg);
                if (!s) throw ConfigError("manifest: 'run' manifest holds a grid config");
                files = run_outputs(*s, opt);
            } else {
                const auto* g = std::get_if<GridSpec>(&cfg);
                if (!g) throw ConfigError("manifest: 'sweep' manifest holds a scenario config");
                files = sweep_outputs(*g, opt);
            }
            const auto digests = digest_outputs(files);
            bool ok = digests.size() == m.outputs.size();
            for (const auto& want : m.outputs) {
                const ManifestEntry* got = nullptr;
                for (const auto& d : digests)
                    if (d.file == want.file) got = &d;
                const bool match = got && got->sha256 == want.sha256 && got->bytes == want.bytes;
                ok = ok && match;
                out << (match ? "OK       " : "MISMATCH ") << want.file << "\n";
            }
            if (!replay_out.empty()) write_outputs(replay_out, files);
            out << (ok ? "replay verified" : "replay FAILED") << "\n";
            return ok ? exit_code::ok : exit_code::validation;
        }

        ParsedConfig cfg = load_config(resolve_config_path(config_arg));
        const bool is_run = run_cmd->parsed();
        auto apply = [&](Scenario& s) {
            if (seed) s.base_seed = *seed;
            if (replicates) s.replicates = *replicates;
        };
        OutputOptions opt{svg, snapshot, threads};
        RunManifest m;
        m.command = is_run ? "run" : "sweep";
        m.svg = svg;
        m.snapshot_states = snapshot;
        m.timestamp = utc_timestamp();
        std::vector<OutputFile> files;
        if (is_run) {
            auto* s = std::get_if<Scenario>(&cfg);
            if (!s) throw ConfigError("'" + config_arg + "' is a grid config; use 'sweep'");
            apply(*s);
            s->validate();
            m.base_seed = s->base_seed;
            EnsembleSummary summary;
            files = run_outputs(*s, opt, &summary);
            detail::print_summary(out, summary);
        } else {
            auto* g = std::get_if<GridSpec>(&cfg);
            if (!g) throw ConfigError("'" + config_arg + "' is a scenario config; use 'run'");
            apply(g->base);
            if (max_cells) g->max_cells = *max_cells;
            g->validate();
            m.base_seed = g->base.base_seed;
            std::vector<SweepRow> rows;
            files = sweep_outputs(*g, opt, &rows);
            detail::print_rows(out, rows);
        }
        m.resolved_config = serialize_config(cfg);
        m.outputs = digest_outputs(files);
        write_outputs(out_dir, files);
        write_file(std::filesystem::path(out_dir) / "manifest.json", manifest_text(m));
        out << "wrote " << files.size() + 1 << " files to " << out_dir << "\n";
        return exit_code::ok;
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << "\n";
        return exit_code::io;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return exit_code::validation;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return exit_code::validation;
    }
}

}  // namespace tpb
