#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tpbsim/error.hpp"
#include "tpbsim/metrics.hpp"
#include "tpbsim/population.hpp"
#include "tpbsim/sweep.hpp"

namespace tpb {

// Fixed seven decimals; enough to recover k/n exactly for n up to 10^6.
inline std::string format_rate(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.7f", v);
    return buf;
}

inline std::string trajectory_csv(const Trajectory& traj) {
    std::string out = "t,y_avg\n";
    for (std::size_t t = 0; t < traj.y_avg.size(); ++t)
        out += std::to_string(t) + "," + format_rate(traj.y_avg[t]) + "\n";
    return out;
}

inline std::string ensemble_csv(const EnsembleSummary& summary) {
    std::string out = "t,q10,median,q90\n";
    for (std::size_t t = 0; t < summary.per_step.size(); ++t) {
        const auto& b = summary.per_step[t];
        out += std::to_string(t) + "," + format_rate(b.q10) + "," + format_rate(b.median) + "," + format_rate(b.q90) + "\n";
    }
    return out;
}

// One row per (t, agent) of a trajectory recorded with snapshots.
inline std::string states_csv(const Trajectory& traj) {
    std::string out = "t,agent,x0,x,z,p,y,h\n";
    char buf[160];
    for (std::size_t t = 0; t < traj.snapshots.size(); ++t) {
        const auto& agents = traj.snapshots[t];
        for (std::size_t i = 0; i < agents.size(); ++i) {
            const auto& a = agents[i];
            std::snprintf(buf, sizeof buf, "%zu,%zu,%.9f,%.9f,%.9f,%.9f,%d,%lld\n", t, i, a.x0, a.x, a.z, a.p, a.y,
                          static_cast<long long>(a.h));
            out += buf;
        }
    }
    return out;
}

inline std::string phase_table_csv(std::span<const SweepRow> rows) {
    std::string out =
        "behavior,phi,beta,lambda,alpha,replicates,full_adoption,full_rejection,stalemate,noise_dominated,"
        "modal_regime,median_transition_time,transition_time_q25,transition_time_q75,terminal_median\n";
    char buf[256];
    for (const auto& row : rows) {
        const auto& s = row.scenario;
        std::snprintf(buf, sizeof buf, "%s,%g,%g,%g,%g,%zu,%zu,%zu,%zu,%zu,%s,", std::string(to_string(s.params.behavior)).c_str(),
                      s.params.phi, s.params.beta, s.params.lambda, s.config.alpha, row.summary.replicates,
                      row.summary.count(Regime::FullAdoption), row.summary.count(Regime::FullRejection),
                      row.summary.count(Regime::Stalemate), row.summary.count(Regime::NoiseDominated),
                      std::string(to_string(row.modal_regime)).c_str());
        out += buf;
        if (const auto& tt = row.summary.transition_time) {
            std::snprintf(buf, sizeof buf, "%g,%g,%g,", tt->median, tt->q25, tt->q75);
            out += buf;
        } else {
            out += ",,,";
        }
        out += format_rate(row.terminal_median()) + "\n";
    }
    return out;
}

inline void write_file(const std::filesystem::path& path, const std::string& bytes) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

inline void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path) {
    write_file(path, trajectory_csv(traj));
}

inline void write_trajectory_csv(const EnsembleSummary& summary, const std::filesystem::path& path) {
    write_file(path, ensemble_csv(summary));
}

}  // namespace tpb
