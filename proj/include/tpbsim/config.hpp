#pragma once

// Scenario and grid files.
//
// A config is a YAML mapping. Every key is optional except phi and beta:
//
//   kind: scenario            # or grid; inferred from list-valued axes
//   behavior: beneficial      # or harmful
//   phi: 0.7                  # list => grid axis
//   beta: 5                   # list => grid axis
//   lambda: 1                 # list => grid axis
//   alpha: 0.9                # list => grid axis
//   n: 300
//   horizon: 300
//   replicates: 50
//   seed: 0
//   max_cells: 10000          # grid only
//   init:
//     majority_range: [0, 0.4]   # default depends on behavior
//     minority_range: [0.6, 0.7]
//   detection:
//     adopt_threshold: 0.97
//     reject_threshold: 0.03
//     window: 50
//     noise_floor: 0.015
//
// Grid axes are crossed in the order their keys appear.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "tpbsim/error.hpp"
#include "tpbsim/model.hpp"
#include "tpbsim/population.hpp"
#include "tpbsim/sweep.hpp"

namespace tpb {

using ParsedConfig = std::variant<Scenario, GridSpec>;

namespace detail {

inline std::string where(const YAML::Node& node, std::string_view field) {
    std::string s;
    const auto mark = node.Mark();
    if (mark.line >= 0) s = "line " + std::to_string(mark.line + 1) + ": ";
    return s + "field '" + std::string(field) + "': ";
}

[[noreturn]] inline void fail(const YAML::Node& node, std::string_view field, const std::string& msg) {
    throw ConfigError(where(node, field) + msg);
}

template <typename T>
T scalar_as(const YAML::Node& node, std::string_view field, const char* expected) {
    if (!node.IsScalar()) fail(node, field, std::string("expected ") + expected);
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        fail(node, field, std::string("expected ") + expected + ", got '" + node.Scalar() + "'");
    }
}

inline double real(const YAML::Node& node, std::string_view field) {
    return scalar_as<double>(node, field, "a number");
}

inline std::int64_t integer(const YAML::Node& node, std::string_view field, std::int64_t min) {
    const auto v = scalar_as<std::int64_t>(node, field, "an integer");
    if (v < min) fail(node, field, std::string(field) + " must be >= " + std::to_string(min));
    return v;
}

inline std::uint64_t unsigned64(const YAML::Node& node, std::string_view field) {
    if (node.IsScalar() && !node.Scalar().empty() && node.Scalar().front() == '-')
        fail(node, field, "expected a non-negative 64-bit integer");
    return scalar_as<std::uint64_t>(node, field, "a non-negative 64-bit integer");
}

inline Range range(const YAML::Node& node, std::string_view field) {
    if (!node.IsSequence() || node.size() != 2) fail(node, field, "expected [lo, hi]");
    Range r{real(node[0], field), real(node[1], field)};
    if (!(r.lo >= 0.0 && r.hi <= 1.0 && r.lo <= r.hi)) fail(node, field, std::string(field) + " must satisfy 0 <= lo <= hi <= 1");
    return r;
}

inline void check_keys(const YAML::Node& map, std::string_view section, const std::set<std::string>& allowed) {
    for (const auto& kv : map) {
        const auto key = kv.first.as<std::string>();
        if (!allowed.contains(key)) {
            std::string msg = "unknown key";
            if (!section.empty()) msg += " in '" + std::string(section) + "'";
            fail(kv.first, key, msg);
        }
    }
}

// Checks one value of an axis-capable parameter.
inline double param_value(const YAML::Node& node, std::string_view field) {
    const double v = real(node, field);
    if (field == "phi" && !(v >= 0.0 && v <= 1.0)) fail(node, field, "phi must lie in [0,1]");
    if (field == "beta" && !(v >= 0.0 && std::isfinite(v))) fail(node, field, "beta must be finite and >= 0");
    if (field == "lambda" && !(v > 0.0 && std::isfinite(v))) fail(node, field, "lambda must be finite and > 0");
    if (field == "alpha" && !(v >= 0.5 && v <= 1.0)) fail(node, field, "alpha must lie in [0.5,1]");
    return v;
}

// Shortest decimal that parses back to exactly v.
inline std::string shortest(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    std::string s(buf, res.ptr);
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

}  // namespace detail

inline ParsedConfig parse_config(std::string_view text) {
    YAML::Node loaded;
    try {
        loaded = YAML::Load(std::string(text));
    } catch (const YAML::ParserException& e) {
        throw ConfigError("line " + std::to_string(e.mark.line + 1) + ", column " + std::to_string(e.mark.column + 1) +
                          ": parse error: " + e.msg);
    }
    const YAML::Node& root = loaded;
    if (!root.IsMap()) throw ConfigError("config must be a mapping of key: value pairs");
    detail::check_keys(root, "", {"kind", "behavior", "phi", "beta", "lambda", "alpha", "n", "horizon", "replicates",
                                  "seed", "max_cells", "init", "detection"});

    Scenario s;
    if (const auto b = root["behavior"]) {
        try {
            s.params.behavior = parse_behavior(detail::scalar_as<std::string>(b, "behavior", "a string"));
        } catch (const ConfigError& e) {
            detail::fail(b, "behavior", e.what());
        }
    }
    s.config = PopulationConfig::defaults_for(s.params.behavior);

    std::vector<GridAxis> axes;
    for (const auto& kv : root) {
        const auto key = kv.first.as<std::string>();
        const auto axis = parse_axis(key);
        if (!axis) continue;
        const YAML::Node& v = kv.second;
        if (v.IsSequence()) {
            GridAxis ax{*axis, {}};
            if (v.size() == 0) detail::fail(v, key, "grid axis must not be empty");
            for (const auto& e : v) ax.values.push_back(detail::param_value(e, key));
            axes.push_back(std::move(ax));
        } else {
            set_axis(s, *axis, detail::param_value(v, key));
        }
    }
    for (const char* req : {"phi", "beta"})
        if (!root[req]) throw ConfigError(std::string("missing required field '") + req + "'");

    if (const auto v = root["n"]) s.config.n = static_cast<std::size_t>(detail::integer(v, "n", 1));
    if (const auto v = root["horizon"]) s.horizon = detail::integer(v, "horizon", 1);
    if (const auto v = root["replicates"]) s.replicates = static_cast<std::size_t>(detail::integer(v, "replicates", 1));
    if (const auto v = root["seed"]) s.base_seed = detail::unsigned64(v, "seed");

    if (const auto init = root["init"]) {
        if (!init.IsMap()) detail::fail(init, "init", "expected a mapping");
        detail::check_keys(init, "init", {"majority_range", "minority_range"});
        if (const auto v = init["majority_range"]) s.config.majority = detail::range(v, "majority_range");
        if (const auto v = init["minority_range"]) s.config.minority = detail::range(v, "minority_range");
    }
    if (const auto det = root["detection"]) {
        if (!det.IsMap()) detail::fail(det, "detection", "expected a mapping");
        detail::check_keys(det, "detection", {"adopt_threshold", "reject_threshold", "window", "noise_floor"});
        if (const auto v = det["adopt_threshold"]) s.detection.adopt_threshold = detail::real(v, "adopt_threshold");
        if (const auto v = det["reject_threshold"]) s.detection.reject_threshold = detail::real(v, "reject_threshold");
        if (const auto v = det["window"]) s.detection.window = static_cast<std::size_t>(detail::integer(v, "window", 1));
        if (const auto v = det["noise_floor"]) s.detection.noise_floor = detail::real(v, "noise_floor");
    }
    s.config.behavior = s.params.behavior;

    bool grid = !axes.empty();
    if (const auto k = root["kind"]) {
        const auto kind = detail::scalar_as<std::string>(k, "kind", "a string");
        if (kind == "grid") grid = true;
        else if (kind != "scenario") detail::fail(k, "kind", "kind must be 'scenario' or 'grid'");
        else if (!axes.empty()) detail::fail(k, "kind", "a scenario cannot have list-valued parameters");
    }
    if (!grid && root["max_cells"]) detail::fail(root["max_cells"], "max_cells", "only valid for grids");

    if (!grid) {
        s.validate();
        return s;
    }
    // A grid without list-valued keys is a single-cell grid over phi.
    if (axes.empty()) axes.push_back({Axis::Phi, {s.params.phi}});
    for (const auto& ax : axes) set_axis(s, ax.axis, ax.values.front());
    GridSpec g{std::move(axes), s, kDefaultMaxCells};
    if (const auto v = root["max_cells"]) g.max_cells = static_cast<std::size_t>(detail::integer(v, "max_cells", 1));
    g.validate();
    return g;
}

inline ParsedConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_config(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

namespace detail {

inline double axis_value(const Scenario& s, Axis a) {
    switch (a) {
        case Axis::Phi: return s.params.phi;
        case Axis::Beta: return s.params.beta;
        case Axis::Lambda: return s.params.lambda;
        case Axis::Alpha: return s.config.alpha;
    }
    return 0.0;
}

inline void emit_common(YAML::Emitter& out, const Scenario& s, const std::vector<GridAxis>& axes) {
    out << YAML::Key << "behavior" << YAML::Value << std::string(to_string(s.params.behavior));
    for (const auto& ax : axes) {
        out << YAML::Key << std::string(to_string(ax.axis)) << YAML::Value << YAML::Flow << YAML::BeginSeq;
        for (double v : ax.values) out << shortest(v);
        out << YAML::EndSeq;
    }
    for (Axis a : {Axis::Phi, Axis::Beta, Axis::Lambda, Axis::Alpha}) {
        bool on_axis = false;
        for (const auto& ax : axes) on_axis = on_axis || ax.axis == a;
        if (!on_axis) out << YAML::Key << std::string(to_string(a)) << YAML::Value << shortest(axis_value(s, a));
    }
    out << YAML::Key << "n" << YAML::Value << s.config.n;
    out << YAML::Key << "horizon" << YAML::Value << s.horizon;
    out << YAML::Key << "replicates" << YAML::Value << s.replicates;
    out << YAML::Key << "seed" << YAML::Value << s.base_seed;
}

inline void emit_tail(YAML::Emitter& out, const Scenario& s) {
    auto range = [&](const char* key, const Range& r) {
        out << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginSeq << shortest(r.lo) << shortest(r.hi)
            << YAML::EndSeq;
    };
    out << YAML::Key << "init" << YAML::Value << YAML::BeginMap;
    range("majority_range", s.config.majority);
    range("minority_range", s.config.minority);
    out << YAML::EndMap;
    out << YAML::Key << "detection" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "adopt_threshold" << YAML::Value << shortest(s.detection.adopt_threshold);
    out << YAML::Key << "reject_threshold" << YAML::Value << shortest(s.detection.reject_threshold);
    out << YAML::Key << "window" << YAML::Value << s.detection.window;
    out << YAML::Key << "noise_floor" << YAML::Value << shortest(s.detection.noise_floor);
    out << YAML::EndMap;
}

}  // namespace detail

/// Fully materialized YAML for a config; parse_config() of the result
/// yields an equal object.
inline std::string serialize_config(const ParsedConfig& cfg) {
    YAML::Emitter out;
    out << YAML::BeginMap;
    if (const auto* s = std::get_if<Scenario>(&cfg)) {
        out << YAML::Key << "kind" << YAML::Value << "scenario";
        detail::emit_common(out, *s, {});
        detail::emit_tail(out, *s);
    } else {
        const auto& g = std::get<GridSpec>(cfg);
        out << YAML::Key << "kind" << YAML::Value << "grid";
        detail::emit_common(out, g.base, g.axes);
        out << YAML::Key << "max_cells" << YAML::Value << g.max_cells;
        detail::emit_tail(out, g.base);
    }
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

}  // namespace tpb
