#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

#include "tpbsim/error.hpp"
#include "tpbsim/rng.hpp"

namespace tpb {

// Direction in which performing the behavior pushes an agent's attitude.
enum class BehaviorType { Beneficial, Harmful };

inline std::string_view to_string(BehaviorType b) noexcept {
    return b == BehaviorType::Beneficial ? "beneficial" : "harmful";
}

inline BehaviorType parse_behavior(std::string_view s) {
    if (s == "beneficial") return BehaviorType::Beneficial;
    if (s == "harmful") return BehaviorType::Harmful;
    throw ConfigError("behavior must be 'beneficial' or 'harmful', got '" + std::string(s) + "'");
}

/// Population-wide behavioral parameters.
///
///   phi    weight of personal attitude in intention, in [0,1]
///   beta   logit rationality, in [0, inf); beta >= 50 is effectively
///          deterministic choice
///   lambda attitude sensitivity to the cumulative action count, > 0
struct ModelParams {
    double phi = 0.7;
    double beta = 10.0;
    double lambda = 1.0;
    BehaviorType behavior = BehaviorType::Beneficial;

    void validate() const {
        if (!(phi >= 0.0 && phi <= 1.0)) throw ConfigError("phi must lie in [0,1]");
        if (!(beta >= 0.0 && std::isfinite(beta))) throw ConfigError("beta must be finite and >= 0");
        if (!(lambda > 0.0 && std::isfinite(lambda))) throw ConfigError("lambda must be finite and > 0");
    }

    bool operator==(const ModelParams&) const = default;
};

// One agent at one time step. x0 is fixed at initialization.
struct AgentState {
    double x0 = 0.0;   // initial attitude
    double x = 0.0;    // attitude
    double z = 0.0;    // intention
    double p = 0.0;    // probability of acting
    int y = 0;         // action, 0 or 1
    std::int64_t h = 0;  // cumulative action count including t = 0

    bool operator==(const AgentState&) const = default;
};

namespace detail {
inline bool in_unit(double v) noexcept { return v >= 0.0 && v <= 1.0; }
}  // namespace detail

/// Attitude after h performed actions, as a closed form in the initial
/// attitude x0. Beneficial behavior rises hyperbolically toward 1,
/// harmful behavior decays toward 0; increments shrink with h.
inline double attitude_update(double x0, double lambda, std::int64_t h, BehaviorType behavior) {
    if (!detail::in_unit(x0)) throw DomainError("attitude_update: x0 must lie in [0,1]");
    if (!(lambda > 0.0)) throw DomainError("attitude_update: lambda must be > 0");
    if (h < 0) throw DomainError("attitude_update: h must be >= 0");
    const double damp = 1.0 + lambda * static_cast<double>(h);
    return behavior == BehaviorType::Beneficial ? 1.0 - (1.0 - x0) / damp : x0 / damp;
}

// Convex combination of fresh attitude and previous-step adoption rate.
inline double intention_update(double attitude, double prev_adoption, double phi) {
    if (!detail::in_unit(attitude) || !detail::in_unit(prev_adoption) || !detail::in_unit(phi))
        throw DomainError("intention_update: arguments must lie in [0,1]");
    return phi * attitude + (1.0 - phi) * prev_adoption;
}

/// Binary logit with utilities z (act) and 1 - z (reject):
///   p = 1 / (1 + exp(-beta (2z - 1)))
/// Evaluated so the exponent is never positive; no overflow for any finite beta.
inline double choice_probability(double z, double beta) {
    if (!detail::in_unit(z)) throw DomainError("choice_probability: z must lie in [0,1]");
    if (!(beta >= 0.0) || std::isinf(beta)) throw DomainError("choice_probability: beta must be finite and >= 0");
    const double a = beta * (2.0 * z - 1.0);
    if (a >= 0.0) return 1.0 / (1.0 + std::exp(-a));
    const double e = std::exp(a);
    return e / (1.0 + e);
}

// Bernoulli(p) draw. Consumes exactly one uniform from the stream.
inline int sample_action(double p, RandomStream& rng) {
    if (!detail::in_unit(p)) throw DomainError("sample_action: p must lie in [0,1]");
    return rng.uniform() < p ? 1 : 0;
}

inline std::int64_t cumulative_count_update(std::int64_t h, int y) {
    if (h < 0 || (y != 0 && y != 1)) throw DomainError("cumulative_count_update: h >= 0 and y in {0,1} required");
    return h + y;
}

}  // namespace tpb
