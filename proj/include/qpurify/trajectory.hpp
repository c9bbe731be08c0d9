// trajectory.hpp: Sampled propagation results and propagation options

#pragma once

#include <string>
#include <vector>

#include "qpurify/ode.hpp"

namespace qpurify {

namespace event_kind {
inline constexpr const char* kNorthPole = "north-pole-reached";
inline constexpr const char* kFixedPoint = "fixed-point-onset";
inline constexpr const char* kHorizon = "horizon-expired";
inline constexpr const char* kPurityMax = "purity-maximum";
} // namespace event_kind

template <std::size_t N>
struct TrajectoryEvent {
    double t{0.0};
    std::string kind;
    ode::State<N> state{};
};

/// Time-stamped states. Without requested sample times the accepted
/// integrator steps are recorded, together with the derivative at each.
template <std::size_t N>
struct Trajectory {
    std::vector<double> times;
    std::vector<ode::State<N>> states;
    std::vector<ode::State<N>> derivatives; // empty when sampled densely
    std::vector<TrajectoryEvent<N>> events;
    ode::Stats stats;

    const TrajectoryEvent<N>* find_event(const std::string& kind) const {
        for (const auto& e : events) {
            if (e.kind == kind) return &e;
        }
        return nullptr;
    }
};

struct PropagationOptions {
    ode::Tolerances tol{};
    // Dense output times; empty records every accepted step instead.
    std::vector<double> sample_times{};
    // Terminal events, honoured by the reduced propagator.
    bool stop_at_north_pole{false};
    bool stop_at_fixed_point{false};
    // Record pole and fixed-point events without stopping.
    bool detect_angular_events{false};
    // Non-terminal local maxima of the qubit purity.
    bool track_purity_maxima{false};
    // Events located while the S1 radius is below this floor are discarded:
    // the sphere has collapsed and its angles are rounding noise.
    double pole_radius_floor{1e-7};
};

namespace detail {

template <std::size_t N>
Trajectory<N> to_trajectory(const ode::Solution<N>& sol, const std::vector<double>& sample_times) {
    Trajectory<N> tr;
    tr.stats = sol.stats;
    if (sample_times.empty()) {
        tr.times = sol.t;
        tr.states = sol.y;
        tr.derivatives = sol.dy;
    } else {
        for (double t : sample_times) {
            if (t < sol.t_begin() || t > sol.t_end()) continue;
            if (!tr.times.empty() && !(t > tr.times.back())) continue;
            tr.times.push_back(t);
            tr.states.push_back(sol.at(t));
        }
    }
    for (const auto& hit : sol.events) tr.events.push_back({hit.t, hit.kind, hit.y});
    return tr;
}

} // namespace detail

} // namespace qpurify
