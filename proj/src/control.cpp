// control.cpp

#include "qpurify/control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "qpurify/error.hpp"

namespace qpurify {

std::string_view to_string(Regime r) {
    switch (r) {
    case Regime::Markovian: return "Markovian";
    case Regime::NonMarkovian: return "nonMarkovian";
    case Regime::Critical: return "critical";
    }
    return "unknown";
}

std::string_view to_string(Region r) {
    switch (r) {
    case Region::A: return "A";
    case Region::B: return "B";
    case Region::C: return "C";
    }
    return "unknown";
}

std::string_view to_string(PurificationRun::Stop s) {
    switch (s) {
    case PurificationRun::Stop::Reached: return "reached";
    case PurificationRun::Stop::FixedPointBlocked: return "fixed_point_blocked";
    case PurificationRun::Stop::Collapsed: return "collapsed";
    case PurificationRun::Stop::HorizonExpired: return "horizon_expired";
    }
    return "unknown";
}

std::optional<double> t_min_uncorrelated(double J, double gamma) {
    if (!(J > 0.0) || !std::isfinite(J)) throw Error(ErrorCode::InvalidParameter, "J must be > 0", "J");
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
        throw Error(ErrorCode::InvalidParameter, "gamma must be >= 0", "gamma");
    }
    if (gamma >= 4.0 * J) return std::nullopt;
    const double p = 4.0 * J + gamma;
    const double m = 4.0 * J - gamma;
    return 8.0 * std::atan(std::sqrt(p / m)) / std::sqrt(p * m);
}

Regime classify_regime(double J, double gamma) {
    if (!(J > 0.0)) throw Error(ErrorCode::InvalidParameter, "J must be > 0", "J");
    if (std::abs(gamma - 4.0 * J) < 1e-12) return Regime::Critical;
    return gamma > 4.0 * J ? Regime::Markovian : Regime::NonMarkovian;
}

std::optional<double> fixed_point_theta(double r, double c, const ModelParams& params) {
    const double g = params.gamma();
    const double gap = params.eta() - c;
    if (!(r > 0.0) || !(g > 0.0) || gap == 0.0) return std::nullopt;
    const double arg = 4.0 * params.J() / g * r / gap;
    if (!(arg > 0.0) || arg > 1.0) return std::nullopt;
    return std::acos(arg);
}

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

ZVector start_state(const ModelParams& params, std::complex<double> xi, double mu_q, bool align) {
    return initial_z({mu_q, 0.0, xi}, params, align);
}

double horizon_of(const ModelParams& params, const AnalysisOptions& o) {
    if (!(o.horizon_multiple > 0.0)) {
        throw Error(ErrorCode::InvalidParameter, "horizon multiple must be > 0", "horizon");
    }
    return o.horizon_multiple * params.T0();
}

// Threshold test on the initial state: (4J/γ) r/(η - c) - 1.
double fixed_point_excess(const ModelParams& params, double xi) {
    const SphericalState s = z_to_spherical(start_state(params, xi, 0.0, true));
    return 4.0 * params.J() / params.gamma() * s.r / (params.eta() - s.c) - 1.0;
}

} // namespace

PurificationRun t_min_numeric(const ModelParams& params, std::complex<double> xi, const AnalysisOptions& options,
                              double mu_q) {
    PurificationRun run;
    run.horizon = horizon_of(params, options);
    const ZVector z0 = start_state(params, xi, mu_q, options.align_phase);
    const SphericalState s0 = z_to_spherical(z0);
    const double g = params.gamma();
    const double eta = params.eta();
    const double J = params.J();
    const double coherence2 = z0[4] * z0[4] + z0[6] * z0[6];

    auto finish = [&](double t, double theta, double q, double log_r) {
        run.t_stop = t;
        run.s_stop.r = std::exp(log_r);
        run.s_stop.c = eta - q * run.s_stop.r;
        run.s_stop.theta = theta;
        run.s_stop.phi = s0.phi;
        run.theta_dot_stop = 2.0 * J - 0.5 * g * q * std::cos(theta);
        const double z1 = run.s_stop.c + run.s_stop.r * std::sin(theta);
        const double f = s2_resonant_solution(t, 1.0, J, g);
        run.purity_stop = 0.5 + 2.0 * (z1 * z1 + coherence2 * f * f);
    };

    if (!(s0.r > 0.0)) {
        // Maximally mixed S1 block: no sphere to climb.
        run.stop = PurificationRun::Stop::Collapsed;
        finish(0.0, 0.0, 0.0, -std::numeric_limits<double>::infinity());
        run.s_stop = s0;
        return run;
    }

    // y = (θ, q, ln r):
    //   θ̇ = 2J - (γ/2) q cosθ,  q̇ = -(γ/2) sinθ (1 - q²),  (ln r)' = -(γ/2)(1 + q sinθ)
    using Y = ode::State<3>;
    auto rhs = [=](double, const Y& y) -> Y {
        const double sn = std::sin(y[0]);
        return {2.0 * J - 0.5 * g * y[1] * std::cos(y[0]), -0.5 * g * sn * (1.0 - y[1] * y[1]),
                -0.5 * g * (1.0 + y[1] * sn)};
    };
    const Y y0{s0.theta, (eta - s0.c) / s0.r, std::log(s0.r)};
    if (s0.theta >= kHalfPi) {
        run.stop = PurificationRun::Stop::Reached;
        run.t_min = 0.0;
        finish(0.0, y0[0], y0[1], y0[2]);
        return run;
    }

    // q grows only while θ < 0, and once q ≥ 4J/γ the state sits below the
    // lower root of θ̇ = 0 and cannot pass it. Reaching the threshold is
    // therefore final.
    const double q_fixed = g > 0.0 ? 4.0 * J / g : std::numeric_limits<double>::infinity();
    if (y0[1] >= q_fixed) {
        run.stop = PurificationRun::Stop::FixedPointBlocked;
        finish(0.0, y0[0], y0[1], y0[2]);
        return run;
    }

    std::vector<ode::EventSpec<3>> events{
        {event_kind::kNorthPole, [](double, const Y& y) { return y[0] - kHalfPi; }, +1, true, {}},
        {event_kind::kFixedPoint, [q_fixed](double, const Y& y) { return y[1] - q_fixed; }, +1, true, {}},
    };
    ode::DormandPrince<3> solver(rhs, options.tol);
    const ode::Solution<3> sol = solver.integrate(0.0, y0, run.horizon, events);
    run.stats = sol.stats;

    const Y& y_end = sol.y.back();
    finish(sol.t_end(), y_end[0], y_end[1], y_end[2]);
    if (sol.terminated && sol.events.back().kind == event_kind::kNorthPole) {
        run.stop = PurificationRun::Stop::Reached;
        run.t_min = sol.t_end();
    } else if (sol.terminated) {
        run.stop = PurificationRun::Stop::FixedPointBlocked;
    } else {
        run.stop = PurificationRun::Stop::HorizonExpired;
    }
    return run;
}

XiFixed xi_fixed(const ModelParams& params) {
    XiFixed out;
    const double g = params.gamma();
    const double J = params.J();
    if (!(J > 0.0)) throw Error(ErrorCode::InvalidParameter, "J must be > 0", "J");
    const Populations q = params.qubit_populations();
    const Populations t = params.tls_populations();
    const double d = 0.5 * (t.ground - q.ground);
    if (g > 4.0 * J) out.closed_form = d * std::sqrt((g / (4.0 * J)) * (g / (4.0 * J)) - 1.0);
    if (g <= 4.0 * J) {
        out.residual = g > 0.0 ? fixed_point_excess(params, 0.0) : 0.0;
        return out;
    }

    const double hi_limit = xi_max(params);
    if (fixed_point_excess(params, hi_limit) <= 0.0) {
        out.xi = hi_limit;
        out.saturated = true;
        out.residual = fixed_point_excess(params, hi_limit);
        return out;
    }
    // excess increases with ξ: r(0) = √(d² + ξ²), η - c(0) = d
    double lo = 0.0;
    double hi = hi_limit;
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (fixed_point_excess(params, mid) <= 0.0) lo = mid;
        else hi = mid;
    }
    out.xi = lo;
    out.residual = fixed_point_excess(params, lo);
    return out;
}

RegionResult classify_region(const ModelParams& params, double xi, const AnalysisOptions& options) {
    RegionResult out;
    const SphericalState s0 = z_to_spherical(start_state(params, xi, 0.0, options.align_phase));
    out.theta_fixed_initial = fixed_point_theta(s0.r, s0.c, params);
    if (out.theta_fixed_initial) {
        out.region = Region::A;
        return out;
    }
    AnalysisOptions o = options;
    const double slack = 2.0 * params.J() - 0.5 * params.gamma();
    if (slack > 0.0) {
        // θ̇ ≥ 2J - γ/2 > 0 here, so the pole is reached within π/slack.
        o.horizon_multiple = std::max(o.horizon_multiple, 1.01 * std::numbers::pi / slack / params.T0());
    }
    const PurificationRun run = t_min_numeric(params, xi, o);
    out.t_event = run.t_stop;
    switch (run.stop) {
    case PurificationRun::Stop::Reached: out.region = Region::C; break;
    case PurificationRun::Stop::FixedPointBlocked: out.region = Region::B; break;
    default: break;
    }
    return out;
}

std::optional<PurityGain> purity_gain(const ModelParams& params, double xi, double mu_q,
                                      const AnalysisOptions& options) {
    const PurificationRun run = t_min_numeric(params, xi, options, mu_q);
    if (!run.t_min) return std::nullopt;

    PurityGain g;
    g.t_min = *run.t_min;
    g.p_final = run.purity_stop;
    g.p_max = g.p_final;
    g.t_peak = g.t_min;

    PropagationOptions po;
    po.tol = options.tol;
    po.track_purity_maxima = true;
    const ZVector z0 = start_state(params, xi, mu_q, options.align_phase);
    const Trajectory<8> tr = propagate_reduced(z0, ControlLaw::resonant(), params, 0.0, g.t_min, po);

    // Without S2 the purity peaks exactly at the pole; that root is the
    // reference value itself, not a competing maximum.
    const double same = 1e-6 * std::max(1.0, g.t_min);
    for (const auto& e : tr.events) {
        if (e.kind != event_kind::kPurityMax || std::abs(e.t - g.t_min) <= same) continue;
        const double p = purity_z(e.state);
        if (p > g.p_max) {
            g.p_max = p;
            g.t_peak = e.t;
        }
    }
    g.delta_p = g.p_max / g.p_final - 1.0;
    return g;
}

std::optional<double> delta_p(const ModelParams& params, double xi, double mu_q, const AnalysisOptions& options) {
    const auto g = purity_gain(params, xi, mu_q, options);
    if (!g) return std::nullopt;
    return g->delta_p;
}

ControlAnalysis analyze(const ModelParams& params, double xi, double mu_q, const AnalysisOptions& options) {
    ControlAnalysis a;
    a.xi = xi;
    a.mu_q = mu_q;
    a.regime = classify_regime(params.J(), params.gamma());

    const RegionResult region = classify_region(params, xi, options);
    a.region = region.region;
    a.theta_fixed = region.theta_fixed_initial;

    if (const auto gain = purity_gain(params, xi, mu_q, options)) {
        a.t_min = gain->t_min;
        a.p_final = gain->p_final;
        a.p_max = gain->p_max;
        a.delta_p = gain->delta_p;
    } else {
        const PurificationRun run = t_min_numeric(params, xi, options, mu_q);
        a.p_final = run.purity_stop;
        a.p_max = a.p_final;
    }
    return a;
}

} // namespace qpurify
