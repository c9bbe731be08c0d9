// reduced.cpp

#include "qpurify/reduced.hpp"

#include <cmath>
#include <numbers>

#include "qpurify/error.hpp"

namespace qpurify {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

double azimuth(const ZVector& z) { return std::atan2(z[2], z[1]); }

CouplingTerms coupling_at(double t, const ZVector& z, const ControlLaw& control, const ModelParams& params) {
    return control.coupling(t, params, control.state_dependent() ? azimuth(z) : 0.0);
}

// sin(ωt)/ω, finite as ω → 0.
double sin_over(double omega, double t) {
    const double x = omega * t;
    if (std::abs(x) < 1e-8) return t;
    return std::sin(x) / omega;
}

double sinh_over(double omega, double t) {
    const double x = omega * t;
    if (std::abs(x) < 1e-8) return t;
    return std::sinh(x) / omega;
}

} // namespace

ZVector x_to_z(const XVector& x) {
    auto v = [&x](int i) { return x[static_cast<std::size_t>(i - 1)]; };
    return {v(1) + v(2) - 0.5, v(12), v(11), -2.0 * v(1) - v(2) - v(3),
            v(7) + v(13), v(6) - v(16), v(8) + v(14), v(5) - v(15)};
}

ZVector x_to_z(const DensityState& x) { return x_to_z(x.x); }

S1Vector s1_part(const ZVector& z) { return {z[0], z[1], z[2], z[3]}; }
S2Vector s2_part(const ZVector& z) { return {z[4], z[5], z[6], z[7]}; }

S1Vector s1_rhs(const S1Vector& z, const CouplingTerms& k, const ModelParams& params) {
    const double g = params.gamma();
    const double ratio = g > 0.0 ? params.gamma1() / g : 0.0;
    const double pull = -z[0] - 0.5 * (z[3] + 1.0);
    return {
        2.0 * k.J1 * z[1] + 2.0 * k.J2 * z[2],
        2.0 * k.J1 * pull - 2.0 * k.alpha * z[2] - 0.5 * g * z[1],
        2.0 * k.J2 * pull + 2.0 * k.alpha * z[1] - 0.5 * g * z[2],
        -g * (ratio + z[0] + z[3] + 0.5),
    };
}

S2Vector s2_rhs(const S2Vector& z, const CouplingTerms& k, double gamma) {
    // z = (z5, z6, z7, z8)
    return {
        k.J1 * z[1] - k.J2 * z[3] + 2.0 * k.alpha * z[2],
        -k.J1 * z[0] + k.J2 * z[2] - 0.5 * gamma * z[1],
        -k.J1 * z[3] - k.J2 * z[1] - 2.0 * k.alpha * z[0],
        k.J1 * z[2] + k.J2 * z[0] - 0.5 * gamma * z[3],
    };
}

ZVector reduced_rhs(const ZVector& z, const CouplingTerms& k, const ModelParams& params) {
    const S1Vector a = s1_rhs(s1_part(z), k, params);
    const S2Vector b = s2_rhs(s2_part(z), k, params.gamma());
    return {a[0], a[1], a[2], a[3], b[0], b[1], b[2], b[3]};
}

ZVector reduced_rhs(const ZVector& z, double t, const ControlLaw& control, const ModelParams& params) {
    return reduced_rhs(z, coupling_at(t, z, control, params), params);
}

SphericalState z_to_spherical(const S1Vector& z) {
    SphericalState s;
    s.c = -0.5 * (z[3] + 1.0);
    const double w = z[0] - s.c;
    const double perp = std::hypot(z[1], z[2]);
    s.r = std::hypot(w, perp);
    if (s.r == 0.0) return s;
    s.theta = std::atan2(w, perp);
    s.phi = (perp == 0.0 || kHalfPi - std::abs(s.theta) < 1e-15) ? 0.0 : std::atan2(z[2], z[1]);
    return s;
}

SphericalState z_to_spherical(const ZVector& z) { return z_to_spherical(s1_part(z)); }

S1Vector spherical_to_z(const SphericalState& s) {
    const double perp = s.r * std::cos(s.theta);
    return {s.c + s.r * std::sin(s.theta), perp * std::cos(s.phi), perp * std::sin(s.phi), -2.0 * s.c - 1.0};
}

PolarRates polar_rates(const SphericalState& s, double u, const ModelParams& params) {
    if (!(s.r > 0.0)) {
        throw Error(ErrorCode::PoleProximity, "angular rates need a positive radius", "r");
    }
    const double g = params.gamma();
    const double gap = params.eta() - s.c;
    const double sn = std::sin(s.theta);
    PolarRates d;
    d.r_dot = -0.5 * g * (s.r + gap * sn);
    d.c_dot = 0.5 * g * (s.r * sn + gap);
    d.theta_dot = -0.5 * g * gap / s.r * std::cos(s.theta) + 2.0 * params.J() * std::cos(u);
    return d;
}

std::array<double, 4> spherical_rhs(const SphericalState& s, double u, const ModelParams& params, double alpha) {
    if (kHalfPi - std::abs(s.theta) <= kPoleGuard) {
        throw Error(ErrorCode::PoleProximity, "azimuthal rate is singular at the poles", "theta");
    }
    const PolarRates d = polar_rates(s, u, params);
    const double phi_dot = 2.0 * alpha - 2.0 * params.J() * std::tan(s.theta) * std::sin(u);
    return {d.r_dot, d.c_dot, d.theta_dot, phi_dot};
}

double delta_from_u(double u, double u_dot, double theta, double J) {
    const double s = std::sin(u);
    if (s == 0.0) return u_dot;
    if (kHalfPi - std::abs(theta) <= kPoleGuard) {
        throw Error(ErrorCode::PoleProximity, "detuning is singular at the poles for sin u != 0", "theta");
    }
    return u_dot - 2.0 * J * std::tan(theta) * s;
}

double epsilon_from_delta(double delta, const ModelParams& params) {
    return delta - params.omega_q() + params.omega_tls();
}

double purity_z(const ZVector& z) { return 0.5 + 2.0 * (z[0] * z[0] + z[4] * z[4] + z[6] * z[6]); }

double purity_spherical(const SphericalState& s) {
    const double z1 = s.c + s.r * std::sin(s.theta);
    return 0.5 + 2.0 * z1 * z1;
}

ZVector align_correlation_phase(const ZVector& z) {
    const double perp = std::hypot(z[1], z[2]);
    if (perp == 0.0) return z;
    const double phi = azimuth(z);
    const double cs = std::cos(phi);
    const double sn = std::sin(phi);
    ZVector out = z;
    out[1] = perp;
    out[2] = 0.0;
    out[4] = z[4] * cs - z[6] * sn;
    out[6] = z[4] * sn + z[6] * cs;
    return out;
}

ZVector initial_z(const InitialStateSpec& spec, const ModelParams& params, bool align) {
    const ZVector z = x_to_z(build_initial_state(spec, params));
    return align ? align_correlation_phase(z) : z;
}

Trajectory<8> propagate_reduced(const ZVector& z0, const ControlLaw& control, const ModelParams& params,
                                double t0, double t1, const PropagationOptions& options) {
    if (!std::isfinite(t0) || !std::isfinite(t1) || t1 < t0) {
        throw Error(ErrorCode::InvalidParameter, "time span must be finite with t1 >= t0", "t_span");
    }
    auto rhs = [&](double t, const ZVector& z) { return reduced_rhs(z, t, control, params); };
    ode::DormandPrince<8> solver(rhs, options.tol);

    std::vector<ode::EventSpec<8>> events;
    const bool angular = options.stop_at_north_pole || options.stop_at_fixed_point || options.detect_angular_events;
    if (angular) {
        // Numerator of d(sinθ)/dt: ẇ ρ⊥² - w (z2 ż2 + z3 ż3), with w = z1 - c.
        auto rise = [rhs](double t, const ZVector& z) {
            const ZVector d = rhs(t, z);
            const double w = z[0] + 0.5 * (z[3] + 1.0);
            const double w_dot = d[0] + 0.5 * d[3];
            return w_dot * (z[1] * z[1] + z[2] * z[2]) - w * (z[1] * d[1] + z[2] * d[2]);
        };
        const double floor = options.pole_radius_floor;
        auto at_pole = [](const ZVector& z) {
            const SphericalState s = z_to_spherical(z);
            return s.r > 0.0 && std::sin(s.theta) >= 1.0 - 1e-9;
        };
        auto alive = [floor](const ZVector& z) { return z_to_spherical(z).r > floor; };

        events.push_back({event_kind::kNorthPole, rise, -1, options.stop_at_north_pole,
                          [=](double, const ZVector& z) { return alive(z) && at_pole(z); }});
        events.push_back({event_kind::kFixedPoint, rise, -1, options.stop_at_fixed_point,
                          [=](double, const ZVector& z) { return alive(z) && !at_pole(z); }});
    }
    if (options.track_purity_maxima) {
        events.push_back({event_kind::kPurityMax,
                          [rhs](double t, const ZVector& z) {
                              const ZVector d = rhs(t, z);
                              return z[0] * d[0] + z[4] * d[4] + z[6] * d[6];
                          },
                          -1, false, {}});
    }

    const ode::Solution<8> sol = solver.integrate(t0, z0, t1, events);
    Trajectory<8> tr = detail::to_trajectory(sol, options.sample_times);
    if (angular && !sol.terminated) tr.events.push_back({sol.t_end(), event_kind::kHorizon, sol.y.back()});
    return tr;
}

double s2_resonant_solution(double t, double mu_q, double J, double gamma) {
    if (!(J >= 0.0) || !(gamma >= 0.0) || !std::isfinite(t)) {
        throw Error(ErrorCode::InvalidParameter, "S2 solution needs J >= 0, gamma >= 0 and finite t", "J");
    }
    // z5'' + (γ/2) z5' + J² z5 = 0, z5(0) = μ, z5'(0) = 0
    const double q = gamma / 4.0;
    const double decay = std::exp(-q * t);
    const double disc = J * J - q * q;
    if (disc > 0.0) {
        const double w = std::sqrt(disc);
        return mu_q * decay * (std::cos(w * t) + q * sin_over(w, t));
    }
    if (disc < 0.0) {
        const double w = std::sqrt(-disc);
        return mu_q * decay * (std::cosh(w * t) + q * sinh_over(w, t));
    }
    return mu_q * (1.0 + q * t) * decay;
}

} // namespace qpurify
