// reduced.hpp: The closed 8-coordinate dynamics on S1 ⊕ S2 and its spherical view
//
// S1 = (z1..z4) carries populations and the qubit–TLS correlation, S2 =
// (z5..z8) the qubit coherences. Numerics run in z; the spherical form is
// singular at the poles and serves analysis only.

#pragma once

#include <array>

#include "qpurify/control_law.hpp"
#include "qpurify/liouville.hpp"
#include "qpurify/model.hpp"
#include "qpurify/trajectory.hpp"

namespace qpurify {

using ZVector = ode::State<8>;
using S1Vector = std::array<double, 4>;
using S2Vector = std::array<double, 4>;

// Angles closer than this to ±π/2 are treated as the pole.
inline constexpr double kPoleGuard = 1e-6;

/// Spherical view of S1: z1 = c + r sinθ, z2 = r cosθ cosφ, z3 = r cosθ sinφ,
/// with the center c = -(z4 + 1)/2 on the z1 axis.
struct SphericalState {
    double r{0.0};
    double c{0.0};
    double theta{0.0};
    double phi{0.0};

    // z1 position of the north pole, the best purity reachable on this sphere.
    double Z() const noexcept { return r + c; }
};

struct PolarRates {
    double r_dot{0.0};
    double c_dot{0.0};
    double theta_dot{0.0};
};

ZVector x_to_z(const XVector& x);
ZVector x_to_z(const DensityState& x);

S1Vector s1_part(const ZVector& z);
S2Vector s2_part(const ZVector& z);

S1Vector s1_rhs(const S1Vector& z, const CouplingTerms& k, const ModelParams& params);
S2Vector s2_rhs(const S2Vector& z, const CouplingTerms& k, double gamma);
ZVector reduced_rhs(const ZVector& z, const CouplingTerms& k, const ModelParams& params);
ZVector reduced_rhs(const ZVector& z, double t, const ControlLaw& control, const ModelParams& params);

// φ := 0 when r = 0 or at a pole.
SphericalState z_to_spherical(const S1Vector& z);
SphericalState z_to_spherical(const ZVector& z);
S1Vector spherical_to_z(const SphericalState& s);

// (ṙ, ċ, θ̇, φ̇) for the geometric control u = phase - φ. Throws PoleProximity
// when |θ| ≥ π/2 - kPoleGuard, where φ̇ is singular.
std::array<double, 4> spherical_rhs(const SphericalState& s, double u, const ModelParams& params,
                                    double alpha = 0.0);
// The regular part (ṙ, ċ, θ̇); requires r > 0 and |θ| < π/2.
PolarRates polar_rates(const SphericalState& s, double u, const ModelParams& params);

// Detuning realising the geometric control u(t) on the current state.
double delta_from_u(double u, double u_dot, double theta, double J);
double epsilon_from_delta(double delta, const ModelParams& params);

double purity_z(const ZVector& z);
double purity_spherical(const SphericalState& s);

// Rotates the correlation onto real positive ξ (φ = 0) with an instantaneous
// α kick of area -φ/2; S2 picks up the matching rotation.
ZVector align_correlation_phase(const ZVector& z);

// z of the initial state, optionally aligned.
ZVector initial_z(const InitialStateSpec& spec, const ModelParams& params, bool align = true);

/// Integrates S1 ⊕ S2. Pole and fixed-point events are the zero crossings of
/// d(sinθ)/dt from above, split by whether sinθ has reached 1.
Trajectory<8> propagate_reduced(const ZVector& z0, const ControlLaw& control, const ModelParams& params,
                                double t0, double t1, const PropagationOptions& options = {});

// Closed-form z5(t) of the resonant S2 dynamics with z6 = z7 = z8 = 0 at t = 0.
double s2_resonant_solution(double t, double mu_q, double J, double gamma);

} // namespace qpurify
