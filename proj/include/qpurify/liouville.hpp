// liouville.hpp: Full joint-state master equation in the rotating and lab frames
//
// Lindblad operators act on the TLS only: L1 = √γ1 (1 ⊗ σ-), L2 = √γ2 (1 ⊗ σ+),
// with σ- = |0><1|. The same dissipator applies in both frames because the
// frame change multiplies each operator by a global phase.

#pragma once

#include <array>

#include <Eigen/Dense>

#include "qpurify/control_law.hpp"
#include "qpurify/model.hpp"
#include "qpurify/trajectory.hpp"

namespace qpurify {

using XVector = ode::State<16>;

Eigen::Matrix4cd hamiltonian_lab(double t, const ControlLaw& control, const ModelParams& params);

// Rotating-frame generator. `azimuth` feeds state-dependent control laws.
Eigen::Matrix4cd hamiltonian_rwa(double t, const ControlLaw& control, const ModelParams& params,
                                 double azimuth = 0.0);

// -i[H, ρ] + D(ρ) for an arbitrary Hamiltonian.
Eigen::Matrix4cd lindblad_rhs_matrix(const Eigen::Matrix4cd& rho, const Eigen::Matrix4cd& H,
                                     const ModelParams& params);

// ẋ = f0(x) + J1 f1(x) + J2 f2(x) + α f3(x), written out per coordinate.
XVector lindblad_rhs_x(const XVector& x, const CouplingTerms& k, const ModelParams& params);
XVector lindblad_rhs_x(const XVector& x, double t, const ControlLaw& control, const ModelParams& params);

// Azimuth of the S1 block, atan2(z3, z2), read straight from x.
double s1_azimuth_x(const XVector& x);

Trajectory<16> propagate_full(const DensityState& x0, const ControlLaw& control, const ModelParams& params,
                              double t0, double t1, const PropagationOptions& options = {});

// Untransformed master equation with the lab-frame Hamiltonian.
Trajectory<16> propagate_lab(const DensityState& rho0, const ControlLaw& control, const ModelParams& params,
                             double t0, double t1, const PropagationOptions& options = {});

Eigen::Matrix2cd partial_trace_qubit(const DensityState& x);
double qubit_purity_x(const DensityState& x);
double qubit_purity_x(const XVector& x);

// Instantaneous frame kick exp(-i A σz⊗1) ρ exp(i A σz⊗1), the limit of a
// short strong α pulse with area A.
DensityState apply_alpha_kick(const DensityState& x, double area);

} // namespace qpurify
