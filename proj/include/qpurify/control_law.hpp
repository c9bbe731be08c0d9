// control_law.hpp: Control representations and their conversions
//
// The physical control is the field ε(t) that shifts the qubit splitting.
// The rotating-frame dynamics only see it through the detuning
// δ(t) = ω_q + ε(t) - ω_tls, the coupling phase and the frame term α(t).

#pragma once

#include <memory>
#include <string>
#include <vector>

#include "qpurify/model.hpp"

namespace qpurify {

// How the oscillating factors of the rotating frame accumulate phase.
//   Literal:     phase(t) = δ(t)·t,   α(t) = (t/2)·dδ/dt
//   Accumulated: phase(t) = ∫₀ᵗ δ,    α(t) = 0
// Both coincide for constant δ.
enum class PhaseConvention { Literal, Accumulated };

// Coefficients of the rotating-frame generator at one instant.
struct CouplingTerms {
    double J1{0.0};    // J cos(phase)
    double J2{0.0};    // J sin(phase)
    double alpha{0.0}; // frame term on the diagonal
};

class ControlLaw {
public:
    enum class Kind { Resonant, ConstantDetuning, TabulatedEpsilon, TabulatedU };

    // u ≡ 0, δ ≡ 0, ε = ω_tls - ω_q.
    static ControlLaw resonant();
    static ControlLaw constant_detuning(double delta0);
    // Sampled field, interpolated piecewise-cubically (shape preserving);
    // constant extrapolation outside the table.
    static ControlLaw tabulated_epsilon(std::vector<double> times, std::vector<double> epsilon,
                                        PhaseConvention convention = PhaseConvention::Literal);
    // Geometric control u(t) = phase - φ. The coupling phase is slaved to the
    // azimuth of the current state, so this law is state dependent.
    static ControlLaw tabulated_u(std::vector<double> times, std::vector<double> u);

    Kind kind() const noexcept { return kind_; }
    PhaseConvention convention() const noexcept { return convention_; }
    bool state_dependent() const noexcept { return kind_ == Kind::TabulatedU; }
    std::string describe() const;

    // Physical field and its rate. Not defined for TabulatedU.
    double epsilon(double t, const ModelParams& p) const;
    double epsilon_rate(double t) const;
    double detuning(double t, const ModelParams& p) const;
    double phase(double t, const ModelParams& p) const;
    double alpha(double t, const ModelParams& p) const;

    double u(double t) const;
    double u_rate(double t) const;

    // Generator coefficients. `azimuth` is φ of the current S1 state and is
    // only read by state-dependent laws.
    CouplingTerms coupling(double t, const ModelParams& p, double azimuth = 0.0) const;

private:
    struct Table;

    Kind kind_{Kind::Resonant};
    PhaseConvention convention_{PhaseConvention::Literal};
    double delta0_{0.0};
    std::shared_ptr<const Table> table_;
};

} // namespace qpurify
