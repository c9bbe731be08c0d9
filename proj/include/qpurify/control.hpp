// control.hpp: Time-optimal purification analysis under the resonant protocol u ≡ 0

#pragma once

#include <complex>
#include <optional>
#include <string>

#include "qpurify/model.hpp"
#include "qpurify/ode.hpp"
#include "qpurify/reduced.hpp"

namespace qpurify {

enum class Regime { Markovian, NonMarkovian, Critical };
enum class Region { A, B, C };

std::string_view to_string(Regime r);
std::string_view to_string(Region r);

struct AnalysisOptions {
    // Divergence horizon in units of T0 = π/(2J).
    double horizon_multiple{20.0};
    ode::Tolerances tol{};
    double pole_radius_floor{1e-7};
    // Rotate complex or negative ξ onto the positive real axis before analysis.
    bool align_phase{true};
};

// Closed form for ξ = 0; nullopt when γ ≥ 4J.
std::optional<double> t_min_uncorrelated(double J, double gamma);

Regime classify_regime(double J, double gamma);

/// Outcome of a resonant run towards the S1 north pole.
///
/// The run integrates the closed polar system in (θ, q, ln r) with
/// q = (η - c)/r, which keeps full relative precision while r decays by many
/// orders of magnitude near criticality.
struct PurificationRun {
    enum class Stop { Reached, FixedPointBlocked, Collapsed, HorizonExpired };

    std::optional<double> t_min; // nullopt: divergent
    Stop stop{Stop::HorizonExpired};
    double t_stop{0.0};
    SphericalState s_stop{};
    double theta_dot_stop{0.0};
    double purity_stop{0.0}; // S1 plus the closed-form S2 contribution
    double horizon{0.0};
    ode::Stats stats;
};

std::string_view to_string(PurificationRun::Stop s);

PurificationRun t_min_numeric(const ModelParams& params, std::complex<double> xi,
                              const AnalysisOptions& options = {}, double mu_q = 0.0);

// arccos((4J/γ) r/(η - c)) when the argument lies in (0, 1].
std::optional<double> fixed_point_theta(double r, double c, const ModelParams& params);

struct XiFixed {
    double xi{0.0};
    bool saturated{false};   // no threshold below ξ_max; xi holds ξ_max
    double residual{0.0};    // (4J/γ) r(0)/(η - c(0)) - 1 at xi
    std::optional<double> closed_form; // d·√((γ/4J)² - 1), d = (a_tls - a_q)/2
};

// Largest ξ ≥ 0 for which the initial state still has an angular fixed point.
// For γ ≤ 4J no correlation is needed to remove it and the threshold is 0.
XiFixed xi_fixed(const ModelParams& params);

struct RegionResult {
    std::optional<Region> region; // nullopt: horizon expired unresolved
    double t_event{0.0};
    std::optional<double> theta_fixed_initial;
};

RegionResult classify_region(const ModelParams& params, double xi, const AnalysisOptions& options = {});

struct PurityGain {
    double t_min{0.0};
    double p_final{0.0}; // purity at the north-pole event
    double p_max{0.0};
    double t_peak{0.0};
    double delta_p{0.0}; // p_max / p_final - 1
};

// Largest interior purity maximum of S1 ⊕ S2 over (0, T_min], the control
// window; nullopt when T_min diverges.
std::optional<PurityGain> purity_gain(const ModelParams& params, double xi, double mu_q,
                                      const AnalysisOptions& options = {});
std::optional<double> delta_p(const ModelParams& params, double xi, double mu_q,
                              const AnalysisOptions& options = {});

/// One analysis record.
struct ControlAnalysis {
    double xi{0.0};
    double mu_q{0.0};
    Regime regime{Regime::NonMarkovian};
    std::optional<Region> region;
    std::optional<double> t_min;
    std::optional<double> theta_fixed;
    double p_final{0.0};
    double p_max{0.0};
    std::optional<double> delta_p;
};

ControlAnalysis analyze(const ModelParams& params, double xi, double mu_q, const AnalysisOptions& options = {});

} // namespace qpurify
