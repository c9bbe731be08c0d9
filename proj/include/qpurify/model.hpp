// model.hpp: Physical parameters, thermal populations and initial joint states
//
// Basis ordering for every 4x4 operator in this library is |q, tls> with
// |00>, |01>, |10>, |11>, where |0> is the ground state of each subsystem.

#pragma once

#include <array>
#include <complex>

#include <Eigen/Dense>

namespace qpurify {

// Minimum eigenvalue accepted as physical; states saturating the correlation
// bound sit exactly on the boundary and round to tiny negative values.
inline constexpr double kPositivityTol = 1e-10;

struct Populations {
    double ground{0.5};
    double excited{0.5};
};

// a = e^{βω/2} / (2 cosh(βω/2)), b = 1 - a.
Populations thermal_populations(double omega, double beta);

struct BathRates {
    double N{0.0};      // thermal occupation of the bath at the TLS frequency
    double gamma1{0.0}; // κ(N+1), decay
    double gamma2{0.0}; // κN, excitation
    double gamma{0.0};  // γ1 + γ2
    double eta{0.0};    // γ1/γ - 1/2, equal to a_tls - 1/2
};

BathRates bath_rates(double kappa, double omega_tls, double beta);

/// Validated model constants plus the derived bath quantities.
///
/// Frequencies and rates are dimensionless. `beta` is the inverse temperature.
class ModelParams {
public:
    struct Inputs {
        double omega_q{1.0};
        double omega_tls{3.0};
        double beta{1.0};
        double J{0.1};
        double kappa{0.05};
    };

    ModelParams() : ModelParams(Inputs{}) {}
    explicit ModelParams(const Inputs& in);

    const Inputs& inputs() const noexcept { return in_; }

    double omega_q() const noexcept { return in_.omega_q; }
    double omega_tls() const noexcept { return in_.omega_tls; }
    double beta() const noexcept { return in_.beta; }
    double J() const noexcept { return in_.J; }
    double kappa() const noexcept { return in_.kappa; }

    double N() const noexcept { return rates_.N; }
    double gamma1() const noexcept { return rates_.gamma1; }
    double gamma2() const noexcept { return rates_.gamma2; }
    double gamma() const noexcept { return rates_.gamma; }
    double eta() const noexcept { return rates_.eta; }
    const BathRates& rates() const noexcept { return rates_; }

    Populations qubit_populations() const { return thermal_populations(in_.omega_q, in_.beta); }
    Populations tls_populations() const { return thermal_populations(in_.omega_tls, in_.beta); }

    // Dissipation-free purification time π/(2J) of the uncorrelated state.
    double T0() const;
    // Coupling below which the uncorrelated state cannot be purified in finite time.
    double J_min() const noexcept { return rates_.gamma / 4.0; }

    ModelParams with_J(double J) const;
    ModelParams with_beta(double beta) const;
    ModelParams with_kappa(double kappa) const;
    // Picks κ so that the total rate at the current temperature equals `gamma`.
    ModelParams with_gamma(double gamma) const;

private:
    Inputs in_;
    BathRates rates_;
};

struct InitialStateSpec {
    double mu_q{0.0};
    double nu_q{0.0};
    std::complex<double> xi{0.0, 0.0};
};

/// The 16 real coordinates x1..x16 of the joint density matrix (stored 0-based).
struct DensityState {
    std::array<double, 16> x{};

    double& operator()(int i) { return x[static_cast<std::size_t>(i - 1)]; }
    double operator()(int i) const { return x[static_cast<std::size_t>(i - 1)]; }

    double trace() const noexcept { return x[0] + x[1] + x[2] + x[3]; }
    Eigen::Matrix4cd matrix() const;
    static DensityState from_matrix(const Eigen::Matrix4cd& rho);
};

// ρ = ρ_q ⊗ ρ_tls + ρ_corr with thermal populations taken from `params`.
// Throws Error(UnphysicalState) when the smallest eigenvalue is below -positivity_tol.
DensityState build_initial_state(const InitialStateSpec& spec, const ModelParams& params,
                                 double positivity_tol = kPositivityTol);

double xi_max(const Populations& qubit, const Populations& tls);
double xi_max(const ModelParams& params);

double min_eigenvalue(const DensityState& rho);

// Largest real qubit coherence compatible with correlation `xi` (bisection, 1e-10).
double mu_max(double xi, const ModelParams& params);

} // namespace qpurify
