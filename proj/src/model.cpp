// model.cpp: Parameters, thermal populations and initial states

#include "qpurify/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qpurify/error.hpp"

namespace qpurify {

namespace {

void require(bool ok, const char* parameter, const std::string& message) {
    if (!ok) throw Error(ErrorCode::InvalidParameter, message, parameter);
}

bool finite(double v) { return std::isfinite(v); }

} // namespace

Populations thermal_populations(double omega, double beta) {
    require(finite(omega), "omega", "frequency must be finite");
    require(finite(beta) && beta >= 0.0, "beta", "inverse temperature must be >= 0");
    // Logistic form: overflow-free, and the excited weight keeps full relative
    // precision when it is tiny.
    const double x = beta * omega;
    return {1.0 / (1.0 + std::exp(-x)), 1.0 / (1.0 + std::exp(x))};
}

BathRates bath_rates(double kappa, double omega_tls, double beta) {
    require(finite(kappa) && kappa >= 0.0, "kappa", "bath rate prefactor must be >= 0");
    require(finite(omega_tls) && omega_tls > 0.0, "omega_tls", "TLS frequency must be > 0");
    require(finite(beta) && beta > 0.0, "beta",
            "inverse temperature must be > 0 (thermal occupation undefined)");

    BathRates r;
    r.N = 1.0 / std::expm1(beta * omega_tls);
    r.gamma1 = kappa * (r.N + 1.0);
    r.gamma2 = kappa * r.N;
    r.gamma = r.gamma1 + r.gamma2;
    if (kappa > 0.0) {
        r.eta = r.gamma1 / r.gamma - 0.5;
    } else {
        r.eta = thermal_populations(omega_tls, beta).ground - 0.5;
    }
    return r;
}

ModelParams::ModelParams(const Inputs& in) : in_(in) {
    require(finite(in.omega_q), "omega_q", "qubit frequency must be finite");
    require(finite(in.omega_tls), "omega_tls", "TLS frequency must be finite");
    require(in.omega_q < in.omega_tls, "omega_q", "qubit frequency must be below the TLS frequency");
    require(finite(in.J) && in.J >= 0.0, "J", "coupling must be >= 0");
    rates_ = bath_rates(in.kappa, in.omega_tls, in.beta);
}

double ModelParams::T0() const {
    require(in_.J > 0.0, "J", "T0 requires a positive coupling");
    return std::numbers::pi / (2.0 * in_.J);
}

ModelParams ModelParams::with_J(double J) const {
    Inputs in = in_;
    in.J = J;
    return ModelParams(in);
}

ModelParams ModelParams::with_beta(double beta) const {
    Inputs in = in_;
    in.beta = beta;
    return ModelParams(in);
}

ModelParams ModelParams::with_kappa(double kappa) const {
    Inputs in = in_;
    in.kappa = kappa;
    return ModelParams(in);
}

ModelParams ModelParams::with_gamma(double gamma) const {
    require(finite(gamma) && gamma >= 0.0, "gamma", "total rate must be >= 0");
    // γ = κ(2N + 1)
    return with_kappa(gamma / (2.0 * rates_.N + 1.0));
}

Eigen::Matrix4cd DensityState::matrix() const {
    using C = std::complex<double>;
    const DensityState& s = *this;
    Eigen::Matrix4cd m;
    m(0, 0) = s(1);
    m(1, 1) = s(2);
    m(2, 2) = s(3);
    m(3, 3) = s(4);
    m(0, 1) = C(s(5), s(6));
    m(0, 2) = C(s(7), s(8));
    m(0, 3) = C(s(9), s(10));
    m(1, 2) = C(s(11), s(12));
    m(1, 3) = C(s(13), s(14));
    m(2, 3) = C(s(15), s(16));
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < i; ++j) m(i, j) = std::conj(m(j, i));
    }
    return m;
}

DensityState DensityState::from_matrix(const Eigen::Matrix4cd& m) {
    DensityState s;
    s(1) = m(0, 0).real();
    s(2) = m(1, 1).real();
    s(3) = m(2, 2).real();
    s(4) = m(3, 3).real();
    s(5) = m(0, 1).real();
    s(6) = m(0, 1).imag();
    s(7) = m(0, 2).real();
    s(8) = m(0, 2).imag();
    s(9) = m(0, 3).real();
    s(10) = m(0, 3).imag();
    s(11) = m(1, 2).real();
    s(12) = m(1, 2).imag();
    s(13) = m(1, 3).real();
    s(14) = m(1, 3).imag();
    s(15) = m(2, 3).real();
    s(16) = m(2, 3).imag();
    return s;
}

namespace {

DensityState assemble(const InitialStateSpec& spec, const Populations& q, const Populations& t) {
    DensityState s;
    s(1) = q.ground * t.ground;
    s(2) = q.ground * t.excited;
    s(3) = q.excited * t.ground;
    s(4) = q.excited * t.excited;
    // qubit coherence in each TLS sector
    s(7) = spec.mu_q * t.ground;
    s(8) = spec.nu_q * t.ground;
    s(13) = spec.mu_q * t.excited;
    s(14) = spec.nu_q * t.excited;
    // ρ_corr(|01>,|10>) = iξ
    const std::complex<double> corr = std::complex<double>(0.0, 1.0) * spec.xi;
    s(11) = corr.real();
    s(12) = corr.imag();
    return s;
}

} // namespace

DensityState build_initial_state(const InitialStateSpec& spec, const ModelParams& params,
                                 double positivity_tol) {
    require(finite(spec.mu_q) && finite(spec.nu_q), "mu_q", "coherences must be finite");
    require(finite(spec.xi.real()) && finite(spec.xi.imag()), "xi", "correlation must be finite");

    DensityState s = assemble(spec, params.qubit_populations(), params.tls_populations());
    const double lmin = min_eigenvalue(s);
    if (lmin < -positivity_tol) {
        throw Error(ErrorCode::UnphysicalState,
                    "initial state is not positive semi-definite (min eigenvalue " +
                        std::to_string(lmin) + ")",
                    std::abs(spec.xi) > 0.0 ? "xi" : "mu_q");
    }
    return s;
}

double xi_max(const Populations& qubit, const Populations& tls) {
    return std::sqrt(qubit.ground * tls.ground * qubit.excited * tls.excited);
}

double xi_max(const ModelParams& params) {
    return xi_max(params.qubit_populations(), params.tls_populations());
}

double min_eigenvalue(const DensityState& rho) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(rho.matrix(), Eigen::EigenvaluesOnly);
    return solver.eigenvalues()(0);
}

double mu_max(double xi, const ModelParams& params) {
    const Populations q = params.qubit_populations();
    const Populations t = params.tls_populations();
    require(std::abs(xi) <= xi_max(q, t) * (1.0 + 1e-12) + 1e-15, "xi",
            "correlation exceeds the positivity bound");

    auto min_eig = [&](double mu) {
        return min_eigenvalue(assemble({mu, 0.0, {xi, 0.0}}, q, t));
    };

    // The boundary at |ξ| = ξ_max is a tangency (λ_min ~ -μ²), so the
    // predicate is strict positivity; μ = 0 is feasible by precondition.
    if (min_eig(0.0) <= 0.0) return 0.0;

    // μ² ≤ a_q b_q is necessary for the reduced qubit state.
    double lo = 0.0;
    double hi = std::sqrt(q.ground * q.excited) * (1.0 + 1e-9) + 1e-12;
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (min_eig(mid) >= 0.0) lo = mid;
        else hi = mid;
    }
    return lo;
}

} // namespace qpurify
