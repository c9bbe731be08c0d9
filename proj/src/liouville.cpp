// liouville.cpp

#include "qpurify/liouville.hpp"

#include <cmath>
#include <complex>

#include "qpurify/error.hpp"

namespace qpurify {

namespace {

using C = std::complex<double>;

XVector to_vector(const DensityState& s) { return s.x; }

DensityState to_state(const XVector& x) {
    DensityState s;
    s.x = x;
    return s;
}

void check_span(double t0, double t1) {
    if (!std::isfinite(t0) || !std::isfinite(t1) || t1 < t0) {
        throw Error(ErrorCode::InvalidParameter, "time span must be finite with t1 >= t0", "t_span");
    }
}

} // namespace

Eigen::Matrix4cd hamiltonian_lab(double t, const ControlLaw& control, const ModelParams& params) {
    const double wq = params.omega_q() + control.epsilon(t, params);
    const double wt = params.omega_tls();
    const double J = params.J();
    Eigen::Matrix4cd H = Eigen::Matrix4cd::Zero();
    // σz = diag(1, -1) on |0>, |1>
    H(0, 0) = -0.5 * wq - 0.5 * wt;
    H(1, 1) = -0.5 * wq + 0.5 * wt;
    H(2, 2) = 0.5 * wq - 0.5 * wt;
    H(3, 3) = 0.5 * wq + 0.5 * wt;
    H(0, 3) = H(3, 0) = H(1, 2) = H(2, 1) = -J;
    return H;
}

Eigen::Matrix4cd hamiltonian_rwa(double t, const ControlLaw& control, const ModelParams& params,
                                 double azimuth) {
    const CouplingTerms k = control.coupling(t, params, azimuth);
    Eigen::Matrix4cd H = Eigen::Matrix4cd::Zero();
    H(0, 0) = H(1, 1) = k.alpha;
    H(2, 2) = H(3, 3) = -k.alpha;
    // -J e^{-i phase} = -(J1 - i J2)
    H(1, 2) = C(-k.J1, k.J2);
    H(2, 1) = std::conj(H(1, 2));
    return H;
}

Eigen::Matrix4cd lindblad_rhs_matrix(const Eigen::Matrix4cd& rho, const Eigen::Matrix4cd& H,
                                     const ModelParams& params) {
    const C i(0.0, 1.0);
    Eigen::Matrix4cd d = -i * (H * rho - rho * H);

    Eigen::Matrix2cd lower = Eigen::Matrix2cd::Zero();
    lower(0, 1) = 1.0;
    const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
    Eigen::Matrix4cd sm;
    // 1 ⊗ σ-
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) sm.block<2, 2>(2 * a, 2 * b) = id(a, b) * lower;
    const Eigen::Matrix4cd sp = sm.adjoint();

    auto dissipate = [&](const Eigen::Matrix4cd& L, double rate) {
        if (rate == 0.0) return;
        const Eigen::Matrix4cd LdL = L.adjoint() * L;
        d += rate * (L * rho * L.adjoint() - 0.5 * (LdL * rho + rho * LdL));
    };
    dissipate(sm, params.gamma1());
    dissipate(sp, params.gamma2());
    return d;
}

XVector lindblad_rhs_x(const XVector& xv, const CouplingTerms& k, const ModelParams& params) {
    // 1-based view to keep the rows readable
    auto x = [&xv](int i) { return xv[static_cast<std::size_t>(i - 1)]; };
    const double g1 = params.gamma1();
    const double g2 = params.gamma2();
    const double J1 = k.J1;
    const double J2 = k.J2;
    const double a = k.alpha;

    XVector f;
    auto out = [&f](int i) -> double& { return f[static_cast<std::size_t>(i - 1)]; };

    out(1) = g1 * x(2) - g2 * x(1);
    out(2) = -g1 * x(2) + g2 * x(1) + 2 * J1 * x(12) + 2 * J2 * x(11);
    out(3) = g1 * x(4) - g2 * x(3) - 2 * J1 * x(12) - 2 * J2 * x(11);
    out(4) = -g1 * x(4) + g2 * x(3);

    const double half = -0.5 * (g1 + g2);
    out(5) = half * x(5) + J1 * x(8) + J2 * x(7);
    out(6) = half * x(6) - J1 * x(7) + J2 * x(8);
    out(7) = g1 * x(13) - g2 * x(7) + J1 * x(6) - J2 * x(5) + 2 * a * x(8);
    out(8) = g1 * x(14) - g2 * x(8) - J1 * x(5) - J2 * x(6) - 2 * a * x(7);
    out(9) = half * x(9) + 2 * a * x(10);
    out(10) = half * x(10) - 2 * a * x(9);
    out(11) = half * x(11) + J2 * (x(3) - x(2)) + 2 * a * x(12);
    out(12) = half * x(12) + J1 * (x(3) - x(2)) - 2 * a * x(11);
    out(13) = -g1 * x(13) + g2 * x(7) - J1 * x(16) + J2 * x(15) + 2 * a * x(14);
    out(14) = -g1 * x(14) + g2 * x(8) + J1 * x(15) + J2 * x(16) - 2 * a * x(13);
    out(15) = half * x(15) - J1 * x(14) - J2 * x(13);
    out(16) = half * x(16) + J1 * x(13) - J2 * x(14);
    return f;
}

double s1_azimuth_x(const XVector& x) {
    // z2 = x12, z3 = x11
    return std::atan2(x[10], x[11]);
}

XVector lindblad_rhs_x(const XVector& x, double t, const ControlLaw& control, const ModelParams& params) {
    const double azimuth = control.state_dependent() ? s1_azimuth_x(x) : 0.0;
    return lindblad_rhs_x(x, control.coupling(t, params, azimuth), params);
}

Trajectory<16> propagate_full(const DensityState& x0, const ControlLaw& control, const ModelParams& params,
                              double t0, double t1, const PropagationOptions& options) {
    check_span(t0, t1);
    ode::DormandPrince<16> solver(
        [&](double t, const XVector& x) { return lindblad_rhs_x(x, t, control, params); }, options.tol);
    return detail::to_trajectory(solver.integrate(t0, to_vector(x0), t1), options.sample_times);
}

Trajectory<16> propagate_lab(const DensityState& rho0, const ControlLaw& control, const ModelParams& params,
                             double t0, double t1, const PropagationOptions& options) {
    check_span(t0, t1);
    ode::DormandPrince<16> solver(
        [&](double t, const XVector& x) {
            const Eigen::Matrix4cd rho = to_state(x).matrix();
            return to_vector(DensityState::from_matrix(
                lindblad_rhs_matrix(rho, hamiltonian_lab(t, control, params), params)));
        },
        options.tol);
    return detail::to_trajectory(solver.integrate(t0, to_vector(rho0), t1), options.sample_times);
}

Eigen::Matrix2cd partial_trace_qubit(const DensityState& s) {
    Eigen::Matrix2cd q;
    q(0, 0) = s(1) + s(2);
    q(1, 1) = s(3) + s(4);
    q(0, 1) = C(s(7) + s(13), s(8) + s(14));
    q(1, 0) = std::conj(q(0, 1));
    return q;
}

double qubit_purity_x(const XVector& x) {
    const double p = x[0] + x[1] - 0.5;
    const double re = x[6] + x[12];
    const double im = x[7] + x[13];
    return 0.5 + 2.0 * (p * p + re * re + im * im);
}

double qubit_purity_x(const DensityState& s) { return qubit_purity_x(s.x); }

DensityState apply_alpha_kick(const DensityState& s, double area) {
    const C phase = std::exp(C(0.0, -area));
    Eigen::Matrix4cd U = Eigen::Matrix4cd::Zero();
    U(0, 0) = U(1, 1) = phase;
    U(2, 2) = U(3, 3) = std::conj(phase);
    return DensityState::from_matrix(U * s.matrix() * U.adjoint());
}

} // namespace qpurify
