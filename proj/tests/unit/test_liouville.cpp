#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "qpurify/liouville.hpp"
#include "qpurify/reduced.hpp"

using namespace qpurify;
using Catch::Matchers::WithinAbs;

namespace {

// Random Hermitian unit-trace matrix (not necessarily positive).
DensityState random_hermitian(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::Matrix4cd a;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) a(i, j) = {n(rng), n(rng)};
    Eigen::Matrix4cd h = a + a.adjoint();
    h /= h.trace().real();
    return DensityState::from_matrix(h);
}

ControlLaw chirp(const ModelParams& p) {
    std::vector<double> t;
    std::vector<double> e;
    for (int k = 0; k <= 20; ++k) {
        t.push_back(2.0 * k);
        e.push_back(p.omega_tls() - p.omega_q() + 0.03 * std::cos(0.3 * k));
    }
    return ControlLaw::tabulated_epsilon(t, e, PhaseConvention::Literal);
}

} // namespace

TEST_CASE("coordinate field agrees with the matrix master equation") {
    const ModelParams p = ModelParams().with_gamma(0.2);
    std::mt19937_64 rng(11);
    for (const ControlLaw& law : {ControlLaw::resonant(), ControlLaw::constant_detuning(0.04), chirp(p)}) {
        for (double t : {0.0, 3.3, 17.9}) {
            const DensityState s = random_hermitian(rng);
            const XVector f = lindblad_rhs_x(s.x, t, law, p);
            const DensityState g = DensityState::from_matrix(
                lindblad_rhs_matrix(s.matrix(), hamiltonian_rwa(t, law, p), p));
            for (std::size_t i = 0; i < 16; ++i) CHECK_THAT(f[i], WithinAbs(g.x[i], 1e-13));
        }
    }
}

TEST_CASE("the field preserves the trace") {
    const ModelParams p;
    std::mt19937_64 rng(3);
    for (int k = 0; k < 10; ++k) {
        const XVector f = lindblad_rhs_x(random_hermitian(rng).x, CouplingTerms{0.07, -0.02, 0.3}, p);
        CHECK_THAT(f[0] + f[1] + f[2] + f[3], WithinAbs(0.0, 1e-15));
    }
}

TEST_CASE("rotating-frame Hamiltonian is Hermitian with the coupling in the one-excitation block") {
    const ModelParams p;
    const Eigen::Matrix4cd H = hamiltonian_rwa(1.0, ControlLaw::constant_detuning(0.1), p);
    CHECK((H - H.adjoint()).norm() < 1e-15);
    CHECK(std::abs(H(1, 2)) == Catch::Approx(p.J()));
    CHECK(std::abs(H(0, 3)) == 0.0);
    const Eigen::Matrix4cd L = hamiltonian_lab(1.0, ControlLaw::resonant(), p);
    CHECK((L - L.adjoint()).norm() < 1e-15);
}

TEST_CASE("thermal product state is stationary without coupling") {
    const ModelParams p = ModelParams().with_J(0.0);
    const DensityState x0 = build_initial_state({}, p);
    const XVector f = lindblad_rhs_x(x0.x, 0.0, ControlLaw::resonant(), p);
    for (double v : f) CHECK_THAT(v, WithinAbs(0.0, 1e-16));
}

TEST_CASE("decoupled lossless dynamics is frozen") {
    const ModelParams p = ModelParams().with_J(0.0).with_kappa(0.0);
    const DensityState x0 = build_initial_state({0.1, 0.05, {0.03, 0.01}}, p);
    const Trajectory<16> tr = propagate_full(x0, ControlLaw::resonant(), p, 0.0, 50.0);
    for (const auto& x : tr.states)
        for (std::size_t i = 0; i < 16; ++i) CHECK(x[i] == x0.x[i]);
}

TEST_CASE("qubit purity from coordinates matches the reduced density matrix") {
    std::mt19937_64 rng(5);
    for (int k = 0; k < 10; ++k) {
        const DensityState s = random_hermitian(rng);
        const Eigen::Matrix2cd q = partial_trace_qubit(s);
        CHECK_THAT(qubit_purity_x(s), WithinAbs((q * q).trace().real(), 1e-13));
    }
}

TEST_CASE("alpha kick reproduces the azimuth alignment") {
    const ModelParams p;
    const InitialStateSpec spec{0.1, 0.03, std::polar(0.06, 2.1)};
    const DensityState x = build_initial_state(spec, p);
    const double phi0 = std::atan2(x_to_z(x)[2], x_to_z(x)[1]);
    const ZVector kicked = x_to_z(apply_alpha_kick(x, -phi0 / 2.0));
    const ZVector aligned = align_correlation_phase(x_to_z(x));
    for (std::size_t i = 0; i < 8; ++i) CHECK_THAT(kicked[i], WithinAbs(aligned[i], 1e-14));
    CHECK_THAT(aligned[2], WithinAbs(0.0, 1e-15));
    CHECK(aligned[1] > 0.0);
}

TEST_CASE("lab frame agrees with the rotating frame for weak coupling") {
    const ModelParams p = ModelParams().with_J(0.01).with_gamma(0.02);
    const DensityState x0 = build_initial_state({0.0, 0.0, 0.5 * xi_max(p)}, p);
    PropagationOptions po;
    po.sample_times.clear();
    for (int k = 0; k <= 100; ++k) po.sample_times.push_back(0.6 * k);
    const auto lab = propagate_lab(x0, ControlLaw::resonant(), p, 0.0, 60.0, po);
    const auto rwa = propagate_full(x0, ControlLaw::resonant(), p, 0.0, 60.0, po);
    REQUIRE(lab.states.size() == rwa.states.size());
    double worst = 0.0;
    for (std::size_t k = 0; k < lab.states.size(); ++k) {
        worst = std::max(worst, std::abs(qubit_purity_x(lab.states[k]) - qubit_purity_x(rwa.states[k])));
    }
    CHECK(worst < 0.01);
}
