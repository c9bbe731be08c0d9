#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "qpurify/error.hpp"
#include "qpurify/reduced.hpp"

using namespace qpurify;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<InitialStateSpec> random_physical(const ModelParams& p, int count, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<InitialStateSpec> out;
    while (static_cast<int>(out.size()) < count) {
        InitialStateSpec s{0.5 * (u(rng) - 0.5), 0.5 * (u(rng) - 0.5), std::polar(xi_max(p) * u(rng), 2 * kPi * u(rng))};
        if (min_eigenvalue(build_initial_state(s, p, 1.0)) >= 0.0) out.push_back(s);
    }
    return out;
}

} // namespace

TEST_CASE("z coordinates of the thermal product state") {
    const ModelParams p;
    const ZVector z = x_to_z(build_initial_state({0.2, 0.1, 0.0}, p));
    const Populations q = p.qubit_populations();
    const Populations t = p.tls_populations();
    CHECK_THAT(z[0], WithinAbs(q.ground - 0.5, 1e-15));
    CHECK_THAT(z[1], WithinAbs(0.0, 1e-16));
    CHECK_THAT(z[4], WithinAbs(0.2, 1e-15));
    CHECK_THAT(z[6], WithinAbs(0.1, 1e-15));
    // z4 = -(a_q + a_tls) for a product state
    const SphericalState s = z_to_spherical(z);
    CHECK_THAT(s.c, WithinAbs(0.5 * (q.ground + t.ground - 1.0), 1e-15));
    CHECK_THAT(s.Z(), WithinAbs(p.eta(), 1e-14));
}

TEST_CASE("spherical round trip") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-0.4, 0.4);
    for (int k = 0; k < 50; ++k) {
        const S1Vector z{u(rng), u(rng), u(rng), u(rng) - 0.5};
        const S1Vector back = spherical_to_z(z_to_spherical(z));
        for (std::size_t i = 0; i < 4; ++i) CHECK_THAT(back[i], WithinAbs(z[i], 1e-14));
    }
}

TEST_CASE("spherical rates are the z dynamics seen through the chart") {
    const ModelParams p = ModelParams().with_gamma(0.2);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    for (int k = 0; k < 20; ++k) {
        const ZVector z{u(rng), u(rng), u(rng), -0.6 + u(rng), 0, 0, 0, 0};
        const double phase = 0.7 * u(rng);
        const CouplingTerms c{p.J() * std::cos(phase), p.J() * std::sin(phase), 0.05};
        const ZVector dz = reduced_rhs(z, c, p);
        const SphericalState s = z_to_spherical(z);
        const auto rates = spherical_rhs(s, phase - s.phi, p, 0.05);

        // central difference along the flow
        const double h = 1e-6;
        ZVector zp = z;
        ZVector zm = z;
        for (std::size_t i = 0; i < 8; ++i) {
            zp[i] += h * dz[i];
            zm[i] -= h * dz[i];
        }
        const SphericalState a = z_to_spherical(zp);
        const SphericalState b = z_to_spherical(zm);
        CHECK_THAT(rates[0], WithinAbs((a.r - b.r) / (2 * h), 1e-8));
        CHECK_THAT(rates[1], WithinAbs((a.c - b.c) / (2 * h), 1e-8));
        CHECK_THAT(rates[2], WithinAbs((a.theta - b.theta) / (2 * h), 1e-7));
        CHECK_THAT(rates[3], WithinAbs(std::remainder(a.phi - b.phi, 2 * kPi) / (2 * h), 1e-6));
    }
}

TEST_CASE("spherical rates refuse the poles") {
    const ModelParams p;
    const SphericalState s{0.1, -0.2, kPi / 2 - 1e-9, 0.0};
    try {
        (void)spherical_rhs(s, 0.0, p);
        FAIL("pole accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::PoleProximity);
    }
}

TEST_CASE("purity in z matches the spherical form on S1") {
    const ZVector z{0.12, 0.05, -0.03, -0.7, 0.0, 0.0, 0.0, 0.0};
    CHECK_THAT(purity_z(z), WithinAbs(purity_spherical(z_to_spherical(z)), 1e-15));
}

TEST_CASE("control conversions") {
    const ModelParams p;
    CHECK(delta_from_u(0.0, 0.0, 0.3, p.J()) == 0.0);
    CHECK_THAT(delta_from_u(0.2, 0.01, 0.3, p.J()), WithinAbs(0.01 - 2 * p.J() * std::tan(0.3) * std::sin(0.2), 1e-16));
    CHECK_THAT(epsilon_from_delta(0.0, p), WithinAbs(p.omega_tls() - p.omega_q(), 1e-15));
}

TEST_CASE("S2 closed form matches integration in every damping regime") {
    const double J = 0.1;
    for (double g : {0.0, 0.2, 0.4, 0.5}) {
        using S = ode::State<4>;
        ode::DormandPrince<4> solver([=](double, const S& z) { return s2_rhs(z, CouplingTerms{J, 0, 0}, g); });
        const auto sol = solver.integrate(0.0, S{0.3, 0, 0, 0}, 3 * kPi / (2 * J));
        for (int k = 0; k <= 100; ++k) {
            const double t = sol.t_end() * k / 100.0;
            CHECK_THAT(sol.at(t)[0], WithinAbs(s2_resonant_solution(t, 0.3, J, g), 1e-8));
        }
    }
}

TEST_CASE("resonant north-pole event at gamma/J = 2") {
    const ModelParams p = ModelParams().with_gamma(0.2);
    PropagationOptions po;
    po.stop_at_north_pole = true;
    const Trajectory<8> tr = propagate_reduced(initial_z({}, p), ControlLaw::resonant(), p, 0.0, 100.0, po);
    const auto* e = tr.find_event(event_kind::kNorthPole);
    REQUIRE(e != nullptr);
    CHECK_THAT(e->t, WithinRel(24.183991523122905, 1e-8));
    CHECK_THAT(purity_z(e->state), WithinAbs(0.5 + 2 * p.eta() * p.eta(), 1e-8));
    CHECK(tr.times.back() == e->t);
}

TEST_CASE("radius and pole height never grow") {
    const ModelParams p;
    for (const auto& s : random_physical(p, 10, 99)) {
        const Trajectory<8> tr =
            propagate_reduced(x_to_z(build_initial_state(s, p)), ControlLaw::resonant(), p, 0.0, 40.0);
        for (std::size_t k = 1; k < tr.states.size(); ++k) {
            const SphericalState a = z_to_spherical(tr.states[k - 1]);
            const SphericalState b = z_to_spherical(tr.states[k]);
            CHECK(b.r <= a.r + 1e-12);
            CHECK(b.Z() <= a.Z() + 1e-12);
        }
    }
}

TEST_CASE("pole height is conserved without correlations") {
    const ModelParams p;
    const Trajectory<8> tr = propagate_reduced(initial_z({0.3, 0.0, 0.0}, p), ControlLaw::resonant(), p, 0.0, 60.0);
    for (const auto& z : tr.states) CHECK_THAT(z_to_spherical(z).Z(), WithinAbs(p.eta(), 1e-9));
}

TEST_CASE("imaginary correlations are aligned onto the real axis") {
    const ModelParams p;
    const ZVector z = initial_z({0.1, 0.0, {0.0, 0.05}}, p);
    CHECK_THAT(z[2], WithinAbs(0.0, 1e-15));
    CHECK_THAT(z[1], WithinAbs(0.05, 1e-15));
    // the coherence magnitude is untouched
    CHECK_THAT(std::hypot(z[4], z[6]), WithinAbs(0.1, 1e-15));
}
