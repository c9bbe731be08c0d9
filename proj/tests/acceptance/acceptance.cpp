// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include <unistd.h>

#include "qpurify/commands.hpp"
#include "qpurify/control.hpp"
#include "qpurify/liouville.hpp"
#include "qpurify/reduced.hpp"

using namespace qpurify;

namespace {

constexpr double kPi = std::numbers::pi;

// Pinned tolerances and budgets.
constexpr double kTol1Lossless = 1e-9;
constexpr double kTol1Damped = 1e-6;
constexpr double kBudget1 = 1e-3;
constexpr double kTol2 = 1e-6;
constexpr double kBudget2 = 1.0;
constexpr double kBudget3 = 5.0;
constexpr double kTol4 = 1e-8;
constexpr double kBudget4 = 5.0;
constexpr double kTol5Trace = 1e-9;
constexpr double kTol5Eigen = -1e-8;
constexpr double kTol5Height = 1e-9;
constexpr double kTol5Radius = 1e-10;
constexpr double kTol6 = 1e-5;
constexpr double kTol8 = 1e-8;
constexpr double kTol9 = 1e-6;
constexpr double kBudget10 = 60.0;
constexpr double kTol11 = 0.01;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Line {
    bool pass{true};
    std::ostringstream detail;

    Line() { detail.precision(12); }

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

int failures = 0;

void criterion(int id, const char* name, const std::function<void(Line&)>& body) {
    Line line;
    try {
        body(line);
    } catch (const std::exception& e) {
        line.pass = false;
        line.detail << " [exception: " << e.what() << "]";
    }
    if (!line.pass) ++failures;
    std::printf("%s %2d %s:%s\n", line.pass ? "PASS" : "FAIL", id, name, line.detail.str().c_str());
    std::fflush(stdout);
}

// Independent oracle for the closed form: Simpson quadrature of dθ/θ̇ with
// θ̇ = 2J - (γ/2) cosθ from the south to the north pole.
double t_min_quadrature(double J, double gamma) {
    const int n = 200000;
    const double h = kPi / n;
    auto f = [=](double th) { return 1.0 / (2 * J - 0.5 * gamma * std::cos(th)); };
    double s = f(-kPi / 2) + f(kPi / 2);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(-kPi / 2 + i * h);
    return s * h / 3.0;
}

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

// dr/dt by the chain rule on r² = (z1 - c)² + z2² + z3², c = -(z4 + 1)/2.
double radius_rate(const ZVector& z, const ZVector& dz) {
    const double c = -(z[3] + 1.0) / 2.0;
    const double dc = -dz[3] / 2.0;
    const double r = std::sqrt((z[0] - c) * (z[0] - c) + z[1] * z[1] + z[2] * z[2]);
    return ((z[0] - c) * (dz[0] - dc) + z[1] * dz[1] + z[2] * dz[2]) / r;
}

std::vector<double> grid(double t1, int n) {
    std::vector<double> t(n + 1);
    for (int k = 0; k <= n; ++k) t[k] = t1 * k / n;
    return t;
}

std::string csv_of(const Report& r) {
    std::ostringstream os;
    write_csv(r, os);
    return os.str();
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

} // namespace

int main() {
    const ModelParams defaults;
    const ModelParams p2 = defaults.with_gamma(0.2); // γ/J = 2 at J = 0.1

    criterion(1, "analytic minimum time", [](Line& l) {
        const auto t0 = Clock::now();
        const auto lossless = t_min_uncorrelated(0.1, 0.0);
        const auto damped = t_min_uncorrelated(0.1, 0.2);
        const double elapsed = seconds_since(t0);
        const double oracle = t_min_quadrature(0.1, 0.2);
        l.detail << " T(0.1,0)=" << *lossless << " T(0.1,0.2)=" << *damped << " quadrature=" << oracle
                 << " elapsed=" << elapsed << "s";
        l.require(std::abs(*lossless - kPi / 0.2) < kTol1Lossless, "lossless vs pi/(2J)");
        l.require(std::abs(*damped - oracle) < kTol1Damped, "damped vs quadrature");
        l.require(elapsed < kBudget1, "runtime");
    });

    criterion(2, "numeric vs closed form without correlations", [&](Line& l) {
        const auto t0 = Clock::now();
        double worst = 0.0;
        for (double ratio : {0.5, 1.0, 2.0, 3.0, 3.5}) {
            const double g = 0.1 * ratio;
            const PurificationRun run = t_min_numeric(defaults.with_gamma(g), 0.0);
            if (!run.t_min) {
                l.require(false, "ratio " + std::to_string(ratio) + " unresolved");
                continue;
            }
            const double closed = *t_min_uncorrelated(0.1, g);
            worst = std::max(worst, std::abs(*run.t_min - closed) / closed);
        }
        const double elapsed = seconds_since(t0);
        l.detail << " max_rel_err=" << worst << " elapsed=" << elapsed << "s";
        l.require(worst < kTol2, "relative error");
        l.require(elapsed < kBudget2, "runtime");
    });

    criterion(3, "divergence at criticality", [&](Line& l) {
        const auto t0 = Clock::now();
        for (double ratio : {4.0, 4.5, 8.0}) l.require(!t_min_uncorrelated(0.1, 0.1 * ratio), "flag at ratio " + std::to_string(ratio));
        const ModelParams p = defaults.with_gamma(0.399);
        const PurificationRun run = t_min_numeric(p, 0.0);
        // Not reaching the pole within the horizon already proves T_min > horizon.
        const double lower = run.t_min ? *run.t_min : run.horizon;
        l.detail << " ratio=3.99 stop=" << to_string(run.stop) << " T_min/T0>=" << lower / p.T0();
        l.require(lower > 10 * p.T0(), "T_min > 10 T0");
        AnalysisOptions wide;
        wide.horizon_multiple = 60.0;
        const PurificationRun far = t_min_numeric(p, 0.0, wide);
        l.require(far.t_min.has_value(), "resolved within 60 T0");
        if (far.t_min) {
            l.detail << " resolved T_min/T0=" << *far.t_min / p.T0();
            l.require(*far.t_min > 10 * p.T0(), "resolved T_min > 10 T0");
        }
        const double elapsed = seconds_since(t0);
        l.detail << " elapsed=" << elapsed << "s";
        l.require(elapsed < kBudget3, "runtime");
    });

    criterion(4, "full vs reduced oracle equivalence", [&](Line& l) {
        const auto t0 = Clock::now();
        const double xm = xi_max(defaults);
        const DensityState x0 = build_initial_state({0.5 * mu_max(xm, defaults), 0.0, xm}, defaults);
        PropagationOptions po;
        po.tol.abs_tol = 1e-10;
        po.tol.rel_tol = 1e-10;
        po.sample_times = grid(2 * defaults.T0(), 400);
        const auto full = propagate_full(x0, ControlLaw::resonant(), defaults, 0.0, 2 * defaults.T0(), po);
        const auto red = propagate_reduced(x_to_z(x0), ControlLaw::resonant(), defaults, 0.0, 2 * defaults.T0(), po);
        double worst = 0.0;
        l.require(full.states.size() == red.states.size(), "sample count");
        for (std::size_t k = 0; k < std::min(full.states.size(), red.states.size()); ++k) {
            const ZVector a = x_to_z(full.states[k]);
            for (std::size_t i = 0; i < 8; ++i) worst = std::max(worst, std::abs(a[i] - red.states[k][i]));
        }
        const double elapsed = seconds_since(t0);
        l.detail << " max_abs_diff=" << worst << " elapsed=" << elapsed << "s";
        l.require(worst < kTol4, "difference");
        l.require(elapsed < kBudget4, "runtime");
    });

    criterion(5, "conservation suite", [&](Line& l) {
        double drift = 0.0;
        double eig = HUGE_VAL;
        double rdot = -HUGE_VAL;
        const auto states = random_physical(defaults, 10, 7);
        for (const auto& s : states) {
            const DensityState x0 = build_initial_state(s, defaults);
            PropagationOptions po;
            po.sample_times = grid(2 * defaults.T0(), 100);
            const auto full = propagate_full(x0, ControlLaw::resonant(), defaults, 0.0, 2 * defaults.T0(), po);
            for (const auto& x : full.states) {
                DensityState d;
                d.x = x;
                drift = std::max(drift, std::abs(d.trace() - 1.0));
                eig = std::min(eig, min_eigenvalue(d));
            }
            // accepted steps, with the field evaluated at each
            const auto red = propagate_reduced(initial_z(s, defaults), ControlLaw::resonant(), defaults, 0.0,
                                               2 * defaults.T0());
            for (std::size_t k = 0; k < red.states.size(); ++k) {
                rdot = std::max(rdot, radius_rate(red.states[k], red.derivatives[k]));
            }
        }
        double height = 0.0;
        for (double g : {0.1, 0.2, 0.3}) {
            const ModelParams p = defaults.with_gamma(g);
            const auto tr = propagate_reduced(initial_z({0.2, 0.05, 0.0}, p), ControlLaw::resonant(), p, 0.0,
                                              2 * p.T0());
            for (const auto& z : tr.states) height = std::max(height, std::abs(z_to_spherical(z).Z() - p.eta()));
        }
        l.detail << " trace_drift=" << drift << " min_eig=" << eig << " max|Z-eta|=" << height
                 << " max_rdot=" << rdot;
        l.require(drift < kTol5Trace, "trace");
        l.require(eig >= kTol5Eigen, "positivity");
        l.require(height < kTol5Height, "pole height");
        l.require(rdot <= kTol5Radius, "radius");
    });

    criterion(6, "TLS purity ceiling", [&](Line& l) {
        PropagationOptions po;
        po.stop_at_north_pole = true;
        const auto tr = propagate_reduced(initial_z({}, p2), ControlLaw::resonant(), p2, 0.0, 3 * p2.T0(), po);
        const auto* e = tr.find_event(event_kind::kNorthPole);
        l.require(e != nullptr, "pole event");
        if (!e) return;
        const double pur = purity_z(e->state);
        const double derived = 0.5 + 2 * p2.eta() * p2.eta();
        l.detail << " t=" << e->t << " purity=" << pur << " 1/2+2eta^2=" << derived;
        l.require(std::abs(pur - 0.909646) < kTol6, "vs 0.909646");
        l.require(std::abs(pur - derived) < kTol6, "vs 1/2+2eta^2");
    });

    criterion(7, "correlation speed-up", [&](Line& l) {
        const double xm = xi_max(p2);
        const auto base = t_min_numeric(p2, 0.0).t_min;
        const auto best = t_min_numeric(p2, xm).t_min;
        l.require(base && best, "resolved");
        if (!base || !best) return;
        l.require(*best < *base, "T(xi_max) < T(0)");
        double prev = *base;
        bool monotone = true;
        for (int k = 1; k <= 9; ++k) {
            const auto t = t_min_numeric(p2, xm * k / 9.0).t_min;
            if (!t || *t > prev) monotone = false;
            if (t) prev = *t;
        }
        l.detail << " T(0)=" << *base << " T(xi_max)=" << *best;
        l.require(monotone, "monotone over 10 points");
    });

    criterion(8, "S2 closed form", [&](Line& l) {
        double worst = 0.0;
        const double T0 = kPi / 0.2;
        for (double g : {0.0, 0.2, 0.5}) {
            using S = ode::State<4>;
            ode::Tolerances tol;
            tol.abs_tol = 1e-12;
            tol.rel_tol = 1e-12;
            ode::DormandPrince<4> solver([=](double, const S& z) { return s2_rhs(z, CouplingTerms{0.1, 0, 0}, g); }, tol);
            const auto sol = solver.integrate(0.0, S{0.3, 0, 0, 0}, 3 * T0);
            for (int k = 0; k <= 600; ++k) {
                const double t = 3 * T0 * k / 600.0;
                worst = std::max(worst, std::abs(sol.at(t)[0] - s2_resonant_solution(t, 0.3, 0.1, g)));
            }
        }
        const double tmin = *t_min_uncorrelated(0.1, 0.2);
        PropagationOptions po;
        po.tol.abs_tol = 1e-12;
        po.tol.rel_tol = 1e-12;
        po.sample_times = {0.0, tmin};
        const auto tr = propagate_reduced(initial_z({0.3, 0.0, 0.0}, p2), ControlLaw::resonant(), p2, 0.0, tmin, po);
        const double z5 = tr.states.back()[4];
        l.detail << " max_err=" << worst << " z5(T_min)=" << z5;
        l.require(worst < kTol8, "closed form");
        l.require(std::abs(z5) < kTol8, "z5 vanishes");
    });

    criterion(9, "purity gain from coherences", [&](Line& l) {
        const auto zero = delta_p(defaults, 0.0, mu_max(0.0, defaults));
        const double xi = 0.5 * xi_max(defaults);
        const double top = mu_max(xi, defaults);
        const auto half = delta_p(defaults, xi, top);
        l.require(zero && half, "resolved");
        if (!zero || !half) return;
        double prev = -HUGE_VAL;
        bool increasing = true;
        for (int k = 0; k < 5; ++k) {
            const auto d = delta_p(defaults, xi, top * k / 4.0);
            if (!d || !(*d > prev)) increasing = false;
            if (d) prev = *d;
        }
        l.detail << " dP(0,mu_max)=" << *zero << " dP(xi_max/2,mu_max)=" << *half;
        l.require(std::abs(*zero) < kTol9, "no gain without correlations");
        l.require(*half > 0.0, "gain with correlations");
        l.require(increasing, "increasing in mu_q");
    });

    criterion(10, "region map", [&](Line& l) {
        const auto t0 = Clock::now();
        const Report r = cmd_region_map(RunConfig{});
        const double elapsed = seconds_since(t0);
        std::map<std::string, int> count;
        const std::size_t nx = 50;
        l.require(r.rows.size() == nx * 50, "50x50 grid");
        const double dxi = 0.06 / (nx - 1);
        int boundary_rows = 0;
        int boundary_misses = 0;
        for (std::size_t j = 0; j * nx < r.rows.size(); ++j) {
            std::string prev = "A";
            for (std::size_t i = 0; i < nx; ++i) {
                const auto& row = r.rows[j * nx + i];
                const std::string g = cell_text(row[2]);
                ++count[g];
                if (prev == "A" && g == "B") {
                    ++boundary_rows;
                    const double xf = std::get<double>(row[5]);
                    if (std::abs(std::get<double>(row[1]) - xf) > dxi) ++boundary_misses;
                }
                prev = g;
            }
        }
        const ModelParams p = defaults.with_beta(0.1);
        const ModelParams fig = p.with_J(0.9 * p.J_min());
        const double xf = xi_fixed(fig).xi;
        const auto b = classify_region(fig, 2 * xf).region;
        const auto c = classify_region(fig, 5 * xf).region;
        l.detail << " A=" << count["A"] << " B=" << count["B"] << " C=" << count["C"] << " A|B rows=" << boundary_rows
                 << " off-by->1-cell=" << boundary_misses << " xi_fixed=" << xf << " elapsed=" << elapsed << "s";
        l.require(count["A"] > 0 && count["B"] > 0 && count["C"] > 0, "three regions");
        l.require(boundary_rows > 0 && boundary_misses == 0, "A|B boundary at xi_fixed");
        l.require(b == Region::B, "2 xi_fixed -> B");
        l.require(c == Region::C, "5 xi_fixed -> C");
        l.require(elapsed < kBudget10, "runtime");
    });

    criterion(11, "rotating-wave validity", [&](Line& l) {
        // γ = 2J keeps T_min finite at J = 0.01.
        const ModelParams p = defaults.with_J(0.01).with_gamma(0.02);
        const double tmin = *t_min_uncorrelated(p.J(), p.gamma());
        double worst = 0.0;
        for (double xi : {0.0, 0.5 * xi_max(p)}) {
            const DensityState x0 = build_initial_state({0.0, 0.0, xi}, p);
            PropagationOptions po;
            po.sample_times = grid(tmin, 1000);
            const auto lab = propagate_lab(x0, ControlLaw::resonant(), p, 0.0, tmin, po);
            const auto rwa = propagate_full(x0, ControlLaw::resonant(), p, 0.0, tmin, po);
            l.require(lab.states.size() == rwa.states.size(), "sample count");
            for (std::size_t k = 0; k < std::min(lab.states.size(), rwa.states.size()); ++k) {
                worst = std::max(worst, std::abs(qubit_purity_x(lab.states[k]) - qubit_purity_x(rwa.states[k])));
            }
        }
        l.detail << " T_min=" << tmin << " max_purity_diff=" << worst;
        l.require(worst < kTol11, "purity difference");
    });

    criterion(12, "determinism across worker counts", [&](Line& l) {
        RunConfig one;
        RunConfig many;
        many.workers = 8;
        const std::string a = csv_of(cmd_scan_gamma(one));
        const std::string b = csv_of(cmd_scan_gamma(many));
        const std::string c = csv_of(cmd_scan_gamma(many));
        l.require(a == b && b == c, "in-process");
#ifdef QPURIFY_TOOL_PATH
        namespace fs = std::filesystem;
        const fs::path dir = fs::temp_directory_path() / ("qpurify-acceptance-" + std::to_string(::getpid()));
        fs::create_directories(dir);
        auto run = [&](int workers) {
            const fs::path out = dir / ("w" + std::to_string(workers) + ".csv");
            const std::string cmd = std::string("\"") + QPURIFY_TOOL_PATH + "\" scan-gamma --workers " +
                                    std::to_string(workers) + " --out \"" + out.string() + "\"";
            l.require(std::system(cmd.c_str()) == 0, "cli exit status");
            return slurp(out);
        };
        const std::string cli1 = run(1);
        const std::string cli8 = run(8);
        l.require(!cli1.empty() && cli1 == cli8, "cli");
        l.require(cli1 == a, "cli matches in-process");
        fs::remove_all(dir);
        l.detail << " bytes=" << cli1.size() << " (in-process and cli)";
#else
        l.detail << " bytes=" << a.size() << " (in-process only)";
#endif
    });

    std::printf("%d failure(s)\n", failures);
    return failures == 0 ? 0 : 1;
}
