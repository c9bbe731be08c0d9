// commands.cpp

#include "qpurify/commands.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <random>

#include "qpurify/control.hpp"
#include "qpurify/error.hpp"
#include "qpurify/liouville.hpp"
#include "qpurify/parallel.hpp"
#include "qpurify/reduced.hpp"

namespace qpurify {

namespace {

constexpr double kPi = std::numbers::pi;

AnalysisOptions analysis_options(const RunConfig& c) {
    AnalysisOptions o;
    o.horizon_multiple = c.horizon_multiple;
    o.tol = c.tol;
    return o;
}

Report start_report(const std::string& command, const RunConfig& c) {
    Report r;
    r.command = command;
    r.config = c.echo();
    return r;
}

// Rejects sweep axes the command does not use.
void check_axes(const RunConfig& c, const std::string& command, std::initializer_list<const char*> allowed) {
    for (const auto& [name, axis] : c.axes) {
        const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return name == a; });
        if (!known) throw Error(ErrorCode::Config, command + " has no sweep axis '" + name + "'", "sweep." + name);
    }
}

SweepAxis axis_or(const RunConfig& c, const std::string& name, double start, double stop, int count,
                  bool log = false) {
    if (const auto it = c.axes.find(name); it != c.axes.end()) return it->second;
    return {name, start, stop, count, log};
}

std::vector<double> linspace(double a, double b, int n) {
    return SweepAxis{"t", a, b, n, false}.values();
}

Cell value_or(const std::optional<double>& v, const char* label) {
    if (v) return *v;
    return std::string(label);
}

Cell stat(std::size_t n) { return static_cast<long long>(n); }

Cell stop_label(const PurificationRun& run) { return std::string(to_string(run.stop)); }

std::optional<double> reached(const PurificationRun& run) {
    return run.stop == PurificationRun::Stop::Reached ? run.t_min : std::nullopt;
}

// ---------------------------------------------------------------- simulate

void add_analysis(Report& r, const RunConfig& c, const ModelParams& p, const InitialStateSpec& s) {
    const bool applicable = c.control == "resonant" && p.J() > 0.0 && s.xi.imag() == 0.0 && s.nu_q == 0.0;
    if (!applicable) {
        r.meta("analysis", std::string("skipped"));
        return;
    }
    const ControlAnalysis a = analyze(p, s.xi.real(), s.mu_q, analysis_options(c));
    r.meta("analysis.regime", std::string(to_string(a.regime)));
    r.meta("analysis.region", a.region ? Cell(std::string(to_string(*a.region))) : Cell(std::string(label::kHorizon)));
    r.meta("analysis.t_min", value_or(a.t_min, label::kDivergent));
    r.meta("analysis.theta_fixed", value_or(a.theta_fixed, label::kNone));
    r.meta("analysis.p_final", a.p_final);
    r.meta("analysis.p_max", a.p_max);
    r.meta("analysis.delta_p", value_or(a.delta_p, label::kDivergent));
}

void add_stats(Report& r, const ode::Stats& s) {
    r.meta("integrator.accepted", stat(s.accepted));
    r.meta("integrator.rejected", stat(s.rejected));
    r.meta("integrator.rhs_evals", stat(s.rhs_evals));
}

} // namespace

Report cmd_simulate(const RunConfig& c) {
    check_axes(c, "simulate", {});
    Report r = start_report("simulate", c);
    const ModelParams p = c.params();
    const InitialStateSpec spec = c.state(p);
    const ControlLaw control = c.control_law();
    const double t_end = c.t_end ? *c.t_end : (p.J() > 0.0 ? 2.0 * p.T0() : 100.0);

    PropagationOptions po;
    po.tol = c.tol;
    po.sample_times = linspace(0.0, t_end, c.samples);

    const DensityState x0 = build_initial_state(spec, p);
    r.meta("mu_q", spec.mu_q);
    r.meta("xi_re", spec.xi.real());
    r.meta("t_end", t_end);

    if (c.system == "reduced") {
        if (c.frame == Frame::Lab) {
            throw Error(ErrorCode::Config, "the lab frame is only available for system = full", "frame");
        }
        po.detect_angular_events = true;
        const Trajectory<8> tr = propagate_reduced(x_to_z(x0), control, p, 0.0, t_end, po);
        r.columns = {"t", "z1", "z2", "z3", "z4", "z5", "z6", "z7", "z8", "purity"};
        for (std::size_t k = 0; k < tr.times.size(); ++k) {
            std::vector<Cell> row{tr.times[k]};
            for (double v : tr.states[k]) row.emplace_back(v);
            row.emplace_back(purity_z(tr.states[k]));
            r.rows.push_back(std::move(row));
        }
        for (std::size_t k = 0; k < tr.events.size(); ++k) {
            const std::string key = "event." + std::to_string(k);
            r.meta(key + ".kind", tr.events[k].kind);
            r.meta(key + ".t", tr.events[k].t);
            r.meta(key + ".purity", purity_z(tr.events[k].state));
        }
        add_stats(r, tr.stats);
    } else {
        const Trajectory<16> tr = c.frame == Frame::Lab ? propagate_lab(x0, control, p, 0.0, t_end, po)
                                                        : propagate_full(x0, control, p, 0.0, t_end, po);
        r.columns = {"t"};
        for (int i = 1; i <= 16; ++i) r.columns.push_back("x" + std::to_string(i));
        r.columns.push_back("purity");
        for (std::size_t k = 0; k < tr.times.size(); ++k) {
            std::vector<Cell> row{tr.times[k]};
            for (double v : tr.states[k]) row.emplace_back(v);
            row.emplace_back(qubit_purity_x(tr.states[k]));
            r.rows.push_back(std::move(row));
        }
        add_stats(r, tr.stats);
    }
    add_analysis(r, c, p, spec);
    return r;
}

// -------------------------------------------------------------- scan-gamma

Report cmd_scan_gamma(const RunConfig& c) {
    check_axes(c, "scan-gamma", {"gamma_over_J"});
    Report r = start_report("scan-gamma", c);
    const ModelParams base = c.params();
    if (!(base.J() > 0.0)) throw Error(ErrorCode::InvalidParameter, "scan-gamma needs J > 0", "J");
    const SweepAxis axis = axis_or(c, "gamma_over_J", 0.0, 5.0, 51);
    const std::vector<double> ratios = axis.values();
    const AnalysisOptions opts = analysis_options(c);
    const double J = base.J();
    const double T0 = base.T0();
    const double xm = xi_max(base);

    // γ = 0 time of the correlated state: the pole is reached at rate 2J from θ(0).
    const double theta0 = z_to_spherical(initial_z({0.0, 0.0, xm}, base)).theta;
    const double T0_corr = (kPi / 2.0 - theta0) / (2.0 * J);

    r.meta("axis.gamma_over_J", axis.describe());
    r.meta("T0", T0);
    r.meta("T0_correlated", T0_corr);
    r.meta("xi_max", xm);
    r.columns = {"gamma_over_J",   "gamma",
                 "regime",         "tmin_analytic_over_T0",
                 "tmin_uncorrelated_over_T0", "uncorrelated_stop",
                 "tmin_correlated_over_T0",   "tmin_correlated_over_T0_correlated",
                 "correlated_stop"};

    r.rows.resize(ratios.size());
    parallel_for(ratios.size(), c.workers, [&](std::size_t i) {
        const double g = ratios[i] * J;
        if (g < 0.0) throw Error(ErrorCode::InvalidParameter, "gamma_over_J must be >= 0", "sweep.gamma_over_J");
        const ModelParams p = base.with_gamma(g);
        const auto analytic = t_min_uncorrelated(J, g);
        const PurificationRun un = t_min_numeric(p, 0.0, opts);
        const PurificationRun co = t_min_numeric(p, xm, opts);
        auto over = [](std::optional<double> t, double unit) -> std::optional<double> {
            if (!t) return std::nullopt;
            return *t / unit;
        };
        r.rows[i] = {ratios[i],
                     g,
                     std::string(to_string(classify_regime(J, g))),
                     value_or(over(analytic, T0), label::kDivergent),
                     value_or(over(reached(un), T0), label::kDivergent),
                     stop_label(un),
                     value_or(over(reached(co), T0), label::kDivergent),
                     value_or(over(reached(co), T0_corr), label::kDivergent),
                     stop_label(co)};
    });
    return r;
}

// --------------------------------------------------------------- scan-beta

namespace {

// β at which γ(β) = κ(2N + 1) equals 4J; nullopt if never crossed.
std::optional<double> beta_threshold(const ModelParams& p) {
    const double ratio = 4.0 * p.J() / p.kappa();
    if (!(ratio > 1.0)) return std::nullopt;
    const double N = 0.5 * (ratio - 1.0);
    return std::log1p(1.0 / N) / p.omega_tls();
}

} // namespace

Report cmd_scan_beta(const RunConfig& c) {
    check_axes(c, "scan-beta", {"beta"});
    Report r = start_report("scan-beta", c);
    const ModelParams base = c.params();
    if (!(base.J() > 0.0)) throw Error(ErrorCode::InvalidParameter, "scan-beta needs J > 0", "J");
    const SweepAxis axis = axis_or(c, "beta", 0.01, 10.0, 40, true);
    const std::vector<double> betas = axis.values();
    const AnalysisOptions opts = analysis_options(c);
    const double T0 = base.T0();

    r.meta("axis.beta", axis.describe());
    r.meta("T0", T0);
    if (c.gamma) {
        r.meta("gamma_fixed", *c.gamma);
        r.meta("beta_threshold", std::string(*c.gamma >= 4.0 * base.J() ? "all" : label::kNone));
    } else {
        r.meta("beta_threshold", value_or(beta_threshold(base), label::kNone));
    }
    r.columns = {"beta",   "gamma", "regime", "xi_max", "tmin_analytic_over_T0", "tmin_uncorrelated_over_T0",
                 "uncorrelated_stop", "tmin_correlated_over_T0", "correlated_stop"};

    r.rows.resize(betas.size());
    parallel_for(betas.size(), c.workers, [&](std::size_t i) {
        ModelParams p = base.with_beta(betas[i]);
        if (c.gamma) p = p.with_gamma(*c.gamma);
        const double g = p.gamma();
        const double xm = xi_max(p);
        const auto analytic = t_min_uncorrelated(p.J(), g);
        const PurificationRun un = t_min_numeric(p, 0.0, opts);
        const PurificationRun co = t_min_numeric(p, xm, opts);
        auto over = [T0](std::optional<double> t) -> std::optional<double> {
            if (!t) return std::nullopt;
            return *t / T0;
        };
        r.rows[i] = {betas[i],
                     g,
                     std::string(to_string(classify_regime(p.J(), g))),
                     xm,
                     value_or(over(analytic), label::kDivergent),
                     value_or(over(reached(un)), label::kDivergent),
                     stop_label(un),
                     value_or(over(reached(co)), label::kDivergent),
                     stop_label(co)};
    });
    return r;
}

// -------------------------------------------------------------- region-map

Report cmd_region_map(const RunConfig& c) {
    check_axes(c, "region-map", {"xi", "J"});
    Report r = start_report("region-map", c);
    ModelParams base = c.params();
    if (!c.has("beta")) {
        base = base.with_beta(0.1);
        if (c.gamma) base = base.with_gamma(*c.gamma);
    }
    const SweepAxis xi_axis = axis_or(c, "xi", 0.0, 0.06, 50);
    const SweepAxis J_axis = axis_or(c, "J", 0.04, 0.1, 50);
    const std::vector<double> xis = xi_axis.values();
    const std::vector<double> Js = J_axis.values();
    const AnalysisOptions opts = analysis_options(c);
    const double xm = xi_max(base);

    r.meta("axis.xi", xi_axis.describe());
    r.meta("axis.J", J_axis.describe());
    r.meta("beta", base.beta());
    r.meta("gamma", base.gamma());
    r.meta("J_min", base.J_min());
    r.meta("xi_max", xm);
    r.columns = {"J", "xi", "region", "t_event", "theta_fixed", "xi_fixed", "xi_fixed_closed_form"};

    std::vector<XiFixed> thresholds(Js.size());
    parallel_for(Js.size(), c.workers, [&](std::size_t j) {
        if (!(Js[j] > 0.0)) throw Error(ErrorCode::InvalidParameter, "J axis must be > 0", "sweep.J");
        thresholds[j] = xi_fixed(base.with_J(Js[j]));
    });

    const std::size_t n = Js.size() * xis.size();
    r.rows.resize(n);
    parallel_for(n, c.workers, [&](std::size_t k) {
        const std::size_t j = k / xis.size();
        const double xi = xis[k % xis.size()];
        const XiFixed& th = thresholds[j];
        std::vector<Cell> row{Js[j], xi};
        if (std::abs(xi) > xm) {
            row.insert(row.end(), {std::string(label::kUnphysical), std::string(label::kNone),
                                   std::string(label::kNone)});
        } else {
            const RegionResult rr = classify_region(base.with_J(Js[j]), xi, opts);
            row.emplace_back(rr.region ? std::string(to_string(*rr.region)) : std::string(label::kHorizon));
            if (rr.region && *rr.region == Region::A) row.emplace_back(std::string(label::kNone));
            else row.emplace_back(rr.t_event);
            row.push_back(value_or(rr.theta_fixed_initial, label::kNone));
        }
        row.emplace_back(th.xi);
        row.push_back(value_or(th.closed_form, label::kNone));
        r.rows[k] = std::move(row);
    });
    return r;
}

// ----------------------------------------------------------- coherence-map

Report cmd_coherence_map(const RunConfig& c) {
    check_axes(c, "coherence-map", {"xi", "mu_q"});
    Report r = start_report("coherence-map", c);
    const ModelParams p = c.params();
    const double xm = xi_max(p);
    const double mu0 = mu_max(0.0, p);
    const SweepAxis xi_axis = axis_or(c, "xi", 0.0, xm, 21);
    const SweepAxis mu_axis = axis_or(c, "mu_q", 0.0, mu0, 21);
    const std::vector<double> xis = xi_axis.values();
    const std::vector<double> mus = mu_axis.values();
    const AnalysisOptions opts = analysis_options(c);

    r.meta("axis.xi", xi_axis.describe());
    r.meta("axis.mu_q", mu_axis.describe());
    r.meta("xi_max", xm);
    r.columns = {"xi", "mu_q", "mu_max", "status", "delta_p", "p_final", "p_max", "t_min", "t_peak"};

    std::vector<double> boundary(xis.size());
    parallel_for(xis.size(), c.workers, [&](std::size_t i) {
        boundary[i] = std::abs(xis[i]) <= xm ? mu_max(xis[i], p) : -1.0;
    });

    const std::size_t n = xis.size() * mus.size();
    r.rows.resize(n);
    parallel_for(n, c.workers, [&](std::size_t k) {
        const std::size_t i = k / mus.size();
        const double xi = xis[i];
        const double mu = mus[k % mus.size()];
        std::vector<Cell> row{xi, mu};
        row.push_back(boundary[i] >= 0.0 ? Cell(boundary[i]) : Cell(std::string(label::kUnphysical)));
        const std::string dash(label::kNone);
        if (boundary[i] < 0.0 || std::abs(mu) > boundary[i]) {
            row.insert(row.end(), {std::string(label::kUnphysical), dash, dash, dash, dash, dash});
        } else if (const auto g = purity_gain(p, xi, mu, opts)) {
            row.insert(row.end(), {std::string("ok"), g->delta_p, g->p_final, g->p_max, g->t_min, g->t_peak});
        } else {
            const std::string div(label::kDivergent);
            row.insert(row.end(), {div, div, dash, dash, div, dash});
        }
        r.rows[k] = std::move(row);
    });
    return r;
}

// ------------------------------------------------------------ purity-trace

Report cmd_purity_trace(const RunConfig& c) {
    check_axes(c, "purity-trace", {});
    Report r = start_report("purity-trace", c);
    const ModelParams p = c.params();
    if (!(p.J() > 0.0)) throw Error(ErrorCode::InvalidParameter, "purity-trace needs J > 0", "J");
    const AnalysisOptions opts = analysis_options(c);
    const double xm = xi_max(p);
    const auto t0 = t_min_uncorrelated(p.J(), p.gamma());
    const double t_end = c.t_end ? *c.t_end : (t0 ? 2.0 * *t0 : c.horizon_multiple * p.T0());
    const std::vector<double> times = linspace(0.0, t_end, c.samples);
    const double eta = p.eta();

    struct Trace {
        double xi;
        double mu;
    };
    std::vector<Trace> traces;
    for (double xi : {0.0, 0.5 * xm}) {
        const double top = mu_max(xi, p);
        for (int k = 0; k < c.mu_points; ++k) {
            traces.push_back({xi, top * static_cast<double>(k) / static_cast<double>(c.mu_points - 1)});
        }
    }

    std::vector<std::vector<double>> purity(traces.size());
    std::vector<std::optional<PurityGain>> gains(traces.size());
    parallel_for(traces.size(), c.workers, [&](std::size_t i) {
        PropagationOptions po;
        po.tol = c.tol;
        po.sample_times = times;
        const ZVector z0 = initial_z({traces[i].mu, 0.0, traces[i].xi}, p);
        const Trajectory<8> tr = propagate_reduced(z0, ControlLaw::resonant(), p, 0.0, t_end, po);
        for (const auto& z : tr.states) purity[i].push_back(purity_z(z));
        gains[i] = purity_gain(p, traces[i].xi, traces[i].mu, opts);
    });

    r.meta("t_end", t_end);
    r.meta("P_tls0", 0.5 + 2.0 * eta * eta);
    for (std::size_t i = 0; i < traces.size(); ++i) {
        const std::string key = "trace." + std::to_string(i);
        r.meta(key + ".xi", traces[i].xi);
        r.meta(key + ".mu_q", traces[i].mu);
        if (gains[i]) {
            r.meta(key + ".P_max", gains[i]->p_max);
            r.meta(key + ".t_peak", gains[i]->t_peak);
            r.meta(key + ".t_min", gains[i]->t_min);
        } else {
            r.meta(key + ".P_max", std::string(label::kDivergent));
        }
    }
    r.columns = {"xi", "mu_q", "t", "purity"};
    for (std::size_t i = 0; i < traces.size(); ++i) {
        for (std::size_t k = 0; k < purity[i].size(); ++k) {
            r.rows.push_back({traces[i].xi, traces[i].mu, times[k], purity[i][k]});
        }
    }
    return r;
}

// ------------------------------------------------------------------ verify

namespace {

struct Property {
    std::string name;
    double residual{0.0};
    double tolerance{0.0};
    ode::Stats stats{};
    bool pass() const { return std::isfinite(residual) && residual <= tolerance; }
};

void add(ode::Stats& a, const ode::Stats& b) {
    a.accepted += b.accepted;
    a.rejected += b.rejected;
    a.rhs_evals += b.rhs_evals;
}

// Full 16-coordinate field with an optional deliberate defect.
XVector full_rhs(const XVector& x, const CouplingTerms& k, const ModelParams& p, const std::string& fault) {
    XVector f = lindblad_rhs_x(x, k, p);
    if (fault == "gamma2-sign") {
        // excitation feeding rows 13 and 14 with the wrong sign
        f[12] -= 2.0 * p.gamma2() * x[6];
        f[13] -= 2.0 * p.gamma2() * x[7];
    } else if (fault == "alpha-sign") {
        const XVector with = lindblad_rhs_x(x, CouplingTerms{0.0, 0.0, 1.0}, p);
        const XVector without = lindblad_rhs_x(x, CouplingTerms{}, p);
        for (std::size_t i = 0; i < 16; ++i) f[i] -= 2.0 * k.alpha * (with[i] - without[i]);
    }
    return f;
}

XVector full_rhs(const XVector& x, double t, const ControlLaw& control, const ModelParams& p,
                 const std::string& fault) {
    const double azimuth = control.state_dependent() ? s1_azimuth_x(x) : 0.0;
    return full_rhs(x, control.coupling(t, p, azimuth), p, fault);
}

Trajectory<16> run_full(const DensityState& x0, const ControlLaw& control, const ModelParams& p, double t1,
                        const ode::Tolerances& tol, const std::vector<double>& samples, const std::string& fault) {
    ode::DormandPrince<16> solver(
        [&](double t, const XVector& x) { return full_rhs(x, t, control, p, fault); }, tol);
    return detail::to_trajectory(solver.integrate(0.0, x0.x, t1), samples);
}

Property oracle(const std::string& name, const ModelParams& p, const InitialStateSpec& s, const ControlLaw& control,
                const ode::Tolerances& tol, const std::string& fault) {
    Property out{name, 0.0, 1e-8, {}};
    const double t1 = 2.0 * p.T0();
    const std::vector<double> samples = linspace(0.0, t1, 201);
    const DensityState x0 = build_initial_state(s, p);
    const Trajectory<16> full = run_full(x0, control, p, t1, tol, samples, fault);
    PropagationOptions po;
    po.tol = tol;
    po.sample_times = samples;
    const Trajectory<8> red = propagate_reduced(x_to_z(x0), control, p, 0.0, t1, po);
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const ZVector a = x_to_z(full.states[k]);
        for (std::size_t i = 0; i < 8; ++i) out.residual = std::max(out.residual, std::abs(a[i] - red.states[k][i]));
    }
    out.stats = full.stats;
    add(out.stats, red.stats);
    return out;
}

double r_dot(const ZVector& z, const ZVector& d) {
    const double w = z[0] + 0.5 * (z[3] + 1.0);
    const double w_dot = d[0] + 0.5 * d[3];
    const double r = std::sqrt(w * w + z[1] * z[1] + z[2] * z[2]);
    if (!(r > 0.0)) return 0.0;
    return (w * w_dot + z[1] * d[1] + z[2] * d[2]) / r;
}

std::vector<InitialStateSpec> random_states(const ModelParams& p, int count) {
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double xm = xi_max(p);
    std::vector<InitialStateSpec> out;
    while (static_cast<int>(out.size()) < count) {
        InitialStateSpec s;
        s.xi = std::polar(xm * u(rng), 2.0 * kPi * u(rng));
        s.mu_q = 0.4 * (u(rng) - 0.5);
        s.nu_q = 0.4 * (u(rng) - 0.5);
        try {
            (void)build_initial_state(s, p);
            out.push_back(s);
        } catch (const Error&) {
        }
    }
    return out;
}

std::vector<Property> verify_suite(const RunConfig& c) {
    const ModelParams p = c.params();
    if (!(p.J() > 0.0)) throw Error(ErrorCode::InvalidParameter, "verify needs J > 0", "J");
    const ode::Tolerances tol = c.tol;
    const std::string fault = c.inject_fault;
    const double J = p.J();
    const double T0 = p.T0();
    const double eta = p.eta();
    const double xm = xi_max(p);
    const ControlLaw resonant = ControlLaw::resonant();
    const AnalysisOptions opts = analysis_options(c);

    std::vector<std::function<Property()>> checks;

    checks.emplace_back([=] {
        return oracle("oracle_equivalence", p, {0.5 * mu_max(xm, p), 0.0, xm}, resonant, tol, fault);
    });
    checks.emplace_back([=] {
        return oracle("oracle_equivalence_coherent", p, {0.5 * mu_max(0.5 * xm, p), 0.0, 0.5 * xm}, resonant, tol,
                      fault);
    });
    checks.emplace_back([=] {
        // Chirped drive: the literal phase convention makes α nonzero.
        std::vector<double> ts = linspace(0.0, 2.0 * T0, 41);
        std::vector<double> eps;
        for (double t : ts) eps.push_back(p.omega_tls() - p.omega_q() + 0.02 * std::sin(kPi * t / T0));
        // pchip slopes kink at the nodes, so both runs need tighter steps to
        // resolve the comparison at the same threshold
        ode::Tolerances tight = tol;
        tight.abs_tol = std::min(tol.abs_tol, 1e-12);
        tight.rel_tol = std::min(tol.rel_tol, 1e-12);
        return oracle("oracle_equivalence_chirped", p, {0.1, 0.05, {0.5 * xm, 0.3 * xm}},
                      ControlLaw::tabulated_epsilon(ts, eps, PhaseConvention::Literal), tight, fault);
    });

    // Trace, positivity and purity bookkeeping along one coherent correlated run.
    auto coherent_run = [=] {
        const double xi = 0.5 * xm;
        const DensityState x0 = build_initial_state({0.5 * mu_max(xi, p), 0.0, xi}, p);
        return run_full(x0, resonant, p, 2.0 * T0, tol, {}, fault);
    };
    checks.emplace_back([=] {
        const Trajectory<16> tr = coherent_run();
        Property out{"trace_drift", 0.0, 1e-9, tr.stats};
        for (const auto& x : tr.states) out.residual = std::max(out.residual, std::abs(x[0] + x[1] + x[2] + x[3] - 1.0));
        return out;
    });
    checks.emplace_back([=] {
        const Trajectory<16> tr = coherent_run();
        Property out{"positivity", 0.0, 1e-8, tr.stats};
        for (const auto& x : tr.states) out.residual = std::max(out.residual, -min_eigenvalue(DensityState{x}));
        return out;
    });
    checks.emplace_back([=] {
        const Trajectory<16> tr = coherent_run();
        Property out{"purity_consistency", 0.0, 1e-12, tr.stats};
        for (const auto& x : tr.states) {
            const DensityState s{x};
            const Eigen::Matrix2cd q = partial_trace_qubit(s);
            const double direct = (q * q).trace().real();
            out.residual = std::max(out.residual, std::abs(direct - purity_z(x_to_z(x))));
        }
        return out;
    });

    checks.emplace_back([=] {
        PropagationOptions po;
        po.tol = tol;
        const Trajectory<8> tr = propagate_reduced(initial_z({0.0, 0.0, 0.0}, p), resonant, p, 0.0, 2.0 * T0, po);
        Property out{"pole_height_constant", 0.0, 1e-9, tr.stats};
        for (const auto& z : tr.states) out.residual = std::max(out.residual, std::abs(z_to_spherical(z).Z() - eta));
        return out;
    });

    // ṙ ≤ 0 and Ż ≤ 0 at every accepted step for seeded random states.
    auto random_runs = [=](bool radius) {
        Property out{radius ? "radius_nonincreasing" : "pole_height_nonincreasing", 0.0, 1e-10, {}};
        for (const auto& s : random_states(p, 10)) {
            const ZVector z0 = x_to_z(build_initial_state(s, p));
            PropagationOptions po;
            po.tol = tol;
            const Trajectory<8> tr = propagate_reduced(z0, resonant, p, 0.0, 2.0 * T0, po);
            add(out.stats, tr.stats);
            for (std::size_t k = 0; k < tr.states.size(); ++k) {
                const ZVector& z = tr.states[k];
                const ZVector& d = tr.derivatives[k];
                const double rate = radius ? r_dot(z, d) : r_dot(z, d) - 0.5 * d[3];
                out.residual = std::max(out.residual, rate);
            }
        }
        return out;
    };
    checks.emplace_back([=] { return random_runs(true); });
    checks.emplace_back([=] { return random_runs(false); });

    checks.emplace_back([=] {
        Property out{"s2_closed_form", 0.0, 1e-8, {}};
        for (double g : {0.0, 2.0 * J, 5.0 * J}) {
            const double mu = 0.3;
            using S = ode::State<4>;
            ode::DormandPrince<4> solver(
                [g, J](double, const S& z) { return s2_rhs(z, CouplingTerms{J, 0.0, 0.0}, g); }, tol);
            const auto sol = solver.integrate(0.0, S{mu, 0.0, 0.0, 0.0}, 3.0 * T0);
            add(out.stats, sol.stats);
            for (double t : linspace(0.0, 3.0 * T0, 301)) {
                out.residual = std::max(out.residual, std::abs(sol.at(t)[0] - s2_resonant_solution(t, mu, J, g)));
            }
        }
        return out;
    });

    checks.emplace_back([=] {
        Property out{"t_min_analytic", 0.0, 1e-6, {}};
        for (double ratio : {0.5, 1.0, 2.0, 3.0, 3.5}) {
            const PurificationRun run = t_min_numeric(p.with_gamma(ratio * J), 0.0, opts);
            add(out.stats, run.stats);
            const double exact = *t_min_uncorrelated(J, ratio * J);
            const double rel = run.t_min ? std::abs(*run.t_min - exact) / exact : HUGE_VAL;
            out.residual = std::max(out.residual, rel);
        }
        return out;
    });

    checks.emplace_back([=] {
        const ModelParams q = p.with_gamma(2.0 * J);
        PropagationOptions po;
        po.tol = tol;
        po.stop_at_north_pole = true;
        const ZVector z0 = initial_z({mu_max(0.0, q), 0.0, 0.0}, q);
        const Trajectory<8> tr = propagate_reduced(z0, resonant, q, 0.0, c.horizon_multiple * T0, po);
        Property out{"tls_purity_ceiling", HUGE_VAL, 1e-5, tr.stats};
        if (const auto* e = tr.find_event(event_kind::kNorthPole)) {
            out.residual = std::abs(purity_z(e->state) - (0.5 + 2.0 * eta * eta));
        }
        return out;
    });

    checks.emplace_back([=] {
        const ModelParams q = p.with_gamma(2.0 * J);
        const double mu = mu_max(0.0, q);
        const double t = *t_min_uncorrelated(J, q.gamma());
        return Property{"s2_vanishes_at_t_min", std::abs(s2_resonant_solution(t, mu, J, q.gamma())), 1e-8, {}};
    });

    checks.emplace_back([=] {
        const ModelParams q = p.with_J(0.0).with_kappa(0.0);
        const DensityState x0 = build_initial_state({0.1, 0.05, {0.5 * xm, 0.2 * xm}}, q);
        const Trajectory<16> tr = run_full(x0, resonant, q, 2.0 * T0, tol, {}, fault);
        Property out{"decoupled_constant", 0.0, 1e-12, tr.stats};
        for (const auto& x : tr.states) {
            for (std::size_t i = 0; i < 16; ++i) out.residual = std::max(out.residual, std::abs(x[i] - x0.x[i]));
        }
        return out;
    });

    checks.emplace_back([=] {
        // Thermal product state is stationary without coupling, and the rates obey detailed balance.
        const ModelParams q = p.with_J(0.0);
        const DensityState x0 = build_initial_state({}, q);
        const XVector f = full_rhs(x0.x, 0.0, resonant, q, fault);
        double res = std::abs(q.gamma2() / q.gamma1() - std::exp(-q.beta() * q.omega_tls()));
        for (double v : f) res = std::max(res, std::abs(v));
        return Property{"detailed_balance", res, 1e-14, {}};
    });

    checks.emplace_back([=] {
        // The 8 z coordinates are closed under the full field for arbitrary x and couplings.
        std::mt19937_64 rng(7);
        std::normal_distribution<double> n(0.0, 1.0);
        Property out{"reduced_closure", 0.0, 1e-13, {}};
        for (int trial = 0; trial < 20; ++trial) {
            XVector x;
            for (double& v : x) v = n(rng);
            x[3] = 1.0 - x[0] - x[1] - x[2]; // the z map assumes unit trace
            const CouplingTerms k{n(rng) * J, n(rng) * J, n(rng) * J};
            const XVector f = full_rhs(x, k, p, fault);
            // x_to_z is affine; its linear part maps derivatives
            ZVector lhs = x_to_z(f);
            const ZVector offset = x_to_z(XVector{});
            for (std::size_t i = 0; i < 8; ++i) lhs[i] -= offset[i];
            const ZVector rhs = reduced_rhs(x_to_z(x), k, p);
            for (std::size_t i = 0; i < 8; ++i) out.residual = std::max(out.residual, std::abs(lhs[i] - rhs[i]));
        }
        return out;
    });

    std::vector<Property> results(checks.size());
    parallel_for(checks.size(), c.workers, [&](std::size_t i) { results[i] = checks[i](); });
    return results;
}

} // namespace

Report cmd_verify(const RunConfig& c) {
    check_axes(c, "verify", {});
    Report r = start_report("verify", c);
    const std::vector<Property> props = verify_suite(c);
    r.columns = {"property", "residual", "tolerance", "pass", "accepted", "rejected", "rhs_evals"};
    int failures = 0;
    for (const auto& pr : props) {
        const bool ok = pr.pass();
        failures += ok ? 0 : 1;
        r.rows.push_back({pr.name, std::isfinite(pr.residual) ? Cell(pr.residual) : Cell(std::string("not-reached")),
                          pr.tolerance, std::string(ok ? "true" : "false"), stat(pr.stats.accepted),
                          stat(pr.stats.rejected), stat(pr.stats.rhs_evals)});
    }
    r.meta("properties", static_cast<long long>(props.size()));
    r.meta("failures", static_cast<long long>(failures));
    r.exit_code = failures > 0 ? 1 : 0;
    return r;
}

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"simulate",      "scan-gamma",   "scan-beta", "region-map",
                                                "coherence-map", "purity-trace", "verify"};
    return names;
}

const std::vector<std::string>& fault_names() {
    static const std::vector<std::string> names{"gamma2-sign", "alpha-sign"};
    return names;
}

Report run_command(const std::string& name, const RunConfig& c) {
    if (!c.inject_fault.empty() &&
        std::find(fault_names().begin(), fault_names().end(), c.inject_fault) == fault_names().end()) {
        throw Error(ErrorCode::Config, "unknown fault '" + c.inject_fault + "'", "inject_fault");
    }
    if (name == "simulate") return cmd_simulate(c);
    if (name == "scan-gamma") return cmd_scan_gamma(c);
    if (name == "scan-beta") return cmd_scan_beta(c);
    if (name == "region-map") return cmd_region_map(c);
    if (name == "coherence-map") return cmd_coherence_map(c);
    if (name == "purity-trace") return cmd_purity_trace(c);
    if (name == "verify") return cmd_verify(c);
    throw Error(ErrorCode::Config, "unknown command '" + name + "'", "command");
}

} // namespace qpurify
