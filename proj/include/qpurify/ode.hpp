// ode.hpp: Adaptive Dormand–Prince 5(4) integrator with dense output and events
//
// Header-only: the state dimension is a template parameter so that the 16-,
// 8- and 4-coordinate systems (and test-side augmented systems) share one
// implementation without heap traffic in the inner loop.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "qpurify/error.hpp"

namespace qpurify::ode {

template <std::size_t N>
using State = std::array<double, N>;

struct Tolerances {
    double abs_tol{1e-10};
    double rel_tol{1e-10};
    double max_step{std::numeric_limits<double>::infinity()};
    double initial_step{0.0}; // 0 selects automatically
    std::size_t max_steps{20'000'000};
};

struct Stats {
    std::size_t accepted{0};
    std::size_t rejected{0};
    std::size_t rhs_evals{0};
};

template <std::size_t N>
struct EventSpec {
    std::string kind;
    // Root function; an event fires when g changes sign in `direction`.
    std::function<double(double, const State<N>&)> g;
    int direction{0}; // -1: + to -, +1: - to +, 0: either
    bool terminal{false};
    // Optional guard evaluated at the located root; rejected roots are ignored.
    std::function<bool(double, const State<N>&)> accept{};
};

template <std::size_t N>
struct EventHit {
    std::string kind;
    double t{0.0};
    State<N> y{};
};

/// Accepted steps of one integration plus located events.
///
/// Dense output between accepted steps is cubic Hermite on (y, y') at the
/// step ends, which keeps interpolation errors below the step tolerance for
/// the smooth, non-stiff systems integrated here.
template <std::size_t N>
struct Solution {
    std::vector<double> t;
    std::vector<State<N>> y;
    std::vector<State<N>> dy;
    std::vector<EventHit<N>> events;
    Stats stats;
    bool terminated{false}; // a terminal event ended the run before t_end

    double t_begin() const { return t.front(); }
    double t_end() const { return t.back(); }

    State<N> at(double time) const {
        if (time <= t.front()) return y.front();
        if (time >= t.back()) return y.back();
        const auto it = std::upper_bound(t.begin(), t.end(), time);
        const std::size_t k = static_cast<std::size_t>(it - t.begin()) - 1;
        return hermite(k, time);
    }

    std::vector<State<N>> sample(const std::vector<double>& times) const {
        std::vector<State<N>> out;
        out.reserve(times.size());
        for (double time : times) out.push_back(at(time));
        return out;
    }

private:
    State<N> hermite(std::size_t k, double time) const {
        const double h = t[k + 1] - t[k];
        if (h <= 0.0) return y[k + 1];
        const double s = (time - t[k]) / h;
        const double s2 = s * s;
        const double s3 = s2 * s;
        const double h00 = 2 * s3 - 3 * s2 + 1;
        const double h10 = s3 - 2 * s2 + s;
        const double h01 = -2 * s3 + 3 * s2;
        const double h11 = s3 - s2;
        State<N> out;
        for (std::size_t i = 0; i < N; ++i) {
            out[i] = h00 * y[k][i] + h10 * h * dy[k][i] + h01 * y[k + 1][i] + h11 * h * dy[k + 1][i];
        }
        return out;
    }
};

template <std::size_t N>
class DormandPrince {
public:
    using Rhs = std::function<State<N>(double, const State<N>&)>;

    explicit DormandPrince(Rhs rhs, Tolerances tol = {}) : rhs_(std::move(rhs)), tol_(tol) {}

    Solution<N> integrate(double t0, const State<N>& y0, double t1,
                          const std::vector<EventSpec<N>>& events = {}) {
        if (!(t1 >= t0)) {
            throw Error(ErrorCode::InvalidParameter, "integration interval must satisfy t1 >= t0", "t_span");
        }
        Solution<N> sol;
        sol.t.push_back(t0);
        sol.y.push_back(y0);
        State<N> f0 = eval(t0, y0, sol.stats);
        sol.dy.push_back(f0);
        if (t1 == t0) return sol;

        std::vector<double> g_prev(events.size());
        for (std::size_t e = 0; e < events.size(); ++e) g_prev[e] = events[e].g(t0, y0);

        double t = t0;
        State<N> y = y0;
        double h = initial_step(t0, y0, f0, t1 - t0, sol.stats);
        const double span = t1 - t0;

        while (t < t1) {
            if (sol.stats.accepted + sol.stats.rejected >= tol_.max_steps) {
                throw Error(ErrorCode::StepSizeUnderflow,
                            "maximum number of steps exceeded at t = " + std::to_string(t), "tolerances");
            }
            h = std::min({h, tol_.max_step, t1 - t});
            const double h_min = 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), span);
            if (h < h_min) {
                throw Error(ErrorCode::StepSizeUnderflow,
                            "step size underflow at t = " + std::to_string(t), "tolerances");
            }

            State<N> y_new;
            State<N> f_new;
            const double err = step(t, y, f0, h, y_new, f_new, sol.stats);

            if (err <= 1.0) {
                const double t_new = (t1 - (t + h) < h_min) ? t1 : t + h;
                sol.stats.accepted++;
                sol.t.push_back(t_new);
                sol.y.push_back(y_new);
                sol.dy.push_back(f_new);

                if (!events.empty() && locate_events(events, g_prev, sol)) {
                    sol.terminated = true;
                    return sol;
                }
                t = t_new;
                y = y_new;
                f0 = f_new;
                const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
                h *= factor;
            } else {
                sol.stats.rejected++;
                h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
            }
        }
        return sol;
    }

    // Single Dormand–Prince step from (t, y) of length h; used to evaluate
    // the state at located event times to integrator accuracy.
    State<N> advance(double t, const State<N>& y, double h, Stats& stats) const {
        if (h == 0.0) return y;
        State<N> y_new;
        State<N> f_new;
        step(t, y, eval(t, y, stats), h, y_new, f_new, stats);
        return y_new;
    }

    const Tolerances& tolerances() const noexcept { return tol_; }

private:
    Rhs rhs_;
    Tolerances tol_;

    State<N> eval(double t, const State<N>& y, Stats& stats) const {
        stats.rhs_evals++;
        return rhs_(t, y);
    }

    double initial_step(double t0, const State<N>& y0, const State<N>& f0, double span, Stats& stats) const {
        if (tol_.initial_step > 0.0) return tol_.initial_step;
        double d0 = 0.0;
        double d1 = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double sc = tol_.abs_tol + tol_.rel_tol * std::abs(y0[i]);
            d0 = std::max(d0, std::abs(y0[i]) / sc);
            d1 = std::max(d1, std::abs(f0[i]) / sc);
        }
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h0 = std::min(h0, span);
        State<N> y1;
        for (std::size_t i = 0; i < N; ++i) y1[i] = y0[i] + h0 * f0[i];
        const State<N> f1 = eval(t0 + h0, y1, stats);
        double d2 = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double sc = tol_.abs_tol + tol_.rel_tol * std::abs(y0[i]);
            d2 = std::max(d2, std::abs(f1[i] - f0[i]) / sc);
        }
        d2 /= h0;
        const double h1 = (std::max(d1, d2) <= 1e-15) ? std::max(1e-6, h0 * 1e-3)
                                                       : std::pow(0.01 / std::max(d1, d2), 0.2);
        return std::min({100.0 * h0, h1, span});
    }

    double step(double t, const State<N>& y, const State<N>& k1, double h, State<N>& y_new,
                State<N>& k7, Stats& stats) const {
        // Dormand–Prince 5(4) tableau
        constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
        constexpr double a21 = 1.0 / 5;
        constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                         a54 = -212.0 / 729;
        constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                         a65 = -5103.0 / 18656;
        constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                         b6 = 11.0 / 84;
        constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                         e6 = 22.0 / 525, e7 = -1.0 / 40;

        State<N> tmp;
        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * a21 * k1[i];
        const State<N> k2 = eval(t + c2 * h, tmp, stats);
        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        const State<N> k3 = eval(t + c3 * h, tmp, stats);
        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        const State<N> k4 = eval(t + c4 * h, tmp, stats);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        const State<N> k5 = eval(t + c5 * h, tmp, stats);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        const State<N> k6 = eval(t + h, tmp, stats);
        for (std::size_t i = 0; i < N; ++i)
            y_new[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        k7 = eval(t + h, y_new, stats);

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double e =
                h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double sc = tol_.abs_tol + tol_.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
            err = std::max(err, std::abs(e) / sc);
        }
        if (!std::isfinite(err)) err = 1e10;
        return err;
    }

    static bool crossed(double g0, double g1, int direction) {
        if (direction < 0) return g0 > 0.0 && g1 <= 0.0;
        if (direction > 0) return g0 < 0.0 && g1 >= 0.0;
        return (g0 > 0.0 && g1 <= 0.0) || (g0 < 0.0 && g1 >= 0.0);
    }

    // Checks the last accepted step for sign changes. Returns true when a
    // terminal event fired; the solution is then truncated at the event.
    bool locate_events(const std::vector<EventSpec<N>>& events, std::vector<double>& g_prev, Solution<N>& sol) {
        const std::size_t k = sol.t.size() - 2;
        const double ta = sol.t[k];
        const double tb = sol.t[k + 1];
        const State<N> ya = sol.y[k];

        struct Found {
            std::size_t index;
            double t;
            State<N> y;
        };
        std::vector<Found> found;
        for (std::size_t e = 0; e < events.size(); ++e) {
            const double gb = events[e].g(tb, sol.y[k + 1]);
            const double ga = g_prev[e];
            g_prev[e] = gb;
            if (!crossed(ga, gb, events[e].direction)) continue;

            // bisection on the exact single-step propagator from ta
            double lo = ta;
            double hi = tb;
            double glo = ga;
            while (hi - lo > 1e-10 * std::max(1.0, std::abs(hi))) {
                const double mid = 0.5 * (lo + hi);
                const double gm = events[e].g(mid, advance(ta, ya, mid - ta, sol.stats));
                if (crossed(glo, gm, events[e].direction)) {
                    hi = mid;
                } else {
                    lo = mid;
                    glo = gm;
                }
            }
            const State<N> y_hit = advance(ta, ya, hi - ta, sol.stats);
            if (events[e].accept && !events[e].accept(hi, y_hit)) continue;
            found.push_back({e, hi, y_hit});
        }
        std::sort(found.begin(), found.end(), [](const Found& a, const Found& b) { return a.t < b.t; });

        for (const Found& f : found) {
            sol.events.push_back({events[f.index].kind, f.t, f.y});
            if (events[f.index].terminal) {
                // replace the overshooting step end by the event point
                sol.t.back() = f.t;
                sol.y.back() = f.y;
                sol.dy.back() = eval(f.t, f.y, sol.stats);
                if (sol.t.back() <= sol.t[sol.t.size() - 2]) {
                    sol.t.pop_back();
                    sol.y.pop_back();
                    sol.dy.pop_back();
                }
                return true;
            }
        }
        return false;
    }
};

} // namespace qpurify::ode
