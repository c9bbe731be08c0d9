// control_law.cpp

#include "qpurify/control_law.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

// pchip.hpp in Boost 1.74 calls isnan unqualified inside boost::math.
#include <boost/math/special_functions/fpclassify.hpp>
#include <boost/math/interpolators/pchip.hpp>

#include "qpurify/error.hpp"

namespace qpurify {

struct ControlLaw::Table {
    using Pchip = boost::math::interpolators::pchip<std::vector<double>>;

    std::vector<double> t;
    std::vector<double> v;
    std::vector<double> slope;
    std::vector<double> cumulative; // ∫_{t0}^{t_k} of the interpolant
    std::unique_ptr<Pchip> spline;

    Table(std::vector<double> times, std::vector<double> values) : t(times), v(values) {
        if (times.size() != values.size()) {
            throw Error(ErrorCode::InvalidParameter, "control table columns differ in length", "control");
        }
        if (times.size() < 4) {
            throw Error(ErrorCode::InvalidParameter, "control table needs at least 4 samples", "control");
        }
        for (std::size_t k = 0; k < times.size(); ++k) {
            if (!std::isfinite(times[k]) || !std::isfinite(values[k])) {
                throw Error(ErrorCode::InvalidParameter, "control table contains non-finite values", "control");
            }
            if (k > 0 && !(times[k] > times[k - 1])) {
                throw Error(ErrorCode::InvalidParameter, "control table times must be strictly increasing",
                            "control");
            }
        }
        spline = std::make_unique<Pchip>(std::move(times), std::move(values));
        slope.resize(t.size());
        for (std::size_t k = 0; k < t.size(); ++k) slope[k] = spline->prime(t[k]);
        cumulative.assign(t.size(), 0.0);
        for (std::size_t k = 1; k < t.size(); ++k) {
            cumulative[k] = cumulative[k - 1] + segment_integral(k - 1, 1.0);
        }
    }

    double value(double x) const {
        if (x <= t.front()) return v.front();
        if (x >= t.back()) return v.back();
        return (*spline)(x);
    }

    double rate(double x) const {
        if (x <= t.front() || x >= t.back()) return 0.0;
        return spline->prime(x);
    }

    // Antiderivative with constant extension outside the table.
    double antiderivative(double x) const {
        if (x <= t.front()) return v.front() * (x - t.front());
        if (x >= t.back()) return cumulative.back() + v.back() * (x - t.back());
        const auto it = std::upper_bound(t.begin(), t.end(), x);
        const std::size_t k = static_cast<std::size_t>(it - t.begin()) - 1;
        const double s = (x - t[k]) / (t[k + 1] - t[k]);
        return cumulative[k] + segment_integral(k, s);
    }

private:
    // ∫ of the Hermite cubic on segment k from its start to fraction s.
    double segment_integral(std::size_t k, double s) const {
        const double h = t[k + 1] - t[k];
        const double s2 = s * s, s3 = s2 * s, s4 = s3 * s;
        return h * (v[k] * (s - s3 + 0.5 * s4) + h * slope[k] * (0.5 * s2 - 2.0 * s3 / 3.0 + 0.25 * s4) +
                    v[k + 1] * (s3 - 0.5 * s4) + h * slope[k + 1] * (0.25 * s4 - s3 / 3.0));
    }
};

ControlLaw ControlLaw::resonant() { return ControlLaw{}; }

ControlLaw ControlLaw::constant_detuning(double delta0) {
    if (!std::isfinite(delta0)) throw Error(ErrorCode::InvalidParameter, "detuning must be finite", "delta0");
    ControlLaw c;
    c.kind_ = delta0 == 0.0 ? Kind::Resonant : Kind::ConstantDetuning;
    c.delta0_ = delta0;
    return c;
}

ControlLaw ControlLaw::tabulated_epsilon(std::vector<double> times, std::vector<double> epsilon,
                                         PhaseConvention convention) {
    ControlLaw c;
    c.kind_ = Kind::TabulatedEpsilon;
    c.convention_ = convention;
    c.table_ = std::make_shared<const Table>(std::move(times), std::move(epsilon));
    return c;
}

ControlLaw ControlLaw::tabulated_u(std::vector<double> times, std::vector<double> u) {
    ControlLaw c;
    c.kind_ = Kind::TabulatedU;
    c.table_ = std::make_shared<const Table>(std::move(times), std::move(u));
    return c;
}

std::string ControlLaw::describe() const {
    std::ostringstream os;
    switch (kind_) {
    case Kind::Resonant: os << "resonant"; break;
    case Kind::ConstantDetuning: os << "constant_detuning(" << delta0_ << ")"; break;
    case Kind::TabulatedEpsilon:
        os << "tabulated_epsilon(" << table_->t.size() << " samples, "
           << (convention_ == PhaseConvention::Literal ? "literal" : "accumulated") << ")";
        break;
    case Kind::TabulatedU: os << "tabulated_u(" << table_->t.size() << " samples)"; break;
    }
    return os.str();
}

namespace {

[[noreturn]] void no_field() {
    throw Error(ErrorCode::InvalidParameter,
                "a geometric u(t) control has no state-independent physical field", "control");
}

} // namespace

double ControlLaw::epsilon(double t, const ModelParams& p) const {
    switch (kind_) {
    case Kind::Resonant:
    case Kind::ConstantDetuning: return delta0_ - p.omega_q() + p.omega_tls();
    case Kind::TabulatedEpsilon: return table_->value(t);
    case Kind::TabulatedU: no_field();
    }
    return 0.0;
}

double ControlLaw::epsilon_rate(double t) const {
    switch (kind_) {
    case Kind::Resonant:
    case Kind::ConstantDetuning: return 0.0;
    case Kind::TabulatedEpsilon: return table_->rate(t);
    case Kind::TabulatedU: no_field();
    }
    return 0.0;
}

double ControlLaw::detuning(double t, const ModelParams& p) const {
    return p.omega_q() + epsilon(t, p) - p.omega_tls();
}

double ControlLaw::phase(double t, const ModelParams& p) const {
    switch (kind_) {
    case Kind::Resonant: return 0.0;
    case Kind::ConstantDetuning: return delta0_ * t;
    case Kind::TabulatedEpsilon:
        if (convention_ == PhaseConvention::Literal) return detuning(t, p) * t;
        return (p.omega_q() - p.omega_tls()) * t + table_->antiderivative(t) - table_->antiderivative(0.0);
    case Kind::TabulatedU: no_field();
    }
    return 0.0;
}

double ControlLaw::alpha(double t, const ModelParams&) const {
    switch (kind_) {
    case Kind::Resonant:
    case Kind::ConstantDetuning: return 0.0;
    case Kind::TabulatedEpsilon:
        return convention_ == PhaseConvention::Literal ? 0.5 * t * table_->rate(t) : 0.0;
    case Kind::TabulatedU: return 0.0;
    }
    return 0.0;
}

double ControlLaw::u(double t) const {
    if (kind_ == Kind::TabulatedU) return table_->value(t);
    if (kind_ == Kind::Resonant) return 0.0;
    throw Error(ErrorCode::InvalidParameter, "u(t) is only tabulated for geometric controls", "control");
}

double ControlLaw::u_rate(double t) const {
    if (kind_ == Kind::TabulatedU) return table_->rate(t);
    if (kind_ == Kind::Resonant) return 0.0;
    throw Error(ErrorCode::InvalidParameter, "u(t) is only tabulated for geometric controls", "control");
}

CouplingTerms ControlLaw::coupling(double t, const ModelParams& p, double azimuth) const {
    const double ph = kind_ == Kind::TabulatedU ? table_->value(t) + azimuth : phase(t, p);
    return {p.J() * std::cos(ph), p.J() * std::sin(ph), alpha(t, p)};
}

} // namespace qpurify
