// config.cpp

#include "qpurify/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qpurify/error.hpp"

namespace qpurify {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(const std::string& key, const std::string& message) {
    throw Error(ErrorCode::Config, message, key);
}

double to_double(const std::string& key, const std::string& text) {
    const std::string s = trim(text);
    double v = 0.0;
    const char* end = s.data() + s.size();
    const auto res = std::from_chars(s.data(), end, v);
    if (s.empty() || res.ec != std::errc() || res.ptr != end || !std::isfinite(v)) {
        bad(key, "expected a finite number, got '" + text + "'");
    }
    return v;
}

int to_int(const std::string& key, const std::string& text) {
    const std::string s = trim(text);
    int v = 0;
    const char* end = s.data() + s.size();
    const auto res = std::from_chars(s.data(), end, v);
    if (s.empty() || res.ec != std::errc() || res.ptr != end) bad(key, "expected an integer, got '" + text + "'");
    return v;
}

// "F*name", "name" or a plain number. Returns the multiplier when symbolic.
std::optional<double> symbolic(const std::string& key, const std::string& text, const std::string& name,
                               double& plain) {
    const std::string s = trim(text);
    if (s == name) return 1.0;
    const std::string suffix = "*" + name;
    if (s.size() > suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0) {
        return to_double(key, s.substr(0, s.size() - suffix.size()));
    }
    plain = to_double(key, s);
    return std::nullopt;
}

SweepAxis parse_axis(const std::string& key, const std::string& name, const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(trim(text));
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(trim(item));
    if (parts.size() < 3 || parts.size() > 4) bad(key, "sweep axis must be start:stop:count[:log|:linear]");
    SweepAxis a;
    a.name = name;
    a.start = to_double(key, parts[0]);
    a.stop = to_double(key, parts[1]);
    a.count = to_int(key, parts[2]);
    if (a.count < 2) bad(key, "sweep axis needs at least 2 points");
    if (parts.size() == 4) {
        if (parts[3] == "log") a.log = true;
        else if (parts[3] != "linear") bad(key, "sweep scale must be 'log' or 'linear'");
    }
    if (a.log && !(a.start > 0.0 && a.stop > 0.0)) bad(key, "log sweep needs positive endpoints");
    return a;
}

} // namespace

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

std::vector<double> SweepAxis::values() const {
    std::vector<double> v(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const double f = static_cast<double>(i) / static_cast<double>(count - 1);
        v[static_cast<std::size_t>(i)] =
            log ? std::exp(std::log(start) + f * (std::log(stop) - std::log(start))) : start + f * (stop - start);
    }
    // endpoints exactly as written
    v.front() = start;
    v.back() = stop;
    return v;
}

std::string SweepAxis::describe() const {
    return format_double(start) + ":" + format_double(stop) + ":" + std::to_string(count) + (log ? ":log" : ":linear");
}

void apply_setting(RunConfig& c, const std::string& raw_key, const std::string& value) {
    const std::string key = trim(raw_key);
    const std::string v = trim(value);
    auto num = [&] { return to_double(key, v); };

    if (key == "omega_q") c.model.omega_q = num();
    else if (key == "omega_tls") c.model.omega_tls = num();
    else if (key == "beta") c.model.beta = num();
    else if (key == "J") c.model.J = num();
    else if (key == "kappa") c.model.kappa = num();
    else if (key == "gamma") c.gamma = num();
    else if (key == "mu_q") c.mu_q_of_max = symbolic(key, v, "mu_max", c.mu_q);
    else if (key == "nu_q") c.nu_q = num();
    else if (key == "xi_re") c.xi_re_of_max = symbolic(key, v, "xi_max", c.xi_re);
    else if (key == "xi_im") c.xi_im = num();
    else if (key == "control") {
        if (v != "resonant" && v != "detuning" && v != "epsilon_table" && v != "u_table") {
            bad(key, "control must be resonant, detuning, epsilon_table or u_table");
        }
        c.control = v;
    } else if (key == "delta0") c.delta0 = num();
    else if (key == "control_file") c.control_file = v;
    else if (key == "phase_convention") {
        if (v == "literal") c.convention = PhaseConvention::Literal;
        else if (v == "accumulated") c.convention = PhaseConvention::Accumulated;
        else bad(key, "phase_convention must be literal or accumulated");
    } else if (key == "system") {
        if (v != "full" && v != "reduced") bad(key, "system must be full or reduced");
        c.system = v;
    } else if (key == "t_end") {
        c.t_end = num();
        if (!(*c.t_end > 0.0)) bad(key, "t_end must be > 0");
    } else if (key == "samples") {
        c.samples = to_int(key, v);
        if (c.samples < 2) bad(key, "samples must be >= 2");
    } else if (key == "mu_points") {
        c.mu_points = to_int(key, v);
        if (c.mu_points < 2) bad(key, "mu_points must be >= 2");
    } else if (key == "tol_abs") c.tol.abs_tol = num();
    else if (key == "tol_rel") c.tol.rel_tol = num();
    else if (key == "horizon") {
        c.horizon_multiple = num();
        if (!(c.horizon_multiple > 0.0)) bad(key, "horizon must be > 0");
    } else if (key == "workers") {
        const int w = to_int(key, v);
        if (w < 1) bad(key, "workers must be >= 1");
        c.workers = static_cast<unsigned>(w);
    } else if (key.rfind("sweep.", 0) == 0) {
        const std::string name = key.substr(6);
        if (name.empty()) bad(key, "sweep axis needs a name");
        c.axes[name] = parse_axis(key, name, v);
    } else {
        bad(key, "unknown configuration key");
    }
    if (key == "tol_abs" || key == "tol_rel") {
        if (!(c.tol.abs_tol > 0.0) || !(c.tol.rel_tol > 0.0)) bad(key, "tolerances must be > 0");
    }
    c.explicit_keys.insert(key);
}

RunConfig parse_config(const std::string& text) {
    RunConfig c;
    std::istringstream in(text);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorCode::Config, "line " + std::to_string(number) + ": expected key = value", "config");
        }
        apply_setting(c, line.substr(0, eq), line.substr(eq + 1));
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorCode::Io, "cannot open config file " + path, "config");
    std::stringstream buf;
    buf << f.rdbuf();
    return parse_config(buf.str());
}

void apply_tolerance_flag(RunConfig& c, const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) bad("tol", "expected ABS:REL");
    apply_setting(c, "tol_abs", spec.substr(0, colon));
    apply_setting(c, "tol_rel", spec.substr(colon + 1));
}

ModelParams RunConfig::params() const {
    const ModelParams p(model);
    return gamma ? p.with_gamma(*gamma) : p;
}

InitialStateSpec RunConfig::state(const ModelParams& p) const {
    InitialStateSpec s;
    const double re = xi_re_of_max ? *xi_re_of_max * xi_max(p) : xi_re;
    s.xi = {re, xi_im};
    s.nu_q = nu_q;
    if (mu_q_of_max) {
        if (xi_im != 0.0 || nu_q != 0.0) {
            throw Error(ErrorCode::Config, "mu_max is tabulated for real xi and nu_q = 0 only", "mu_q");
        }
        s.mu_q = *mu_q_of_max * mu_max(re, p);
    } else {
        s.mu_q = mu_q;
    }
    return s;
}

ControlLaw RunConfig::control_law() const {
    if (control == "resonant") return ControlLaw::resonant();
    if (control == "detuning") return ControlLaw::constant_detuning(delta0);
    if (control_file.empty()) throw Error(ErrorCode::Config, "tabulated controls need control_file", "control_file");
    auto [t, v] = read_series(control_file);
    if (control == "epsilon_table") return ControlLaw::tabulated_epsilon(std::move(t), std::move(v), convention);
    return ControlLaw::tabulated_u(std::move(t), std::move(v));
}

std::vector<std::pair<std::string, std::string>> RunConfig::echo() const {
    std::vector<std::pair<std::string, std::string>> e;
    auto put = [&e](const std::string& k, const std::string& v) { e.emplace_back(k, v); };
    const ModelParams p = params();
    put("omega_q", format_double(p.omega_q()));
    put("omega_tls", format_double(p.omega_tls()));
    put("beta", format_double(p.beta()));
    put("J", format_double(p.J()));
    put("kappa", format_double(p.kappa()));
    put("gamma", format_double(p.gamma()));
    put("mu_q", mu_q_of_max ? format_double(*mu_q_of_max) + "*mu_max" : format_double(mu_q));
    put("nu_q", format_double(nu_q));
    put("xi_re", xi_re_of_max ? format_double(*xi_re_of_max) + "*xi_max" : format_double(xi_re));
    put("xi_im", format_double(xi_im));
    put("control", control);
    if (control == "detuning") put("delta0", format_double(delta0));
    if (!control_file.empty()) put("control_file", control_file);
    put("phase_convention", convention == PhaseConvention::Literal ? "literal" : "accumulated");
    put("system", system);
    if (t_end) put("t_end", format_double(*t_end));
    put("samples", std::to_string(samples));
    put("mu_points", std::to_string(mu_points));
    put("tol_abs", format_double(tol.abs_tol));
    put("tol_rel", format_double(tol.rel_tol));
    put("horizon", format_double(horizon_multiple));
    put("frame", frame == Frame::Rwa ? "rwa" : "lab");
    if (!inject_fault.empty()) put("inject_fault", inject_fault);
    for (const auto& [name, axis] : axes) put("sweep." + name, axis.describe());
    return e;
}

std::pair<std::vector<double>, std::vector<double>> read_series(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorCode::Io, "cannot open control file " + path, "control_file");
    std::vector<double> t;
    std::vector<double> v;
    std::string line;
    while (std::getline(f, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw Error(ErrorCode::Config, "expected 't,value' rows", "control_file");
        const std::string a = trim(line.substr(0, comma));
        // tolerate one header row
        if (t.empty() && !a.empty() && (std::isalpha(static_cast<unsigned char>(a[0])) != 0)) continue;
        t.push_back(to_double("control_file", a));
        v.push_back(to_double("control_file", line.substr(comma + 1)));
    }
    return {t, v};
}

} // namespace qpurify
