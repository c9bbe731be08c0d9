// config.hpp: Run configuration for the command-line harness
//
// File format: one `key = value` per line, `#` starts a comment. Keys:
//
//   model      omega_q omega_tls beta J kappa gamma
//   state      mu_q nu_q xi_re xi_im        (xi_re accepts `xi_max` or `F*xi_max`,
//                                             mu_q accepts `mu_max` or `F*mu_max`)
//   control    control = resonant | detuning | epsilon_table | u_table
//              delta0, control_file (two-column CSV t,value), phase_convention
//   simulate   system = full | reduced, t_end, samples
//   analysis   tol_abs tol_rel horizon mu_points
//   sweeps     sweep.<axis> = start:stop:count[:log|:linear]
//
// `gamma`, when present, overrides `kappa` through κ = γ/(2N + 1).

#pragma once

#include <complex>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qpurify/control_law.hpp"
#include "qpurify/model.hpp"
#include "qpurify/ode.hpp"

namespace qpurify {

struct SweepAxis {
    std::string name;
    double start{0.0};
    double stop{1.0};
    int count{2};
    bool log{false};

    std::vector<double> values() const;
    std::string describe() const;
};

enum class OutputFormat { Csv, Json };
enum class Frame { Rwa, Lab };

struct RunConfig {
    ModelParams::Inputs model{};
    std::optional<double> gamma;

    double mu_q{0.0};
    double nu_q{0.0};
    double xi_re{0.0};
    double xi_im{0.0};
    // Symbolic state values resolved against the parameters: F*xi_max, F*mu_max.
    std::optional<double> xi_re_of_max;
    std::optional<double> mu_q_of_max;

    std::string control{"resonant"};
    double delta0{0.0};
    std::string control_file;
    PhaseConvention convention{PhaseConvention::Literal};

    std::string system{"full"};
    std::optional<double> t_end;
    int samples{201};
    int mu_points{5};

    ode::Tolerances tol{};
    double horizon_multiple{20.0};
    unsigned workers{1};
    OutputFormat format{OutputFormat::Csv};
    Frame frame{Frame::Rwa};
    std::string out_path;
    std::string inject_fault;

    std::map<std::string, SweepAxis> axes;
    std::set<std::string> explicit_keys; // keys set by the file or flags

    bool has(const std::string& key) const { return explicit_keys.count(key) > 0; }

    ModelParams params() const;
    InitialStateSpec state(const ModelParams& p) const;
    ControlLaw control_law() const;

    // Effective settings as ordered key/value pairs, excluding run-local
    // settings (output path, worker count) so that outputs stay comparable.
    std::vector<std::pair<std::string, std::string>> echo() const;
};

// Applies one `key = value` setting; throws Error(Config) for unknown keys or bad values.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// "ABS:REL" tolerance flag.
void apply_tolerance_flag(RunConfig& cfg, const std::string& spec);

// Two-column numeric CSV (t,value); header and `#` lines skipped.
std::pair<std::vector<double>, std::vector<double>> read_series(const std::string& path);

// Lowercase scientific with 17 significant digits.
std::string format_double(double v);

} // namespace qpurify
