// qpurify: command-line harness
//
//   qpurify <command> [--config PATH] [--out PATH] [--format csv|json] [--frame rwa|lab]
//                     [--tol ABS:REL] [--horizon MULT] [--workers N] [--set key=value]...
//
// Errors are reported on stderr as {"code", "message", "parameter"}.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qpurify/commands.hpp"
#include "qpurify/config.hpp"
#include "qpurify/error.hpp"
#include "qpurify/report.hpp"

namespace {

struct Flags {
    std::string config;
    std::string out;
    std::string format{"csv"};
    std::string frame;
    std::string tol;
    double horizon{0.0};
    int workers{0};
    std::string fault;
    std::vector<std::string> sets;
};

int fail(const std::string& code, const std::string& message, const std::string& parameter) {
    nlohmann::ordered_json e;
    e["code"] = code;
    e["message"] = message;
    e["parameter"] = parameter;
    std::cerr << e.dump() << '\n';
    return 2;
}

qpurify::RunConfig build_config(const Flags& f) {
    using namespace qpurify;
    RunConfig c = f.config.empty() ? RunConfig{} : load_config(f.config);
    for (const auto& s : f.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw Error(ErrorCode::Config, "--set expects key=value", s);
        apply_setting(c, s.substr(0, eq), s.substr(eq + 1));
    }
    if (!f.tol.empty()) apply_tolerance_flag(c, f.tol);
    if (f.horizon != 0.0) apply_setting(c, "horizon", std::to_string(f.horizon));
    if (f.workers != 0) apply_setting(c, "workers", std::to_string(f.workers));
    c.format = f.format == "json" ? OutputFormat::Json : OutputFormat::Csv;
    if (!f.frame.empty()) c.frame = f.frame == "lab" ? Frame::Lab : Frame::Rwa;
    c.out_path = f.out;
    c.inject_fault = f.fault;
    return c;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Time-optimal purification of a qubit coupled to a dissipative two-level system"};
    app.require_subcommand(1, 1);

    Flags f;
    app.add_option("--config", f.config, "key = value configuration file")->check(CLI::ExistingFile);
    app.add_option("--out", f.out, "output file (default: stdout)");
    app.add_option("--format", f.format, "output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--frame", f.frame, "simulation frame")->check(CLI::IsMember({"rwa", "lab"}));
    app.add_option("--tol", f.tol, "integrator tolerances ABS:REL");
    app.add_option("--horizon", f.horizon, "divergence horizon in units of T0")->check(CLI::PositiveNumber);
    app.add_option("--workers", f.workers, "worker threads for sweeps")->check(CLI::Range(1, 1024));
    app.add_option("--set", f.sets, "override one config key (key=value), repeatable");
    app.add_option("--inject-fault", f.fault, "verify negative control")
        ->check(CLI::IsMember(qpurify::fault_names()));

    // global flags may follow the subcommand
    app.fallthrough();
    for (const auto& name : qpurify::command_names()) app.add_subcommand(name);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("usage", e.what(), "");
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        const qpurify::RunConfig cfg = build_config(f);
        const qpurify::Report report = qpurify::run_command(command, cfg);

        std::ofstream file;
        if (!cfg.out_path.empty()) {
            file.open(cfg.out_path);
            if (!file) throw qpurify::Error(qpurify::ErrorCode::Io, "cannot open " + cfg.out_path, "out");
        }
        std::ostream& out = cfg.out_path.empty() ? std::cout : file;
        if (cfg.format == qpurify::OutputFormat::Json) qpurify::write_json(report, out);
        else qpurify::write_csv(report, out);
        out.flush();
        if (!out) throw qpurify::Error(qpurify::ErrorCode::Io, "write failed", "out");
        return report.exit_code;
    } catch (const qpurify::Error& e) {
        return fail(std::string(qpurify::to_string(e.code())), e.what(), e.parameter());
    } catch (const std::exception& e) {
        return fail("internal", e.what(), "");
    }
}
