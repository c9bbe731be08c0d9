// commands.hpp: The harness subcommands, each producing one Report

#pragma once

#include <string>
#include <vector>

#include "qpurify/config.hpp"
#include "qpurify/report.hpp"

namespace qpurify {

Report cmd_simulate(const RunConfig& cfg);
Report cmd_scan_gamma(const RunConfig& cfg);
Report cmd_scan_beta(const RunConfig& cfg);
Report cmd_region_map(const RunConfig& cfg);
Report cmd_coherence_map(const RunConfig& cfg);
Report cmd_purity_trace(const RunConfig& cfg);
// Exit code 1 when any property fails.
Report cmd_verify(const RunConfig& cfg);

const std::vector<std::string>& command_names();
Report run_command(const std::string& name, const RunConfig& cfg);

// Names accepted by `inject_fault` (verify negative controls).
const std::vector<std::string>& fault_names();

} // namespace qpurify
