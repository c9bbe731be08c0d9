// report.hpp: Tabular command output with CSV and JSON writers

#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace qpurify {

// Non-finite values are never written; degenerate results carry a label.
using Cell = std::variant<double, long long, std::string>;

namespace label {
inline constexpr const char* kDivergent = "divergent";
inline constexpr const char* kHorizon = "horizon-expired";
inline constexpr const char* kUnphysical = "unphysical";
inline constexpr const char* kNone = "none";
} // namespace label

struct Report {
    std::string command;
    std::vector<std::pair<std::string, std::string>> config;
    std::vector<std::pair<std::string, Cell>> metadata;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    int exit_code{0};

    void meta(std::string key, Cell value) { metadata.emplace_back(std::move(key), std::move(value)); }
};

// `#`-prefixed header lines (command, config echo, metadata), then the table.
void write_csv(const Report& report, std::ostream& out);
// {"command", "config", "metadata", "columns", "rows"}
void write_json(const Report& report, std::ostream& out);

std::string cell_text(const Cell& c);

} // namespace qpurify
