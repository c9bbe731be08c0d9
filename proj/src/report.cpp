// report.cpp

#include "qpurify/report.hpp"

#include <cmath>

#include <json.hpp>

#include "qpurify/config.hpp"
#include "qpurify/error.hpp"

namespace qpurify {

namespace {

double checked(double v) {
    if (!std::isfinite(v)) throw Error(ErrorCode::Io, "refusing to write a non-finite value", "output");
    return v;
}

nlohmann::ordered_json to_json(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return checked(*d);
    if (const auto* i = std::get_if<long long>(&c)) return *i;
    return std::get<std::string>(c);
}

} // namespace

std::string cell_text(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return format_double(checked(*d));
    if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
    return std::get<std::string>(c);
}

void write_csv(const Report& r, std::ostream& out) {
    out << "# command = " << r.command << '\n';
    for (const auto& [k, v] : r.config) out << "# " << k << " = " << v << '\n';
    for (const auto& [k, v] : r.metadata) out << "# meta." << k << " = " << cell_text(v) << '\n';
    for (std::size_t i = 0; i < r.columns.size(); ++i) out << (i ? "," : "") << r.columns[i];
    out << '\n';
    for (const auto& row : r.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << cell_text(row[i]);
        out << '\n';
    }
}

void write_json(const Report& r, std::ostream& out) {
    nlohmann::ordered_json doc;
    doc["command"] = r.command;
    nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.config) cfg[k] = v;
    doc["config"] = cfg;
    nlohmann::ordered_json meta = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.metadata) meta[k] = to_json(v);
    doc["metadata"] = meta;
    doc["columns"] = r.columns;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : r.rows) {
        nlohmann::ordered_json jr = nlohmann::ordered_json::array();
        for (const auto& c : row) jr.push_back(to_json(c));
        rows.push_back(std::move(jr));
    }
    doc["rows"] = std::move(rows);
    out << doc.dump(1) << '\n';
}

} // namespace qpurify
