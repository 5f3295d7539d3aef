#include "tourney/csvio.hpp"

#include <charconv>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace tourney {

std::string format_double(double x) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, p);
}

double parse_double(std::string_view s) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw std::invalid_argument("parse_double: bad number '" + std::string(s) + "'");
    return v;
}

namespace {

std::string cell_text(const Cell& c) {
    if (std::holds_alternative<std::monostate>(c)) return "";
    if (const double* d = std::get_if<double>(&c)) return format_double(*d);
    if (const long long* i = std::get_if<long long>(&c)) return std::to_string(*i);
    return std::get<std::string>(c);
}

}  // namespace

std::string to_csv(const Table& table) {
    std::ostringstream os;
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i) os << ',';
        os << table.columns[i];
    }
    os << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << ',';
            os << cell_text(row[i]);
        }
        os << '\n';
    }
    return os.str();
}

std::string to_json_string(const Table& table, int indent) {
    nlohmann::json j;
    j["columns"] = table.columns;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : table.rows) {
        nlohmann::json jr = nlohmann::json::array();
        for (const auto& c : row) {
            if (std::holds_alternative<std::monostate>(c))
                jr.push_back(nullptr);
            else if (const double* d = std::get_if<double>(&c))
                jr.push_back(*d);
            else if (const long long* i = std::get_if<long long>(&c))
                jr.push_back(*i);
            else
                jr.push_back(std::get<std::string>(c));
        }
        rows.push_back(std::move(jr));
    }
    j["rows"] = std::move(rows);
    return j.dump(indent);
}

Table parse_csv(std::string_view text) {
    Table t;
    std::size_t pos = 0;
    bool header = true;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::size_t f = 0;
        while (true) {
            std::size_t comma = line.find(',', f);
            if (comma == std::string_view::npos) {
                fields.emplace_back(line.substr(f));
                break;
            }
            fields.emplace_back(line.substr(f, comma - f));
            f = comma + 1;
        }
        if (header) {
            t.columns = std::move(fields);
            header = false;
        } else {
            std::vector<Cell> row;
            row.reserve(fields.size());
            for (auto& s : fields) {
                if (s.empty())
                    row.emplace_back(std::monostate{});
                else
                    row.emplace_back(std::move(s));
            }
            t.add_row(std::move(row));
        }
    }
    return t;
}

}  // namespace tourney
