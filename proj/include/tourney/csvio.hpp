#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace tourney {

/// Shortest decimal that round-trips the exact double (to_chars).
std::string format_double(double x);

/// Inverse of format_double; throws std::invalid_argument on junk.
double parse_double(std::string_view s);

// Empty cells render as nothing in CSV and null in JSON.
using Cell = std::variant<std::monostate, double, long long, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row) { rows.push_back(std::move(row)); }
};

/// Comma-separated, UTF-8, header row, '.' decimal point, no quoting needed
/// for the content we emit.
std::string to_csv(const Table& table);

/// {"columns": [...], "rows": [[...]]} with the same numeric values as the CSV.
std::string to_json_string(const Table& table, int indent = -1);

/// Minimal CSV reader for round-trip tests and table consumers; splits on
/// commas, no quoting or escapes.
Table parse_csv(std::string_view text);

}  // namespace tourney
