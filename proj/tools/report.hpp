#pragma once

#include <deque>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace kelly::cli
{

enum class Format
{
    Text,
    Csv,
    Json
};

using Cell = std::variant<double, long long, std::string>;

struct Table
{
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row);
};

/// Ordered list of tables. A one-row table renders as "key: value" lines in
/// text mode.
struct Report
{
    std::string command;
    std::deque<Table> tables;  ///< deque keeps references from add() valid

    Table& add(std::string name, std::vector<std::string> columns);
};

/// CSV: each table is a header row plus data rows; multiple tables are
/// separated by one blank line. Doubles use 12 significant digits.
void write_csv(std::ostream& out, const Report& report);
/// Text: 6 significant digits, aligned columns.
void write_text(std::ostream& out, const Report& report);
/// JSON: {"command": ..., "tables": {name: [ {column: value}, ... ]}}.
void write_json(std::ostream& out, const Report& report);

void write_report(std::ostream& out, const Report& report, Format format);

std::string format_number(double value, int significant_digits);

} // namespace kelly::cli
