#include "report.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace kelly::cli
{

namespace
{

std::string render(const Cell& cell, int digits)
{
    if (const auto* d = std::get_if<double>(&cell))
        return format_number(*d, digits);
    if (const auto* i = std::get_if<long long>(&cell))
        return std::to_string(*i);
    return std::get<std::string>(cell);
}

nlohmann::json to_json(const Cell& cell)
{
    if (const auto* d = std::get_if<double>(&cell)) {
        if (!std::isfinite(*d))
            return nullptr;
        // Round through the CSV precision so JSON and CSV agree digit for digit.
        return std::stod(format_number(*d, 12));
    }
    if (const auto* i = std::get_if<long long>(&cell))
        return *i;
    return std::get<std::string>(cell);
}

} // namespace

void Table::add_row(std::vector<Cell> row)
{
    if (row.size() != columns.size())
        throw std::logic_error("row width does not match table " + name);
    rows.push_back(std::move(row));
}

Table& Report::add(std::string name, std::vector<std::string> columns)
{
    tables.push_back({std::move(name), std::move(columns), {}});
    return tables.back();
}

std::string format_number(double value, int significant_digits)
{
    if (std::isnan(value))
        return "nan";
    if (std::isinf(value))
        return value > 0 ? "inf" : "-inf";
    if (value == 0.0)
        return "0";
    std::ostringstream os;
    os << std::setprecision(significant_digits) << value;
    return os.str();
}

void write_csv(std::ostream& out, const Report& report)
{
    bool first = true;
    for (const auto& table : report.tables) {
        if (!first)
            out << '\n';
        first = false;
        for (std::size_t c = 0; c < table.columns.size(); ++c)
            out << (c ? "," : "") << table.columns[c];
        out << '\n';
        for (const auto& row : table.rows) {
            for (std::size_t c = 0; c < row.size(); ++c)
                out << (c ? "," : "") << render(row[c], 12);
            out << '\n';
        }
    }
}

void write_text(std::ostream& out, const Report& report)
{
    bool first = true;
    for (const auto& table : report.tables) {
        if (!first)
            out << '\n';
        first = false;
        out << "[" << table.name << "]\n";
        if (table.rows.size() == 1) {
            std::size_t width = 0;
            for (const auto& c : table.columns)
                width = std::max(width, c.size());
            for (std::size_t c = 0; c < table.columns.size(); ++c)
                out << std::left << std::setw(static_cast<int>(width)) << table.columns[c] << "  "
                    << render(table.rows[0][c], 6) << '\n';
            continue;
        }
        std::vector<std::vector<std::string>> cells;
        std::vector<std::size_t> widths;
        for (const auto& c : table.columns)
            widths.push_back(c.size());
        for (const auto& row : table.rows) {
            auto& rendered = cells.emplace_back();
            for (std::size_t c = 0; c < row.size(); ++c) {
                rendered.push_back(render(row[c], 6));
                widths[c] = std::max(widths[c], rendered.back().size());
            }
        }
        for (std::size_t c = 0; c < table.columns.size(); ++c)
            out << (c ? "  " : "") << std::right << std::setw(static_cast<int>(widths[c])) << table.columns[c];
        out << '\n';
        for (const auto& row : cells) {
            for (std::size_t c = 0; c < row.size(); ++c)
                out << (c ? "  " : "") << std::right << std::setw(static_cast<int>(widths[c])) << row[c];
            out << '\n';
        }
    }
}

void write_json(std::ostream& out, const Report& report)
{
    nlohmann::ordered_json doc;
    doc["command"] = report.command;
    auto& tables = doc["tables"];
    tables = nlohmann::ordered_json::object();
    for (const auto& table : report.tables) {
        auto rows = nlohmann::ordered_json::array();
        for (const auto& row : table.rows) {
            nlohmann::ordered_json obj;
            for (std::size_t c = 0; c < row.size(); ++c)
                obj[table.columns[c]] = to_json(row[c]);
            rows.push_back(std::move(obj));
        }
        tables[table.name] = std::move(rows);
    }
    out << doc.dump(2) << '\n';
}

void write_report(std::ostream& out, const Report& report, Format format)
{
    switch (format) {
    case Format::Text: write_text(out, report); break;
    case Format::Csv: write_csv(out, report); break;
    case Format::Json: write_json(out, report); break;
    }
}

} // namespace kelly::cli
