#include "cldyn/csv.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>

#include <nlohmann/json.hpp>

#include "cldyn/errors.hpp"

namespace cldyn {

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string Cell::to_text() const
{
    switch (kind) {
    case Kind::number: return format_double(number);
    case Kind::integer: return std::to_string(integer);
    default: return text;
    }
}

OutputFormat parse_output_format(const std::string& name)
{
    if (name == "csv") return OutputFormat::csv;
    if (name == "jsonl") return OutputFormat::jsonl;
    throw config_error("output format must be \"csv\" or \"jsonl\" (got \"" + name + "\")");
}

std::string to_string(OutputFormat format)
{
    return format == OutputFormat::csv ? "csv" : "jsonl";
}

namespace {

void write_csv(std::ostream& os, const MetaBlock& meta, const Table& table)
{
    for (const auto& [key, value] : meta.entries) os << "# " << key << ": " << value << "\n";
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i > 0) os << ',';
        os << table.columns[i];
    }
    os << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i > 0) os << ',';
            os << row[i].to_text();
        }
        os << '\n';
    }
}

void write_jsonl(std::ostream& os, const MetaBlock& meta, const Table& table)
{
    nlohmann::json head;
    for (const auto& [key, value] : meta.entries) {
        // the config echo is itself json; embed it structurally
        if (key == "config")
            head["meta"][key] = nlohmann::json::parse(value);
        else
            head["meta"][key] = value;
    }
    head["meta"]["columns"] = table.columns;
    os << head.dump() << '\n';
    for (const auto& row : table.rows) {
        nlohmann::json obj;
        for (std::size_t i = 0; i < row.size() && i < table.columns.size(); ++i) {
            const Cell& cell = row[i];
            switch (cell.kind) {
            case Cell::Kind::number: obj[table.columns[i]] = cell.number; break;
            case Cell::Kind::integer: obj[table.columns[i]] = cell.integer; break;
            default: obj[table.columns[i]] = cell.text; break;
            }
        }
        os << obj.dump() << '\n';
    }
}

} // namespace

void write_table(std::ostream& os, OutputFormat format, const MetaBlock& meta, const Table& table)
{
    if (format == OutputFormat::csv)
        write_csv(os, meta, table);
    else
        write_jsonl(os, meta, table);
}

void write_table_file(const std::string& path, OutputFormat format, const MetaBlock& meta,
                      const Table& table)
{
    if (path.empty() || path == "-") {
        write_table(std::cout, format, meta, table);
        std::cout.flush();
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw config_error("cannot open output file \"" + path + "\"");
    write_table(os, format, meta, table);
    if (!os) throw config_error("failed while writing output file \"" + path + "\"");
}

} // namespace cldyn
