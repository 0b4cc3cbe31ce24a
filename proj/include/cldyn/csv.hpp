#ifndef CLDYN_CSV_HPP
#define CLDYN_CSV_HPP

#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace cldyn {

/** Round-trip-exact text form of a double (17 significant digits). */
std::string format_double(double v);

/** One table cell; kept typed so the json-lines format can emit real
 *  numbers while csv prints the same canonical text. */
struct Cell {
    enum class Kind { number, integer, text };

    Kind kind = Kind::number;
    double number = 0.0;
    long long integer = 0;
    std::string text;

    Cell(double v) : kind(Kind::number), number(v) {}
    Cell(int v) : kind(Kind::integer), integer(v) {}
    Cell(long v) : kind(Kind::integer), integer(v) {}
    Cell(long long v) : kind(Kind::integer), integer(v) {}
    Cell(unsigned long long v) : kind(Kind::integer), integer(static_cast<long long>(v)) {}
    Cell(std::string s) : kind(Kind::text), text(std::move(s)) {}
    Cell(const char* s) : kind(Kind::text), text(s) {}

    std::string to_text() const;
};

/** Ordered key/value lines for the '#'-prefixed header block. */
struct MetaBlock {
    std::vector<std::pair<std::string, std::string>> entries;

    void add(std::string key, std::string value)
    {
        entries.emplace_back(std::move(key), std::move(value));
    }
};

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

enum class OutputFormat { csv, jsonl };

OutputFormat parse_output_format(const std::string& name);
std::string to_string(OutputFormat format);

/** Serializes the metadata block and table. csv: '# key: value' lines, a
 *  header row, then comma-separated rows with '\n' endings. jsonl: one
 *  {"meta": ...} object followed by one object per row. */
void write_table(std::ostream& os, OutputFormat format, const MetaBlock& meta,
                 const Table& table);

/** Writes to the given path, or to stdout when the path is empty or "-". */
void write_table_file(const std::string& path, OutputFormat format, const MetaBlock& meta,
                      const Table& table);

} // namespace cldyn

#endif
