#pragma once

#include <cstddef>
#include <filesystem>
#include <initializer_list>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace xcmix::csv {

struct Row {
    std::size_t line = 0; // 1-based line number in the source file
    std::vector<std::string> fields;
};

struct Table {
    std::vector<std::string> header;
    std::vector<Row> rows;
};

// Reads a comma-separated file with a mandatory header row. Handles a UTF-8
// BOM, CRLF line endings, blank lines and double-quoted fields.
Table read(const std::filesystem::path& path);

// Throws InputError naming the file if the header differs from `expected`.
void require_header(const Table& table, std::initializer_list<std::string_view> expected,
                    const std::filesystem::path& path);

std::vector<std::string> split_line(std::string_view line);

double parse_double(std::string_view text, std::string_view what, const std::filesystem::path& path,
                    std::size_t line);

// Shortest representation that parses back to the same double.
std::string format_double(double value);

// Quotes a field only when it contains a comma, quote or newline.
std::string quote(std::string_view field);

} // namespace xcmix::csv
