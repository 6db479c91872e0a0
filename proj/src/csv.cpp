#include "xcmix/csv.hpp"

#include "xcmix/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace xcmix::csv {

std::vector<std::string> split_line(std::string_view line) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    fields.push_back(std::move(current));
    return fields;
}

Table read(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path.string() + "'");

    Table table;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        auto fields = split_line(line);
        if (!have_header) {
            table.header = std::move(fields);
            have_header = true;
            continue;
        }
        table.rows.push_back({line_no, std::move(fields)});
    }
    if (!have_header) throw InputError("'" + path.string() + "' is empty; a header row is required");
    return table;
}

void require_header(const Table& table, std::initializer_list<std::string_view> expected,
                    const std::filesystem::path& path) {
    bool ok = table.header.size() == expected.size();
    if (ok) {
        std::size_t i = 0;
        for (auto name : expected) ok = ok && table.header[i++] == name;
    }
    if (!ok) {
        std::string want;
        for (auto name : expected) {
            if (!want.empty()) want += ',';
            want += name;
        }
        throw InputError("'" + path.string() + "': header must be '" + want + "'");
    }
    for (const auto& row : table.rows) {
        if (row.fields.size() != expected.size()) {
            throw InputError("'" + path.string() + "' line " + std::to_string(row.line) + ": expected " +
                             std::to_string(expected.size()) + " fields, found " +
                             std::to_string(row.fields.size()));
        }
    }
}

double parse_double(std::string_view text, std::string_view what, const std::filesystem::path& path,
                    std::size_t line) {
    while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
    while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
        throw InputError("'" + path.string() + "' line " + std::to_string(line) + ": unparseable " +
                         std::string(what) + " '" + std::string(text) + "'");
    }
    return value;
}

std::string format_double(double value) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

std::string quote(std::string_view field) {
    if (field.find_first_of(",\"\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

} // namespace xcmix::csv
