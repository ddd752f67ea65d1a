#pragma once

// Minimal CSV reading/writing for the numeric series the tools exchange.
// Parse failures name the file and 1-based line number.

#include <charconv>
#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "foldhinge/error.hpp"

namespace foldhinge::io {

struct CsvRow {
    std::size_t line;
    std::vector<double> values;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<CsvRow> rows;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        fields.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

inline std::optional<double> parse_double(std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return value;
}

}  // namespace detail

/// Parses CSV text whose header must consist of `required` columns followed
/// by any prefix of `optional_columns`. Blank lines and lines starting with
/// '#' are skipped.
inline CsvTable parse_csv(std::istream& in, const std::string& source,
                          const std::vector<std::string>& required,
                          const std::vector<std::string>& optional_columns = {}) {
    auto malformed = [&](std::size_t line, const std::string& msg) {
        fail(ErrorKind::MalformedInput, source + ":" + std::to_string(line) + ": " + msg);
    };

    CsvTable table;
    std::string text;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, text)) {
        ++line_no;
        const auto line = detail::trim(text);
        if (line.empty() || line.front() == '#') continue;
        const auto fields = detail::split(line);
        if (!have_header) {
            std::string expected;
            for (const auto& c : required) expected += (expected.empty() ? "" : ",") + c;
            if (fields.size() < required.size() || fields.size() > required.size() + optional_columns.size()) {
                malformed(line_no, "header must be '" + expected + "'");
            }
            for (std::size_t i = 0; i < fields.size(); ++i) {
                const std::string& want = i < required.size() ? required[i] : optional_columns[i - required.size()];
                if (fields[i] != want) {
                    malformed(line_no, "expected column '" + want + "', found '" + std::string(fields[i]) + "'");
                }
                table.header.emplace_back(fields[i]);
            }
            have_header = true;
            continue;
        }
        if (fields.size() != table.header.size()) {
            malformed(line_no, "expected " + std::to_string(table.header.size()) + " fields, found " +
                                   std::to_string(fields.size()));
        }
        CsvRow row{line_no, {}};
        for (std::size_t i = 0; i < fields.size(); ++i) {
            const auto v = detail::parse_double(fields[i]);
            if (!v) {
                malformed(line_no, "column '" + table.header[i] + "': '" + std::string(fields[i]) +
                                       "' is not a number");
            }
            row.values.push_back(*v);
        }
        table.rows.push_back(std::move(row));
    }
    if (!have_header) {
        malformed(line_no == 0 ? 1 : line_no, "missing header");
    }
    return table;
}

inline CsvTable read_csv(const std::string& path, const std::vector<std::string>& required,
                         const std::vector<std::string>& optional_columns = {}) {
    std::ifstream in(path);
    if (!in) {
        fail(ErrorKind::MalformedInput, path + ": cannot open file");
    }
    return parse_csv(in, path, required, optional_columns);
}

/// Shortest decimal text that round-trips to the same double.
inline std::string format_number(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

class CsvWriter {
public:
    explicit CsvWriter(std::ostream& out) : out_(out) {}

    void header(const std::vector<std::string>& columns) {
        for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
        out_ << '\n';
    }

    void row(std::initializer_list<double> values) {
        std::size_t i = 0;
        for (double v : values) out_ << (i++ ? "," : "") << format_number(v);
        out_ << '\n';
    }

private:
    std::ostream& out_;
};

}  // namespace foldhinge::io
