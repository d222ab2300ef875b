#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace gm::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;  // data rows, header excluded
    // 1-based file line of each data row (header is line 1)
    std::vector<std::size_t> line_numbers;

    int column(const std::string& name) const;  // -1 when absent
};

// Reads a whole CSV file. Fields are comma-separated, no quoting (none of
// the project formats need it); trailing CR stripped; blank lines skipped.
Table read_file(const std::filesystem::path& path);

// Parses from an in-memory string (used by round-trip tests).
Table read_string(const std::string& text, const std::string& origin = "<string>");

// Requires the header to match `expected` exactly, else ParseError.
void require_header(const Table& table, const std::vector<std::string>& expected,
                    const std::string& origin);

std::string join_row(const std::vector<std::string>& fields);

// Writes content to `path` atomically (temp file in the same directory,
// then rename).
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

double parse_number(const std::string& field, const std::string& what, std::size_t line);
long long parse_integer(const std::string& field, const std::string& what, std::size_t line);

}  // namespace gm::csv
