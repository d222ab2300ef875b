#include "gm/csv.hpp"

#include "gm/common.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace gm::csv {

int Table::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    fields.push_back(field);
    return fields;
}

Table parse_lines(std::istream& in, const std::string& origin) {
    Table table;
    std::string line;
    std::size_t line_no = 0;
    std::size_t expected_cols = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_line(line);
        if (table.header.empty()) {
            table.header = std::move(fields);
            expected_cols = table.header.size();
            continue;
        }
        if (fields.size() != expected_cols) {
            throw ParseError(origin + ": expected " + std::to_string(expected_cols) +
                                 " columns, got " + std::to_string(fields.size()),
                             line_no);
        }
        table.rows.push_back(std::move(fields));
        table.line_numbers.push_back(line_no);
    }
    if (table.header.empty()) {
        throw ParseError(origin + ": empty file, header row required");
    }
    return table;
}

}  // namespace

Table read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open " + path.string());
    }
    return parse_lines(in, path.filename().string());
}

Table read_string(const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    return parse_lines(in, origin);
}

void require_header(const Table& table, const std::vector<std::string>& expected,
                    const std::string& origin) {
    if (table.header != expected) {
        throw ParseError(origin + ": unexpected header '" + join_row(table.header) +
                         "', expected '" + join_row(expected) + "'");
    }
}

std::string join_row(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.push_back(',');
        out += fields[i];
    }
    return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    auto dir = path.parent_path();
    if (!dir.empty()) std::filesystem::create_directories(dir);
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ValidationError("cannot write " + tmp.string());
        out << content;
        if (!out) throw ValidationError("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

double parse_number(const std::string& field, const std::string& what, std::size_t line) {
    if (field.empty()) throw ParseError("empty " + what, line);
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(field.c_str(), &end);
    if (end != field.c_str() + field.size() || errno == ERANGE) {
        throw ParseError("bad " + what + " '" + field + "'", line);
    }
    return v;
}

long long parse_integer(const std::string& field, const std::string& what, std::size_t line) {
    if (field.empty()) throw ParseError("empty " + what, line);
    errno = 0;
    char* end = nullptr;
    long long v = std::strtoll(field.c_str(), &end, 10);
    if (end != field.c_str() + field.size() || errno == ERANGE) {
        throw ParseError("bad " + what + " '" + field + "'", line);
    }
    return v;
}

}  // namespace gm::csv
