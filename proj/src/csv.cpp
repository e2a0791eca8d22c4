#include "sparseva/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>

namespace sparseva {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(const std::string& s, int line) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw CsvParseError("not a number: '" + s + "'", line);
    return v;
}

long parse_long(const std::string& s, int line) {
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0')
        throw CsvParseError("not an integer: '" + s + "'", line);
    return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    cells.push_back(cur);
    return cells;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CsvParseError("cannot open file: " + path, 0);
    CsvTable table;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1) {
            table.header = split_csv_line(line);
            continue;
        }
        if (line.empty() || line == "\r") continue;
        auto cells = split_csv_line(line);
        if (cells.size() != table.header.size())
            throw CsvParseError("expected " + std::to_string(table.header.size()) + " cells, got " +
                                    std::to_string(cells.size()),
                                lineno);
        table.rows.push_back(std::move(cells));
    }
    if (table.header.empty()) throw CsvParseError("empty file: " + path, 0);
    return table;
}

}  // namespace sparseva
