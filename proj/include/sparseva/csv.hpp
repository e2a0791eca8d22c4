#pragma once

#include <string>
#include <vector>

#include "sparseva/errors.hpp"

namespace sparseva {

// CSV input failed; line is 1-based (header = line 1).
struct CsvParseError : std::runtime_error {
    int line;
    CsvParseError(const std::string& what, int line_) : std::runtime_error(what), line(line_) {}
};

/// Shortest decimal string that round-trips the double exactly (%.17g).
std::string fmt_double(double v);

double parse_double(const std::string& s, int line);
long parse_long(const std::string& s, int line);

/// Splits one CSV line on commas; trims a trailing '\r'.
std::vector<std::string> split_csv_line(const std::string& line);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;  // all rows have header.size() cells
};

/// Reads a whole CSV file; every row must match the header width.
CsvTable read_csv(const std::string& path);

}  // namespace sparseva
