#pragma once

#include <string>
#include <vector>

namespace recourse {

// Minimal CSV support: comma separator, double-quote quoting with ""
// escapes, UTF-8 passed through untouched, \r\n tolerated on read.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv_file(const std::string& path);
CsvTable read_csv_string(const std::string& text);

std::string csv_escape(const std::string& field);
std::string csv_join(const std::vector<std::string>& fields);

// Shortest round-trip decimal rendering for doubles (to_chars), so equal
// bits always print as equal bytes.
std::string format_double(double v);

}  // namespace recourse
