#pragma once

#include <string>
#include <vector>

namespace dstyle {

// Minimal CSV support: comma-separated, double quotes for fields containing
// commas/quotes/newlines, first row treated as header by the callers.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;  // -1 when absent
};

CsvTable read_csv(const std::string& path);
std::string csv_join(const std::vector<std::string>& fields);

// Shortest representation that round-trips a double (printf %.17g trimmed),
// used everywhere numbers land in a file so outputs stay byte-stable.
std::string format_double(double v);

double parse_double(const std::string& field, const std::string& context);
long parse_long(const std::string& field, const std::string& context);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace dstyle
