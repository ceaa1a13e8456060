#pragma once

#include <istream>
#include <string>
#include <vector>

namespace ecodrive::csv {

/// Shortest-safe decimal form: %.17g round-trips every finite double.
std::string num(double value, int precision = 17);

std::vector<std::string> split(const std::string& line, char sep = ',');

/// Reads the header line and returns the column names; throws on an empty stream.
std::vector<std::string> read_header(std::istream& in);

double to_double(const std::string& field);
long long to_int(const std::string& field);

}  // namespace ecodrive::csv
