#include "ecodrive/csv.hpp"

#include <cstdio>
#include <stdexcept>

namespace ecodrive::csv {

std::string num(double value, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, value);
  return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::string current;
  for (char c : line) {
    if (c == sep) {
      fields.push_back(current);
      current.clear();
    } else if (c != '\r') {
      current.push_back(c);
    }
  }
  fields.push_back(current);
  return fields;
}

std::vector<std::string> read_header(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("csv: missing header");
  return split(line);
}

double to_double(const std::string& field) {
  std::size_t used = 0;
  const double value = std::stod(field, &used);
  if (used != field.size()) throw std::runtime_error("csv: bad number '" + field + "'");
  return value;
}

long long to_int(const std::string& field) {
  std::size_t used = 0;
  const long long value = std::stoll(field, &used);
  if (used != field.size()) throw std::runtime_error("csv: bad integer '" + field + "'");
  return value;
}

}  // namespace ecodrive::csv
