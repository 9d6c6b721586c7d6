#include "sensikit/csv.hpp"

#include <charconv>
#include <cmath>

namespace sensikit {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string format_optional(const std::optional<double>& value) {
  return value ? format_double(*value) : std::string();
}

void CsvWriter::field(std::string_view text, bool first) {
  if (!first) out_ << ',';
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) {
    out_ << text;
    return;
  }
  out_ << '"';
  for (const char c : text) {
    if (c == '"') out_ << '"';
    out_ << c;
  }
  out_ << '"';
}

void CsvWriter::row(std::initializer_list<std::string_view> fields) {
  bool first = true;
  for (const auto f : fields) {
    field(f, first);
    first = false;
  }
  out_ << '\n';
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  bool first = true;
  for (const auto& f : fields) {
    field(f, first);
    first = false;
  }
  out_ << '\n';
}

}  // namespace sensikit
