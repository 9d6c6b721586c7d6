#pragma once

#include <initializer_list>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace sensikit {

/// Shortest text that is unambiguous at 17 significant digits ("%.17g"
/// equivalent). Non-finite values format as "nan", "inf", "-inf".
std::string format_double(double value);

/// Empty field for a missing value.
std::string format_optional(const std::optional<double>& value);

/// RFC-4180 writer: fields containing a comma, quote, CR or LF are quoted,
/// quotes are doubled, records end with '\n'.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void row(std::initializer_list<std::string_view> fields);
  void row(const std::vector<std::string>& fields);

 private:
  void field(std::string_view text, bool first);

  std::ostream& out_;
};

}  // namespace sensikit
