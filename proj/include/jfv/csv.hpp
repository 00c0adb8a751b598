#pragma once

#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace jfv {

/// 17 significant digits, '.' decimal separator, no locale involvement.
/// Round-trips every finite double.
std::string format_double(double v);

/// Comma-separated rows with a fixed header; fields are numbers, integers or
/// plain strings (no quoting, so strings must not contain commas).
class CsvWriter {
 public:
  using Field = std::variant<double, long long, std::string>;

  CsvWriter(std::ostream& out, std::initializer_list<std::string_view> header);
  CsvWriter(std::ostream& out, const std::vector<std::string>& header);

  void row(const std::vector<Field>& fields);
  std::size_t columns() const noexcept { return columns_; }

 private:
  std::ostream& out_;
  std::size_t columns_;
};

}  // namespace jfv
