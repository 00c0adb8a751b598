#include "jfv/csv.hpp"

#include <charconv>
#include <stdexcept>

namespace jfv {

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return std::string(buf, ptr);
}

CsvWriter::CsvWriter(std::ostream& out, std::initializer_list<std::string_view> header)
    : CsvWriter(out, std::vector<std::string>(header.begin(), header.end())) {}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header) : out_(out), columns_(header.size()) {
  for (std::size_t k = 0; k < header.size(); ++k) out_ << (k ? "," : "") << header[k];
  out_ << '\n';
}

void CsvWriter::row(const std::vector<Field>& fields) {
  if (fields.size() != columns_) throw std::invalid_argument("CSV row width does not match the header");
  for (std::size_t k = 0; k < fields.size(); ++k) {
    if (k) out_ << ',';
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, double>) {
            out_ << format_double(v);
          } else {
            out_ << v;
          }
        },
        fields[k]);
  }
  out_ << '\n';
}

}  // namespace jfv
