#pragma once

#include <charconv>
#include <fstream>
#include <variant>

#include "renewalab/core.hpp"

namespace renewalab {

/// Locale-independent formatting: '.' decimal point, 17 significant digits.
inline std::string format_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

using CsvField = std::variant<double, std::int64_t, std::string>;

class CsvWriter {
public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw std::runtime_error("CsvWriter: cannot open '" + path + "'");
    n_cols_ = header.size();
    write_strings(header);
  }

  void row(const std::vector<CsvField>& fields) {
    if (fields.size() != n_cols_) throw std::invalid_argument("CsvWriter: column count mismatch");
    std::string line;
    for (size_t i = 0; i < fields.size(); ++i) {
      if (i) line += ',';
      if (std::holds_alternative<double>(fields[i]))
        line += format_real(std::get<double>(fields[i]));
      else if (std::holds_alternative<std::int64_t>(fields[i]))
        line += std::to_string(std::get<std::int64_t>(fields[i]));
      else
        line += std::get<std::string>(fields[i]);
    }
    out_ << line << '\n';
  }

private:
  void write_strings(const std::vector<std::string>& cells) {
    std::string line;
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) line += ',';
      line += cells[i];
    }
    out_ << line << '\n';
  }

  std::ofstream out_;
  size_t n_cols_ = 0;
};

}  // namespace renewalab
