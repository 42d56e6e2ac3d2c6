#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace ebdim {

// UTF-8, header row, '.' decimal separator. Doubles are written as their
// shortest round-trip form (std::to_chars), which is locale-independent and
// byte-stable across reruns.
class CsvWriter {
 public:
  using Cell = std::variant<std::int64_t, double, std::string>;

  CsvWriter(const std::string& path, const std::string& header) : out_(path) {
    if (!out_) throw std::runtime_error("cannot open for writing: " + path);
    out_ << header << '\n';
  }

  static std::string format(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
  }

  void row(const std::vector<Cell>& cells) {
    bool first = true;
    for (const auto& c : cells) {
      if (!first) out_ << ',';
      first = false;
      if (std::holds_alternative<std::int64_t>(c)) {
        out_ << std::get<std::int64_t>(c);
      } else if (std::holds_alternative<double>(c)) {
        out_ << format(std::get<double>(c));
      } else {
        out_ << std::get<std::string>(c);
      }
    }
    out_ << '\n';
  }

  void close() { out_.close(); }

 private:
  std::ofstream out_;
};

}  // namespace ebdim
