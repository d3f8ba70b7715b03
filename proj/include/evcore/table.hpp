#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "evcore/error.hpp"

namespace evcore {

// Minimal CSV emitter. Doubles use the shortest round-trip representation so
// identical runs produce byte-identical files; NaN is written as "nan".
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header) : out_(out) {
    columns_ = header.size();
    for (const auto& name : header) field(std::string_view(name));
    end_row();
  }

  void field(std::string_view text) {
    separator();
    out_ << text;
  }

  void field(const char* text) { field(std::string_view(text)); }
  void field(const std::string& text) { field(std::string_view(text)); }

  void field(double v) {
    separator();
    if (std::isnan(v)) {
      out_ << "nan";
      return;
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out_.write(buf, res.ptr - buf);
  }

  template <typename Int>
    requires std::is_integral_v<Int>
  void field(Int v) {
    separator();
    out_ << v;
  }

  void end_row() {
    if (in_row_ != columns_) {
      throw Error("CSV row has " + std::to_string(in_row_) + " fields, header has " +
                  std::to_string(columns_));
    }
    out_ << '\n';
    in_row_ = 0;
  }

 private:
  void separator() {
    if (in_row_++ > 0) out_ << ',';
  }

  std::ostream& out_;
  std::size_t columns_ = 0;
  std::size_t in_row_ = 0;
};

}  // namespace evcore
