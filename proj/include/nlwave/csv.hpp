#pragma once

// Minimal CSV emission with shortest round-trip formatting of doubles, so
// that parsing a written value gives back the identical binary double.

#include <charconv>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>

namespace nlwave {

inline std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

class CsvWriter {
 public:
  explicit CsvWriter(std::initializer_list<std::string_view> header) {
    for (auto h : header) field(h);
    end_row();
  }

  CsvWriter& field(std::string_view s) {
    sep();
    out_.append(s);
    return *this;
  }
  CsvWriter& field(double x) { return field(std::string_view(format_double(x))); }
  CsvWriter& field(std::int64_t x) { return field(std::string_view(std::to_string(x))); }
  CsvWriter& field(int x) { return field(static_cast<std::int64_t>(x)); }
  CsvWriter& field(bool b) { return field(std::string_view(b ? "true" : "false")); }
  CsvWriter& field(const std::optional<double>& x) { return x ? field(*x) : field(std::string_view()); }

  void end_row() {
    out_.push_back('\n');
    fresh_ = true;
  }

  const std::string& str() const noexcept { return out_; }

 private:
  void sep() {
    if (!fresh_) out_.push_back(',');
    fresh_ = false;
  }

  std::string out_;
  bool fresh_ = true;
};

}  // namespace nlwave
