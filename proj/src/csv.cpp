#include "pmeflow/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "pmeflow/error.hpp"

namespace pmeflow::csv {

std::string format(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void Writer::separator() {
  if (row_started_) out_ << ',';
  row_started_ = true;
}

void Writer::header(std::initializer_list<std::string_view> names) {
  for (auto n : names) cell(n);
  end_row();
}

Writer& Writer::cell(double value) {
  separator();
  out_ << format(value);
  return *this;
}

Writer& Writer::cell(long long value) {
  separator();
  out_ << value;
  return *this;
}

Writer& Writer::cell(std::string_view text) {
  separator();
  if (text.find_first_of(",\"\n") == std::string_view::npos) {
    out_ << text;
    return *this;
  }
  out_ << '"';
  for (char c : text) {
    if (c == '"') out_ << '"';
    out_ << c;
  }
  out_ << '"';
  return *this;
}

void Writer::end_row() {
  out_ << '\n';
  row_started_ = false;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace pmeflow::csv
