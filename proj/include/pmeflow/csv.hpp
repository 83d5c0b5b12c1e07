#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>

namespace pmeflow::csv {

/// 17 significant digits, '.' separator; "nan" for missing entries.
std::string format(double value);

/// Writes comma-separated rows with LF endings.
class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void header(std::initializer_list<std::string_view> names);
  Writer& cell(double value);
  Writer& cell(long long value);
  Writer& cell(std::string_view text);
  void end_row();

 private:
  void separator();

  std::ostream& out_;
  bool row_started_ = false;
};

/// Opens `path` for writing, creating parent directories. Throws IoError.
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace pmeflow::csv
