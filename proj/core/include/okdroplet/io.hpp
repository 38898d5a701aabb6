#pragma once

#include "okdroplet/common.hpp"

#include <string>
#include <vector>

namespace okd {

constexpr int schema_version = 1;

std::string library_version();

// 64-bit FNV-1a as 16 hex digits
std::string content_hash(const std::string& text);

struct Provenance {
  std::string version = library_version();
  std::string config_hash;
  std::vector<int> resolutions;
  unsigned seed = 0;
};

// RFC-4180 field quoting
std::string csv_field(const std::string& s);
// shortest text that reads back to the same double
std::string format_double(double x);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  void add_row(const std::vector<std::string>& row);
  std::string str() const;
  size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

// Creates parent directories. Failures raise Config errors.
void write_text_file(const std::string& path, const std::string& text);
void append_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

// OKDROPLET_OUT wins over the flag; the flag over the config value.
std::string resolve_out_dir(const std::string& flag, const std::string& config_value);

}  // namespace okd
