#include "okdroplet/io.hpp"

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace okd {

std::string library_version() {
#ifdef OKDROPLET_VERSION
  return std::string("okdroplet ") + OKDROPLET_VERSION;
#else
  return "okdroplet unknown";
#endif
}

std::string content_hash(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string format_double(double x) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) fail(ErrorKind::Config, "cannot format number");
  return std::string(buf, end);
}

void CsvTable::add_row(const std::vector<std::string>& row) {
  if (row.size() != header_.size()) fail(ErrorKind::Config, "csv row width does not match the header");
  rows_.push_back(row);
}

std::string CsvTable::str() const {
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& r) {
    for (size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << csv_field(r[i]);
    os << "\r\n";
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return os.str();
}

namespace {

void ensure_parent(const std::string& path) {
  std::filesystem::path p(path);
  if (!p.has_parent_path()) return;
  std::error_code ec;
  std::filesystem::create_directories(p.parent_path(), ec);
  if (ec) fail(ErrorKind::Config, "cannot create directory " + p.parent_path().string() + ": " + ec.message());
}

void put(const std::string& path, const std::string& text, std::ios::openmode mode) {
  ensure_parent(path);
  std::ofstream f(path, mode | std::ios::binary);
  if (!f) fail(ErrorKind::Config, "cannot open " + path + " for writing");
  f << text;
  if (!f) fail(ErrorKind::Config, "write to " + path + " failed");
}

}  // namespace

void write_text_file(const std::string& path, const std::string& text) { put(path, text, std::ios::trunc); }

void append_text_file(const std::string& path, const std::string& text) { put(path, text, std::ios::app); }

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::Config, "cannot read " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

std::string resolve_out_dir(const std::string& flag, const std::string& config_value) {
  if (const char* env = std::getenv("OKDROPLET_OUT"); env && *env) return env;
  if (!flag.empty()) return flag;
  return config_value;
}

}  // namespace okd
