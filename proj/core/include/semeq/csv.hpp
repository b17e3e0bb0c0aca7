#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace semeq {

/// Shortest decimal rendering that parses back to the same double.
std::string format_double(double value);

/// Plain CSV file with optional leading '#' comment lines (provenance) and a
/// fixed header row.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header,
            const std::vector<std::string>& comments = {});

  void write_row(const std::vector<std::string>& cells);

 private:
  std::ofstream out_;
  std::size_t columns_;
};

/// Collects text and writes it as a single-member gzip file on close. The
/// gzip header carries a zero timestamp so identical content produces
/// identical bytes.
class GzipTextFile {
 public:
  explicit GzipTextFile(std::filesystem::path path) : path_(std::move(path)) {}
  ~GzipTextFile();

  void append(std::string_view text) { buffer_.append(text); }
  void close();

 private:
  std::filesystem::path path_;
  std::string buffer_;
  bool closed_ = false;
};

/// Reads a whole gzip file back into a string (diagnostics and tests).
std::string read_gzip_file(const std::filesystem::path& path);

}  // namespace semeq
