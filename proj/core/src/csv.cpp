#include "semeq/csv.hpp"

#include <zlib.h>

#include <charconv>
#include <cstring>

#include "semeq/errors.hpp"

namespace semeq {

std::string format_double(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header,
                     const std::vector<std::string>& comments)
    : columns_(header.size()) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  out_.open(path);
  if (!out_) throw FileError("cannot write file: " + path.string());
  for (const std::string& comment : comments) {
    out_ << "# " << comment << '\n';
  }
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i > 0) out_ << ',';
    out_ << header[i];
  }
  out_ << '\n';
}

void CsvWriter::write_row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) {
    throw UsageError("CsvWriter: row width does not match the header");
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) out_ << ',';
    out_ << cells[i];
  }
  out_ << '\n';
}

GzipTextFile::~GzipTextFile() {
  if (!closed_) {
    try {
      close();
    } catch (...) {
      // destructor must not throw; an explicit close() reports errors
    }
  }
}

void GzipTextFile::close() {
  if (closed_) return;
  closed_ = true;

  z_stream stream{};
  // windowBits 15+16 selects a gzip wrapper; with no explicit header zlib
  // writes mtime 0, which keeps reruns byte-identical.
  if (deflateInit2(&stream, Z_DEFAULT_COMPRESSION, Z_DEFLATED, 15 + 16, 8,
                   Z_DEFAULT_STRATEGY) != Z_OK) {
    throw Error("gzip: deflateInit2 failed");
  }
  std::string compressed;
  compressed.resize(deflateBound(&stream, buffer_.size()) + 32);
  stream.next_in = reinterpret_cast<Bytef*>(buffer_.data());
  stream.avail_in = static_cast<uInt>(buffer_.size());
  stream.next_out = reinterpret_cast<Bytef*>(compressed.data());
  stream.avail_out = static_cast<uInt>(compressed.size());
  const int rc = deflate(&stream, Z_FINISH);
  if (rc != Z_STREAM_END) {
    deflateEnd(&stream);
    throw Error("gzip: deflate failed with code " + std::to_string(rc));
  }
  compressed.resize(stream.total_out);
  deflateEnd(&stream);

  if (path_.has_parent_path()) {
    std::filesystem::create_directories(path_.parent_path());
  }
  std::ofstream out(path_, std::ios::binary);
  if (!out) throw FileError("cannot write file: " + path_.string());
  out.write(compressed.data(), static_cast<std::streamsize>(compressed.size()));
}

std::string read_gzip_file(const std::filesystem::path& path) {
  gzFile file = gzopen(path.string().c_str(), "rb");
  if (file == nullptr) throw FileError("cannot open gzip file: " + path.string());
  std::string content;
  char chunk[1 << 15];
  int read;
  while ((read = gzread(file, chunk, sizeof(chunk))) > 0) {
    content.append(chunk, static_cast<std::size_t>(read));
  }
  gzclose(file);
  return content;
}

}  // namespace semeq
