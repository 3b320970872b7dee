#pragma once

// Little-endian byte buffers and atomic file replacement.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace excitnet::io {

class ByteWriter {
 public:
  void put_u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void put_u32(std::uint32_t v);
  void put_u64(std::uint64_t v);
  void put_f32(float v);
  void put_f64(double v);
  void put_bytes(std::string_view bytes) { buf_.append(bytes); }
  void put_string(std::string_view s);  // u32 length + bytes

  const std::string& bytes() const { return buf_; }
  std::string take() { return std::move(buf_); }

 private:
  std::string buf_;
};

class ByteReader {
 public:
  explicit ByteReader(std::string_view data) : data_(data) {}

  std::uint8_t get_u8();
  std::uint32_t get_u32();
  std::uint64_t get_u64();
  float get_f32();
  double get_f64();
  std::string_view get_bytes(std::size_t n);
  std::string get_string();

  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  std::string_view data_;
  std::size_t pos_ = 0;
};

std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`, so a failed
/// write never leaves a partial file behind.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

}  // namespace excitnet::io
