// Little-endian binary stream helpers shared by the cube and compressed
// scene containers.
#pragma once

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>

#include "hsu/errors.hpp"

namespace hsu::io {

class Writer {
 public:
  explicit Writer(std::ostream& out, std::string path) : out_(out), path_(std::move(path)) {}

  void bytes(const void* data, std::size_t n) {
    out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
    require(out_.good(), errc::io_error, "write failed: " + path_);
  }
  void u16(std::uint16_t v) {
    unsigned char b[2] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8)};
    bytes(b, 2);
  }
  void u32(std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    bytes(b, 4);
  }
  void f64(double d) {
    const auto v = std::bit_cast<std::uint64_t>(d);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    bytes(b, 8);
  }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    if (!s.empty()) bytes(s.data(), s.size());
  }

 private:
  std::ostream& out_;
  std::string path_;
};

class Reader {
 public:
  explicit Reader(std::istream& in, std::string path) : in_(in), path_(std::move(path)) {}

  void bytes(void* data, std::size_t n) {
    in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) {
      throw Error(errc::truncated_file, path_ + " truncated at byte offset " +
                                            std::to_string(offset_ + static_cast<std::size_t>(
                                                                         in_.gcount())));
    }
    offset_ += n;
  }
  std::uint16_t u16() {
    unsigned char b[2];
    bytes(b, 2);
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
  }
  std::uint32_t u32() {
    unsigned char b[4];
    bytes(b, 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
  }
  double f64() {
    unsigned char b[8];
    bytes(b, 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return std::bit_cast<double>(v);
  }
  std::string str() {
    const std::uint32_t n = u32();
    std::string s(n, '\0');
    if (n) bytes(s.data(), n);
    return s;
  }
  bool at_eof() { return in_.peek() == std::istream::traits_type::eof(); }
  std::size_t offset() const { return offset_; }

 private:
  std::istream& in_;
  std::string path_;
  std::size_t offset_ = 0;
};

}  // namespace hsu::io
