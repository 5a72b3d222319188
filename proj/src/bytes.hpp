#pragma once

// Little-endian encoding helpers for the binary file formats.

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>
#include <vector>

#include "scsnet/error.hpp"

namespace scsnet::bytes {

class Writer {
 public:
  void magic(std::string_view tag) { out_.insert(out_.end(), tag.begin(), tag.end()); }
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) { put(v, 2); }
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u64(s.size());
    out_.insert(out_.end(), s.begin(), s.end());
  }

  std::vector<std::uint8_t>& buffer() { return out_; }

 private:
  void put(std::uint64_t v, int width) {
    for (int i = 0; i < width; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  Reader(const std::vector<std::uint8_t>& in, const char* module) : in_(in), module_(module) {}

  void magic(std::string_view tag) {
    need(tag.size(), "file header");
    if (std::memcmp(in_.data() + pos_, tag.data(), tag.size()) != 0) {
      throw FormatError(module_, "bad magic, expected \"" + std::string(tag) + "\"", pos_);
    }
    pos_ += tag.size();
  }
  std::uint8_t u8() { return static_cast<std::uint8_t>(get(1, "u8")); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(get(2, "u16")); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4, "u32")); }
  std::uint64_t u64() { return get(8, "u64"); }
  float f32() { return std::bit_cast<float>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const std::uint64_t n = u64();
    need(n, "string");
    std::string s(reinterpret_cast<const char*>(in_.data() + pos_), n);
    pos_ += n;
    return s;
  }

  /// Throws unless `count` more bytes are available.
  void need(std::uint64_t count, const char* what) const {
    if (count > in_.size() - pos_) {
      throw FormatError(module_, std::string("truncated ") + what + ": need " + std::to_string(count) +
                                     " bytes, " + std::to_string(in_.size() - pos_) + " left",
                        in_.size());
    }
  }
  void expect_end() const {
    if (pos_ != in_.size()) throw FormatError(module_, "trailing bytes after payload", pos_);
  }
  std::size_t position() const { return pos_; }
  const char* module() const { return module_; }

 private:
  std::uint64_t get(int width, const char* what) {
    need(static_cast<std::uint64_t>(width), what);
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(in_[pos_ + i]) << (8 * i);
    pos_ += static_cast<std::size_t>(width);
    return v;
  }

  const std::vector<std::uint8_t>& in_;
  const char* module_;
  std::size_t pos_ = 0;
};

}  // namespace scsnet::bytes
