#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "sagenet/common.hpp"

namespace sagenet::detail {

template <typename T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::array<unsigned char, sizeof(T)> rev{};
    for (std::size_t i = 0; i < sizeof(T); ++i) rev[i] = bytes[sizeof(T) - 1 - i];
    return std::bit_cast<T>(rev);
  } else {
    return v;
  }
}

template <typename T>
void put(std::ostream& os, T v) {
  v = to_little(v);
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

/// Reads little-endian values and reports the byte offset on failure.
class Reader {
 public:
  Reader(std::istream& is, std::string what) : is_(is), what_(std::move(what)) {}

  template <typename T>
  T get() {
    T v;
    read(&v, sizeof(T));
    return to_little(v);
  }

  void read(void* dst, std::size_t n) {
    is_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(is_.gcount()) != n) fail("truncated data");
    offset_ += n;
  }

  void expect_magic(std::string_view magic) {
    std::string got(magic.size(), '\0');
    read(got.data(), got.size());
    if (got != magic) {
      offset_ = 0;
      fail("bad magic bytes (expected '" + std::string(magic) + "')");
    }
  }

  void expect_end() {
    if (is_.peek() != std::char_traits<char>::eof()) fail("trailing bytes after payload");
  }

  /// Reads `count` values of T one at a time, so a corrupted count fails
  /// as truncation instead of a giant allocation.
  template <typename T, typename Out = T>
  std::vector<Out> get_array(std::uint64_t count) {
    std::vector<Out> out;
    out.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(count, 1u << 20)));
    for (std::uint64_t i = 0; i < count; ++i) out.push_back(static_cast<Out>(get<T>()));
    return out;
  }

  /// rows * cols, failing on overflow.
  std::uint64_t checked_product(std::uint64_t rows, std::uint64_t cols) const {
    if (cols != 0 && rows > std::numeric_limits<std::uint64_t>::max() / cols) fail("header sizes overflow");
    return rows * cols;
  }

  std::uint64_t offset() const { return offset_; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(what_ + ": " + msg + " at byte offset " + std::to_string(offset_));
  }

 private:
  std::istream& is_;
  std::string what_;
  std::uint64_t offset_ = 0;
};

}  // namespace sagenet::detail
