#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pcuss {

// Packed bit string. Bit i lives in word i / 64 at position i % 64. Bits past
// size() in the last word are always zero.
class BitVec {
 public:
  BitVec() = default;
  explicit BitVec(std::size_t n, bool value = false);

  // Parses a string of '0'/'1' characters; character i becomes bit i.
  static BitVec from_string(std::string_view s);
  // The low `n` bits of `value`, least-significant first.
  static BitVec from_uint(std::uint64_t value, std::size_t n);

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  bool get(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
  bool operator[](std::size_t i) const { return get(i); }
  void set(std::size_t i, bool v = true) {
    const std::uint64_t mask = std::uint64_t{1} << (i & 63);
    if (v) {
      words_[i >> 6] |= mask;
    } else {
      words_[i >> 6] &= ~mask;
    }
  }
  void flip(std::size_t i) { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

  // Reads up to 64 bits starting at `offset` as an integer (bit offset -> bit 0).
  std::uint64_t get_bits(std::size_t offset, std::size_t count) const;
  void set_bits(std::size_t offset, std::size_t count, std::uint64_t value);

  void resize(std::size_t n);
  void clear() {
    words_.clear();
    size_ = 0;
  }
  void push_back(bool v);
  void append(const BitVec& other);
  void append_bits(std::uint64_t value, std::size_t count);

  BitVec slice(std::size_t offset, std::size_t length) const;
  BitVec repeated(std::size_t times) const;

  std::size_t popcount() const;
  bool none() const;
  BitVec& operator^=(const BitVec& other);
  friend BitVec operator^(BitVec a, const BitVec& b) { return a ^= b; }
  void fill(bool value);
  void complement();

  std::span<const std::uint64_t> words() const { return words_; }
  std::span<std::uint64_t> words_mut() { return words_; }

  std::string to_string() const;

  friend bool operator==(const BitVec& a, const BitVec& b) {
    return a.size_ == b.size_ && a.words_ == b.words_;
  }

 private:
  void trim();

  std::vector<std::uint64_t> words_;
  std::size_t size_ = 0;
};

std::size_t hamming_distance(const BitVec& a, const BitVec& b);

inline int parity64(std::uint64_t x) { return std::popcount(x) & 1; }

}  // namespace pcuss
