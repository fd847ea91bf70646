#include "pcuss/bitvec.hpp"

#include <algorithm>

#include "pcuss/error.hpp"

namespace pcuss {

BitVec::BitVec(std::size_t n, bool value) : words_((n + 63) / 64, value ? ~std::uint64_t{0} : 0), size_(n) {
  trim();
}

BitVec BitVec::from_string(std::string_view s) {
  BitVec v(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '1') {
      v.set(i);
    } else if (s[i] != '0') {
      throw InputError("bit string may only contain '0' and '1'");
    }
  }
  return v;
}

BitVec BitVec::from_uint(std::uint64_t value, std::size_t n) {
  BitVec v(n);
  v.set_bits(0, std::min<std::size_t>(n, 64), value);
  return v;
}

std::uint64_t BitVec::get_bits(std::size_t offset, std::size_t count) const {
  if (count == 0) return 0;
  const std::size_t w = offset >> 6;
  const unsigned s = offset & 63;
  std::uint64_t out = words_[w] >> s;
  if (s != 0 && s + count > 64) out |= words_[w + 1] << (64 - s);
  if (count < 64) out &= (std::uint64_t{1} << count) - 1;
  return out;
}

void BitVec::set_bits(std::size_t offset, std::size_t count, std::uint64_t value) {
  if (count == 0) return;
  if (count < 64) value &= (std::uint64_t{1} << count) - 1;
  const std::size_t w = offset >> 6;
  const unsigned s = offset & 63;
  const std::uint64_t mask = count == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << count) - 1;
  words_[w] = (words_[w] & ~(mask << s)) | (value << s);
  if (s != 0 && s + count > 64) {
    const unsigned spill = 64 - s;
    const std::uint64_t hi = mask >> spill;
    words_[w + 1] = (words_[w + 1] & ~hi) | (value >> spill);
  }
}

void BitVec::resize(std::size_t n) {
  words_.resize((n + 63) / 64, 0);
  size_ = n;
  trim();
}

void BitVec::push_back(bool v) {
  if ((size_ & 63) == 0) words_.push_back(0);
  ++size_;
  if (v) set(size_ - 1);
}

void BitVec::append_bits(std::uint64_t value, std::size_t count) {
  const std::size_t old = size_;
  resize(size_ + count);
  set_bits(old, count, value);
}

void BitVec::append(const BitVec& other) {
  const std::size_t old = size_;
  resize(size_ + other.size_);
  if ((old & 63) == 0) {
    std::copy(other.words_.begin(), other.words_.end(), words_.begin() + static_cast<std::ptrdiff_t>(old >> 6));
    return;
  }
  for (std::size_t i = 0; i < other.size_; i += 64) {
    const std::size_t c = std::min<std::size_t>(64, other.size_ - i);
    set_bits(old + i, c, other.get_bits(i, c));
  }
}

BitVec BitVec::slice(std::size_t offset, std::size_t length) const {
  if (offset + length > size_) throw InputError("slice out of range");
  BitVec out(length);
  for (std::size_t i = 0; i < length; i += 64) {
    const std::size_t c = std::min<std::size_t>(64, length - i);
    out.words_[i >> 6] = get_bits(offset + i, c);
  }
  return out;
}

BitVec BitVec::repeated(std::size_t times) const {
  BitVec out;
  for (std::size_t i = 0; i < times; ++i) out.append(*this);
  return out;
}

std::size_t BitVec::popcount() const {
  std::size_t c = 0;
  for (std::uint64_t w : words_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

bool BitVec::none() const {
  return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
}

BitVec& BitVec::operator^=(const BitVec& other) {
  if (other.size_ != size_) throw InputError("xor of bit strings with different lengths");
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= other.words_[i];
  return *this;
}

void BitVec::fill(bool value) {
  std::fill(words_.begin(), words_.end(), value ? ~std::uint64_t{0} : 0);
  trim();
}

void BitVec::complement() {
  for (auto& w : words_) w = ~w;
  trim();
}

std::string BitVec::to_string() const {
  std::string s(size_, '0');
  for (std::size_t i = 0; i < size_; ++i) {
    if (get(i)) s[i] = '1';
  }
  return s;
}

void BitVec::trim() {
  if (size_ & 63) words_.back() &= (std::uint64_t{1} << (size_ & 63)) - 1;
}

std::size_t hamming_distance(const BitVec& a, const BitVec& b) {
  if (a.size() != b.size()) throw InputError("hamming distance of bit strings with different lengths");
  std::size_t d = 0;
  auto wa = a.words();
  auto wb = b.words();
  for (std::size_t i = 0; i < wa.size(); ++i) d += static_cast<std::size_t>(std::popcount(wa[i] ^ wb[i]));
  return d;
}

}  // namespace pcuss
