#include "pcuss/oracle.hpp"

#include <algorithm>
#include <bit>

#include "pcuss/error.hpp"
#include "pcuss/rng.hpp"

namespace pcuss {

namespace {

// Above this size the touched set is kept in a hash set.
constexpr std::size_t kDenseLimit = std::size_t{1} << 28;

}  // namespace

std::uint64_t BitSource::get_bits(std::size_t offset, std::size_t count) const {
  std::uint64_t out = 0;
  for (std::size_t i = 0; i < count; ++i) {
    if (get(offset + i)) out |= std::uint64_t{1} << i;
  }
  return out;
}

BitVec BitSource::materialize() const {
  const std::size_t n = size();
  BitVec out(n);
  for (std::size_t i = 0; i < n; i += 64) {
    const std::size_t c = std::min<std::size_t>(64, n - i);
    out.set_bits(i, c, get_bits(i, c));
  }
  return out;
}

bool RandomSource::get(std::size_t i) const { return hash_bit(seed_, i); }

bool FlipSource::get(std::size_t i) const { return base_->get(i) ^ (hash_unit(seed_, i) < rate_); }

SliceSource::SliceSource(SourcePtr base, std::size_t offset, std::size_t length)
    : base_(std::move(base)), off_(offset), len_(length) {
  if (offset + length > base_->size()) throw InputError("slice source out of range");
}

ConcatSource::ConcatSource(std::vector<SourcePtr> parts) : parts_(std::move(parts)) {
  starts_.push_back(0);
  for (const auto& p : parts_) starts_.push_back(starts_.back() + p->size());
}

std::size_t ConcatSource::locate(std::size_t i) const {
  auto it = std::upper_bound(starts_.begin(), starts_.end(), i);
  return static_cast<std::size_t>(it - starts_.begin()) - 1;
}

bool ConcatSource::get(std::size_t i) const {
  const std::size_t p = locate(i);
  return parts_[p]->get(i - starts_[p]);
}

bool ConcatSource::erased(std::size_t i) const {
  const std::size_t p = locate(i);
  return parts_[p]->erased(i - starts_[p]);
}

std::uint64_t ConcatSource::get_bits(std::size_t offset, std::size_t count) const {
  std::uint64_t out = 0;
  std::size_t done = 0;
  while (done < count) {
    const std::size_t pos = offset + done;
    const std::size_t p = locate(pos);
    const std::size_t local = pos - starts_[p];
    const std::size_t take = std::min(count - done, parts_[p]->size() - local);
    out |= parts_[p]->get_bits(local, take) << done;
    done += take;
  }
  return out;
}

BitVec Oracle::read(std::size_t offset, std::size_t len) {
  BitVec out(len);
  for (std::size_t i = 0; i < len; ++i) out.set(i, bit(offset + i));
  return out;
}

bool Oracle::bit(std::size_t i) {
  const auto b = query(i);
  if (!b) throw InputError("read of an erased position");
  return *b;
}

QueryOracle::QueryOracle(SourcePtr source) : source_(std::move(source)), size_(source_->size()) {}

QueryOracle::QueryOracle(BitVec bits) : QueryOracle(std::make_shared<const VecSource>(std::move(bits))) {}

QueryOracle::QueryOracle(Oracle& inner) : inner_(&inner), size_(inner.size()) {}

void QueryOracle::check_range(std::size_t offset, std::size_t len) const {
  if (offset > size_ || len > size_ - offset) throw InputError("oracle query out of range");
}

bool QueryOracle::touched(std::size_t i) const {
  if (size_ <= kDenseLimit) return !dense_.empty() && ((dense_[i >> 6] >> (i & 63)) & 1);
  return sparse_.count(i) != 0;
}

void QueryOracle::mark(std::size_t offset, std::size_t len) {
  total_ += len;
  if (size_ <= kDenseLimit) {
    if (dense_.empty()) dense_.assign((size_ + 63) / 64, 0);
    std::size_t i = offset;
    const std::size_t end = offset + len;
    while (i < end) {
      const std::size_t w = i >> 6;
      const unsigned s = i & 63;
      const std::size_t c = std::min<std::size_t>(64 - s, end - i);
      const std::uint64_t mask = (c == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << c) - 1)) << s;
      std::uint64_t fresh = mask & ~dense_[w];
      if (fresh) {
        dense_[w] |= fresh;
        distinct_ += static_cast<std::size_t>(std::popcount(fresh));
        if (logging_) {
          while (fresh) {
            log_.push_back((w << 6) + static_cast<std::size_t>(std::countr_zero(fresh)));
            fresh &= fresh - 1;
          }
        }
      }
      i += c;
    }
    return;
  }
  for (std::size_t i = offset; i < offset + len; ++i) {
    if (sparse_.insert(i).second) {
      ++distinct_;
      if (logging_) log_.push_back(i);
    }
  }
}

std::optional<bool> QueryOracle::query(std::size_t i) {
  check_range(i, 1);
  mark(i, 1);
  if (inner_) return inner_->query(i);
  if (source_->erased(i)) return std::nullopt;
  return source_->get(i);
}

BitVec QueryOracle::read(std::size_t offset, std::size_t len) {
  check_range(offset, len);
  mark(offset, len);
  if (inner_) return inner_->read(offset, len);
  BitVec out(len);
  for (std::size_t i = 0; i < len; i += 64) {
    const std::size_t c = std::min<std::size_t>(64, len - i);
    for (std::size_t j = 0; j < c; ++j) {
      if (source_->erased(offset + i + j)) throw InputError("read of an erased position");
    }
    out.set_bits(i, c, source_->get_bits(offset + i, c));
  }
  return out;
}

void QueryOracle::reset() {
  distinct_ = 0;
  total_ = 0;
  log_.clear();
  dense_.clear();
  sparse_.clear();
}

SubOracle::SubOracle(Oracle& parent, std::size_t offset, std::size_t length)
    : parent_(parent), off_(offset), len_(length) {
  if (offset > parent.size() || length > parent.size() - offset) throw InputError("sub-oracle out of range");
}

std::optional<bool> SubOracle::query(std::size_t i) {
  if (i >= len_) throw InputError("oracle query out of range");
  return parent_.query(off_ + i);
}

BitVec SubOracle::read(std::size_t offset, std::size_t len) {
  if (offset > len_ || len > len_ - offset) throw InputError("oracle query out of range");
  return parent_.read(off_ + offset, len);
}

void JoinedOracle::append(Oracle& o, std::size_t offset, std::size_t length) {
  if (offset > o.size() || length > o.size() - offset) throw InputError("joined segment out of range");
  if (starts_.empty()) starts_.push_back(0);
  segs_.push_back({&o, offset, length});
  starts_.push_back(starts_.back() + length);
}

std::size_t JoinedOracle::locate(std::size_t i) const {
  auto it = std::upper_bound(starts_.begin(), starts_.end(), i);
  return static_cast<std::size_t>(it - starts_.begin()) - 1;
}

std::optional<bool> JoinedOracle::query(std::size_t i) {
  if (i >= size()) throw InputError("oracle query out of range");
  const std::size_t s = locate(i);
  return segs_[s].oracle->query(segs_[s].offset + i - starts_[s]);
}

BitVec JoinedOracle::read(std::size_t offset, std::size_t len) {
  if (offset > size() || len > size() - offset) throw InputError("oracle query out of range");
  BitVec out;
  std::size_t done = 0;
  while (done < len) {
    const std::size_t pos = offset + done;
    const std::size_t s = locate(pos);
    const std::size_t local = pos - starts_[s];
    const std::size_t take = std::min(len - done, segs_[s].length - local);
    out.append(segs_[s].oracle->read(segs_[s].offset + local, take));
    done += take;
  }
  return out;
}

std::optional<bool> EmptyOracle::query(std::size_t) { throw InputError("query to an empty oracle"); }

}  // namespace pcuss
