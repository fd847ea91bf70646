#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <unordered_set>
#include <vector>

#include "pcuss/bitvec.hpp"

namespace pcuss {

// Read-only bit string that may be computed on demand.
class BitSource {
 public:
  virtual ~BitSource() = default;
  virtual std::size_t size() const = 0;
  virtual bool get(std::size_t i) const = 0;
  virtual std::uint64_t get_bits(std::size_t offset, std::size_t count) const;
  virtual bool erased(std::size_t) const { return false; }
  BitVec materialize() const;
};

using SourcePtr = std::shared_ptr<const BitSource>;

class VecSource : public BitSource {
 public:
  explicit VecSource(BitVec bits) : bits_(std::move(bits)) {}
  std::size_t size() const override { return bits_.size(); }
  bool get(std::size_t i) const override { return bits_.get(i); }
  std::uint64_t get_bits(std::size_t offset, std::size_t count) const override {
    return bits_.get_bits(offset, count);
  }
  const BitVec& bits() const { return bits_; }

 private:
  BitVec bits_;
};

class ConstSource : public BitSource {
 public:
  ConstSource(std::size_t n, bool value) : n_(n), value_(value) {}
  std::size_t size() const override { return n_; }
  bool get(std::size_t) const override { return value_; }
  std::uint64_t get_bits(std::size_t, std::size_t count) const override {
    if (!value_) return 0;
    return count >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << count) - 1;
  }

 private:
  std::size_t n_;
  bool value_;
};

// Uniformly random bits derived from a seed, evaluated lazily.
class RandomSource : public BitSource {
 public:
  RandomSource(std::size_t n, std::uint64_t seed) : n_(n), seed_(seed) {}
  std::size_t size() const override { return n_; }
  bool get(std::size_t i) const override;

 private:
  std::size_t n_;
  std::uint64_t seed_;
};

// `base` with each bit flipped independently with probability `rate`.
class FlipSource : public BitSource {
 public:
  FlipSource(SourcePtr base, double rate, std::uint64_t seed) : base_(std::move(base)), rate_(rate), seed_(seed) {}
  std::size_t size() const override { return base_->size(); }
  bool get(std::size_t i) const override;

 private:
  SourcePtr base_;
  double rate_;
  std::uint64_t seed_;
};

// Every position is erased.
class ErasedSource : public BitSource {
 public:
  explicit ErasedSource(std::size_t n) : n_(n) {}
  std::size_t size() const override { return n_; }
  bool get(std::size_t) const override { return false; }
  bool erased(std::size_t) const override { return true; }

 private:
  std::size_t n_;
};

class SliceSource : public BitSource {
 public:
  SliceSource(SourcePtr base, std::size_t offset, std::size_t length);
  std::size_t size() const override { return len_; }
  bool get(std::size_t i) const override { return base_->get(off_ + i); }
  std::uint64_t get_bits(std::size_t offset, std::size_t count) const override {
    return base_->get_bits(off_ + offset, count);
  }
  bool erased(std::size_t i) const override { return base_->erased(off_ + i); }

 private:
  SourcePtr base_;
  std::size_t off_;
  std::size_t len_;
};

// Concatenation; a part may appear several times.
class ConcatSource : public BitSource {
 public:
  explicit ConcatSource(std::vector<SourcePtr> parts);
  std::size_t size() const override { return starts_.back(); }
  bool get(std::size_t i) const override;
  std::uint64_t get_bits(std::size_t offset, std::size_t count) const override;
  bool erased(std::size_t i) const override;

 private:
  std::size_t locate(std::size_t i) const;
  std::vector<SourcePtr> parts_;
  std::vector<std::size_t> starts_;
};

// Query access to a string. nullopt marks an erased position.
class Oracle {
 public:
  virtual ~Oracle() = default;
  virtual std::size_t size() const = 0;
  virtual std::optional<bool> query(std::size_t i) = 0;
  // Reads len bits; an erased position raises InputError.
  virtual BitVec read(std::size_t offset, std::size_t len);
  bool bit(std::size_t i);
};

// Oracle over a BitSource or another oracle that records which positions
// were read. Not safe for concurrent use.
class QueryOracle : public Oracle {
 public:
  explicit QueryOracle(SourcePtr source);
  explicit QueryOracle(BitVec bits);
  // Counts reads that are forwarded to `inner`, which must outlive this.
  explicit QueryOracle(Oracle& inner);
  explicit QueryOracle(QueryOracle& inner) : QueryOracle(static_cast<Oracle&>(inner)) {}

  std::size_t size() const override { return size_; }
  std::optional<bool> query(std::size_t i) override;
  BitVec read(std::size_t offset, std::size_t len) override;

  // Distinct positions read so far.
  std::size_t distinct() const { return distinct_; }
  // All reads, counting repeats.
  std::size_t total() const { return total_; }
  bool touched(std::size_t i) const;
  // Positions in order of first read; only recorded after enable_log().
  const std::vector<std::size_t>& log() const { return log_; }
  void enable_log() { logging_ = true; }
  void reset();

 private:
  void mark(std::size_t offset, std::size_t len);
  void check_range(std::size_t offset, std::size_t len) const;

  SourcePtr source_;
  Oracle* inner_ = nullptr;
  std::size_t size_ = 0;
  std::size_t distinct_ = 0;
  std::size_t total_ = 0;
  bool logging_ = false;
  std::vector<std::size_t> log_;
  std::vector<std::uint64_t> dense_;
  std::unordered_set<std::size_t> sparse_;
};

// Window [offset, offset + length) of a parent oracle.
class SubOracle : public Oracle {
 public:
  SubOracle(Oracle& parent, std::size_t offset, std::size_t length);
  std::size_t size() const override { return len_; }
  std::optional<bool> query(std::size_t i) override;
  BitVec read(std::size_t offset, std::size_t len) override;

 private:
  Oracle& parent_;
  std::size_t off_;
  std::size_t len_;
};

// Concatenation of oracle segments; the same segment may repeat.
class JoinedOracle : public Oracle {
 public:
  void append(Oracle& o) { append(o, 0, o.size()); }
  void append(Oracle& o, std::size_t offset, std::size_t length);
  std::size_t size() const override { return starts_.empty() ? 0 : starts_.back(); }
  std::optional<bool> query(std::size_t i) override;
  BitVec read(std::size_t offset, std::size_t len) override;

 private:
  struct Segment {
    Oracle* oracle;
    std::size_t offset;
    std::size_t length;
  };
  std::size_t locate(std::size_t i) const;
  std::vector<Segment> segs_;
  std::vector<std::size_t> starts_;
};

// Empty oracle used where a value string is absent.
class EmptyOracle : public Oracle {
 public:
  std::size_t size() const override { return 0; }
  std::optional<bool> query(std::size_t i) override;
};

}  // namespace pcuss
