#include "pcuss/artifact.hpp"

#include <openssl/evp.h>

#include <cstring>
#include <fstream>
#include <iterator>

#include "pcuss/error.hpp"

namespace pcuss::artifact {

namespace {

constexpr char kMagic[4] = {'P', 'C', 'U', 'S'};
constexpr std::uint64_t kMaxMaterialized = std::uint64_t{1} << 31;

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_.append(s);
  }
  void frac(const Fraction& f) {
    u64(f.num);
    u64(f.den);
  }
  void bits(const BitVec& b) {
    u64(b.size());
    const auto& w = b.words();
    for (std::size_t i = 0; i < (b.size() + 7) / 8; ++i) u8(static_cast<std::uint8_t>(w[i / 8] >> (8 * (i % 8))));
  }
  std::string finish(Tag tag) const {
    std::string file(kMagic, 4);
    file.push_back(static_cast<char>(kVersion));
    file.push_back(static_cast<char>(tag));
    for (int i = 0; i < 8; ++i) file.push_back(static_cast<char>(static_cast<std::uint64_t>(out_.size()) >> (8 * i)));
    return file + out_;
  }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}
  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(data_[pos_++]);
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{u8()} << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{u8()} << (8 * i);
    return v;
  }
  std::string str() {
    const std::uint32_t n = u32();
    need(n);
    std::string s(data_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  Fraction frac() {
    const std::uint64_t n = u64();
    const std::uint64_t d = u64();
    if (d == 0) throw CorruptionError("zero denominator");
    return Fraction(n, d);
  }
  BitVec bits() {
    const std::uint64_t n = u64();
    const std::uint64_t bytes = (n + 7) / 8;
    need(bytes);
    BitVec b(n);
    auto w = b.words_mut();
    for (std::uint64_t i = 0; i < bytes; ++i) {
      w[i / 8] |= std::uint64_t{static_cast<std::uint8_t>(data_[pos_ + i])} << (8 * (i % 8));
    }
    pos_ += bytes;
    if (n % 64 && !w.empty() && (w.back() >> (n % 64))) throw CorruptionError("bits past the declared length");
    return b;
  }
  std::uint64_t count(std::uint64_t max) {
    const std::uint64_t n = u64();
    if (n > max || n > data_.size()) throw CorruptionError("implausible element count");
    return n;
  }
  void done() const {
    if (pos_ != data_.size()) throw CorruptionError("trailing bytes after payload");
  }

 private:
  void need(std::uint64_t n) const {
    if (n > data_.size() - pos_) throw CorruptionError("truncated payload");
  }
  std::string_view data_;
  std::size_t pos_ = 0;
};

std::string_view payload(std::string_view bytes, Tag expected) {
  const Tag tag = peek_tag(bytes);
  if (tag != expected) throw FormatError("expected a " + to_string(expected) + " artifact, found " + to_string(tag));
  return bytes.substr(kHeaderSize);
}

void write_witness(Writer& w, const Witness& wt) {
  w.u8(static_cast<std::uint8_t>(wt.level));
  w.u64(wt.secret);
  w.u64(wt.u);
  w.u64(wt.g.size());
  for (std::uint64_t c : wt.g) w.u64(c);
  w.u64(wt.children.size());
  for (const Witness& c : wt.children) write_witness(w, c);
}

Witness read_witness(Reader& r, unsigned expected_level) {
  Witness wt;
  wt.level = r.u8();
  if (wt.level != expected_level) throw CorruptionError("witness level out of order");
  wt.secret = r.u64();
  wt.u = r.u64();
  const std::uint64_t ng = r.count(1u << 20);
  wt.g.resize(ng);
  for (auto& c : wt.g) c = r.u64();
  const std::uint64_t nc = r.count(1u << 20);
  if (wt.level == 0 && nc != 0) throw CorruptionError("level-0 witness with children");
  wt.children.reserve(nc);
  for (std::uint64_t i = 0; i < nc; ++i) wt.children.push_back(read_witness(r, wt.level - 1));
  return wt;
}

}  // namespace

std::string to_string(Tag tag) {
  switch (tag) {
    case Tag::HardCode: return "hardcode";
    case Tag::GoodCode: return "goodcode";
    case Tag::Encoding: return "encoding";
    case Tag::Proof: return "proof";
    case Tag::ErasedString: return "erased-string";
  }
  return "tag-" + std::to_string(static_cast<int>(tag));
}

std::string sha1_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha1(), nullptr) != 1) {
    throw Error("SHA-1 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 15]);
  }
  return out;
}

std::string git_blob_hash(std::string_view bytes) {
  std::string obj = "blob " + std::to_string(bytes.size());
  obj.push_back('\0');
  obj.append(bytes);
  return sha1_hex(obj);
}

std::string params_digest(const LevelParams& params) { return sha1_hex(params.describe()); }

Tag peek_tag(std::string_view bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("bad magic");
  if (bytes.size() < kHeaderSize) throw CorruptionError("truncated header");
  if (static_cast<std::uint8_t>(bytes[4]) != kVersion) {
    throw FormatError("unsupported version " + std::to_string(static_cast<std::uint8_t>(bytes[4])));
  }
  const auto tag = static_cast<std::uint8_t>(bytes[5]);
  if (tag < 1 || tag > 5) throw FormatError("unknown type tag " + std::to_string(tag));
  std::uint64_t len = 0;
  for (int i = 0; i < 8; ++i) len |= std::uint64_t{static_cast<std::uint8_t>(bytes[6 + i])} << (8 * i);
  if (len > bytes.size() - kHeaderSize) throw CorruptionError("truncated payload");
  if (len < bytes.size() - kHeaderSize) throw CorruptionError("trailing bytes after payload");
  return static_cast<Tag>(tag);
}

std::string write_hardcode(const HardCodeSpec& spec) {
  Writer w;
  w.u32(spec.k);
  w.u64(spec.seed);
  w.u32(spec.attempts);
  w.u64(spec.columns.size());
  for (std::uint64_t c : spec.columns) w.u64(c);
  w.frac(spec.dist_cert);
  w.frac(spec.dual_cert);
  w.frac(spec.ensemble_cert);
  return w.finish(Tag::HardCode);
}

HardCodeSpec read_hardcode(std::string_view bytes) {
  Reader r(payload(bytes, Tag::HardCode));
  HardCodeSpec s;
  s.k = r.u32();
  s.seed = r.u64();
  s.attempts = r.u32();
  const std::uint64_t nc = r.count(3 * 64);
  if (nc != 3ULL * s.k) throw CorruptionError("column count != 3k");
  s.columns.resize(nc);
  for (auto& c : s.columns) {
    c = r.u64();
    if (s.k < 16 && (c >> (4 * s.k))) throw CorruptionError("column has bits past 4k");
  }
  s.dist_cert = r.frac();
  s.dual_cert = r.frac();
  s.ensemble_cert = r.frac();
  r.done();
  return s;
}

std::string write_goodcode(const GoodCode& code) {
  Writer w;
  w.u64(code.k());
  w.u64(code.seed());
  w.u8(static_cast<std::uint8_t>(code.method()));
  w.frac(code.certified_distance());
  w.u32(code.attempts());
  w.u64(code.parity_rows().size());
  for (const BitVec& b : code.parity_rows()) w.bits(b);
  w.u64(code.outer_length());
  w.u64(code.inner_length());
  w.u64(code.inner_rows().size());
  for (const BitVec& b : code.inner_rows()) w.bits(b);
  w.u32(code.inner_distance());
  return w.finish(Tag::GoodCode);
}

GoodCode read_goodcode(std::string_view bytes) {
  Reader r(payload(bytes, Tag::GoodCode));
  const std::uint64_t k = r.u64();
  if (k > GoodCode::kMaxK) throw CorruptionError("secret length beyond the supported range");
  const std::uint64_t seed = r.u64();
  const std::uint8_t method = r.u8();
  if (method > static_cast<std::uint8_t>(CertMethod::ConcatenationBound)) throw CorruptionError("unknown method");
  const Fraction cert = r.frac();
  const unsigned attempts = r.u32();
  std::vector<BitVec> rows(r.count(1u << 16));
  for (auto& b : rows) b = r.bits();
  const std::uint64_t outer_n = r.u64();
  const std::uint64_t inner_n = r.u64();
  std::vector<BitVec> inner(r.count(1u << 16));
  for (auto& b : inner) b = r.bits();
  const unsigned inner_d = r.u32();
  r.done();
  return GoodCode::from_parts(k, seed, static_cast<CertMethod>(method), cert, attempts, std::move(rows), outer_n,
                              inner_n, std::move(inner), inner_d);
}

std::string write_encoding(const LevelParams& params, const Encoding& e) {
  Writer w;
  w.str(params_digest(params));
  w.u8(static_cast<std::uint8_t>(e.level));
  w.bits(e.w);
  w.bits(e.bits);
  w.u8(e.witness ? 1 : 0);
  if (e.witness) write_witness(w, *e.witness);
  return w.finish(Tag::Encoding);
}

EncodingArtifact read_encoding(std::string_view bytes) {
  Reader r(payload(bytes, Tag::Encoding));
  EncodingArtifact a;
  a.params_digest = r.str();
  a.encoding.level = r.u8();
  a.encoding.w = r.bits();
  a.encoding.bits = r.bits();
  const std::uint8_t has = r.u8();
  if (has > 1) throw CorruptionError("bad witness flag");
  if (has) a.encoding.witness = std::make_shared<const Witness>(read_witness(r, a.encoding.level));
  r.done();
  return a;
}

ProofArtifact make_proof_artifact(const LevelParams& params, const ProofString& proof) {
  if (proof.size() > kMaxMaterialized) throw CapabilityError("proof too long to materialize");
  ProofArtifact a;
  a.params_digest = params_digest(params);
  a.backend_id = proof.level() == 0 ? params.backend_id() : "pcuss/" + params.backend_id();
  a.level = proof.level();
  a.sections = proof.sections();
  a.bits = proof.materialize();
  return a;
}

std::string write_proof(const ProofArtifact& p) {
  Writer w;
  w.str(p.params_digest);
  w.str(p.backend_id);
  w.u8(static_cast<std::uint8_t>(p.level));
  w.u64(p.sections.size());
  for (const Section& s : p.sections) {
    w.str(s.name);
    w.u64(s.offset);
    w.u64(s.length);
  }
  w.bits(p.bits);
  return w.finish(Tag::Proof);
}

ProofArtifact read_proof(std::string_view bytes) {
  Reader r(payload(bytes, Tag::Proof));
  ProofArtifact p;
  p.params_digest = r.str();
  p.backend_id = r.str();
  p.level = r.u8();
  p.sections.resize(r.count(1u << 24));
  for (Section& s : p.sections) {
    s.name = r.str();
    s.offset = r.u64();
    s.length = r.u64();
  }
  p.bits = r.bits();
  r.done();
  for (const Section& s : p.sections) {
    if (s.offset > p.bits.size() || s.length > p.bits.size() - s.offset) {
      throw CorruptionError("section '" + s.name + "' exceeds the payload");
    }
  }
  return p;
}

std::string write_erased(const ErasedString& s) {
  if (s.bits.size() != s.erased.size()) throw InputError("bitmap length mismatch");
  Writer w;
  w.bits(s.bits);
  w.bits(s.erased);
  return w.finish(Tag::ErasedString);
}

ErasedString read_erased(std::string_view bytes) {
  Reader r(payload(bytes, Tag::ErasedString));
  ErasedString s;
  s.bits = r.bits();
  s.erased = r.bits();
  r.done();
  if (s.bits.size() != s.erased.size()) throw CorruptionError("bitmap length mismatch");
  return s;
}

void write_file(const std::string& path, std::string_view bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw InputError("cannot open '" + path + "' for writing");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw InputError("write to '" + path + "' failed");
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot open '" + path + "'");
  return std::string(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

}  // namespace pcuss::artifact
