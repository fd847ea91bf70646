#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pcuss/basecode.hpp"
#include "pcuss/ensemble.hpp"
#include "pcuss/goodcode.hpp"

namespace pcuss::artifact {

// File layout: "PCUS", version byte, type tag byte, u64 payload length
// (little endian), payload.
enum class Tag : std::uint8_t {
  HardCode = 1,
  GoodCode = 2,
  Encoding = 3,
  Proof = 4,
  ErasedString = 5,
};

inline constexpr std::uint8_t kVersion = 1;
inline constexpr std::size_t kHeaderSize = 14;

std::string to_string(Tag tag);

std::string sha1_hex(std::string_view bytes);
// SHA-1 of "blob <len>\0" + bytes, as git computes object ids.
std::string git_blob_hash(std::string_view bytes);
std::string params_digest(const LevelParams& params);

// Tag of a well-formed header; raises FormatError or CorruptionError.
Tag peek_tag(std::string_view bytes);

std::string write_hardcode(const HardCodeSpec& spec);
HardCodeSpec read_hardcode(std::string_view bytes);

std::string write_goodcode(const GoodCode& code);
GoodCode read_goodcode(std::string_view bytes);

struct EncodingArtifact {
  std::string params_digest;
  Encoding encoding;
};

std::string write_encoding(const LevelParams& params, const Encoding& e);
EncodingArtifact read_encoding(std::string_view bytes);

struct ProofArtifact {
  std::string params_digest;
  std::string backend_id;
  unsigned level = 0;
  std::vector<Section> sections;
  BitVec bits;
};

// Materializes the proof; raises CapabilityError above 2^31 bits.
ProofArtifact make_proof_artifact(const LevelParams& params, const ProofString& proof);
std::string write_proof(const ProofArtifact& proof);
ProofArtifact read_proof(std::string_view bytes);

struct ErasedString {
  BitVec bits;
  // Set bits mark erased positions.
  BitVec erased;
};

std::string write_erased(const ErasedString& s);
ErasedString read_erased(std::string_view bytes);

void write_file(const std::string& path, std::string_view bytes);
std::string read_file(const std::string& path);

}  // namespace pcuss::artifact
