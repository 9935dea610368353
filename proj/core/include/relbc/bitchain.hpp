#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "relbc/rng.hpp"

namespace relbc {

/// Fixed-length bit string; the payload type for every protocol value
/// (challenges, commitments, cross pairs, keys).
///
/// A chain of length l is the binary form of a number in [0, 2^l). Index 0
/// is the most significant bit in both textual forms: "01011010" and the
/// length-explicit hex form "5a/8". All chains mixed in one operation must
/// have the same length; mismatches throw LengthMismatch (never compare
/// false).
class BitChain {
 public:
  BitChain() = default;

  static BitChain zeros(std::uint32_t length);
  static BitChain ones(std::uint32_t length);
  /// length <= 64; bits above `length` must be zero.
  static BitChain from_uint(std::uint64_t value, std::uint32_t length);
  static BitChain random(std::uint32_t length, RngStream& rng);
  /// `count` pairwise-distinct chains, each marginally uniform over the
  /// admissible set. Throws Unsatisfiable when count > 2^length.
  static std::vector<BitChain> random_distinct(std::size_t count, std::uint32_t length, RngStream& rng);
  /// Accepts "01011010" (binary) or "5a/8" (hex with explicit bit length).
  static BitChain parse(std::string_view text);

  std::uint32_t length() const { return len_; }
  bool empty() const { return len_ == 0; }

  /// i = 0 addresses the most significant bit.
  bool bit(std::uint32_t i) const;

  /// Numeric value; requires length <= 64.
  std::uint64_t to_uint64() const;

  std::string to_binary_string() const;
  /// "5a/8": ceil(l/4) lowercase hex digits, then '/', then the bit length.
  std::string to_hex_string() const;

  BitChain operator^(const BitChain& o) const;
  BitChain& operator^=(const BitChain& o);

  bool operator==(const BitChain& o) const;
  bool operator!=(const BitChain& o) const { return !(*this == o); }

 private:
  void check_same_length(const BitChain& o) const;

  std::uint32_t len_ = 0;
  std::vector<std::uint64_t> words_;  // LSB-first limbs of the numeric value
};

using ChainPair = std::pair<BitChain, BitChain>;

}  // namespace relbc
