#include "relbc/bitchain.hpp"

#include <algorithm>
#include <cctype>

#include "relbc/errors.hpp"

namespace relbc {

namespace {

std::uint32_t word_count(std::uint32_t length) { return (length + 63) / 64; }

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

BitChain BitChain::zeros(std::uint32_t length) {
  if (length == 0) throw Error("bitchain: length must be positive");
  BitChain c;
  c.len_ = length;
  c.words_.assign(word_count(length), 0);
  return c;
}

BitChain BitChain::ones(std::uint32_t length) {
  BitChain c = zeros(length);
  for (auto& w : c.words_) w = ~0ull;
  std::uint32_t top = length % 64;
  if (top != 0) c.words_.back() &= (~0ull >> (64 - top));
  return c;
}

BitChain BitChain::from_uint(std::uint64_t value, std::uint32_t length) {
  if (length == 0 || length > 64) throw Error("bitchain: from_uint needs 1 <= length <= 64");
  if (length < 64 && (value >> length) != 0) throw Error("bitchain: value does not fit in length");
  BitChain c = zeros(length);
  c.words_[0] = value;
  return c;
}

BitChain BitChain::random(std::uint32_t length, RngStream& rng) {
  BitChain c = zeros(length);
  for (auto& w : c.words_) w = rng.next_u64();
  std::uint32_t top = length % 64;
  if (top != 0) c.words_.back() &= (~0ull >> (64 - top));
  return c;
}

std::vector<BitChain> BitChain::random_distinct(std::size_t count, std::uint32_t length, RngStream& rng) {
  if (count == 0) throw Error("bitchain: random_distinct needs count >= 1");
  if (length < 63 && count > (1ull << length)) {
    throw Unsatisfiable("bitchain: cannot draw " + std::to_string(count) + " distinct chains of length " +
                        std::to_string(length));
  }
  std::vector<BitChain> out;
  out.reserve(count);
  while (out.size() < count) {
    BitChain candidate = random(length, rng);
    bool duplicate = std::any_of(out.begin(), out.end(), [&](const BitChain& c) { return c == candidate; });
    if (!duplicate) out.push_back(std::move(candidate));
  }
  return out;
}

BitChain BitChain::parse(std::string_view text) {
  auto slash = text.find('/');
  if (slash == std::string_view::npos) {
    if (text.empty()) throw ParseError("bitchain: empty string");
    BitChain c = zeros(static_cast<std::uint32_t>(text.size()));
    for (std::size_t i = 0; i < text.size(); ++i) {
      if (text[i] == '1') {
        std::uint32_t pos = static_cast<std::uint32_t>(text.size() - 1 - i);
        c.words_[pos / 64] |= 1ull << (pos % 64);
      } else if (text[i] != '0') {
        throw ParseError(std::string("bitchain: invalid binary digit '") + text[i] + "'");
      }
    }
    return c;
  }

  std::string_view hex = text.substr(0, slash);
  std::string_view len_text = text.substr(slash + 1);
  if (hex.empty() || len_text.empty()) throw ParseError("bitchain: malformed hex form");
  std::uint64_t length = 0;
  for (char ch : len_text) {
    if (!std::isdigit(static_cast<unsigned char>(ch))) throw ParseError("bitchain: bad length in hex form");
    length = length * 10 + static_cast<unsigned>(ch - '0');
    if (length > (1u << 24)) throw ParseError("bitchain: length out of range");
  }
  if (length == 0) throw ParseError("bitchain: zero length");
  if (hex.size() != (length + 3) / 4) {
    throw ParseError("bitchain: hex digit count does not match length");
  }
  BitChain c = zeros(static_cast<std::uint32_t>(length));
  for (std::size_t i = 0; i < hex.size(); ++i) {
    int v = hex_digit(hex[hex.size() - 1 - i]);
    if (v < 0) throw ParseError(std::string("bitchain: invalid hex digit '") + hex[hex.size() - 1 - i] + "'");
    std::uint32_t shift = static_cast<std::uint32_t>(4 * i);  // nibbles never straddle a limb
    c.words_[shift / 64] |= static_cast<std::uint64_t>(v) << (shift % 64);
  }
  // bits beyond the declared length must be zero
  std::uint32_t top = static_cast<std::uint32_t>(length % 64);
  if (top != 0 && (c.words_.back() & ~(~0ull >> (64 - top))) != 0) {
    throw ParseError("bitchain: hex value wider than declared length");
  }
  return c;
}

bool BitChain::bit(std::uint32_t i) const {
  if (i >= len_) throw Error("bitchain: bit index out of range");
  std::uint32_t pos = len_ - 1 - i;
  return (words_[pos / 64] >> (pos % 64)) & 1;
}

std::uint64_t BitChain::to_uint64() const {
  if (len_ == 0 || len_ > 64) throw TooLarge("bitchain: to_uint64 needs 1 <= length <= 64");
  return words_[0];
}

std::string BitChain::to_binary_string() const {
  std::string s(len_, '0');
  for (std::uint32_t i = 0; i < len_; ++i) {
    if (bit(i)) s[i] = '1';
  }
  return s;
}

std::string BitChain::to_hex_string() const {
  std::uint32_t digits = (len_ + 3) / 4;
  std::string s(digits, '0');
  static const char* kHex = "0123456789abcdef";
  for (std::uint32_t i = 0; i < digits; ++i) {
    std::uint32_t shift = 4 * i;
    std::uint64_t nibble = words_[shift / 64] >> (shift % 64);
    s[digits - 1 - i] = kHex[nibble & 0xf];
  }
  return s + "/" + std::to_string(len_);
}

void BitChain::check_same_length(const BitChain& o) const {
  if (len_ != o.len_) {
    throw LengthMismatch("bitchain: length " + std::to_string(len_) + " vs " + std::to_string(o.len_));
  }
}

BitChain BitChain::operator^(const BitChain& o) const {
  BitChain r = *this;
  r ^= o;
  return r;
}

BitChain& BitChain::operator^=(const BitChain& o) {
  check_same_length(o);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= o.words_[i];
  return *this;
}

bool BitChain::operator==(const BitChain& o) const {
  check_same_length(o);
  return words_ == o.words_;
}

}  // namespace relbc
