#pragma once

// Keyed primitives and the message cipher chain.
//
// Everything here is a pure function of its arguments. The PRNG and digest
// are SplitMix64-based and are NOT cryptographic; all keyed operations are
// routed through this header so a hardened suite can replace them.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace stegseg {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;
using Salt = std::array<std::uint8_t, 8>;

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;
inline constexpr std::uint64_t kDigestInit = 0x517CC1B727220A95ULL;

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

/// Index-addressed SplitMix64 sequence: word i is mix64(seed + (i+1)*gamma).
class PrngStream {
 public:
  explicit constexpr PrngStream(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    state_ += kGoldenGamma;
    return mix64(state_);
  }

  /// Uniform-ish index in [0, bound) by plain modulo reduction.
  constexpr std::uint64_t below(std::uint64_t bound) noexcept { return next() % bound; }

 private:
  std::uint64_t state_;
};

std::vector<std::uint64_t> prng_stream(std::uint64_t seed, std::size_t n);

/// Keystream bytes: each word emitted as 8 little-endian bytes, truncated to n.
Bytes prng_bytes(std::uint64_t seed, std::size_t n);

std::uint64_t keyed_digest(std::uint64_t key, ByteView data) noexcept;
std::uint64_t keyed_digest(std::uint64_t key, std::string_view data) noexcept;

struct SecretMaterial {
  Bytes secret_key;
  Bytes password;

  static SecretMaterial from_strings(std::string_view key, std::string_view password);
};

struct KeySchedule {
  std::uint64_t key_perm = 0;
  std::uint64_t key_enc1 = 0;
  std::uint64_t key_sbox = 0;
  std::uint64_t key_pos = 0;
  std::uint64_t key_feat = 0;

  friend bool operator==(const KeySchedule&, const KeySchedule&) = default;
};

/// Password-mixed intermediate kp of the schedule chain. Throws EmptySecret.
std::uint64_t password_key(const SecretMaterial& material);

/// Throws EmptySecret if either secret is empty or longer than 256 bytes.
KeySchedule derive_schedule(const SecretMaterial& material);

/// Header password verifier: keyed_digest(kp, salt).
std::uint64_t password_verifier(const SecretMaterial& material, const Salt& salt);

/// One bit per element, each 0 or 1.
struct BitMessage {
  std::vector<std::uint8_t> bits;

  std::size_t length_bits() const noexcept { return bits.size(); }

  /// MSB-first expansion of bytes.
  static BitMessage from_bytes(ByteView bytes);

  friend bool operator==(const BitMessage&, const BitMessage&) = default;
};

/// MSB-first packing, zero-padding the final byte.
Bytes pack_bits(const BitMessage& message);
BitMessage unpack_bits(ByteView bytes, std::size_t length_bits);

BitMessage permute_bits(const BitMessage& message, std::uint64_t key_perm);
BitMessage unpermute_bits(const BitMessage& message, std::uint64_t key_perm);

/// Keyed byte substitution table: Fisher-Yates over 0..255.
std::array<std::uint8_t, 256> make_sbox(std::uint64_t seed) noexcept;

struct Ciphertext {
  Bytes bytes;
  std::uint8_t pad_bits = 0;

  std::size_t length_bytes() const noexcept { return bytes.size(); }

  friend bool operator==(const Ciphertext&, const Ciphertext&) = default;
};

/// Packing plus both cipher levels. The caller permutes first.
Ciphertext encrypt(const BitMessage& message, const KeySchedule& schedule, const Salt& salt);

/// Inverse of encrypt, yielding exactly length_bits bits. Throws LengthMismatch.
BitMessage decrypt(const Ciphertext& ciphertext, const KeySchedule& schedule, const Salt& salt,
                   std::size_t length_bits);

using MessageTag = std::array<std::uint8_t, 16>;

MessageTag message_tag(const KeySchedule& schedule, const Ciphertext& ciphertext) noexcept;

}  // namespace stegseg
