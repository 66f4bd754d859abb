#include "stegseg/msgcodec.hpp"

#include <algorithm>
#include <numeric>
#include <utility>

#include "stegseg/error.hpp"

namespace stegseg {

namespace {

constexpr std::size_t kMaxSecretBytes = 256;

void store_le64(std::uint64_t v, std::uint8_t* out) noexcept {
  for (int i = 0; i < 8; ++i) out[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

// Fisher-Yates swap partners, i descending from n-1 to 1.
std::vector<std::size_t> swap_partners(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> partners;
  if (n < 2) return partners;
  partners.reserve(n - 1);
  PrngStream rng(seed);
  for (std::size_t i = n - 1; i >= 1; --i) partners.push_back(static_cast<std::size_t>(rng.below(i + 1)));
  return partners;
}

}  // namespace

std::vector<std::uint64_t> prng_stream(std::uint64_t seed, std::size_t n) {
  std::vector<std::uint64_t> out(n);
  PrngStream rng(seed);
  for (auto& w : out) w = rng.next();
  return out;
}

Bytes prng_bytes(std::uint64_t seed, std::size_t n) {
  Bytes out(n);
  PrngStream rng(seed);
  std::uint8_t word[8];
  for (std::size_t i = 0; i < n; i += 8) {
    store_le64(rng.next(), word);
    std::copy_n(word, std::min<std::size_t>(8, n - i), out.begin() + static_cast<std::ptrdiff_t>(i));
  }
  return out;
}

std::uint64_t keyed_digest(std::uint64_t key, ByteView data) noexcept {
  std::uint64_t state = mix64(key ^ kDigestInit);
  for (std::uint8_t b : data) state = mix64(state ^ b);
  return mix64(state ^ static_cast<std::uint64_t>(data.size()));
}

std::uint64_t keyed_digest(std::uint64_t key, std::string_view data) noexcept {
  return keyed_digest(key, ByteView(reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
}

SecretMaterial SecretMaterial::from_strings(std::string_view key, std::string_view password) {
  return {Bytes(key.begin(), key.end()), Bytes(password.begin(), password.end())};
}

std::uint64_t password_key(const SecretMaterial& material) {
  if (material.secret_key.empty() || material.password.empty())
    throw Error(Errc::EmptySecret, "secret key and password must both be non-empty");
  if (material.secret_key.size() > kMaxSecretBytes || material.password.size() > kMaxSecretBytes)
    throw Error(Errc::EmptySecret, "secret key and password are limited to 256 bytes");
  const std::uint64_t k0 = keyed_digest(0, material.secret_key);
  return keyed_digest(k0, material.password);
}

KeySchedule derive_schedule(const SecretMaterial& material) {
  const std::uint64_t kp = password_key(material);
  return KeySchedule{
      .key_perm = keyed_digest(kp, "PERM"),
      .key_enc1 = keyed_digest(kp, "ENC1"),
      .key_sbox = keyed_digest(kp, "ENC2"),
      .key_pos = keyed_digest(kp, "POS"),
      .key_feat = keyed_digest(kp, "FEAT"),
  };
}

std::uint64_t password_verifier(const SecretMaterial& material, const Salt& salt) {
  return keyed_digest(password_key(material), salt);
}

BitMessage BitMessage::from_bytes(ByteView bytes) {
  BitMessage m;
  m.bits.resize(bytes.size() * 8);
  for (std::size_t i = 0; i < bytes.size(); ++i)
    for (int b = 0; b < 8; ++b) m.bits[i * 8 + b] = (bytes[i] >> (7 - b)) & 1U;
  return m;
}

Bytes pack_bits(const BitMessage& message) {
  Bytes out((message.length_bits() + 7) / 8, 0);
  for (std::size_t i = 0; i < message.bits.size(); ++i)
    if (message.bits[i]) out[i / 8] |= static_cast<std::uint8_t>(0x80U >> (i % 8));
  return out;
}

BitMessage unpack_bits(ByteView bytes, std::size_t length_bits) {
  if (length_bits > bytes.size() * 8)
    throw Error(Errc::LengthMismatch, "bit length exceeds byte buffer");
  BitMessage m;
  m.bits.resize(length_bits);
  for (std::size_t i = 0; i < length_bits; ++i) m.bits[i] = (bytes[i / 8] >> (7 - i % 8)) & 1U;
  return m;
}

BitMessage permute_bits(const BitMessage& message, std::uint64_t key_perm) {
  BitMessage out = message;
  const auto partners = swap_partners(out.bits.size(), key_perm);
  std::size_t i = out.bits.size();
  for (std::size_t j : partners) {
    --i;
    std::swap(out.bits[i], out.bits[j]);
  }
  return out;
}

BitMessage unpermute_bits(const BitMessage& message, std::uint64_t key_perm) {
  BitMessage out = message;
  const auto partners = swap_partners(out.bits.size(), key_perm);
  // Undo the swaps in reverse: the last recorded swap was at position 1.
  std::size_t i = 1;
  for (auto it = partners.rbegin(); it != partners.rend(); ++it, ++i) std::swap(out.bits[i], out.bits[*it]);
  return out;
}

std::array<std::uint8_t, 256> make_sbox(std::uint64_t seed) noexcept {
  std::array<std::uint8_t, 256> box{};
  std::iota(box.begin(), box.end(), std::uint8_t{0});
  PrngStream rng(seed);
  for (std::size_t i = 255; i >= 1; --i) std::swap(box[i], box[rng.below(i + 1)]);
  return box;
}

Ciphertext encrypt(const BitMessage& message, const KeySchedule& schedule, const Salt& salt) {
  Ciphertext ct;
  ct.bytes = pack_bits(message);
  ct.pad_bits = static_cast<std::uint8_t>(ct.bytes.size() * 8 - message.length_bits());
  const Bytes keystream = prng_bytes(keyed_digest(schedule.key_enc1, salt), ct.bytes.size());
  const auto sbox = make_sbox(keyed_digest(schedule.key_sbox, salt));
  for (std::size_t i = 0; i < ct.bytes.size(); ++i) ct.bytes[i] = sbox[ct.bytes[i] ^ keystream[i]];
  return ct;
}

BitMessage decrypt(const Ciphertext& ciphertext, const KeySchedule& schedule, const Salt& salt,
                   std::size_t length_bits) {
  const std::size_t n = ciphertext.bytes.size();
  const bool fits = n == 0 ? length_bits == 0 : (length_bits <= 8 * n && length_bits > 8 * (n - 1));
  if (!fits) throw Error(Errc::LengthMismatch, "bit length inconsistent with ciphertext size");

  const auto sbox = make_sbox(keyed_digest(schedule.key_sbox, salt));
  std::array<std::uint8_t, 256> inverse{};
  for (std::size_t v = 0; v < 256; ++v) inverse[sbox[v]] = static_cast<std::uint8_t>(v);

  const Bytes keystream = prng_bytes(keyed_digest(schedule.key_enc1, salt), n);
  Bytes plain(n);
  for (std::size_t i = 0; i < n; ++i) plain[i] = inverse[ciphertext.bytes[i]] ^ keystream[i];
  return unpack_bits(plain, length_bits);
}

MessageTag message_tag(const KeySchedule& schedule, const Ciphertext& ciphertext) noexcept {
  MessageTag tag{};
  store_le64(keyed_digest(schedule.key_feat, ciphertext.bytes), tag.data());
  store_le64(keyed_digest(mix64(schedule.key_feat ^ 1), ciphertext.bytes), tag.data() + 8);
  return tag;
}

}  // namespace stegseg
