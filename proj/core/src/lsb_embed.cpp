#include "stegseg/lsb_embed.hpp"

#include <algorithm>
#include <numeric>

#include "stegseg/error.hpp"

namespace stegseg {

namespace {

void put_le32(std::uint32_t v, std::uint8_t* out) noexcept {
  for (int i = 0; i < 4; ++i) out[i] = static_cast<std::uint8_t>(v >> (8 * i));
}
void put_le64(std::uint64_t v, std::uint8_t* out) noexcept {
  for (int i = 0; i < 8; ++i) out[i] = static_cast<std::uint8_t>(v >> (8 * i));
}
std::uint32_t get_le32(const std::uint8_t* in) noexcept {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | in[i];
  return v;
}
std::uint64_t get_le64(const std::uint8_t* in) noexcept {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | in[i];
  return v;
}

std::size_t payload_slots_needed(std::size_t payload_bytes, int bpc) {
  return (payload_bytes * 8 + static_cast<std::size_t>(bpc) - 1) / static_cast<std::size_t>(bpc);
}

void check_bpc(int bpc) {
  if (bpc != 1 && bpc != 2) throw Error(Errc::InvalidParams, "bits per channel must be 1 or 2");
}

}  // namespace

std::array<std::uint8_t, kHeaderBytes> StegoHeader::serialize() const noexcept {
  std::array<std::uint8_t, kHeaderBytes> out{};
  std::copy(kHeaderMagic.begin(), kHeaderMagic.end(), out.begin());
  out[4] = version;
  out[5] = flags;
  put_le32(payload_len, &out[6]);
  std::copy(salt.begin(), salt.end(), &out[10]);
  put_le64(verifier, &out[18]);
  std::copy(tag.begin(), tag.end(), &out[26]);
  return out;
}

StegoHeader StegoHeader::parse(std::span<const std::uint8_t, kHeaderBytes> bytes) {
  if (!std::equal(kHeaderMagic.begin(), kHeaderMagic.end(), bytes.begin()))
    throw Error(Errc::NoPayload, "no stego header present");
  StegoHeader h;
  h.version = bytes[4];
  if (h.version != kHeaderVersion) throw Error(Errc::NoPayload, "unsupported header version");
  h.flags = bytes[5];
  if (h.flags & ~kFlagTwoBits) throw Error(Errc::NoPayload, "unknown header flags");
  h.payload_len = get_le32(&bytes[6]);
  std::copy_n(&bytes[10], 8, h.salt.begin());
  h.verifier = get_le64(&bytes[18]);
  std::copy_n(&bytes[26], 16, h.tag.begin());
  return h;
}

StegoHeader make_header(const SecretMaterial& material, const KeySchedule& schedule, const Salt& salt,
                        const Ciphertext& ciphertext, int bits_per_channel) {
  check_bpc(bits_per_channel);
  if (ciphertext.bytes.size() > 0xFFFFFFFFULL) throw Error(Errc::CapacityExceeded, "payload exceeds 4 GiB");
  StegoHeader h;
  h.flags = bits_per_channel == 2 ? kFlagTwoBits : 0;
  h.payload_len = static_cast<std::uint32_t>(ciphertext.bytes.size());
  h.salt = salt;
  h.verifier = password_verifier(material, salt);
  h.tag = message_tag(schedule, ciphertext);
  return h;
}

std::size_t capacity(const RasterImage& image, int bits_per_channel) {
  check_bpc(bits_per_channel);
  const std::size_t slots = image.slot_count();
  if (slots < kHeaderSlots) return 0;
  return static_cast<std::size_t>(bits_per_channel) * (slots - kHeaderSlots);
}

std::vector<std::uint32_t> select_positions(std::uint64_t key_pos, const Salt& salt, std::size_t n,
                                            std::size_t total_slots) {
  if (n == 0) return {};
  if (total_slots < kHeaderSlots || n > total_slots - kHeaderSlots)
    throw Error(Errc::CapacityExceeded, "not enough payload slots");
  if (total_slots > 0xFFFFFFFFULL) throw Error(Errc::InvalidImage, "image too large for 32-bit slot indices");

  std::vector<std::uint32_t> order(total_slots - kHeaderSlots);
  std::iota(order.begin(), order.end(), static_cast<std::uint32_t>(kHeaderSlots));
  PrngStream rng(keyed_digest(key_pos, salt));
  for (std::size_t i = order.size() - 1; i >= 1; --i) std::swap(order[i], order[rng.below(i + 1)]);
  order.resize(n);
  return order;
}

RasterImage embed(const RasterImage& cover, const StegoHeader& header, const Ciphertext& ciphertext,
                  const KeySchedule& schedule) {
  cover.validate();
  const int bpc = header.bits_per_channel();
  if (header.payload_len != ciphertext.bytes.size())
    throw Error(Errc::LengthMismatch, "header payload length disagrees with ciphertext");
  if (cover.slot_count() < kHeaderSlots || ciphertext.bytes.size() * 8 > capacity(cover, bpc))
    throw Error(Errc::CapacityExceeded, "payload does not fit in cover");

  RasterImage stego = cover;
  auto& px = stego.pixels;

  const auto hbytes = header.serialize();
  for (std::size_t i = 0; i < kHeaderSlots; ++i) {
    const std::uint8_t bit = (hbytes[i / 8] >> (7 - i % 8)) & 1U;
    px[i] = static_cast<std::uint8_t>((px[i] & 0xFE) | bit);
  }

  const BitMessage bits = BitMessage::from_bytes(ciphertext.bytes);
  const auto slots = select_positions(schedule.key_pos, header.salt,
                                      payload_slots_needed(ciphertext.bytes.size(), bpc), cover.slot_count());
  if (bpc == 1) {
    for (std::size_t k = 0; k < slots.size(); ++k)
      px[slots[k]] = static_cast<std::uint8_t>((px[slots[k]] & 0xFE) | bits.bits[k]);
  } else {
    // Two bits per slot, earlier payload bit in bit 1.
    for (std::size_t k = 0; k < slots.size(); ++k) {
      const std::uint8_t hi = bits.bits[2 * k];
      const std::uint8_t lo = 2 * k + 1 < bits.bits.size() ? bits.bits[2 * k + 1] : 0;
      px[slots[k]] = static_cast<std::uint8_t>((px[slots[k]] & 0xFC) | (hi << 1) | lo);
    }
  }
  return stego;
}

StegoHeader read_header(const RasterImage& stego) {
  stego.validate();
  if (stego.slot_count() < kHeaderSlots) throw Error(Errc::TruncatedImage, "image smaller than header region");
  std::array<std::uint8_t, kHeaderBytes> hbytes{};
  for (std::size_t i = 0; i < kHeaderSlots; ++i)
    hbytes[i / 8] = static_cast<std::uint8_t>(hbytes[i / 8] | ((stego.pixels[i] & 1U) << (7 - i % 8)));
  return StegoHeader::parse(hbytes);
}

std::pair<StegoHeader, Ciphertext> extract(const RasterImage& stego, const SecretMaterial& material) {
  StegoHeader header = read_header(stego);
  if (password_verifier(material, header.salt) != header.verifier)
    throw Error(Errc::WrongPassword, "password verification failed");

  const int bpc = header.bits_per_channel();
  if (std::size_t{header.payload_len} * 8 > capacity(stego, bpc))
    throw Error(Errc::TruncatedImage, "declared payload exceeds image capacity");

  const KeySchedule schedule = derive_schedule(material);
  const auto slots = select_positions(schedule.key_pos, header.salt,
                                      payload_slots_needed(header.payload_len, bpc), stego.slot_count());
  BitMessage bits;
  bits.bits.resize(std::size_t{header.payload_len} * 8);
  const auto& px = stego.pixels;
  if (bpc == 1) {
    for (std::size_t k = 0; k < slots.size(); ++k) bits.bits[k] = px[slots[k]] & 1U;
  } else {
    for (std::size_t k = 0; k < slots.size(); ++k) {
      bits.bits[2 * k] = (px[slots[k]] >> 1) & 1U;
      if (2 * k + 1 < bits.bits.size()) bits.bits[2 * k + 1] = px[slots[k]] & 1U;
    }
  }

  Ciphertext ct;
  ct.bytes = pack_bits(bits);
  if (message_tag(schedule, ct) != header.tag) throw Error(Errc::TagMismatch, "ciphertext integrity tag mismatch");
  return {header, std::move(ct)};
}

}  // namespace stegseg
