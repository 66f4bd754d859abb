#pragma once

// Header + payload embedding in the low bits of channel bytes.
//
// Channel slots are flat byte indices into RasterImage::pixels. The 42-byte
// header always occupies the LSB of slots [0, 336) in raster order; payload
// bits go to keyed positions drawn from [336, slot_count).

#include <array>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "stegseg/msgcodec.hpp"
#include "stegseg/raster.hpp"

namespace stegseg {

inline constexpr std::size_t kHeaderBytes = 42;
inline constexpr std::size_t kHeaderSlots = kHeaderBytes * 8;
inline constexpr std::array<std::uint8_t, 4> kHeaderMagic{0x53, 0x47, 0x53, 0x31};  // "SGS1"
inline constexpr std::uint8_t kHeaderVersion = 0x01;
inline constexpr std::uint8_t kFlagTwoBits = 0x01;

struct StegoHeader {
  std::uint8_t version = kHeaderVersion;
  std::uint8_t flags = 0;
  std::uint32_t payload_len = 0;
  Salt salt{};
  std::uint64_t verifier = 0;
  MessageTag tag{};

  int bits_per_channel() const noexcept { return (flags & kFlagTwoBits) ? 2 : 1; }

  std::array<std::uint8_t, kHeaderBytes> serialize() const noexcept;
  /// Throws NoPayload on bad magic, version or unknown flag bits.
  static StegoHeader parse(std::span<const std::uint8_t, kHeaderBytes> bytes);

  friend bool operator==(const StegoHeader&, const StegoHeader&) = default;
};

/// Builds the header for a ciphertext produced under (material, salt).
StegoHeader make_header(const SecretMaterial& material, const KeySchedule& schedule, const Salt& salt,
                        const Ciphertext& ciphertext, int bits_per_channel);

/// Payload bits the image can carry; 0 when it cannot even hold the header.
std::size_t capacity(const RasterImage& image, int bits_per_channel);

/// First n payload slots of the keyed Fisher-Yates order over [336, total_slots).
/// Throws CapacityExceeded when n exceeds the available payload slots.
std::vector<std::uint32_t> select_positions(std::uint64_t key_pos, const Salt& salt, std::size_t n,
                                            std::size_t total_slots);

/// Returns a new stego image; the cover is left untouched.
RasterImage embed(const RasterImage& cover, const StegoHeader& header, const Ciphertext& ciphertext,
                  const KeySchedule& schedule);

/// Reads the header without any secret; throws TruncatedImage or NoPayload.
StegoHeader read_header(const RasterImage& stego);

/// Password gate first, then payload read and tag check.
std::pair<StegoHeader, Ciphertext> extract(const RasterImage& stego, const SecretMaterial& material);

}  // namespace stegseg
