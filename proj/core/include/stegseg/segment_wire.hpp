#pragma once

// Segment packets (.sgp) and manifest (.sgm).
//
// All integers little-endian, fields in declaration order, trailing 8-byte
// checksum = keyed_digest(0, every preceding byte of the record).
//
//   SGP1: magic[4] "SGP1" | version u8 | segment_id u16 | run_count u32 |
//         runs (start u32, length u32) x run_count | pixel bytes | checksum u64
//   SGM1: magic[4] "SGM1" | version u8 | width u32 | height u32 | channels u8 |
//         segment_count u16 | feature u64 |
//         (segment_id u16, pixel_count u32, checksum u64) x segment_count |
//         checksum u64

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "stegseg/msgcodec.hpp"
#include "stegseg/ncut.hpp"
#include "stegseg/raster.hpp"

namespace stegseg {

inline constexpr std::array<std::uint8_t, 4> kPacketMagic{0x53, 0x47, 0x50, 0x31};    // "SGP1"
inline constexpr std::array<std::uint8_t, 4> kManifestMagic{0x53, 0x47, 0x4D, 0x31};  // "SGM1"
inline constexpr std::uint8_t kWireVersion = 0x01;
inline constexpr std::uint64_t kFeatureTweak = 0x0F;

struct PixelRun {
  std::uint32_t start = 0;
  std::uint32_t length = 0;

  friend bool operator==(const PixelRun&, const PixelRun&) = default;
};

struct SegmentPacket {
  std::uint16_t segment_id = 0;
  std::vector<PixelRun> runs;
  Bytes pixel_bytes;
  std::uint64_t checksum = 0;

  std::uint64_t pixel_count() const noexcept;

  /// Recomputes the checksum over the serialized body.
  void seal();

  friend bool operator==(const SegmentPacket&, const SegmentPacket&) = default;
};

struct ManifestEntry {
  std::uint16_t segment_id = 0;
  std::uint32_t pixel_count = 0;
  std::uint64_t checksum = 0;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct Manifest {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint8_t channels = 0;
  std::uint64_t feature = 0;
  std::vector<ManifestEntry> table;
  std::uint64_t checksum = 0;

  void seal();

  friend bool operator==(const Manifest&, const Manifest&) = default;
};

/// One packet per label of the partition. Throws DimensionMismatch.
std::vector<SegmentPacket> split_segments(const RasterImage& stego, const Partition& partition);

/// keyed_digest(key_feat ^ 0x0F, pixels)
std::uint64_t image_feature(const RasterImage& image, const KeySchedule& schedule) noexcept;

/// Throws CoverageError if the packets leave gaps or overlap.
Manifest make_manifest(const RasterImage& stego, const std::vector<SegmentPacket>& packets,
                       const KeySchedule& schedule);

Bytes serialize_packet(const SegmentPacket& packet);
/// Throws Truncated, BadMagic, BadVersion, MalformedRuns, ChecksumMismatch.
SegmentPacket parse_packet(ByteView bytes);

Bytes serialize_manifest(const Manifest& manifest);
/// Throws Truncated, BadMagic, BadVersion, MalformedRuns, CoverageError, ChecksumMismatch.
Manifest parse_manifest(ByteView bytes);

/// Packets may come in any order. Throws MissingSegmentError, OverlapError,
/// UnknownSegment, ChecksumMismatch, CountMismatch, MalformedRuns.
RasterImage reassemble(const Manifest& manifest, std::span<const SegmentPacket> packets);

/// Throws DimensionMismatch.
bool verify_feature(const RasterImage& image, const Manifest& manifest, const KeySchedule& schedule);

enum class RecordKind { Manifest, Packet, Unknown };

/// Classifies a record by its magic bytes only.
RecordKind record_kind(ByteView bytes) noexcept;

}  // namespace stegseg
