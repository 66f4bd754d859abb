#pragma once

// Sender and receiver sequences. Each receiver stage refuses to run until the
// previous gate has passed: reassembly -> feature match -> password check ->
// extraction -> tag check -> decryption -> re-permutation.

#include <optional>
#include <vector>

#include "stegseg/lsb_embed.hpp"
#include "stegseg/msgcodec.hpp"
#include "stegseg/ncut.hpp"
#include "stegseg/raster.hpp"
#include "stegseg/segment_wire.hpp"

namespace stegseg {

/// Eight bytes from the OS entropy source.
Salt random_salt();

struct HideOptions {
  int bits_per_channel = 1;
  std::optional<Salt> salt;  // fixed only for reproducible runs
};

/// permute -> encrypt -> embed. Throws CapacityExceeded, EmptySecret, InvalidImage.
RasterImage hide_message(const RasterImage& cover, ByteView message, const SecretMaterial& material,
                         const HideOptions& options = {});

struct SplitResult {
  Partition partition;
  Manifest manifest;
  std::vector<SegmentPacket> packets;
  SegmentStats stats;
};

/// Segment the stego image and build the manifest.
SplitResult split_stego(const RasterImage& stego, const KeySchedule& schedule, const NcutParams& params = {});

/// Reassemble then feature-match. Throws FeatureMismatch before returning any
/// image when the keyed feature differs.
RasterImage assemble_verified(const Manifest& manifest, std::span<const SegmentPacket> packets,
                              const KeySchedule& schedule);

/// password gate -> extract -> tag -> decrypt -> unpermute.
Bytes reveal_message(const RasterImage& stego, const SecretMaterial& material);

}  // namespace stegseg
