#include "stegseg/pipeline.hpp"

#include <random>

#include "stegseg/error.hpp"

namespace stegseg {

Salt random_salt() {
  std::random_device rd;
  Salt salt{};
  for (std::size_t i = 0; i < salt.size(); i += 4) {
    const auto word = rd();
    for (std::size_t k = 0; k < 4; ++k) salt[i + k] = static_cast<std::uint8_t>(word >> (8 * k));
  }
  return salt;
}

RasterImage hide_message(const RasterImage& cover, ByteView message, const SecretMaterial& material,
                         const HideOptions& options) {
  cover.validate();
  const KeySchedule schedule = derive_schedule(material);
  if (message.size() * 8 > capacity(cover, options.bits_per_channel))
    throw Error(Errc::CapacityExceeded, "message of " + std::to_string(message.size()) + " bytes exceeds capacity of " +
                                            std::to_string(capacity(cover, options.bits_per_channel) / 8) + " bytes");
  const Salt salt = options.salt.value_or(random_salt());

  const BitMessage permuted = permute_bits(BitMessage::from_bytes(message), schedule.key_perm);
  const Ciphertext ct = encrypt(permuted, schedule, salt);
  const StegoHeader header = make_header(material, schedule, salt, ct, options.bits_per_channel);
  return embed(cover, header, ct, schedule);
}

SplitResult split_stego(const RasterImage& stego, const KeySchedule& schedule, const NcutParams& params) {
  SplitResult out;
  out.partition = recursive_segment(stego, params, &out.stats);
  out.packets = split_segments(stego, out.partition);
  out.manifest = make_manifest(stego, out.packets, schedule);
  return out;
}

RasterImage assemble_verified(const Manifest& manifest, std::span<const SegmentPacket> packets,
                              const KeySchedule& schedule) {
  RasterImage image = reassemble(manifest, packets);
  if (!verify_feature(image, manifest, schedule))
    throw Error(Errc::FeatureMismatch, "reassembled image does not match the manifest feature");
  return image;
}

Bytes reveal_message(const RasterImage& stego, const SecretMaterial& material) {
  auto [header, ct] = extract(stego, material);
  const KeySchedule schedule = derive_schedule(material);
  const BitMessage permuted = decrypt(ct, schedule, header.salt, ct.bytes.size() * 8);
  return pack_bits(unpermute_bits(permuted, schedule.key_perm));
}

}  // namespace stegseg
