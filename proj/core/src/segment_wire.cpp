#include "stegseg/segment_wire.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "stegseg/error.hpp"

namespace stegseg {

namespace {

class Writer {
 public:
  explicit Writer(Bytes& out) : out_(out) {}

  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) { le(v, 2); }
  void u32(std::uint32_t v) { le(v, 4); }
  void u64(std::uint64_t v) { le(v, 8); }
  void raw(ByteView b) { out_.insert(out_.end(), b.begin(), b.end()); }

 private:
  void le(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  Bytes& out_;
};

class Reader {
 public:
  explicit Reader(ByteView in) : in_(in) {}

  std::size_t remaining() const noexcept { return in_.size() - pos_; }
  std::size_t position() const noexcept { return pos_; }

  std::uint8_t u8() { return static_cast<std::uint8_t>(le(1)); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(le(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
  std::uint64_t u64() { return le(8); }
  ByteView raw(std::size_t n) {
    need(n);
    auto view = in_.subspan(pos_, n);
    pos_ += n;
    return view;
  }

 private:
  void need(std::size_t n) const {
    if (remaining() < n) throw Error(Errc::Truncated, "record ends early");
  }
  std::uint64_t le(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = n - 1; i >= 0; --i) v = (v << 8) | in_[pos_ + static_cast<std::size_t>(i)];
    pos_ += static_cast<std::size_t>(n);
    return v;
  }

  ByteView in_;
  std::size_t pos_ = 0;
};

void write_packet_body(const SegmentPacket& p, Bytes& out) {
  Writer w(out);
  w.raw(kPacketMagic);
  w.u8(kWireVersion);
  w.u16(p.segment_id);
  w.u32(static_cast<std::uint32_t>(p.runs.size()));
  for (const auto& r : p.runs) {
    w.u32(r.start);
    w.u32(r.length);
  }
  w.raw(p.pixel_bytes);
}

void write_manifest_body(const Manifest& m, Bytes& out) {
  Writer w(out);
  w.raw(kManifestMagic);
  w.u8(kWireVersion);
  w.u32(m.width);
  w.u32(m.height);
  w.u8(m.channels);
  w.u16(static_cast<std::uint16_t>(m.table.size()));
  w.u64(m.feature);
  for (const auto& e : m.table) {
    w.u16(e.segment_id);
    w.u32(e.pixel_count);
    w.u64(e.checksum);
  }
}

void check_magic(Reader& r, const std::array<std::uint8_t, 4>& magic) {
  if (r.remaining() == 0) throw Error(Errc::Truncated, "empty record");
  const std::size_t n = std::min<std::size_t>(4, r.remaining());
  const auto got = r.raw(n);
  if (!std::equal(got.begin(), got.end(), magic.begin())) throw Error(Errc::BadMagic, "unexpected record magic");
  if (n < 4) throw Error(Errc::Truncated, "record ends inside magic");
  if (r.u8() != kWireVersion) throw Error(Errc::BadVersion, "unsupported record version");
}

bool valid_channels(std::uint64_t c) { return c == 1 || c == 3 || c == 4; }

}  // namespace

std::uint64_t SegmentPacket::pixel_count() const noexcept {
  std::uint64_t total = 0;
  for (const auto& r : runs) total += r.length;
  return total;
}

void SegmentPacket::seal() {
  Bytes body;
  write_packet_body(*this, body);
  checksum = keyed_digest(0, body);
}

void Manifest::seal() {
  Bytes body;
  write_manifest_body(*this, body);
  checksum = keyed_digest(0, body);
}

std::vector<SegmentPacket> split_segments(const RasterImage& stego, const Partition& partition) {
  stego.validate();
  if (partition.width != stego.width || partition.height != stego.height ||
      partition.labels.size() != stego.pixel_count())
    throw Error(Errc::DimensionMismatch, "partition does not match image grid");
  if (partition.k == 0 || partition.k > 65536) throw Error(Errc::DimensionMismatch, "segment count out of range");

  std::vector<SegmentPacket> packets(partition.k);
  for (std::uint32_t id = 0; id < partition.k; ++id) packets[id].segment_id = static_cast<std::uint16_t>(id);

  const std::size_t total = stego.pixel_count();
  const std::size_t c = stego.channels;
  std::size_t i = 0;
  while (i < total) {
    const std::uint32_t label = partition.labels[i];
    if (label >= partition.k) throw Error(Errc::DimensionMismatch, "label outside 0..k-1");
    std::size_t j = i + 1;
    while (j < total && partition.labels[j] == label) ++j;
    auto& p = packets[label];
    p.runs.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j - i)});
    p.pixel_bytes.insert(p.pixel_bytes.end(), stego.pixels.begin() + static_cast<std::ptrdiff_t>(i * c),
                         stego.pixels.begin() + static_cast<std::ptrdiff_t>(j * c));
    i = j;
  }
  for (auto& p : packets) p.seal();
  return packets;
}

std::uint64_t image_feature(const RasterImage& image, const KeySchedule& schedule) noexcept {
  return keyed_digest(schedule.key_feat ^ kFeatureTweak, image.pixels);
}

Manifest make_manifest(const RasterImage& stego, const std::vector<SegmentPacket>& packets,
                       const KeySchedule& schedule) {
  stego.validate();
  if (packets.size() > 65535) throw Error(Errc::CoverageError, "too many segments");
  std::vector<bool> covered(stego.pixel_count(), false);
  std::vector<bool> seen_id(packets.size(), false);
  Manifest m;
  m.width = stego.width;
  m.height = stego.height;
  m.channels = stego.channels;
  m.feature = image_feature(stego, schedule);
  m.table.resize(packets.size());
  for (const auto& p : packets) {
    if (p.segment_id >= packets.size() || seen_id[p.segment_id])
      throw Error(Errc::CoverageError, "segment ids must be exactly 0..count-1");
    seen_id[p.segment_id] = true;
    for (const auto& r : p.runs) {
      if (std::uint64_t{r.start} + r.length > covered.size())
        throw Error(Errc::CoverageError, "run outside the image");
      for (std::size_t k = r.start; k < std::size_t{r.start} + r.length; ++k) {
        if (covered[k]) throw Error(Errc::CoverageError, "segments overlap");
        covered[k] = true;
      }
    }
    m.table[p.segment_id] = {p.segment_id, static_cast<std::uint32_t>(p.pixel_count()), p.checksum};
  }
  if (std::find(covered.begin(), covered.end(), false) != covered.end())
    throw Error(Errc::CoverageError, "segments leave pixels uncovered");
  m.seal();
  return m;
}

Bytes serialize_packet(const SegmentPacket& packet) {
  Bytes out;
  out.reserve(11 + 8 * packet.runs.size() + packet.pixel_bytes.size() + 8);
  write_packet_body(packet, out);
  Writer(out).u64(packet.checksum);
  return out;
}

SegmentPacket parse_packet(ByteView bytes) {
  Reader r(bytes);
  check_magic(r, kPacketMagic);
  SegmentPacket p;
  p.segment_id = r.u16();
  const std::uint32_t run_count = r.u32();
  if (std::uint64_t{run_count} * 8 > r.remaining()) throw Error(Errc::Truncated, "run table ends early");
  p.runs.resize(run_count);
  std::uint64_t next_free = 0;
  std::uint64_t pixels = 0;
  for (auto& run : p.runs) {
    run.start = r.u32();
    run.length = r.u32();
    if (run.length == 0 || run.start < next_free) throw Error(Errc::MalformedRuns, "runs must be non-empty, sorted and disjoint");
    next_free = std::uint64_t{run.start} + run.length;
    if (next_free > 0xFFFFFFFFULL) throw Error(Errc::MalformedRuns, "run exceeds 32-bit pixel index space");
    pixels += run.length;
  }
  if (r.remaining() < 8) throw Error(Errc::Truncated, "missing checksum");
  const std::size_t pixel_len = r.remaining() - 8;
  if (pixels == 0 ? pixel_len != 0 : (pixel_len % pixels != 0 || !valid_channels(pixel_len / pixels)))
    throw Error(Errc::MalformedRuns, "pixel byte count does not match runs");
  const auto px = r.raw(pixel_len);
  p.pixel_bytes.assign(px.begin(), px.end());
  const std::size_t body = r.position();
  p.checksum = r.u64();
  if (keyed_digest(0, bytes.first(body)) != p.checksum) throw Error(Errc::ChecksumMismatch, "packet checksum mismatch");
  return p;
}

Bytes serialize_manifest(const Manifest& manifest) {
  Bytes out;
  out.reserve(24 + 14 * manifest.table.size() + 8);
  write_manifest_body(manifest, out);
  Writer(out).u64(manifest.checksum);
  return out;
}

Manifest parse_manifest(ByteView bytes) {
  Reader r(bytes);
  check_magic(r, kManifestMagic);
  Manifest m;
  m.width = r.u32();
  m.height = r.u32();
  m.channels = r.u8();
  const std::uint16_t count = r.u16();
  m.feature = r.u64();
  if (std::size_t{count} * 14 > r.remaining()) throw Error(Errc::Truncated, "segment table ends early");
  m.table.resize(count);
  std::uint64_t total = 0;
  for (std::uint16_t i = 0; i < count; ++i) {
    auto& e = m.table[i];
    e.segment_id = r.u16();
    e.pixel_count = r.u32();
    e.checksum = r.u64();
    if (e.segment_id != i) throw Error(Errc::MalformedRuns, "segment table ids must run 0..count-1");
    total += e.pixel_count;
  }
  const std::size_t body = r.position();
  m.checksum = r.u64();
  if (r.remaining() != 0) throw Error(Errc::MalformedRuns, "trailing bytes after checksum");
  if (keyed_digest(0, bytes.first(body)) != m.checksum) throw Error(Errc::ChecksumMismatch, "manifest checksum mismatch");
  if (m.width == 0 || m.height == 0 || !valid_channels(m.channels) || count == 0)
    throw Error(Errc::MalformedRuns, "manifest geometry invalid");
  if (total != std::uint64_t{m.width} * m.height) throw Error(Errc::CoverageError, "segment table does not cover the image");
  return m;
}

RasterImage reassemble(const Manifest& manifest, std::span<const SegmentPacket> packets) {
  RasterImage out(manifest.width, manifest.height, manifest.channels);
  out.validate();
  const std::size_t c = manifest.channels;
  std::vector<bool> covered(out.pixel_count(), false);
  std::vector<bool> received(manifest.table.size(), false);

  for (const auto& p : packets) {
    if (p.segment_id >= manifest.table.size())
      throw Error(Errc::UnknownSegment, "segment " + std::to_string(p.segment_id) + " not in manifest");
    const auto& entry = manifest.table[p.segment_id];
    if (p.pixel_count() != entry.pixel_count || p.pixel_bytes.size() != p.pixel_count() * c)
      throw Error(Errc::CountMismatch, "segment " + std::to_string(p.segment_id) + " pixel count mismatch");
    if (p.checksum != entry.checksum)
      throw Error(Errc::ChecksumMismatch, "segment " + std::to_string(p.segment_id) + " checksum differs from manifest");
    if (received[p.segment_id])
      throw Error(Errc::OverlapError, "segment " + std::to_string(p.segment_id) + " received twice");
    received[p.segment_id] = true;

    std::size_t src = 0;
    for (const auto& run : p.runs) {
      if (std::uint64_t{run.start} + run.length > covered.size())
        throw Error(Errc::MalformedRuns, "run outside the image");
      for (std::size_t k = run.start; k < std::size_t{run.start} + run.length; ++k) {
        if (covered[k]) throw Error(Errc::OverlapError, "pixel " + std::to_string(k) + " covered twice");
        covered[k] = true;
      }
      std::copy_n(p.pixel_bytes.begin() + static_cast<std::ptrdiff_t>(src), std::size_t{run.length} * c,
                  out.pixels.begin() + static_cast<std::ptrdiff_t>(std::size_t{run.start} * c));
      src += std::size_t{run.length} * c;
    }
  }

  if (std::find(covered.begin(), covered.end(), false) != covered.end()) {
    std::vector<std::uint16_t> missing;
    for (std::size_t id = 0; id < received.size(); ++id)
      if (!received[id]) missing.push_back(static_cast<std::uint16_t>(id));
    throw MissingSegmentError(std::move(missing));
  }
  return out;
}

bool verify_feature(const RasterImage& image, const Manifest& manifest, const KeySchedule& schedule) {
  if (image.width != manifest.width || image.height != manifest.height || image.channels != manifest.channels ||
      !image.valid())
    throw Error(Errc::DimensionMismatch, "image does not match manifest geometry");
  return image_feature(image, schedule) == manifest.feature;
}

RecordKind record_kind(ByteView bytes) noexcept {
  if (bytes.size() < 4) return RecordKind::Unknown;
  if (std::equal(kManifestMagic.begin(), kManifestMagic.end(), bytes.begin())) return RecordKind::Manifest;
  if (std::equal(kPacketMagic.begin(), kPacketMagic.end(), bytes.begin())) return RecordKind::Packet;
  return RecordKind::Unknown;
}

}  // namespace stegseg
