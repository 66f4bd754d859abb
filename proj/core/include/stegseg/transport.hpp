#pragma once

// One TCP connection per record: 4-byte little-endian length, record bytes,
// close. The receiver validates each record and stores it atomically as
// manifest.sgm or seg_NNNN.sgp; identical re-deliveries are idempotent.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "stegseg/msgcodec.hpp"
#include "stegseg/segment_wire.hpp"

namespace stegseg {

inline constexpr std::uint32_t kMaxRecordBytes = 1U << 30;
inline constexpr std::string_view kManifestFile = "manifest.sgm";

struct Endpoint {
  std::string host;
  std::uint16_t port = 0;

  /// "host:port"; throws InvalidParams.
  static Endpoint parse(std::string_view text);
  /// "[host:]port" for listening; port 0 asks for an ephemeral port.
  static Endpoint parse_listen(std::string_view text);
};

/// seg_0007.sgp
std::string packet_filename(std::uint16_t segment_id);

/// Writes the serialized manifest and packets into dir using the standard names.
void write_record_dir(const std::filesystem::path& dir, ByteView manifest, std::span<const Bytes> packets);

struct RecordDir {
  Bytes manifest;
  std::vector<Bytes> packets;
};

/// Reads manifest.sgm and every seg_*.sgp in dir (sorted by name). Throws IoError.
RecordDir read_record_dir(const std::filesystem::path& dir);

enum class StoreOutcome { Stored, AlreadyPresent };

/// Validates a record and stores it atomically in dir. Throws BadRecord when
/// it does not parse, DuplicateRecord when a different record already holds
/// the same name.
StoreOutcome store_record(const std::filesystem::path& dir, ByteView record);

/// Throws ConnectionFailed.
void send_record(const Endpoint& to, ByteView record);

/// Manifest first, then each packet, one connection apiece.
void send_segments(const Endpoint& to, ByteView manifest, std::span<const Bytes> packets);

class SegmentReceiver {
 public:
  using Logger = std::function<void(std::string_view)>;

  /// Binds immediately; port 0 picks an ephemeral port. Throws ConnectionFailed.
  SegmentReceiver(std::filesystem::path outdir, std::uint16_t port, std::string bind_address = "0.0.0.0",
                  Logger log = {});
  ~SegmentReceiver();

  SegmentReceiver(const SegmentReceiver&) = delete;
  SegmentReceiver& operator=(const SegmentReceiver&) = delete;

  std::uint16_t port() const noexcept { return port_; }

  /// True once the manifest and every segment it lists are on disk.
  bool complete() const;
  bool wait_complete(std::chrono::milliseconds timeout) const;

  void stop();

  /// Rejected records so far, one line each.
  std::vector<std::string> errors() const;

 private:
  void accept_loop();
  void handle(int fd);
  void note(std::string line);
  void refresh_from_disk();

  std::filesystem::path outdir_;
  Logger log_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::thread acceptor_;

  mutable std::mutex mu_;
  std::vector<std::thread> workers_;
  std::vector<std::string> errors_;
  std::optional<std::uint16_t> expected_segments_;
  std::set<std::uint16_t> stored_;
};

}  // namespace stegseg
