#include "stegseg/transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <sys/time.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>

#include "stegseg/error.hpp"

namespace fs = std::filesystem;

namespace stegseg {

namespace {

class Socket {
 public:
  explicit Socket(int fd = -1) noexcept : fd_(fd) {}
  ~Socket() { reset(); }
  Socket(Socket&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  Socket& operator=(Socket&& o) noexcept {
    if (this != &o) {
      reset();
      fd_ = std::exchange(o.fd_, -1);
    }
    return *this;
  }
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;

  int get() const noexcept { return fd_; }
  int release() noexcept { return std::exchange(fd_, -1); }
  void reset() noexcept {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_;
};

void set_timeouts(int fd, int seconds) {
  timeval tv{};
  tv.tv_sec = seconds;
  ::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
  ::setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof tv);
}

bool write_all(int fd, const std::uint8_t* data, std::size_t n) {
  while (n > 0) {
    const ssize_t w = ::send(fd, data, n, MSG_NOSIGNAL);
    if (w < 0 && errno == EINTR) continue;
    if (w <= 0) return false;
    data += w;
    n -= static_cast<std::size_t>(w);
  }
  return true;
}

// Returns bytes read; short only on EOF or error.
std::size_t read_all(int fd, std::uint8_t* data, std::size_t n) {
  std::size_t got = 0;
  while (got < n) {
    const ssize_t r = ::recv(fd, data + got, n - got, 0);
    if (r < 0 && errno == EINTR) continue;
    if (r <= 0) break;
    got += static_cast<std::size_t>(r);
  }
  return got;
}

Bytes read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file_atomic(const fs::path& path, ByteView bytes) {
  static std::atomic<unsigned> counter{0};
  const fs::path tmp = path.parent_path() / ("." + path.filename().string() + ".tmp" + std::to_string(::getpid()) +
                                             "_" + std::to_string(counter++));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::IoError, "cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(Errc::IoError, "short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(Errc::IoError, "cannot rename into " + path.string());
  }
}

std::mutex& store_mutex() {
  static std::mutex mu;
  return mu;
}

}  // namespace

namespace {

std::uint16_t parse_port(std::string_view digits, bool allow_zero) {
  unsigned port = 0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), port);
  if (digits.empty() || ec != std::errc{} || ptr != digits.data() + digits.size())
    throw Error(Errc::InvalidParams, "port must be numeric");
  if (port > 65535) throw Error(Errc::InvalidParams, "port out of range");
  if (port == 0 && !allow_zero) throw Error(Errc::InvalidParams, "port must be non-zero");
  return static_cast<std::uint16_t>(port);
}

}  // namespace

Endpoint Endpoint::parse(std::string_view text) {
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 == text.size())
    throw Error(Errc::InvalidParams, "endpoint must be host:port");
  return Endpoint{std::string(text.substr(0, colon)), parse_port(text.substr(colon + 1), false)};
}

Endpoint Endpoint::parse_listen(std::string_view text) {
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos) return Endpoint{"0.0.0.0", parse_port(text, true)};
  if (colon == 0) throw Error(Errc::InvalidParams, "listen address must be [host:]port");
  return Endpoint{std::string(text.substr(0, colon)), parse_port(text.substr(colon + 1), true)};
}

std::string packet_filename(std::uint16_t segment_id) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "seg_%04u.sgp", unsigned{segment_id});
  return buf;
}

void write_record_dir(const fs::path& dir, ByteView manifest, std::span<const Bytes> packets) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(Errc::IoError, "cannot create " + dir.string());
  write_file_atomic(dir / kManifestFile, manifest);
  for (const auto& p : packets) {
    const SegmentPacket parsed = parse_packet(p);
    write_file_atomic(dir / packet_filename(parsed.segment_id), p);
  }
}

RecordDir read_record_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(Errc::IoError, "not a directory: " + dir.string());
  RecordDir out;
  const fs::path manifest = dir / kManifestFile;
  if (!fs::exists(manifest)) throw Error(Errc::IoError, "manifest.sgm not found in " + dir.string());
  out.manifest = read_file(manifest);
  std::vector<fs::path> names;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (entry.is_regular_file() && name.starts_with("seg_") && name.ends_with(".sgp")) names.push_back(entry.path());
  }
  std::sort(names.begin(), names.end());
  for (const auto& p : names) out.packets.push_back(read_file(p));
  return out;
}

StoreOutcome store_record(const fs::path& dir, ByteView record) {
  std::string name;
  try {
    switch (record_kind(record)) {
      case RecordKind::Manifest:
        parse_manifest(record);
        name = std::string(kManifestFile);
        break;
      case RecordKind::Packet:
        name = packet_filename(parse_packet(record).segment_id);
        break;
      case RecordKind::Unknown:
        throw Error(Errc::BadMagic, "unknown record type");
    }
  } catch (const Error& e) {
    throw Error(Errc::BadRecord, e.what());
  }

  const fs::path target = dir / name;
  std::lock_guard lock(store_mutex());
  if (fs::exists(target)) {
    const Bytes existing = read_file(target);
    if (std::equal(existing.begin(), existing.end(), record.begin(), record.end())) return StoreOutcome::AlreadyPresent;
    throw Error(Errc::DuplicateRecord, "conflicting content for " + name);
  }
  write_file_atomic(target, record);
  return StoreOutcome::Stored;
}

void send_record(const Endpoint& to, ByteView record) {
  if (record.size() > kMaxRecordBytes) throw Error(Errc::BadRecord, "record exceeds 1 GiB limit");
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const std::string port = std::to_string(to.port);
  if (::getaddrinfo(to.host.c_str(), port.c_str(), &hints, &res) != 0 || !res)
    throw Error(Errc::ConnectionFailed, "cannot resolve " + to.host);

  Socket sock;
  for (addrinfo* ai = res; ai; ai = ai->ai_next) {
    Socket s(::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol));
    if (s.get() < 0) continue;
    if (::connect(s.get(), ai->ai_addr, ai->ai_addrlen) == 0) {
      sock = std::move(s);
      break;
    }
  }
  ::freeaddrinfo(res);
  if (sock.get() < 0) throw Error(Errc::ConnectionFailed, "cannot connect to " + to.host + ":" + port);
  set_timeouts(sock.get(), 30);

  std::uint8_t prefix[4];
  const auto len = static_cast<std::uint32_t>(record.size());
  for (int i = 0; i < 4; ++i) prefix[i] = static_cast<std::uint8_t>(len >> (8 * i));
  if (!write_all(sock.get(), prefix, 4) || !write_all(sock.get(), record.data(), record.size()))
    throw Error(Errc::ConnectionFailed, "send interrupted");
  ::shutdown(sock.get(), SHUT_WR);
  // Wait for the receiver to close, so the record is stored before we return.
  std::uint8_t sink[64];
  while (::recv(sock.get(), sink, sizeof sink, 0) > 0) {
  }
}

void send_segments(const Endpoint& to, ByteView manifest, std::span<const Bytes> packets) {
  send_record(to, manifest);
  for (const auto& p : packets) send_record(to, p);
}

// ---------------------------------------------------------------------------

SegmentReceiver::SegmentReceiver(fs::path outdir, std::uint16_t port, std::string bind_address, Logger log)
    : outdir_(std::move(outdir)), log_(std::move(log)) {
  std::error_code ec;
  fs::create_directories(outdir_, ec);
  if (ec) throw Error(Errc::IoError, "cannot create " + outdir_.string());

  Socket sock(::socket(AF_INET, SOCK_STREAM, 0));
  if (sock.get() < 0) throw Error(Errc::ConnectionFailed, "socket() failed");
  int one = 1;
  ::setsockopt(sock.get(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, bind_address.c_str(), &addr.sin_addr) != 1)
    throw Error(Errc::ConnectionFailed, "bad bind address " + bind_address);
  if (::bind(sock.get(), reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0)
    throw Error(Errc::ConnectionFailed, "cannot bind port " + std::to_string(port) + ": " + std::strerror(errno));
  if (::listen(sock.get(), 64) != 0) throw Error(Errc::ConnectionFailed, "listen() failed");
  socklen_t len = sizeof addr;
  ::getsockname(sock.get(), reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
  listen_fd_ = sock.release();

  refresh_from_disk();
  acceptor_ = std::thread([this] { accept_loop(); });
}

SegmentReceiver::~SegmentReceiver() { stop(); }

void SegmentReceiver::refresh_from_disk() {
  std::lock_guard lock(mu_);
  const fs::path manifest = outdir_ / kManifestFile;
  if (fs::exists(manifest)) {
    try {
      expected_segments_ = static_cast<std::uint16_t>(parse_manifest(read_file(manifest)).table.size());
    } catch (const Error&) {
    }
  }
  for (const auto& entry : fs::directory_iterator(outdir_)) {
    const auto name = entry.path().filename().string();
    if (name.size() == 12 && name.starts_with("seg_") && name.ends_with(".sgp"))
      stored_.insert(static_cast<std::uint16_t>(std::stoul(name.substr(4, 4))));
  }
}

void SegmentReceiver::accept_loop() {
  while (!stopping_) {
    pollfd pfd{listen_fd_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, 50);
    if (ready <= 0) continue;
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) continue;
    std::lock_guard lock(mu_);
    workers_.emplace_back([this, fd] { handle(fd); });
  }
}

void SegmentReceiver::handle(int raw_fd) {
  Socket sock(raw_fd);
  set_timeouts(sock.get(), 30);
  std::uint8_t prefix[4];
  if (read_all(sock.get(), prefix, 4) != 4) {
    note("Truncated: connection closed before length prefix");
    return;
  }
  std::uint32_t len = 0;
  for (int i = 3; i >= 0; --i) len = (len << 8) | prefix[i];
  if (len > kMaxRecordBytes) {
    note("BadRecord: length prefix " + std::to_string(len) + " exceeds limit");
    return;
  }
  Bytes record(len);
  if (read_all(sock.get(), record.data(), len) != len) {
    note("Truncated: record shorter than its length prefix");
    return;
  }
  try {
    store_record(outdir_, record);
    std::lock_guard lock(mu_);
    if (record_kind(record) == RecordKind::Manifest)
      expected_segments_ = static_cast<std::uint16_t>(parse_manifest(record).table.size());
    else
      stored_.insert(parse_packet(record).segment_id);
  } catch (const Error& e) {
    note(e.what());
  }
}

void SegmentReceiver::note(std::string line) {
  if (log_) log_(line);
  std::lock_guard lock(mu_);
  errors_.push_back(std::move(line));
}

bool SegmentReceiver::complete() const {
  std::lock_guard lock(mu_);
  if (!expected_segments_) return false;
  for (std::uint32_t id = 0; id < *expected_segments_; ++id)
    if (!stored_.contains(static_cast<std::uint16_t>(id))) return false;
  return true;
}

bool SegmentReceiver::wait_complete(std::chrono::milliseconds timeout) const {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  while (!complete()) {
    if (std::chrono::steady_clock::now() >= deadline) return false;
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  return true;
}

void SegmentReceiver::stop() {
  if (stopping_.exchange(true)) return;
  if (acceptor_.joinable()) acceptor_.join();
  std::vector<std::thread> workers;
  {
    std::lock_guard lock(mu_);
    workers.swap(workers_);
  }
  for (auto& t : workers)
    if (t.joinable()) t.join();
  if (listen_fd_ >= 0) ::close(listen_fd_);
  listen_fd_ = -1;
}

std::vector<std::string> SegmentReceiver::errors() const {
  std::lock_guard lock(mu_);
  return errors_;
}

}  // namespace stegseg
