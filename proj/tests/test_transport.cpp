#include <doctest.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <random>
#include <thread>

#include "stegseg/error.hpp"
#include "stegseg/transport.hpp"
#include "test_support.hpp"
#include "image_io.hpp"

using namespace stegseg;
using namespace std::chrono_literals;
using stegseg::testing::TempDir;

namespace {

struct Records {
  Bytes manifest;
  std::vector<Bytes> packets;
};

Records make_records(std::uint32_t k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto img = stegseg::testing::random_image(rng, 20, 15, 3);
  Partition part{20, 15, k, {}};
  for (std::uint32_t i = 0; i < 300; ++i) part.labels.push_back(i % k);
  const auto packets = split_segments(img, part);
  Records r;
  r.manifest = serialize_manifest(make_manifest(img, packets, derive_schedule(SecretMaterial::from_strings("a", "b"))));
  for (const auto& p : packets) r.packets.push_back(serialize_packet(p));
  return r;
}

Endpoint loopback(const SegmentReceiver& rx) { return Endpoint{"127.0.0.1", rx.port()}; }

bool wait_for_error(const SegmentReceiver& rx, std::size_t count) {
  for (int i = 0; i < 200 && rx.errors().size() < count; ++i) std::this_thread::sleep_for(10ms);
  return rx.errors().size() >= count;
}

void send_raw(std::uint16_t port, const Bytes& bytes) {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  REQUIRE(fd >= 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  REQUIRE(::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0);
  REQUIRE(::send(fd, bytes.data(), bytes.size(), 0) == static_cast<ssize_t>(bytes.size()));
  ::shutdown(fd, SHUT_WR);
  char sink;
  while (::recv(fd, &sink, 1, 0) > 0) {
  }
  ::close(fd);
}

}  // namespace

TEST_CASE("Endpoint::parse") {
  const auto e = Endpoint::parse("example.org:9000");
  CHECK(e.host == "example.org");
  CHECK(e.port == 9000);
  CHECK(Endpoint::parse("127.0.0.1:1").port == 1);
  for (const char* bad : {"", "host", "host:", ":80", "host:0", "host:65536", "host:12x"})
    CHECK_THROWS_AS(Endpoint::parse(bad), Error);
}

TEST_CASE("packet_filename") {
  CHECK(packet_filename(0) == "seg_0000.sgp");
  CHECK(packet_filename(37) == "seg_0037.sgp");
}

TEST_CASE("loopback delivery stores identical files") {
  TempDir dir("rx");
  const auto records = make_records(3, 21);
  SegmentReceiver rx(dir.path(), 0, "127.0.0.1");
  CHECK_FALSE(rx.complete());
  send_segments(loopback(rx), records.manifest, records.packets);
  REQUIRE(rx.wait_complete(10s));
  const auto got = read_record_dir(dir.path());
  CHECK(got.manifest == records.manifest);
  CHECK(got.packets == records.packets);
  CHECK(rx.errors().empty());

  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir.path())) ++files;
  CHECK(files == 4);
}

TEST_CASE("packets before the manifest") {
  TempDir dir("rx_order");
  const auto records = make_records(4, 22);
  SegmentReceiver rx(dir.path(), 0, "127.0.0.1");
  for (auto it = records.packets.rbegin(); it != records.packets.rend(); ++it) send_record(loopback(rx), *it);
  CHECK_FALSE(rx.complete());
  send_record(loopback(rx), records.manifest);
  CHECK(rx.wait_complete(10s));
}

TEST_CASE("restart is idempotent") {
  TempDir dir("rx_restart");
  const auto records = make_records(3, 23);
  {
    SegmentReceiver rx(dir.path(), 0, "127.0.0.1");
    send_record(loopback(rx), records.manifest);
    send_record(loopback(rx), records.packets[0]);
    for (int i = 0; i < 200 && !std::filesystem::exists(dir.path() / packet_filename(0)); ++i)
      std::this_thread::sleep_for(10ms);
    CHECK_FALSE(rx.complete());
  }
  SegmentReceiver rx(dir.path(), 0, "127.0.0.1");
  send_segments(loopback(rx), records.manifest, records.packets);
  REQUIRE(rx.wait_complete(10s));
  CHECK(rx.errors().empty());
  CHECK(read_record_dir(dir.path()).packets == records.packets);
}

TEST_CASE("conflicting duplicate is refused") {
  TempDir dir("rx_dup");
  const auto a = make_records(2, 24);
  const auto b = make_records(2, 25);
  CHECK(store_record(dir.path(), a.packets[1]) == StoreOutcome::Stored);
  CHECK(store_record(dir.path(), a.packets[1]) == StoreOutcome::AlreadyPresent);
  try {
    store_record(dir.path(), b.packets[1]);
    FAIL("expected DuplicateRecord");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::DuplicateRecord);
  }
  CHECK(io::read_file(dir.path() / packet_filename(1)) == a.packets[1]);

  SegmentReceiver rx(dir.path(), 0, "127.0.0.1");
  send_record(loopback(rx), b.packets[1]);
  REQUIRE(wait_for_error(rx, 1));
  CHECK(rx.errors()[0].find("DuplicateRecord") != std::string::npos);
}

TEST_CASE("invalid records are rejected") {
  TempDir dir("rx_bad");
  auto corrupt = make_records(2, 26).packets[0];
  corrupt[corrupt.size() / 2] ^= 1;
  CHECK_THROWS_AS(store_record(dir.path(), corrupt), Error);
  CHECK(std::filesystem::is_empty(dir.path()));

  SegmentReceiver rx(dir.path(), 0, "127.0.0.1");
  // 2^30 + 1 in the length prefix.
  send_raw(rx.port(), Bytes{0x01, 0x00, 0x00, 0x40});
  REQUIRE(wait_for_error(rx, 1));
  CHECK(rx.errors()[0].find("BadRecord") != std::string::npos);

  send_record(loopback(rx), corrupt);
  REQUIRE(wait_for_error(rx, 2));
  CHECK(std::filesystem::is_empty(dir.path()));
}

TEST_CASE("send to a closed port fails") {
  std::uint16_t port;
  {
    TempDir dir("rx_closed");
    SegmentReceiver rx(dir.path(), 0, "127.0.0.1");
    port = rx.port();
  }
  try {
    send_record(Endpoint{"127.0.0.1", port}, Bytes{1, 2, 3});
    FAIL("expected ConnectionFailed");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ConnectionFailed);
  }
}

TEST_CASE("Endpoint::parse_listen") {
  CHECK(Endpoint::parse_listen("0").port == 0);
  CHECK(Endpoint::parse_listen("7000").host == "0.0.0.0");
  const auto e = Endpoint::parse_listen("127.0.0.1:0");
  CHECK(e.host == "127.0.0.1");
  CHECK(e.port == 0);
  for (const char* bad : {"", ":5", "x", "host:99999"}) CHECK_THROWS_AS(Endpoint::parse_listen(bad), Error);
}
