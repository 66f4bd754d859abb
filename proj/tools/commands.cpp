#include "commands.hpp"

#include <termios.h>
#include <unistd.h>

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <thread>

#include "image_io.hpp"
#include "stegseg/lsb_embed.hpp"
#include "stegseg/msgcodec.hpp"
#include "stegseg/ncut.hpp"
#include "stegseg/pipeline.hpp"
#include "stegseg/segment_wire.hpp"
#include "stegseg/transport.hpp"

namespace fs = std::filesystem;

namespace stegseg::cli {

int exit_code_for(Errc code) noexcept {
  switch (code) {
    case Errc::CapacityExceeded:
      return kCapacity;
    case Errc::WrongPassword:
      return kWrongPassword;
    case Errc::FeatureMismatch:
    case Errc::TagMismatch:
    case Errc::ChecksumMismatch:
    case Errc::OverlapError:
    case Errc::UnknownSegment:
    case Errc::CountMismatch:
      return kIntegrity;
    case Errc::MissingSegment:
      return kMissingSegments;
    case Errc::EmptySecret:
    case Errc::InvalidParams:
      return kUsage;
    default:
      return kIoOrFormat;
  }
}

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PipelineConfig {
  std::optional<std::string> key;
  std::optional<std::string> password;
  int bits = 1;
  std::optional<std::string> salt_hex;
  bool deterministic = false;
  NcutParams ncut;
};

std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  if (v && *v) return std::string(v);
  return std::nullopt;
}

std::string prompt_hidden(const char* label) {
  std::FILE* tty = std::fopen("/dev/tty", "r+");
  if (!tty) throw UsageError(std::string(label) + " not given (flag or environment) and no terminal to prompt on");
  const int fd = fileno(tty);
  termios saved{};
  const bool have_term = tcgetattr(fd, &saved) == 0;
  if (have_term) {
    termios quiet = saved;
    quiet.c_lflag &= static_cast<tcflag_t>(~ECHO);
    tcsetattr(fd, TCSAFLUSH, &quiet);
  }
  std::fprintf(tty, "%s: ", label);
  std::fflush(tty);
  std::string line;
  for (int ch = std::fgetc(tty); ch != EOF && ch != '\n'; ch = std::fgetc(tty)) line.push_back(char(ch));
  if (have_term) tcsetattr(fd, TCSAFLUSH, &saved);
  std::fputc('\n', tty);
  std::fclose(tty);
  return line;
}

SecretMaterial resolve_secrets(const PipelineConfig& cfg) {
  std::string key = cfg.key ? *cfg.key : env("STEGSEG_KEY").value_or("");
  if (key.empty()) key = prompt_hidden("Secret key");
  std::string password = cfg.password ? *cfg.password : env("STEGSEG_PASSWORD").value_or("");
  if (password.empty()) password = prompt_hidden("Password");
  if (key.empty() || password.empty()) throw UsageError("secret key and password must be non-empty");
  return SecretMaterial::from_strings(key, password);
}

Salt parse_salt(const std::string& hex) {
  if (hex.size() != 16) throw UsageError("--salt takes exactly 16 hex characters");
  Salt salt{};
  for (std::size_t i = 0; i < 8; ++i) {
    unsigned v = 0;
    for (std::size_t k = 0; k < 2; ++k) {
      const char c = hex[2 * i + k];
      unsigned nib;
      if (c >= '0' && c <= '9') nib = unsigned(c - '0');
      else if (c >= 'a' && c <= 'f') nib = unsigned(c - 'a' + 10);
      else if (c >= 'A' && c <= 'F') nib = unsigned(c - 'A' + 10);
      else throw UsageError("--salt must be hexadecimal");
      v = v * 16 + nib;
    }
    salt[i] = static_cast<std::uint8_t>(v);
  }
  return salt;
}

HideOptions hide_options(const PipelineConfig& cfg, std::ostream& err) {
  HideOptions opts;
  opts.bits_per_channel = cfg.bits;
  if (cfg.deterministic) {
    if (!cfg.salt_hex) throw UsageError("--deterministic requires --salt");
    opts.salt = parse_salt(*cfg.salt_hex);
  } else if (cfg.salt_hex) {
    err << "stegseg: warning: --salt ignored without --deterministic\n";
  }
  return opts;
}

std::string hex(std::span<const std::uint8_t> bytes) {
  static const char* digits = "0123456789abcdef";
  std::string s;
  for (auto b : bytes) {
    s.push_back(digits[b >> 4]);
    s.push_back(digits[b & 15]);
  }
  return s;
}

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void add_secret_options(CLI::App* cmd, PipelineConfig& cfg) {
  cmd->add_option("--key", cfg.key, "Secret key (or STEGSEG_KEY)");
  cmd->add_option("--password", cfg.password, "Password (or STEGSEG_PASSWORD; prompted if absent)");
}

void add_hide_options(CLI::App* cmd, PipelineConfig& cfg) {
  cmd->add_option("--bits", cfg.bits, "Payload bits per channel byte")->check(CLI::IsMember({1, 2}));
  cmd->add_flag("--deterministic", cfg.deterministic, "Use the --salt value instead of OS entropy");
  cmd->add_option("--salt", cfg.salt_hex, "16 hex chars; honored only with --deterministic");
}

void add_ncut_options(CLI::App* cmd, PipelineConfig& cfg) {
  cmd->add_option("--ncut-max-dim", cfg.ncut.max_dim, "Working-scale cap in pixels");
  cmd->add_option("--ncut-stop", cfg.ncut.ncut_stop, "Stop splitting above this Ncut value");
  cmd->add_option("--max-segments", cfg.ncut.max_segments, "Upper bound on segment count");
  cmd->add_option("--ncut-sigma-i", cfg.ncut.sigma_i, "Intensity bandwidth on the [0,1] scale");
  cmd->add_option("--ncut-sigma-x", cfg.ncut.sigma_x, "Spatial bandwidth in pixels");
  cmd->add_option("--ncut-radius", cfg.ncut.radius_r, "Affinity radius in pixels");
}

std::vector<SegmentPacket> parse_packets(const std::vector<Bytes>& records) {
  std::vector<SegmentPacket> packets;
  packets.reserve(records.size());
  for (const auto& r : records) packets.push_back(parse_packet(r));
  return packets;
}

void write_outbox(const fs::path& dir, const SplitResult& split) {
  std::vector<Bytes> records;
  for (const auto& p : split.packets) records.push_back(serialize_packet(p));
  write_record_dir(dir, serialize_manifest(split.manifest), records);
}

// --- commands --------------------------------------------------------------

int cmd_hide(const PipelineConfig& cfg, const fs::path& cover_path, const fs::path& message_path,
             const fs::path& out_path, std::ostream& out, std::ostream& err) {
  const HideOptions opts = hide_options(cfg, err);
  const SecretMaterial material = resolve_secrets(cfg);
  const RasterImage cover = io::load_image(cover_path);
  const Bytes message = io::read_file(message_path);
  const RasterImage stego = hide_message(cover, message, material, opts);
  io::save_image(out_path, stego);
  out << "embedded " << message.size() << " bytes into " << cover.width << "x" << cover.height << "x"
      << int(cover.channels) << " (" << psnr(cover, stego) << " dB)\n";
  return kOk;
}

int cmd_split(const PipelineConfig& cfg, const fs::path& stego_path, const fs::path& outdir,
              const std::optional<fs::path>& labels_out, std::ostream& out) {
  const SecretMaterial material = resolve_secrets(cfg);
  const RasterImage stego = io::load_image(stego_path);
  const SplitResult split = split_stego(stego, derive_schedule(material), cfg.ncut);
  write_outbox(outdir, split);
  if (labels_out) io::save_image(*labels_out, label_image(split.partition));
  out << "wrote " << split.packets.size() << " segments to " << outdir.string() << "\n";
  return kOk;
}

int cmd_send(const fs::path& indir, const std::string& to, std::ostream& out) {
  const Endpoint ep = Endpoint::parse(to);
  const RecordDir dir = read_record_dir(indir);
  send_segments(ep, dir.manifest, dir.packets);
  out << "sent manifest and " << dir.packets.size() << " segments to " << to << "\n";
  return kOk;
}

int cmd_recv(const std::string& listen, const fs::path& outdir, double timeout_s, std::ostream& out,
             std::ostream& err) {
  const Endpoint ep = Endpoint::parse_listen(listen);
  const std::string host = ep.host;
  SegmentReceiver receiver(outdir, ep.port, host, [&err](std::string_view line) { err << "stegseg: recv: " << line << "\n"; });
  out << "listening on " << host << ":" << receiver.port() << "\n" << std::flush;
  const auto budget = timeout_s > 0 ? std::chrono::milliseconds(static_cast<long long>(timeout_s * 1000))
                                    : std::chrono::milliseconds::max();
  const auto deadline = timeout_s > 0 ? std::chrono::steady_clock::now() + budget
                                      : std::chrono::steady_clock::time_point::max();
  while (!receiver.complete()) {
    if (std::chrono::steady_clock::now() >= deadline) {
      receiver.stop();
      err << "stegseg: error: timed out before every segment arrived\n";
      return kMissingSegments;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  receiver.stop();
  out << "received complete segment set into " << outdir.string() << "\n";
  return kOk;
}

int cmd_assemble(const PipelineConfig& cfg, const fs::path& indir, const fs::path& out_path, std::ostream& out) {
  const SecretMaterial material = resolve_secrets(cfg);
  const RecordDir dir = read_record_dir(indir);
  const Manifest manifest = parse_manifest(dir.manifest);
  const auto packets = parse_packets(dir.packets);
  const RasterImage image = assemble_verified(manifest, packets, derive_schedule(material));
  io::save_image(out_path, image);
  out << "reassembled " << packets.size() << " segments; feature verified\n";
  return kOk;
}

int cmd_reveal(const PipelineConfig& cfg, const fs::path& stego_path, const fs::path& out_path, std::ostream& out) {
  const SecretMaterial material = resolve_secrets(cfg);
  const RasterImage stego = io::load_image(stego_path);
  const Bytes message = reveal_message(stego, material);
  io::write_file(out_path, message);
  out << "recovered " << message.size() << " bytes\n";
  return kOk;
}

nlohmann::ordered_json describe_header(const StegoHeader& h) {
  nlohmann::ordered_json j;
  j["version"] = h.version;
  j["flags"] = h.flags;
  j["bits_per_channel"] = h.bits_per_channel();
  j["payload_len"] = h.payload_len;
  j["salt"] = hex(h.salt);
  j["verifier"] = hex64(h.verifier);
  j["tag"] = hex(h.tag);
  return j;
}

int cmd_inspect(const fs::path& file, std::ostream& out) {
  const Bytes bytes = io::read_file(file);
  nlohmann::ordered_json j;
  j["file"] = file.string();
  switch (record_kind(bytes)) {
    case RecordKind::Manifest: {
      const Manifest m = parse_manifest(bytes);
      j["type"] = "manifest";
      j["version"] = kWireVersion;
      j["width"] = m.width;
      j["height"] = m.height;
      j["channels"] = m.channels;
      j["segment_count"] = m.table.size();
      j["feature"] = hex64(m.feature);
      auto& table = j["segments"] = nlohmann::ordered_json::array();
      for (const auto& e : m.table)
        table.push_back({{"segment_id", e.segment_id}, {"pixel_count", e.pixel_count}, {"checksum", hex64(e.checksum)}});
      j["checksum"] = hex64(m.checksum);
      break;
    }
    case RecordKind::Packet: {
      const SegmentPacket p = parse_packet(bytes);
      j["type"] = "segment";
      j["version"] = kWireVersion;
      j["segment_id"] = p.segment_id;
      j["run_count"] = p.runs.size();
      j["pixel_count"] = p.pixel_count();
      j["pixel_bytes"] = p.pixel_bytes.size();
      if (!p.runs.empty()) j["first_run"] = {p.runs.front().start, p.runs.front().length};
      j["checksum"] = hex64(p.checksum);
      break;
    }
    case RecordKind::Unknown: {
      const RasterImage img = io::decode_image(bytes);
      j["type"] = "image";
      j["width"] = img.width;
      j["height"] = img.height;
      j["channels"] = img.channels;
      j["capacity_bytes_1bpc"] = capacity(img, 1) / 8;
      j["capacity_bytes_2bpc"] = capacity(img, 2) / 8;
      try {
        j["stego_header"] = describe_header(read_header(img));
      } catch (const Error& e) {
        if (e.code() != Errc::NoPayload && e.code() != Errc::TruncatedImage) throw;
        j["stego_header"] = nullptr;
      }
      break;
    }
  }
  out << j.dump(2) << "\n";
  return kOk;
}

int cmd_pipeline(const PipelineConfig& cfg, const fs::path& cover_path, const fs::path& message_path,
                 const fs::path& workdir, const std::optional<fs::path>& out_path, std::ostream& out,
                 std::ostream& err) {
  const HideOptions opts = hide_options(cfg, err);
  const SecretMaterial material = resolve_secrets(cfg);
  const KeySchedule schedule = derive_schedule(material);
  std::error_code ec;
  fs::create_directories(workdir, ec);
  if (ec) throw Error(Errc::IoError, "cannot create " + workdir.string());

  // Sender.
  const RasterImage cover = io::load_image(cover_path);
  const Bytes message = io::read_file(message_path);
  const RasterImage stego = hide_message(cover, message, material, opts);
  io::save_image(workdir / "stego.png", stego);
  const SplitResult split = split_stego(stego, schedule, cfg.ncut);
  const fs::path outbox = workdir / "outbox";
  const fs::path inbox = workdir / "inbox";
  fs::remove_all(inbox, ec);
  write_outbox(outbox, split);

  // Loopback transmission, one connection per record.
  {
    SegmentReceiver receiver(inbox, 0, "127.0.0.1", [&err](std::string_view line) { err << "stegseg: recv: " << line << "\n"; });
    const RecordDir sent = read_record_dir(outbox);
    send_segments(Endpoint{"127.0.0.1", receiver.port()}, sent.manifest, sent.packets);
    if (!receiver.wait_complete(std::chrono::seconds(30)))
      throw Error(Errc::ConnectionFailed, "loopback transfer did not complete");
    receiver.stop();
  }

  // Receiver.
  const RecordDir received = read_record_dir(inbox);
  const Manifest manifest = parse_manifest(received.manifest);
  const RasterImage assembled = assemble_verified(manifest, parse_packets(received.packets), schedule);
  io::save_image(workdir / "assembled.png", assembled);
  const Bytes recovered = reveal_message(assembled, material);
  const fs::path target = out_path.value_or(workdir / "recovered.bin");
  io::write_file(target, recovered);

  out << "segments: " << split.packets.size() << "\n"
      << "psnr_db: " << psnr(cover, stego) << "\n"
      << "recovered: " << recovered.size() << " bytes -> " << target.string() << "\n"
      << "match: " << (recovered == message ? "yes" : "no") << "\n";
  return recovered == message ? kOk : kIntegrity;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Segmented image steganography: hide, split, transmit, reassemble, reveal"};
  app.name(args.empty() ? "stegseg" : fs::path(args[0]).filename().string());
  app.require_subcommand(1);
  app.set_version_flag("--version", "stegseg 0.1.0");

  PipelineConfig cfg;
  fs::path cover, message, outfile, stego, dir, file, workdir;
  std::optional<fs::path> labels_out, pipeline_out;
  std::string to, listen;
  double timeout_s = 0;

  auto* hide = app.add_subcommand("hide", "Permute, encrypt and embed a message into a cover image");
  hide->add_option("--cover", cover, "Lossless cover image")->required();
  hide->add_option("--message", message, "Message file (any bytes)")->required();
  hide->add_option("--out", outfile, "Stego image to write (.png/.ppm)")->required();
  add_secret_options(hide, cfg);
  add_hide_options(hide, cfg);

  auto* split = app.add_subcommand("split", "Segment a stego image into manifest + packets");
  split->add_option("--stego", stego, "Stego image")->required();
  split->add_option("--outdir", dir, "Directory for manifest.sgm and seg_NNNN.sgp")->required();
  split->add_option("--labels-out", labels_out, "Optional debug label map (8-bit gray .png)");
  add_secret_options(split, cfg);
  add_ncut_options(split, cfg);

  auto* send = app.add_subcommand("send", "Transmit a record directory, one connection per record");
  send->add_option("--indir", dir, "Directory holding manifest.sgm and segments")->required();
  send->add_option("--to", to, "Receiver host:port")->required();

  auto* recv = app.add_subcommand("recv", "Receive records until the segment set is complete");
  recv->add_option("--listen", listen, "[host:]port to listen on")->required();
  recv->add_option("--outdir", dir, "Directory to store received records")->required();
  recv->add_option("--timeout", timeout_s, "Give up after this many seconds (0 = wait forever)");

  auto* assemble = app.add_subcommand("assemble", "Reassemble segments and verify the keyed feature");
  assemble->add_option("--indir", dir, "Directory holding manifest.sgm and segments")->required();
  assemble->add_option("--out", outfile, "Reassembled stego image to write")->required();
  add_secret_options(assemble, cfg);

  auto* reveal = app.add_subcommand("reveal", "Check password, extract, decrypt and re-permute");
  reveal->add_option("--stego", stego, "Stego image")->required();
  reveal->add_option("--out", outfile, "Recovered message file")->required();
  add_secret_options(reveal, cfg);

  auto* inspect = app.add_subcommand("inspect", "Print the fields of a record or stego header");
  inspect->add_option("--file", file, ".sgm, .sgp or image file")->required();

  auto* pipeline = app.add_subcommand("pipeline", "End-to-end run through an in-process loopback");
  pipeline->add_option("--cover", cover, "Lossless cover image")->required();
  pipeline->add_option("--message", message, "Message file")->required();
  pipeline->add_option("--workdir", workdir, "Working directory for all intermediate files")->required();
  pipeline->add_option("--out", pipeline_out, "Recovered message file (default <workdir>/recovered.bin)");
  add_secret_options(pipeline, cfg);
  add_hide_options(pipeline, cfg);
  add_ncut_options(pipeline, cfg);

  // CLI11 consumes arguments from the back.
  std::vector<std::string> tail(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(tail.begin(), tail.end());
  try {
    app.parse(tail);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*hide) return cmd_hide(cfg, cover, message, outfile, out, err);
    if (*split) return cmd_split(cfg, stego, dir, labels_out, out);
    if (*send) return cmd_send(dir, to, out);
    if (*recv) return cmd_recv(listen, dir, timeout_s, out, err);
    if (*assemble) return cmd_assemble(cfg, dir, outfile, out);
    if (*reveal) return cmd_reveal(cfg, stego, outfile, out);
    if (*inspect) return cmd_inspect(file, out);
    if (*pipeline) return cmd_pipeline(cfg, cover, message, workdir, pipeline_out, out, err);
  } catch (const UsageError& e) {
    err << "stegseg: usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "stegseg: error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    err << "stegseg: error: " << e.what() << "\n";
    return kIoOrFormat;
  }
  return kUsage;
}

}  // namespace stegseg::cli
