// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "image_io.hpp"
#include "stegseg/error.hpp"
#include "stegseg/lsb_embed.hpp"
#include "stegseg/msgcodec.hpp"
#include "stegseg/ncut.hpp"
#include "stegseg/pipeline.hpp"
#include "stegseg/segment_wire.hpp"
#include "stegseg/transport.hpp"
#include "test_support.hpp"

using namespace stegseg;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string random_secret(std::mt19937_64& rng) {
  static const char alphabet[] = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789-_.!";
  std::string s(4 + rng() % 28, ' ');
  for (auto& c : s) c = alphabet[rng() % (sizeof alphabet - 1)];
  return s;
}

// Independent fidelity measures.
int worst_diff(const RasterImage& a, const RasterImage& b) {
  int worst = 0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) worst = std::max(worst, std::abs(a.pixels[i] - b.pixels[i]));
  return worst;
}

double psnr_db(const RasterImage& a, const RasterImage& b) {
  long double sse = 0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    const long double d = a.pixels[i] - b.pixels[i];
    sse += d * d;
  }
  if (sse == 0) return std::numeric_limits<double>::infinity();
  return double(10.0L * std::log10(255.0L * 255.0L * a.pixels.size() / sse));
}

int run_cli(const std::vector<std::string>& args, std::string* err_text = nullptr) {
  std::ostringstream out, err;
  std::vector<std::string> argv{"stegseg"};
  argv.insert(argv.end(), args.begin(), args.end());
  const int rc = cli::run(argv, out, err);
  if (err_text) *err_text = err.str();
  return rc;
}

// --- 1, 3, 6: randomized end-to-end trials ---------------------------------

struct TrialLog {
  int exact = 0;
  int trials = 0;
  double pipeline_seconds = 0;
  int one_bpc = 0;
  int fidelity_ok = 0;
  double min_psnr = std::numeric_limits<double>::infinity();
  int max_diff = 0;
  std::size_t fiedler_pairs = 0;
  double max_residual = 0;
  std::vector<std::string> failures;
};

TrialLog end_to_end(std::mt19937_64& rng, const fs::path& root, int trials) {
  TrialLog log;
  log.trials = trials;
  for (int t = 0; t < trials; ++t) {
    const auto w = 64 + std::uint32_t(rng() % 449), h = 64 + std::uint32_t(rng() % 449);
    const std::uint8_t c = std::array<std::uint8_t, 3>{1, 3, 4}[t % 3];
    const int bpc = (t % 4 == 3) ? 2 : 1;
    const RasterImage cover =
        (t % 2) ? testing::structured_image(rng, w, h, c) : testing::random_image(rng, w, h, c);
    const std::size_t max_bytes = capacity(cover, bpc) / 8;
    std::size_t len;
    if (t == 0)
      len = 0;
    else if (t == 1)
      len = max_bytes * 95 / 100;
    else
      len = std::size_t(double(rng() % 1000001) / 1e6 * 0.95 * double(max_bytes));
    const Bytes message = testing::random_bytes(rng, len);
    const std::string key = random_secret(rng), password = random_secret(rng);

    const fs::path dir = root / ("trial_" + std::to_string(t));
    fs::create_directories(dir);
    io::save_image(dir / "cover.png", cover);
    io::write_file(dir / "message.bin", message);

    const auto t0 = Clock::now();
    std::string err;
    const int rc = run_cli({"pipeline", "--cover", (dir / "cover.png").string(), "--message",
                            (dir / "message.bin").string(), "--workdir", (dir / "work").string(), "--key", key,
                            "--password", password, "--bits", std::to_string(bpc)},
                           &err);
    log.pipeline_seconds += seconds_since(t0);

    const bool exact = rc == 0 && io::read_file(dir / "work" / "recovered.bin") == message;
    if (exact)
      ++log.exact;
    else
      log.failures.push_back("trial " + std::to_string(t) + " rc=" + std::to_string(rc) + " " + err);

    if (rc == 0) {
      const RasterImage stego = io::load_image(dir / "work" / "stego.png");
      if (bpc == 1) {
        ++log.one_bpc;
        const int d = worst_diff(cover, stego);
        const double p = psnr_db(cover, stego);
        log.max_diff = std::max(log.max_diff, d);
        log.min_psnr = std::min(log.min_psnr, p);
        if (d <= 1 && p >= 48.13) ++log.fidelity_ok;
      }
      // Recompute the segmentation of the transmitted stego image to collect
      // every eigenpair that produced a split; it must match what was sent.
      const auto schedule = derive_schedule(SecretMaterial::from_strings(key, password));
      const SplitResult split = split_stego(stego, schedule);
      const RecordDir sent = read_record_dir(dir / "work" / "outbox");
      bool same = sent.manifest == serialize_manifest(split.manifest) && sent.packets.size() == split.packets.size();
      for (std::size_t i = 0; same && i < split.packets.size(); ++i)
        same = sent.packets[i] == serialize_packet(split.packets[i]);
      if (!same) log.failures.push_back("trial " + std::to_string(t) + ": re-segmentation differs from outbox");
      for (const auto& f : split.stats.accepted) {
        ++log.fiedler_pairs;
        log.max_residual = std::max(log.max_residual, f.residual);
      }
      if (split.stats.non_converged > 0)
        log.failures.push_back("trial " + std::to_string(t) + ": " + std::to_string(split.stats.non_converged) +
                               " eigensolves did not converge");
    }
    fs::remove_all(dir);
  }
  return log;
}

// --- 2: password gate -------------------------------------------------------

Outcome password_gate(std::mt19937_64& rng, const fs::path& root, int trials) {
  int refused = 0, silent_files = 0;
  fs::create_directories(root / "gate");
  for (int t = 0; t < trials; ++t) {
    const RasterImage cover = testing::random_image(rng, 96, 80, 3);
    const Bytes message = testing::random_bytes(rng, 1 + rng() % 600);
    const std::string key = random_secret(rng), password = random_secret(rng);
    std::string wrong = random_secret(rng);
    if (wrong == password) wrong += "x";
    const RasterImage stego = hide_message(cover, message, SecretMaterial::from_strings(key, password));

    bool library_refused = false;
    try {
      reveal_message(stego, SecretMaterial::from_strings(key, wrong));
    } catch (const Error& e) {
      library_refused = e.code() == Errc::WrongPassword;
    }
    const fs::path in = root / "gate" / "stego.png", out = root / "gate" / "out.bin";
    io::save_image(in, stego);
    fs::remove(out);
    const int rc = run_cli({"reveal", "--stego", in.string(), "--out", out.string(), "--key", key, "--password", wrong});
    const bool emitted = fs::exists(out) && fs::file_size(out) > 0;
    if (emitted) ++silent_files;
    if (library_refused && rc == cli::kWrongPassword && !fs::exists(out)) ++refused;
  }
  return {refused == trials, std::to_string(refused) + "/" + std::to_string(trials) + " WrongPassword, " +
                                 std::to_string(silent_files) + " outputs with payload bytes"};
}

// --- 4: reassembly ------------------------------------------------------------

Partition random_partition(std::mt19937_64& rng, std::uint32_t w, std::uint32_t h) {
  Partition p;
  p.width = w;
  p.height = h;
  p.labels.assign(std::size_t{w} * h, 0);
  const std::uint32_t k = 1 + std::uint32_t(rng() % std::min<std::uint64_t>(16, std::uint64_t{w} * h));
  p.k = k;
  switch (rng() % 3) {
    case 0:  // scattered pixels
      for (std::size_t i = 0; i < p.labels.size(); ++i) p.labels[i] = i < k ? std::uint32_t(i) : std::uint32_t(rng() % k);
      std::shuffle(p.labels.begin(), p.labels.end(), rng);
      break;
    case 1:  // horizontal bands of random height
      for (std::uint32_t y = 0; y < h; ++y)
        for (std::uint32_t x = 0; x < w; ++x) p.labels[std::size_t{y} * w + x] = std::uint32_t(std::uint64_t{y} * k / h);
      break;
    default: {  // Voronoi cells
      std::vector<std::pair<std::uint32_t, std::uint32_t>> seeds(k);
      for (auto& s : seeds) s = {std::uint32_t(rng() % w), std::uint32_t(rng() % h)};
      for (std::uint32_t y = 0; y < h; ++y)
        for (std::uint32_t x = 0; x < w; ++x) {
          std::uint32_t best = 0;
          long long best_d = std::numeric_limits<long long>::max();
          for (std::uint32_t s = 0; s < k; ++s) {
            const long long dx = (long long)x - seeds[s].first, dy = (long long)y - seeds[s].second;
            if (dx * dx + dy * dy < best_d) {
              best_d = dx * dx + dy * dy;
              best = s;
            }
          }
          p.labels[std::size_t{y} * w + x] = best;
        }
      break;
    }
  }
  // Dense ids: drop labels that no pixel received.
  std::vector<std::int64_t> remap(k, -1);
  std::uint32_t next = 0;
  for (auto& l : p.labels) {
    if (remap[l] < 0) remap[l] = next++;
    l = std::uint32_t(remap[l]);
  }
  p.k = next;
  return p;
}

Outcome reassembly(std::mt19937_64& rng, int pairs, int orders) {
  int ok_pairs = 0;
  long reassembled = 0, missing_ok = 0, missing_total = 0, overlap_ok = 0, overlap_total = 0;
  const auto schedule = derive_schedule(SecretMaterial::from_strings("acceptance", "reassembly"));
  for (int t = 0; t < pairs; ++t) {
    const auto w = 1 + std::uint32_t(rng() % 200), h = 1 + std::uint32_t(rng() % 200);
    const RasterImage img = testing::random_image(rng, w, h, std::array<std::uint8_t, 3>{1, 3, 4}[t % 3]);
    const Partition part = random_partition(rng, w, h);
    const auto built = split_segments(img, part);
    const Manifest manifest = parse_manifest(serialize_manifest(make_manifest(img, built, schedule)));
    std::vector<SegmentPacket> packets;
    for (const auto& p : built) packets.push_back(parse_packet(serialize_packet(p)));

    bool all = true;
    for (int o = 0; o < orders; ++o) {
      std::shuffle(packets.begin(), packets.end(), rng);
      const bool same = reassemble(manifest, packets) == img && verify_feature(img, manifest, schedule);
      reassembled += same;
      all = all && same;
    }
    for (std::size_t drop = 0; drop < packets.size(); ++drop) {
      auto partial = packets;
      const auto id = partial[drop].segment_id;
      partial.erase(partial.begin() + std::ptrdiff_t(drop));
      ++missing_total;
      try {
        reassemble(manifest, partial);
        all = false;
      } catch (const MissingSegmentError& e) {
        const bool named = e.missing_ids() == std::vector<std::uint16_t>{id};
        missing_ok += named;
        all = all && named;
      } catch (const Error&) {
        all = false;
      }
    }
    for (std::size_t dup = 0; dup < packets.size(); ++dup) {
      auto doubled = packets;
      doubled.insert(doubled.begin() + std::ptrdiff_t(rng() % (doubled.size() + 1)), packets[dup]);
      ++overlap_total;
      try {
        reassemble(manifest, doubled);
        all = false;
      } catch (const Error& e) {
        const bool overlap = e.code() == Errc::OverlapError;
        overlap_ok += overlap;
        all = all && overlap;
      }
    }
    ok_pairs += all;
  }
  return {ok_pairs == pairs, std::to_string(reassembled) + "/" + std::to_string(pairs * orders) + " orders exact, " +
                                 std::to_string(missing_ok) + "/" + std::to_string(missing_total) + " MissingSegment, " +
                                 std::to_string(overlap_ok) + "/" + std::to_string(overlap_total) + " OverlapError"};
}

// --- 5: Ncut oracle -----------------------------------------------------------

double dense_ncut(const std::vector<double>& w, std::size_t n, const std::vector<bool>& side) {
  double cut = 0, assoc_a = 0, assoc_b = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      (side[i] ? assoc_a : assoc_b) += w[i * n + j];
      if (side[i] && !side[j]) cut += w[i * n + j];
    }
  return cut / assoc_a + cut / assoc_b;
}

// Exhaustive minimum with node n-1 pinned to side B.
std::pair<double, std::vector<bool>> exhaustive(const std::vector<double>& w, std::size_t n) {
  double best = std::numeric_limits<double>::infinity();
  std::vector<bool> arg;
  for (std::uint64_t mask = 1; mask < (1ULL << (n - 1)); ++mask) {
    std::vector<bool> side(n);
    for (std::size_t i = 0; i + 1 < n; ++i) side[i] = (mask >> i) & 1;
    const double v = dense_ncut(w, n, side);
    if (v < best) best = v, arg = side;
  }
  return {best, arg};
}

Outcome ncut_oracle(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0;
  int graphs_ok = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + rng() % 9;
    std::vector<double> w(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (rng() % 3) w[i * n + j] = w[j * n + i] = u(rng);
    // Every node needs positive degree for Ncut to be defined.
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = (i + 1) % n;
      if (w[i * n + j] == 0) w[i * n + j] = w[j * n + i] = 0.01 + u(rng);
    }
    const auto g = PixelGraph::from_dense(n, w);
    bool ok = true;
    for (std::uint64_t mask = 1; mask < (1ULL << (n - 1)); ++mask) {
      std::vector<bool> side(n);
      for (std::size_t i = 0; i + 1 < n; ++i) side[i] = (mask >> i) & 1;
      const double diff = std::abs(ncut_value(g, side) - dense_ncut(w, n, side));
      worst = std::max(worst, diff);
      ok = ok && diff <= 1e-12;
    }
    graphs_ok += ok;
  }

  int planted_ok = 0;
  const NcutParams params;
  for (int t = 0; t < 20; ++t) {
    const std::size_t a = 2 + rng() % 4, b = 2 + rng() % 4, n = a + b;
    std::vector<double> w(n * n, 0.0);
    double min_intra = 1.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if ((i < a) == (j < a)) {
          const double v = 0.5 + 0.5 * u(rng);
          w[i * n + j] = w[j * n + i] = v;
          min_intra = std::min(min_intra, v);
        }
    const std::size_t bridges = 1 + rng() % 2;
    for (std::size_t k = 0; k < bridges; ++k) {
      const std::size_t i = rng() % a, j = a + rng() % b;
      w[i * n + j] = w[j * n + i] = 0.01 * min_intra * (0.1 + 0.9 * u(rng));
    }
    // Shuffle node order so the split is not simply a prefix.
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> pw(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) pw[perm[i] * n + perm[j]] = w[i * n + j];

    const auto g = PixelGraph::from_dense(n, pw);
    const auto split = best_threshold_split(g, fiedler_vector(g, params).y, params);
    auto [best, arg] = exhaustive(pw, n);
    std::vector<bool> flipped(n);
    for (std::size_t i = 0; i < n; ++i) flipped[i] = !arg[i];
    planted_ok += (split.side == arg || split.side == flipped) && std::abs(split.ncut - best) <= 1e-12;
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "%d/100 random graphs within 1e-12 (max diff %.2e), %d/20 planted splits exact",
                graphs_ok, worst, planted_ok);
  return {graphs_ok == 100 && planted_ok == 20, buf};
}

// --- 6 (K4 half) ------------------------------------------------------------

Outcome k4_eigenvalue() {
  std::vector<double> w(16, 1.0);
  for (int i = 0; i < 4; ++i) w[i * 5] = 0.0;
  Eigen::MatrixXd W = Eigen::Map<Eigen::Matrix<double, 4, 4, Eigen::RowMajor>>(w.data());
  Eigen::MatrixXd D = W.rowwise().sum().asDiagonal();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(D - W, D);
  const double dense = es.eigenvalues()(1);
  const auto f = fiedler_vector(PixelGraph::from_dense(4, w), NcutParams{});
  char buf[120];
  std::snprintf(buf, sizeof buf, "K4 lambda %.15f vs dense %.15f", f.lambda, dense);
  return {std::abs(f.lambda - dense) <= 1e-9, buf};
}

// --- 7: tamper evidence ---------------------------------------------------

Outcome tamper(std::mt19937_64& rng, int flips) {
  struct Case {
    SecretMaterial material;
    KeySchedule schedule;
    Bytes manifest;
    std::vector<Bytes> packets;
  };
  std::vector<Case> cases;
  for (int i = 0; i < 4; ++i) {
    Case c;
    c.material = SecretMaterial::from_strings(random_secret(rng), random_secret(rng));
    c.schedule = derive_schedule(c.material);
    const RasterImage cover = testing::structured_image(rng, 96 + 32 * i, 80 + 16 * i, i % 2 ? 3 : 4);
    const RasterImage stego = hide_message(cover, testing::random_bytes(rng, 200 + 100 * i), c.material);
    const SplitResult split = split_stego(stego, c.schedule);
    c.manifest = serialize_manifest(split.manifest);
    for (const auto& p : split.packets) c.packets.push_back(serialize_packet(p));
    cases.push_back(std::move(c));
  }

  int caught = 0, silent = 0;
  for (int t = 0; t < flips; ++t) {
    const Case& c = cases[rng() % cases.size()];
    Bytes manifest = c.manifest;
    std::vector<Bytes> packets = c.packets;
    const std::size_t which = rng() % (packets.size() + 1);
    Bytes& target = which == packets.size() ? manifest : packets[which];
    const std::size_t bit = rng() % (target.size() * 8);
    target[bit / 8] ^= std::uint8_t(1u << (bit % 8));

    // Full receiver path; reaching the end means the flip went unnoticed.
    try {
      const Manifest m = parse_manifest(manifest);
      std::vector<SegmentPacket> parsed;
      for (const auto& p : packets) parsed.push_back(parse_packet(p));
      const RasterImage assembled = assemble_verified(m, parsed, c.schedule);
      reveal_message(assembled, c.material);
      ++silent;
    } catch (const Error&) {
      ++caught;
    }
  }
  return {silent == 0 && caught == flips,
          std::to_string(caught) + "/" + std::to_string(flips) + " caught, " + std::to_string(silent) + " silent"};
}

// --- 8: determinism -----------------------------------------------------------

Outcome determinism(std::mt19937_64& rng, const fs::path& root) {
  const fs::path dir = root / "determinism";
  fs::create_directories(dir);
  io::save_image(dir / "cover.png", testing::structured_image(rng, 300, 220, 3));
  io::write_file(dir / "message.bin", testing::random_bytes(rng, 3000));
  int rc[2];
  for (int run = 0; run < 2; ++run)
    rc[run] = run_cli({"pipeline", "--cover", (dir / "cover.png").string(), "--message", (dir / "message.bin").string(),
                       "--workdir", (dir / ("run" + std::to_string(run))).string(), "--key", "determinism-key",
                       "--password", "determinism-password", "--deterministic", "--salt", "0011223344556677"});
  if (rc[0] != 0 || rc[1] != 0) return {false, "pipeline exit codes " + std::to_string(rc[0]) + ", " + std::to_string(rc[1])};

  std::vector<fs::path> files{"stego.png"};
  for (const auto& e : fs::directory_iterator(dir / "run0" / "outbox")) files.push_back(fs::path("outbox") / e.path().filename());
  std::size_t same = 0;
  for (const auto& f : files) {
    const fs::path other = dir / "run1" / f;
    same += fs::exists(other) && io::read_file(dir / "run0" / f) == io::read_file(other);
  }
  std::size_t count1 = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir / "run1" / "outbox")) ++count1;
  return {same == files.size() && count1 + 1 == files.size(),
          std::to_string(same) + "/" + std::to_string(files.size()) + " files byte-identical (stego, manifest, " +
              std::to_string(files.size() - 2) + " segments)"};
}

// --- 9: performance -----------------------------------------------------------

Outcome performance(std::mt19937_64& rng, const fs::path& root) {
  const fs::path dir = root / "perf";
  fs::create_directories(dir);
  const RasterImage cover = testing::structured_image(rng, 512, 512, 3);
  io::save_image(dir / "cover.png", cover);
  io::write_file(dir / "message.bin", testing::random_bytes(rng, capacity(cover, 1) / 8 / 2));
  const auto t0 = Clock::now();
  const int rc = run_cli({"pipeline", "--cover", (dir / "cover.png").string(), "--message",
                          (dir / "message.bin").string(), "--workdir", (dir / "work").string(), "--key", "perf-key",
                          "--password", "perf-password"});
  const double s = seconds_since(t0);
  char buf[96];
  std::snprintf(buf, sizeof buf, "512x512 RGB pipeline in %.2f s (exit %d)", s, rc);
  return {rc == 0 && s < 10.0, buf};
}

}  // namespace

int main(int argc, char** argv) {
  const std::uint64_t seed = argc > 1 ? std::stoull(argv[1]) : 20240229;
  std::mt19937_64 rng(seed);
  testing::TempDir root("acceptance");
  std::printf("acceptance seed %llu\n", static_cast<unsigned long long>(seed));

  int failed = 0;
  auto report = [&](int id, const char* name, const Outcome& o) {
    std::printf("%s [%d] %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  };
  auto guarded = [](const std::function<Outcome()>& fn) -> Outcome {
    try {
      return fn();
    } catch (const std::exception& e) {
      return {false, std::string("exception: ") + e.what()};
    }
  };

  TrialLog log;
  const Outcome e2e = guarded([&] {
    log = end_to_end(rng, root.path(), 200);
    char buf[200];
    std::snprintf(buf, sizeof buf, "%d/%d exact, pipeline total %.1f s", log.exact, log.trials, log.pipeline_seconds);
    std::string detail = buf;
    for (const auto& f : log.failures) detail += "\n    " + f;
    return Outcome{log.exact == log.trials && log.failures.empty() && log.pipeline_seconds < 300.0, detail};
  });
  report(1, "end-to-end exactness", e2e);
  report(2, "password gate", guarded([&] { return password_gate(rng, root.path(), 1000); }));
  {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%d/%d trials at 1 bpc: max |diff| %d, min PSNR %.2f dB", log.fidelity_ok,
                  log.one_bpc, log.max_diff, log.min_psnr);
    report(3, "fidelity bound", {log.one_bpc > 0 && log.fidelity_ok == log.one_bpc, buf});
  }
  report(4, "reassembly", guarded([&] { return reassembly(rng, 100, 10); }));
  report(5, "ncut oracle", guarded([&] { return ncut_oracle(rng); }));
  {
    const Outcome k4 = guarded(k4_eigenvalue);
    char buf[200];
    std::snprintf(buf, sizeof buf, "%zu accepted pairs, max residual %.2e; %s", log.fiedler_pairs, log.max_residual,
                  k4.detail.c_str());
    report(6, "eigen quality", {k4.pass && log.fiedler_pairs > 0 && log.max_residual <= 1e-8, buf});
  }
  report(7, "tamper evidence", guarded([&] { return tamper(rng, 10000); }));
  report(8, "determinism", guarded([&] { return determinism(rng, root.path()); }));
  report(9, "desk-scale performance", guarded([&] { return performance(rng, root.path()); }));

  std::printf("%s: %d of 9 criteria failed\n", failed ? "FAILED" : "OK", failed);
  return failed ? 1 : 0;
}
