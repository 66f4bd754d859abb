#include <benchmark/benchmark.h>

#include <random>

#include "stegseg/lsb_embed.hpp"
#include "stegseg/msgcodec.hpp"
#include "stegseg/ncut.hpp"
#include "stegseg/pipeline.hpp"
#include "stegseg/segment_wire.hpp"

using namespace stegseg;

namespace {

const SecretMaterial kMaterial = SecretMaterial::from_strings("bench-key", "bench-password");

RasterImage noise_image(std::uint32_t side, std::uint8_t channels) {
  std::mt19937_64 rng(side);
  RasterImage img(side, side, channels);
  for (auto& p : img.pixels) p = static_cast<std::uint8_t>(rng());
  return img;
}

Bytes noise_bytes(std::size_t n) {
  std::mt19937_64 rng(n);
  Bytes b(n);
  for (auto& v : b) v = static_cast<std::uint8_t>(rng());
  return b;
}

void BM_Encrypt(benchmark::State& state) {
  const auto schedule = derive_schedule(kMaterial);
  const auto msg = BitMessage::from_bytes(noise_bytes(static_cast<std::size_t>(state.range(0))));
  const auto bits = permute_bits(msg, schedule.key_perm);
  const Salt salt{1, 2, 3, 4, 5, 6, 7, 8};
  for (auto _ : state) benchmark::DoNotOptimize(encrypt(bits, schedule, salt));
  state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Encrypt)->Arg(1 << 10)->Arg(1 << 16);

void BM_Hide(benchmark::State& state) {
  const auto cover = noise_image(static_cast<std::uint32_t>(state.range(0)), 3);
  const auto msg = noise_bytes(capacity(cover, 1) / 8 / 2);
  HideOptions opts;
  opts.salt = Salt{};
  for (auto _ : state) benchmark::DoNotOptimize(hide_message(cover, msg, kMaterial, opts));
}
BENCHMARK(BM_Hide)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_Segment(benchmark::State& state) {
  const auto img = noise_image(static_cast<std::uint32_t>(state.range(0)), 3);
  const NcutParams params;
  for (auto _ : state) benchmark::DoNotOptimize(recursive_segment(img, params));
}
BENCHMARK(BM_Segment)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_FiedlerVector(benchmark::State& state) {
  const NcutParams params;
  const auto gray = downsample_luma(noise_image(64, 1), params.max_dim);
  const auto graph = build_graph(gray, params);
  for (auto _ : state) benchmark::DoNotOptimize(fiedler_vector(graph, params));
}
BENCHMARK(BM_FiedlerVector)->Unit(benchmark::kMillisecond);

void BM_SplitAndReassemble(benchmark::State& state) {
  const auto img = noise_image(512, 3);
  const auto schedule = derive_schedule(kMaterial);
  const auto split = split_stego(img, schedule);
  for (auto _ : state) benchmark::DoNotOptimize(reassemble(split.manifest, split.packets));
}
BENCHMARK(BM_SplitAndReassemble)->Unit(benchmark::kMillisecond);

void BM_Reveal(benchmark::State& state) {
  const auto cover = noise_image(512, 3);
  HideOptions opts;
  opts.salt = Salt{};
  const auto stego = hide_message(cover, noise_bytes(16 * 1024), kMaterial, opts);
  for (auto _ : state) benchmark::DoNotOptimize(reveal_message(stego, kMaterial));
}
BENCHMARK(BM_Reveal)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
