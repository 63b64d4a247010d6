#include "phseg/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "phseg/image_io.hpp"

namespace phseg {

StageStats summarize_ms(std::vector<double> samples) {
  if (samples.empty()) throw std::invalid_argument("summarize_ms: no samples");
  std::sort(samples.begin(), samples.end());
  StageStats s;
  double sum = 0.0;
  for (const double v : samples) sum += v;
  s.mean_ms = sum / static_cast<double>(samples.size());
  const std::size_t n = samples.size();
  s.median_ms = (n % 2 == 1) ? samples[n / 2] : 0.5 * (samples[n / 2 - 1] + samples[n / 2]);
  const std::size_t rank = std::min(n - 1, static_cast<std::size_t>(std::ceil(0.95 * n)) - 1);
  s.p95_ms = samples[rank];
  return s;
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

nlohmann::json stage_json(const StageStats& s) {
  return {{"mean_ms", s.mean_ms}, {"median_ms", s.median_ms}, {"p95_ms", s.p95_ms}};
}

}  // namespace

std::string BenchReport::to_json() const {
  nlohmann::json j;
  j["pipeline"] = pipeline;
  j["tiles"] = tiles;
  j["repetitions"] = repetitions;
  j["warmup"] = warmup;
  j["samples"] = samples;
  j["per_patch_ms"] = stage_json(per_patch);
  j["stages"] = {{"deconvolution", stage_json(deconvolution)},
                 {"filtration", stage_json(filtration)},
                 {"betti", stage_json(betti)},
                 {"classify", stage_json(classify)}};
  return j.dump(2);
}

BenchReport bench_fast(const TileManifest& manifest, const FastPipeline& pipeline,
                       int repetitions, int warmup) {
  if (repetitions < 1) throw std::invalid_argument("bench: repetitions must be >= 1");
  if (manifest.entries.empty()) throw std::runtime_error("bench: empty manifest");

  std::vector<RgbImage> tiles;
  tiles.reserve(manifest.entries.size());
  for (const auto& e : manifest.entries) tiles.push_back(load_rgb(e.path));

  const Filtration& filtration = pipeline.exemplars.filtration;
  std::vector<double> total_ms, decon_ms, filt_ms, betti_ms, cls_ms;

  for (int rep = -warmup; rep < repetitions; ++rep) {
    const bool timed = rep >= 0;
    for (const auto& tile : tiles) {
      const auto t0 = Clock::now();
      const GrayImage hema = hematoxylin_channel(tile, pipeline.stain, pipeline.c_max);
      const double d_decon = ms_since(t0);

      const auto t1 = Clock::now();
      const PixelOrder order = order_pixels(hema);
      const double d_filt = ms_since(t1);

      const auto t2 = Clock::now();
      const BettiCurves curves = betti_curves(order, filtration, pipeline.mode);
      const PhProfile profile = profile_from_curves(curves, filtration);
      const double d_betti = ms_since(t2);

      const auto t3 = Clock::now();
      (void)classify_fast(profile, pipeline.exemplars, pipeline.fast);
      const double d_cls = ms_since(t3);

      if (timed) {
        decon_ms.push_back(d_decon);
        filt_ms.push_back(d_filt);
        betti_ms.push_back(d_betti);
        cls_ms.push_back(d_cls);
        total_ms.push_back(d_decon + d_filt + d_betti + d_cls);
      }
    }
  }

  BenchReport report;
  report.pipeline = "fast";
  report.tiles = static_cast<int>(tiles.size());
  report.repetitions = repetitions;
  report.warmup = warmup;
  report.samples = static_cast<int>(total_ms.size());
  report.per_patch = summarize_ms(total_ms);
  report.deconvolution = summarize_ms(decon_ms);
  report.filtration = summarize_ms(filt_ms);
  report.betti = summarize_ms(betti_ms);
  report.classify = summarize_ms(cls_ms);
  return report;
}

}  // namespace phseg
