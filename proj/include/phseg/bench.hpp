// Single-threaded per-patch latency harness with a per-stage breakdown
// (deconvolution, filtration, betti, classify).
#pragma once

#include <string>
#include <vector>

#include "phseg/segment.hpp"

namespace phseg {

struct StageStats {
  double mean_ms = 0.0;
  double median_ms = 0.0;
  double p95_ms = 0.0;
};

StageStats summarize_ms(std::vector<double> samples);

struct BenchReport {
  std::string pipeline;
  int tiles = 0;
  int repetitions = 0;
  int warmup = 0;
  int samples = 0;  // timed samples: tiles * repetitions
  StageStats per_patch;
  StageStats deconvolution;
  StageStats filtration;
  StageStats betti;
  StageStats classify;

  std::string to_json() const;
};

// Times deconvolution + PHP + classification per tile; tiles are preloaded
// so disk IO stays out of the timed section. Warm-up passes are discarded.
BenchReport bench_fast(const TileManifest& manifest, const FastPipeline& pipeline,
                       int repetitions, int warmup = 5);

}  // namespace phseg
