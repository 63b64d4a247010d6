// End-to-end tile classification over a manifest, probability-map assembly
// and the rendered overlay.
#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "phseg/classify.hpp"
#include "phseg/forest.hpp"
#include "phseg/stain.hpp"
#include "phseg/tile.hpp"

namespace phseg {

struct FastPipeline {
  StainMatrix stain = StainMatrix::ruifrok_johnston();
  double c_max = 2.0;
  ComplementMode mode = ComplementMode::bounded_voids;
  ExemplarSet exemplars;
  FastConfig fast;

  PatchDecision classify_tile(const RgbImage& tile, std::string id = {}) const;
};

struct AccuratePipeline {
  StainMatrix stain = StainMatrix::ruifrok_johnston();
  double c_max = 2.0;
  ComplementMode mode = ComplementMode::bounded_voids;
  Filtration filtration = Filtration::defaults();
  RegressionForest forest_php;       // O1: concatenated (p0 || p1) features
  RegressionForest forest_external;  // O2: externally supplied features
  FeatureTable external;             // indexed by tile id

  PatchDecision classify_tile(const RgbImage& tile, const std::string& id) const;
};

// Per-tile tumor probabilities/labels on the grid spanned by the manifest
// offsets. label: 1 tumor, 0 normal, -1 absent.
struct ProbabilityMap {
  std::vector<long> xs, ys;  // sorted unique offsets
  Eigen::ArrayXXd prob;
  Eigen::ArrayXXi label;
};

struct SegmentResult {
  std::vector<PatchDecision> decisions;          // in manifest order, failures omitted
  std::vector<std::string> failures;             // per-tile error messages
  ProbabilityMap map;
};

using Pipeline = std::variant<FastPipeline, AccuratePipeline>;

// Classifies every readable tile; unreadable tiles are reported in
// `failures` and skipped. Deterministic for any worker count.
SegmentResult segment(const TileManifest& manifest, const Pipeline& pipeline, int workers = 0);

ProbabilityMap build_map(const TileManifest& manifest,
                         const std::vector<PatchDecision>& decisions);

// Decision CSV `tile_id,x,y,label,score_t,score_n,prob`.
void save_decisions(const std::vector<PatchDecision>& decisions, const TileManifest& manifest,
                    const std::string& path);
std::vector<PatchDecision> load_decisions(const std::string& path);

// One character per grid cell: T tumor, N normal, '.' missing.
void save_label_grid(const ProbabilityMap& map, const std::string& path);

// Tiles pasted at their offsets, tumor decisions tinted red.
void save_overlay_png(const TileManifest& manifest, const std::vector<PatchDecision>& decisions,
                      const std::string& path);

}  // namespace phseg
