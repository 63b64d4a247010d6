// Patch classification rules: exemplar-divergence similarity voting and
// the two-model ensemble with a rounding fallback for critical patches.
#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "phseg/exemplar_set.hpp"
#include "phseg/profile.hpp"
#include "phseg/tile.hpp"

namespace phseg {

struct FastConfig {
  double c = 0.2;  // similarity constant in exp(-d*c)
  int k = 11;      // neighbors pooled across both classes

  void validate(std::size_t n_exemplars) const;
};

struct PatchDecision {
  std::string id;
  TileLabel label = TileLabel::normal;
  double score_t = 0.0;
  double score_n = 0.0;
  std::optional<double> prob;
};

struct FastScores {
  double tumor_sum = 0.0;
  double normal_sum = 0.0;
  TileLabel label = TileLabel::normal;
};

// The similarity rule on precomputed exemplar distances: take the k
// smallest distances overall, sum exp(-d*c) per class side, tumor wins
// strictly greater sums; ties go to normal. Distance ties at the k-th
// place prefer normal so the outcome is independent of input order.
FastScores fast_rule(const std::vector<std::pair<double, TileLabel>>& distances,
                     const FastConfig& cfg);

PatchDecision classify_fast(const PhProfile& profile, const ExemplarSet& exemplars,
                            const FastConfig& cfg, std::string id = {});

// Multi-stage ensemble over the two regression outputs; the open interval
// (0.49, 0.51) plus both endpoints falls through to rounding o1 half-up.
// Returns 1 for tumor, 0 for normal.
int ensemble_predict(double o1, double o2);

}  // namespace phseg
