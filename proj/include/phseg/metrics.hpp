// Patch-level evaluation: precision/recall/F1 and specificity, with
// degenerate denominators reporting zero plus a warning instead of failing.
#pragma once

#include <string>
#include <vector>

#include "phseg/classify.hpp"
#include "phseg/tile.hpp"

namespace phseg {

struct Confusion {
  long tp = 0, fp = 0, fn = 0, tn = 0;

  long total() const { return tp + fp + fn + tn; }
};

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::vector<std::string> warnings;
};

Prf prf1(const Confusion& c);
double specificity(const Confusion& c);  // tn/(tn+fp); 0 + stderr warning when undefined

// Tumor is the positive class. Decisions without a labeled truth entry are
// ignored.
Confusion confusion_from(const std::vector<PatchDecision>& decisions,
                         const TileManifest& truth);

// `{precision, recall, f1, specificity, counts:{tp,fp,fn,tn}}`.
std::string metrics_json(const Confusion& c);

}  // namespace phseg
