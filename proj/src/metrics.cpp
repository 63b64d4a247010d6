#include "phseg/metrics.hpp"

#include <iostream>
#include <unordered_map>

#include <nlohmann/json.hpp>

namespace phseg {

Prf prf1(const Confusion& c) {
  Prf out;
  if (c.tp + c.fp > 0) {
    out.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  } else {
    out.warnings.push_back("precision undefined (no predicted positives), reporting 0");
  }
  if (c.tp + c.fn > 0) {
    out.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  } else {
    out.warnings.push_back("recall undefined (no actual positives), reporting 0");
  }
  if (out.precision + out.recall > 0.0)
    out.f1 = 2.0 * out.precision * out.recall / (out.precision + out.recall);
  else
    out.warnings.push_back("f1 undefined, reporting 0");
  for (const auto& w : out.warnings) std::cerr << "warning: " << w << "\n";
  return out;
}

double specificity(const Confusion& c) {
  if (c.tn + c.fp == 0) {
    std::cerr << "warning: specificity undefined (no actual negatives), reporting 0\n";
    return 0.0;
  }
  return static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp);
}

Confusion confusion_from(const std::vector<PatchDecision>& decisions,
                         const TileManifest& truth) {
  std::unordered_map<std::string, TileLabel> expected;
  for (const auto& e : truth.entries)
    if (e.label) expected.emplace(e.id, *e.label);

  Confusion c;
  for (const auto& d : decisions) {
    const auto it = expected.find(d.id);
    if (it == expected.end()) continue;
    const bool actual_tumor = it->second == TileLabel::tumor;
    const bool predicted_tumor = d.label == TileLabel::tumor;
    if (actual_tumor && predicted_tumor)
      ++c.tp;
    else if (!actual_tumor && predicted_tumor)
      ++c.fp;
    else if (actual_tumor && !predicted_tumor)
      ++c.fn;
    else
      ++c.tn;
  }
  return c;
}

std::string metrics_json(const Confusion& c) {
  const Prf p = prf1(c);
  nlohmann::json j;
  j["precision"] = p.precision;
  j["recall"] = p.recall;
  j["f1"] = p.f1;
  j["specificity"] = specificity(c);
  j["counts"] = {{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}, {"tn", c.tn}};
  return j.dump(2);
}

}  // namespace phseg
