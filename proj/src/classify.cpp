#include "phseg/classify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "phseg/divergence.hpp"

namespace phseg {

void FastConfig::validate(std::size_t n_exemplars) const {
  if (!(c > 0.0)) throw std::invalid_argument("fast classifier: c must be positive");
  if (k < 1) throw std::invalid_argument("fast classifier: k must be >= 1");
  if (static_cast<std::size_t>(k) > n_exemplars)
    throw std::invalid_argument("fast classifier: k exceeds exemplar count " +
                                std::to_string(n_exemplars));
}

FastScores fast_rule(const std::vector<std::pair<double, TileLabel>>& distances,
                     const FastConfig& cfg) {
  cfg.validate(distances.size());
  std::vector<std::pair<double, TileLabel>> pool = distances;
  const auto kth = pool.begin() + cfg.k;
  // Secondary key: normal before tumor, so equal distances at the k-th
  // place resolve identically under any permutation of the input.
  const auto order = [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second == TileLabel::normal && b.second == TileLabel::tumor;
  };
  std::partial_sort(pool.begin(), kth, pool.end(), order);

  FastScores out;
  for (auto it = pool.begin(); it != kth; ++it) {
    const double sim = std::exp(-it->first * cfg.c);
    (it->second == TileLabel::tumor ? out.tumor_sum : out.normal_sum) += sim;
  }
  out.label = out.tumor_sum > out.normal_sum ? TileLabel::tumor : TileLabel::normal;
  return out;
}

PatchDecision classify_fast(const PhProfile& profile, const ExemplarSet& exemplars,
                            const FastConfig& cfg, std::string id) {
  exemplars.validate();
  if (profile.filtration != exemplars.filtration)
    throw std::invalid_argument("classify_fast: profile and exemplar filtrations differ");

  std::vector<std::pair<double, TileLabel>> distances;
  distances.reserve(exemplars.tumor.size() + exemplars.normal.size());
  for (const auto& e : exemplars.tumor)
    distances.emplace_back(php_distance(profile, e.profile), TileLabel::tumor);
  for (const auto& e : exemplars.normal)
    distances.emplace_back(php_distance(profile, e.profile), TileLabel::normal);

  const FastScores scores = fast_rule(distances, cfg);
  PatchDecision d;
  d.id = std::move(id);
  d.label = scores.label;
  d.score_t = scores.tumor_sum;
  d.score_n = scores.normal_sum;
  const double total = scores.tumor_sum + scores.normal_sum;
  if (total > 0.0) d.prob = scores.tumor_sum / total;
  return d;
}

int ensemble_predict(double o1, double o2) {
  if (!(o1 >= 0.0 && o1 <= 1.0) || !(o2 >= 0.0 && o2 <= 1.0))
    throw std::invalid_argument("ensemble_predict: outputs must lie in [0,1]");
  const double avg = 0.5 * (o1 + o2);
  if (avg < 0.49) return 0;
  if (avg > 0.51) return 1;
  return o1 >= 0.5 ? 1 : 0;  // critical patch: round o1 half-up
}

}  // namespace phseg
