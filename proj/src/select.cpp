#include "phseg/select.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <unordered_set>

#include "phseg/csv.hpp"
#include "phseg/rng.hpp"

namespace phseg {

void ScoreTable::validate() const {
  std::unordered_set<std::string> seen;
  for (const auto& r : rows) {
    if (r.id.empty()) throw std::runtime_error("score row with empty patch id");
    if (!seen.insert(r.id).second) throw std::runtime_error("duplicate patch id: " + r.id);
    if (!std::isfinite(r.score))
      throw std::runtime_error("non-finite score for patch " + r.id);
  }
}

std::vector<ScoreRow> ScoreTable::for_class(TileLabel cls) const {
  std::vector<ScoreRow> out;
  for (const auto& r : rows)
    if (r.label == cls) out.push_back(r);
  return out;
}

ScoreTable load_scores(const std::string& path) {
  CsvReader reader(path);
  reader.expect_header({"patch_id", "label", "score"});
  ScoreTable table;
  std::vector<std::string> f;
  while (reader.next_row(f, 3, 3)) {
    ScoreRow row;
    row.id = f[0];
    try {
      row.label = parse_label(f[1]);
    } catch (const std::exception& ex) {
      reader.fail(ex.what());
    }
    row.score = reader.parse_double(f[2], "score");
    table.rows.push_back(std::move(row));
  }
  try {
    table.validate();
  } catch (const std::exception& ex) {
    throw std::runtime_error(path + ": " + ex.what());
  }
  return table;
}

void save_scores(const ScoreTable& table, const std::string& path) {
  table.validate();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write scores: " + path);
  out << "patch_id,label,score\n";
  char buf[32];
  for (const auto& r : table.rows) {
    std::snprintf(buf, sizeof buf, "%.17g", r.score);
    out << r.id << ',' << to_string(r.label) << ',' << buf << '\n';
  }
}

double quantile_type7(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("quantile of empty sample");
  if (q <= 0.0) return sorted.front();
  if (q >= 1.0) return sorted.back();
  const double h = static_cast<double>(sorted.size() - 1) * q;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const double frac = h - static_cast<double>(lo);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

std::vector<std::string> iqr_bin_select(const ScoreTable& scores, TileLabel cls, int q_bins) {
  if (q_bins < 1) throw std::invalid_argument("iqr_bin_select: Q must be >= 1");
  const std::vector<ScoreRow> rows = scores.for_class(cls);
  if (static_cast<int>(rows.size()) < q_bins)
    throw std::runtime_error("class '" + std::string(to_string(cls)) + "' has " +
                             std::to_string(rows.size()) + " scored patches, need >= " +
                             std::to_string(q_bins));

  std::vector<double> sorted;
  sorted.reserve(rows.size());
  for (const auto& r : rows) sorted.push_back(r.score);
  std::sort(sorted.begin(), sorted.end());
  const double q1 = quantile_type7(sorted, 0.25);
  const double q3 = quantile_type7(sorted, 0.75);
  const double bin_width = (q3 - q1) / q_bins;

  std::vector<bool> taken(rows.size(), false);
  std::vector<std::string> selected;
  selected.reserve(q_bins);
  for (int b = 0; b < q_bins; ++b) {
    const double center = q1 + (b + 0.5) * bin_width;
    std::size_t best = rows.size();
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (taken[i]) continue;
      const double d = std::abs(rows[i].score - center);
      if (d < best_dist) {  // ties keep the lower patch index
        best_dist = d;
        best = i;
      }
    }
    taken[best] = true;
    selected.push_back(rows[best].id);
  }
  return selected;
}

Eigen::Vector3d mean_rgb(const RgbImage& patch) {
  if (patch.empty()) throw std::invalid_argument("mean_rgb: empty patch");
  return {patch.r.cast<double>().mean(), patch.g.cast<double>().mean(),
          patch.b.cast<double>().mean()};
}

std::vector<std::size_t> kmeans_select(const std::vector<Eigen::Vector3d>& points, int k,
                                       std::uint64_t seed, int max_iterations) {
  const std::size_t n = points.size();
  if (n == 0) throw std::invalid_argument("kmeans_select: no points");
  if (k < 1 || static_cast<std::size_t>(k) > n)
    throw std::invalid_argument("kmeans_select: need 1 <= k <= number of points");

  Rng rng(seed);
  std::vector<Eigen::Vector3d> centroids;
  centroids.reserve(k);

  // k-means++ seeding.
  centroids.push_back(points[rng.below(n)]);
  std::vector<double> d2(n);
  while (static_cast<int>(centroids.size()) < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : centroids) best = std::min(best, (points[i] - c).squaredNorm());
      d2[i] = best;
      total += best;
    }
    if (total == 0.0) {  // all remaining points coincide with a centroid
      centroids.push_back(points[rng.below(n)]);
      continue;
    }
    double target = rng.uniform() * total;
    std::size_t pick = n - 1;
    for (std::size_t i = 0; i < n; ++i) {
      target -= d2[i];
      if (target <= 0.0) {
        pick = i;
        break;
      }
    }
    centroids.push_back(points[pick]);
  }

  std::vector<int> assign(n, -1);
  for (int iter = 0; iter < max_iterations; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_d = (points[i] - centroids[0]).squaredNorm();
      for (int c = 1; c < k; ++c) {
        const double d = (points[i] - centroids[c]).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (assign[i] != best) {
        assign[i] = best;
        changed = true;
      }
    }
    if (!changed) break;
    std::vector<Eigen::Vector3d> sums(k, Eigen::Vector3d::Zero());
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      sums[assign[i]] += points[i];
      ++counts[assign[i]];
    }
    for (int c = 0; c < k; ++c)
      if (counts[c] > 0) centroids[c] = sums[c] / static_cast<double>(counts[c]);
  }

  // Nearest distinct patch per centroid.
  std::vector<std::size_t> chosen;
  std::vector<bool> used(n, false);
  chosen.reserve(k);
  for (int c = 0; c < k; ++c) {
    std::size_t best = n;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (used[i]) continue;
      const double d = (points[i] - centroids[c]).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    used[best] = true;
    chosen.push_back(best);
  }
  return chosen;
}

std::vector<std::size_t> kmeans_exemplars(const std::vector<RgbImage>& patches, int k,
                                          std::uint64_t seed) {
  std::vector<Eigen::Vector3d> points;
  points.reserve(patches.size());
  for (const auto& p : patches) points.push_back(mean_rgb(p));
  return kmeans_select(points, k, seed);
}

std::vector<std::string> random_exemplars(const std::vector<std::string>& ids, int count,
                                          std::uint64_t seed) {
  if (count < 0 || static_cast<std::size_t>(count) > ids.size())
    throw std::invalid_argument("random_exemplars: sample size exceeds population");
  std::vector<std::string> pool = ids;
  Rng rng(seed);
  // Partial Fisher-Yates: the first `count` slots become the sample.
  for (int i = 0; i < count; ++i) {
    const std::size_t j = i + rng.below(pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  return pool;
}

}  // namespace phseg
