// Exemplar selection: IQR score binning, k-means prototypes, and seeded
// random draws.
#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "phseg/image.hpp"
#include "phseg/tile.hpp"

namespace phseg {

struct ScoreRow {
  std::string id;
  TileLabel label;
  double score;
};

struct ScoreTable {
  std::vector<ScoreRow> rows;

  void validate() const;  // unique ids, finite scores
  std::vector<ScoreRow> for_class(TileLabel cls) const;
};

// CSV `patch_id,label,score` with a header row.
ScoreTable load_scores(const std::string& path);
void save_scores(const ScoreTable& table, const std::string& path);

// Linear-interpolation (type-7) quantile of a sorted sample.
double quantile_type7(const std::vector<double>& sorted, double q);

// Splits the class IQR into Q equal-width bins and picks the patch whose
// score lies nearest each bin center; ties break to the lower patch index
// and an already-taken patch is replaced by the next nearest.
std::vector<std::string> iqr_bin_select(const ScoreTable& scores, TileLabel cls, int q_bins);

// k-means (k-means++ seeding, fixed seed) over mean-RGB vectors; returns
// the index of the patch nearest each centroid.
std::vector<std::size_t> kmeans_select(const std::vector<Eigen::Vector3d>& points, int k,
                                       std::uint64_t seed, int max_iterations = 50);

Eigen::Vector3d mean_rgb(const RgbImage& patch);

std::vector<std::size_t> kmeans_exemplars(const std::vector<RgbImage>& patches, int k,
                                          std::uint64_t seed);

// Uniform sample without replacement, deterministic per seed.
std::vector<std::string> random_exemplars(const std::vector<std::string>& ids, int count,
                                          std::uint64_t seed);

}  // namespace phseg
