// Bagged regression forest with variance-reduction splits, used by the
// accurate pipeline (one model per feature family).
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace phseg {

struct ForestConfig {
  int n_trees = 200;
  int mtry = 0;      // features tried per split; 0 = ceil(p/3)
  int min_leaf = 5;  // minimum rows per leaf
  int max_depth = 0; // 0 = unlimited
  std::uint64_t seed = 0;
  bool bootstrap = true;  // test hook: false trains every tree on all rows

  void validate(int feature_dim) const;
  int resolved_mtry(int feature_dim) const;
};

// Axis-aligned binary split; leaves carry the mean target.
struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;

  bool is_leaf() const { return feature < 0; }
};

struct RegressionTree {
  std::vector<TreeNode> nodes;
  std::int64_t n_oob = 0;  // rows never drawn by this tree's bootstrap

  double predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

class RegressionForest {
public:
  RegressionForest() = default;  // empty until trained or loaded

  // X is n x p (rows are samples); y holds targets in [0,1].
  static RegressionForest train(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                const ForestConfig& cfg, int workers = 1);

  double predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;  // mean, clamped to [0,1]
  Eigen::VectorXd predict_rows(const Eigen::MatrixXd& X) const;

  int feature_dim() const { return feature_dim_; }
  const ForestConfig& config() const { return config_; }
  const std::vector<RegressionTree>& trees() const { return trees_; }

  std::string to_json_string() const;
  static RegressionForest from_json_string(const std::string& text);
  void save(const std::string& path) const;
  static RegressionForest load(const std::string& path);

private:
  int feature_dim_ = 0;
  ForestConfig config_;
  std::vector<RegressionTree> trees_;
};

// Feature matrix CSV: header `id,f0..f{p-1}[,label]`.
struct FeatureTable {
  std::vector<std::string> ids;
  Eigen::MatrixXd X;
  std::vector<std::string> labels;  // empty when the label column is absent

  Eigen::Index find(const std::string& id) const;  // -1 if missing
};

FeatureTable load_features(const std::string& path);
void save_features(const FeatureTable& table, const std::string& path);

}  // namespace phseg
