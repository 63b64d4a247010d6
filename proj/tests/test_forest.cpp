#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "phseg/forest.hpp"
#include "phseg/rng.hpp"

#include <filesystem>
#include <numeric>

using namespace phseg;
namespace fs = std::filesystem;

namespace {

// y = x1 with uniform x; the regression target for the sanity checks.
void make_linear_data(Rng& rng, int n, int p, Eigen::MatrixXd& X, Eigen::VectorXd& y) {
  X.resize(n, p);
  y.resize(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) X(i, j) = rng.uniform();
    y[i] = X(i, 0);
  }
}

}  // namespace

TEST_CASE("constant targets predict exactly the constant") {
  Rng rng(1);
  Eigen::MatrixXd X(20, 3);
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 3; ++j) X(i, j) = rng.uniform();
  const Eigen::VectorXd y = Eigen::VectorXd::Constant(20, 0.37);
  const auto forest = RegressionForest::train(X, y, {.n_trees = 25, .min_leaf = 2, .seed = 9});
  for (int i = 0; i < 20; ++i) CHECK(forest.predict(X.row(i).transpose()) == 0.37);
}

TEST_CASE("min_leaf >= n degenerates to single-leaf trees within the target range") {
  Rng rng(2);
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  make_linear_data(rng, 12, 2, X, y);
  const auto forest =
      RegressionForest::train(X, y, {.n_trees = 10, .min_leaf = 12, .seed = 3});
  for (const auto& tree : forest.trees()) CHECK(tree.nodes.size() == 1);
  const double pred = forest.predict(X.row(0).transpose());
  CHECK(pred >= y.minCoeff());
  CHECK(pred <= y.maxCoeff());
}

TEST_CASE("y=x1 regression beats the mean predictor by 4x on holdout") {
  Rng rng(7);
  Eigen::MatrixXd X, Xtest;
  Eigen::VectorXd y, ytest;
  make_linear_data(rng, 200, 4, X, y);
  make_linear_data(rng, 100, 4, Xtest, ytest);

  const auto forest = RegressionForest::train(X, y, {.n_trees = 50, .seed = 21});
  const Eigen::VectorXd pred = forest.predict_rows(Xtest);
  const double mse = (pred - ytest).squaredNorm() / ytest.size();

  // Mean-predictor oracle: variance of the test targets around train mean.
  const double train_mean = y.mean();
  const double baseline =
      (ytest.array() - train_mean).square().sum() / ytest.size();
  CHECK(mse < 0.25 * baseline);
}

TEST_CASE("training is deterministic per seed, bit-identical serialization") {
  Rng rng(5);
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  make_linear_data(rng, 80, 5, X, y);
  const ForestConfig cfg{.n_trees = 30, .seed = 77};
  const auto a = RegressionForest::train(X, y, cfg, 1);
  const auto b = RegressionForest::train(X, y, cfg, 4);  // worker count must not matter
  CHECK(a.to_json_string() == b.to_json_string());

  const auto c = RegressionForest::train(X, y, {.n_trees = 30, .seed = 78});
  CHECK(a.to_json_string() != c.to_json_string());
}

TEST_CASE("JSON round-trip preserves predictions exactly") {
  Rng rng(6);
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  make_linear_data(rng, 60, 3, X, y);
  const auto forest = RegressionForest::train(X, y, {.n_trees = 15, .seed = 4});
  const auto path = fs::temp_directory_path() / "phseg_forest_rt.json";
  forest.save(path.string());
  const auto back = RegressionForest::load(path.string());
  CHECK(back.feature_dim() == forest.feature_dim());
  for (int i = 0; i < 60; ++i)
    CHECK(back.predict(X.row(i).transpose()) == forest.predict(X.row(i).transpose()));
  fs::remove(path);
}

TEST_CASE("a single unbagged tree reproduces a step function exactly") {
  // Monotone data response with bootstrap disabled via the test hook.
  Eigen::MatrixXd X(40, 1);
  Eigen::VectorXd y(40);
  for (int i = 0; i < 40; ++i) {
    X(i, 0) = i / 40.0;
    y[i] = X(i, 0) < 0.5 ? 0.0 : 1.0;
  }
  const auto tree = RegressionForest::train(
      X, y, {.n_trees = 1, .mtry = 1, .min_leaf = 1, .seed = 1, .bootstrap = false});
  for (int i = 0; i < 40; ++i) CHECK(tree.predict(X.row(i).transpose()) == y[i]);
  CHECK(tree.predict(Eigen::VectorXd::Constant(1, 0.2)) == 0.0);
  CHECK(tree.predict(Eigen::VectorXd::Constant(1, 0.9)) == 1.0);
}

TEST_CASE("bootstrap leaves the expected in-bag and out-of-bag fractions") {
  // n draws with replacement: distinct in-bag rows ~ n(1-1/e), rows never
  // drawn ~ n/e.
  Rng rng(11);
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  make_linear_data(rng, 1200, 2, X, y);
  const auto forest =
      RegressionForest::train(X, y, {.n_trees = 40, .min_leaf = 400, .seed = 13});
  double total_oob = 0;
  for (const auto& tree : forest.trees()) total_oob += static_cast<double>(tree.n_oob);
  const double oob_frac = total_oob / (40.0 * 1200.0);
  const double inbag_frac = 1.0 - oob_frac;
  const double e_inv = 1.0 / std::exp(1.0);
  CHECK(oob_frac > e_inv * 0.95);
  CHECK(oob_frac < e_inv * 1.05);
  CHECK(inbag_frac > (1.0 - e_inv) * 0.95);
  CHECK(inbag_frac < (1.0 - e_inv) * 1.05);
}

TEST_CASE("predictions are invariant to a consistent feature permutation") {
  Rng rng(19);
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  make_linear_data(rng, 100, 4, X, y);
  const Eigen::Vector4i perm(2, 0, 3, 1);
  Eigen::MatrixXd Xp(100, 4);
  for (int j = 0; j < 4; ++j) Xp.col(j) = X.col(perm[j]);

  // mtry = p so both runs consider every feature at every split, and no
  // bootstrap so duplicate rows cannot create exact cross-feature score
  // ties (the index tie-break is not relabeling-symmetric).
  const ForestConfig cfg{.n_trees = 10, .mtry = 4, .seed = 31, .bootstrap = false};
  const auto base = RegressionForest::train(X, y, cfg);
  const auto permuted = RegressionForest::train(Xp, y, cfg);
  for (int i = 0; i < 100; ++i) {
    Eigen::VectorXd xp(4);
    for (int j = 0; j < 4; ++j) xp[j] = X(i, perm[j]);
    CHECK(permuted.predict(xp) == base.predict(X.row(i).transpose()));
  }
}

TEST_CASE("contract violations are rejected") {
  Eigen::MatrixXd X(6, 2);
  X.setConstant(1.0);
  Eigen::VectorXd y(6);
  y.setConstant(0.5);
  CHECK_THROWS_AS(RegressionForest::train(X.topRows(1), y.head(1), {.n_trees = 1}),
                  std::runtime_error);  // too few rows to train on
  Eigen::VectorXd bad = y;
  bad[0] = 1.5;
  CHECK_THROWS_AS(RegressionForest::train(X, bad, {.n_trees = 1, .min_leaf = 1}),
                  std::invalid_argument);  // target outside [0,1]

  const auto forest = RegressionForest::train(X, y, {.n_trees = 1, .min_leaf = 1});
  CHECK_THROWS_AS(forest.predict(Eigen::VectorXd::Constant(3, 0.0)), std::invalid_argument);
}

TEST_CASE("training points in pure leaf regions predict their own target") {
  // Two tight separable clusters with constant targets per cluster.
  Rng rng(23);
  Eigen::MatrixXd X(60, 2);
  Eigen::VectorXd y(60);
  for (int i = 0; i < 60; ++i) {
    const bool high = i >= 30;
    X(i, 0) = (high ? 0.8 : 0.2) + rng.uniform(-0.05, 0.05);
    X(i, 1) = rng.uniform();
    y[i] = high ? 0.9 : 0.1;
  }

  // Leaf purity, verified exactly without bagging noise.
  const auto pure = RegressionForest::train(
      X, y, {.n_trees = 1, .mtry = 2, .min_leaf = 1, .seed = 3, .bootstrap = false});
  for (int i = 0; i < 60; ++i) CHECK(pure.predict(X.row(i).transpose()) == y[i]);

  // With bagging the prediction stays within noise of the target and in [0,1].
  const auto bagged =
      RegressionForest::train(X, y, {.n_trees = 60, .min_leaf = 1, .seed = 4});
  for (int i = 0; i < 60; i += 7) {
    const double pred = bagged.predict(X.row(i).transpose());
    CHECK(pred >= 0.0);
    CHECK(pred <= 1.0);
    CHECK(std::abs(pred - y[i]) < 0.15);
  }
}

TEST_CASE("constant X with varying y yields a stump predicting the mean") {
  Eigen::MatrixXd X = Eigen::MatrixXd::Constant(20, 2, 3.0);
  Eigen::VectorXd y(20);
  for (int i = 0; i < 20; ++i) y[i] = (i % 2 == 0) ? 0.0 : 1.0;
  const auto forest = RegressionForest::train(
      X, y, {.n_trees = 1, .min_leaf = 1, .seed = 2, .bootstrap = false});
  CHECK(forest.trees()[0].nodes.size() == 1);  // no valid split exists
  CHECK(forest.predict(X.row(0).transpose()) == 0.5);
}
