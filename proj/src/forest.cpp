#include "phseg/forest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "phseg/csv.hpp"
#include "phseg/parallel.hpp"
#include "phseg/rng.hpp"

namespace phseg {

void ForestConfig::validate(int feature_dim) const {
  if (n_trees < 1) throw std::invalid_argument("forest: n_trees must be >= 1");
  if (min_leaf < 1) throw std::invalid_argument("forest: min_leaf must be >= 1");
  if (max_depth < 0) throw std::invalid_argument("forest: max_depth must be >= 0");
  if (mtry < 0 || mtry > feature_dim)
    throw std::invalid_argument("forest: mtry must be in [0, p]");
}

int ForestConfig::resolved_mtry(int feature_dim) const {
  if (mtry > 0) return mtry;
  return (feature_dim + 2) / 3;  // ceil(p/3)
}

double RegressionTree::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  std::int32_t node = 0;
  while (!nodes[node].is_leaf())
    node = x[nodes[node].feature] <= nodes[node].threshold ? nodes[node].left
                                                           : nodes[node].right;
  return nodes[node].value;
}

namespace {

struct TreeBuilder {
  const Eigen::MatrixXd& X;
  const Eigen::VectorXd& y;
  int mtry;
  int min_leaf;
  int max_depth;
  Rng& rng;
  std::vector<TreeNode>& nodes;

  // Scratch shared across nodes.
  std::vector<int> feature_pool = {};
  std::vector<std::pair<double, double>> sorted = {};  // (feature value, target)

  std::int32_t build(std::vector<std::uint32_t>& rows, int depth) {
    const std::int32_t self = static_cast<std::int32_t>(nodes.size());
    nodes.emplace_back();

    double sum = 0.0;
    double y_min = std::numeric_limits<double>::infinity(), y_max = -y_min;
    for (const auto r : rows) {
      sum += y[r];
      y_min = std::min(y_min, y[r]);
      y_max = std::max(y_max, y[r]);
    }
    const double mean = sum / static_cast<double>(rows.size());

    if (static_cast<int>(rows.size()) < 2 * min_leaf || y_min == y_max ||
        (max_depth > 0 && depth >= max_depth)) {
      nodes[self].value = y_min == y_max ? y_min : mean;  // constant targets stay exact
      return self;
    }

    const auto split = best_split(rows);
    if (split.feature < 0) {
      nodes[self].value = mean;
      return self;
    }

    std::vector<std::uint32_t> left_rows, right_rows;
    left_rows.reserve(rows.size());
    right_rows.reserve(rows.size());
    for (const auto r : rows) {
      (X(r, split.feature) <= split.threshold ? left_rows : right_rows).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();

    const std::int32_t left = build(left_rows, depth + 1);
    const std::int32_t right = build(right_rows, depth + 1);
    nodes[self].feature = split.feature;
    nodes[self].threshold = split.threshold;
    nodes[self].left = left;
    nodes[self].right = right;
    return self;
  }

  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double score = -std::numeric_limits<double>::infinity();
  };

  // Maximal variance reduction == minimal child SSE. Candidate thresholds
  // are midpoints between consecutive distinct values; ties break to the
  // lowest feature index, then the lowest threshold.
  Split best_split(const std::vector<std::uint32_t>& rows) {
    const std::size_t m = rows.size();

    // Draw mtry distinct features, then scan them in ascending order.
    const int p = static_cast<int>(X.cols());
    feature_pool.resize(p);
    std::iota(feature_pool.begin(), feature_pool.end(), 0);
    const int tries = std::min(mtry, p);
    for (int i = 0; i < tries; ++i) {
      const std::size_t j = i + rng.below(static_cast<std::uint64_t>(p - i));
      std::swap(feature_pool[i], feature_pool[j]);
    }
    std::sort(feature_pool.begin(), feature_pool.begin() + tries);

    Split best;
    for (int fi = 0; fi < tries; ++fi) {
      const int f = feature_pool[fi];
      sorted.clear();
      sorted.reserve(m);
      for (const auto r : rows) sorted.emplace_back(X(r, f), y[r]);
      std::sort(sorted.begin(), sorted.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });

      double left_sum = 0.0;
      double total = 0.0;
      for (const auto& sv : sorted) total += sv.second;

      for (std::size_t i = 1; i < m; ++i) {
        left_sum += sorted[i - 1].second;
        if (sorted[i].first == sorted[i - 1].first) continue;
        const auto nl = static_cast<double>(i);
        const auto nr = static_cast<double>(m - i);
        if (i < static_cast<std::size_t>(min_leaf) ||
            m - i < static_cast<std::size_t>(min_leaf))
          continue;
        const double right_sum = total - left_sum;
        // SSE decomposition: maximizing sum of (child sum)^2/n over the
        // children maximizes the variance reduction.
        const double score = left_sum * left_sum / nl + right_sum * right_sum / nr;
        if (score > best.score) {
          best.score = score;
          best.feature = f;
          best.threshold = 0.5 * (sorted[i - 1].first + sorted[i].first);
        }
      }
    }
    return best;
  }
};

}  // namespace

RegressionForest RegressionForest::train(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                         const ForestConfig& cfg, int workers) {
  const int n = static_cast<int>(X.rows());
  const int p = static_cast<int>(X.cols());
  if (n != y.size()) throw std::invalid_argument("forest: X rows and y length differ");
  if (p < 1) throw std::invalid_argument("forest: need at least one feature");
  cfg.validate(p);
  // min_leaf >= n is allowed and degenerates to single-leaf trees; what we
  // cannot do is train on fewer than two rows.
  if (n < 2)
    throw std::runtime_error("forest: need at least 2 training rows, got " +
                             std::to_string(n));
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(y[i]) || y[i] < 0.0 || y[i] > 1.0)
      throw std::invalid_argument("forest: targets must be finite and in [0,1]");
  }

  RegressionForest forest;
  forest.feature_dim_ = p;
  forest.config_ = cfg;
  forest.trees_.resize(cfg.n_trees);

  const int mtry = cfg.resolved_mtry(p);
  parallel_for(static_cast<std::size_t>(cfg.n_trees), workers, [&](std::size_t t) {
    Rng rng = Rng::derive(cfg.seed, t);
    std::vector<std::uint32_t> rows(n);
    if (cfg.bootstrap) {
      std::vector<std::uint8_t> drawn(n, 0);
      for (int i = 0; i < n; ++i) {
        const auto r = static_cast<std::uint32_t>(rng.below(n));
        rows[i] = r;
        drawn[r] = 1;
      }
      forest.trees_[t].n_oob =
          n - std::accumulate(drawn.begin(), drawn.end(), std::int64_t{0});
    } else {
      std::iota(rows.begin(), rows.end(), 0);
      forest.trees_[t].n_oob = 0;
    }
    TreeBuilder builder{X, y, mtry, cfg.min_leaf, cfg.max_depth, rng, forest.trees_[t].nodes};
    builder.build(rows, 0);
  });
  return forest;
}

double RegressionForest::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (trees_.empty()) throw std::runtime_error("forest: model is empty (not trained/loaded)");
  if (x.size() != feature_dim_)
    throw std::invalid_argument("forest: feature vector has length " +
                                std::to_string(x.size()) + ", expected " +
                                std::to_string(feature_dim_));
  double sum = 0.0;
  bool all_equal = true;
  const double first = trees_.front().predict(x);
  for (const auto& tree : trees_) {
    const double v = tree.predict(x);
    sum += v;
    all_equal = all_equal && v == first;
  }
  // Unanimous trees answer exactly; averaging would cost an ulp.
  const double mean = all_equal ? first : sum / static_cast<double>(trees_.size());
  return std::clamp(mean, 0.0, 1.0);
}

Eigen::VectorXd RegressionForest::predict_rows(const Eigen::MatrixXd& X) const {
  Eigen::VectorXd out(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) out[i] = predict(X.row(i).transpose());
  return out;
}

namespace {

// Nested node objects keep the serialized trees human-inspectable.
nlohmann::json node_to_json(const std::vector<TreeNode>& nodes, std::int32_t index) {
  const TreeNode& n = nodes[index];
  if (n.is_leaf()) return {{"value", n.value}};
  return {{"feature", n.feature},
          {"threshold", n.threshold},
          {"left", node_to_json(nodes, n.left)},
          {"right", node_to_json(nodes, n.right)}};
}

std::int32_t node_from_json(const nlohmann::json& j, std::vector<TreeNode>& nodes) {
  const auto self = static_cast<std::int32_t>(nodes.size());
  nodes.emplace_back();
  if (j.contains("feature")) {
    const int feature = j.at("feature").get<int>();
    const double threshold = j.at("threshold").get<double>();
    const std::int32_t left = node_from_json(j.at("left"), nodes);
    const std::int32_t right = node_from_json(j.at("right"), nodes);
    nodes[self].feature = feature;
    nodes[self].threshold = threshold;
    nodes[self].left = left;
    nodes[self].right = right;
  } else {
    nodes[self].value = j.at("value").get<double>();
  }
  return self;
}

}  // namespace

std::string RegressionForest::to_json_string() const {
  nlohmann::json j;
  j["feature_dim"] = feature_dim_;
  j["config"] = {{"n_trees", config_.n_trees},   {"mtry", config_.mtry},
                 {"min_leaf", config_.min_leaf}, {"max_depth", config_.max_depth},
                 {"seed", config_.seed},         {"bootstrap", config_.bootstrap}};
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& tree : trees_)
    trees.push_back({{"n_oob", tree.n_oob}, {"root", node_to_json(tree.nodes, 0)}});
  j["trees"] = std::move(trees);
  return j.dump();
}

RegressionForest RegressionForest::from_json_string(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    RegressionForest forest;
    forest.feature_dim_ = j.at("feature_dim").get<int>();
    const auto& c = j.at("config");
    forest.config_.n_trees = c.at("n_trees").get<int>();
    forest.config_.mtry = c.at("mtry").get<int>();
    forest.config_.min_leaf = c.at("min_leaf").get<int>();
    forest.config_.max_depth = c.at("max_depth").get<int>();
    forest.config_.seed = c.at("seed").get<std::uint64_t>();
    forest.config_.bootstrap = c.at("bootstrap").get<bool>();
    for (const auto& tj : j.at("trees")) {
      RegressionTree tree;
      tree.n_oob = tj.at("n_oob").get<std::int64_t>();
      node_from_json(tj.at("root"), tree.nodes);
      forest.trees_.push_back(std::move(tree));
    }
    if (forest.trees_.empty()) throw std::runtime_error("forest JSON: no trees");
    return forest;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("malformed forest JSON: ") + e.what());
  }
}

void RegressionForest::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write forest: " + path);
  out << to_json_string() << "\n";
}

RegressionForest RegressionForest::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open forest: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return from_json_string(text);
}

Eigen::Index FeatureTable::find(const std::string& id) const {
  for (std::size_t i = 0; i < ids.size(); ++i)
    if (ids[i] == id) return static_cast<Eigen::Index>(i);
  return -1;
}

FeatureTable load_features(const std::string& path) {
  CsvReader reader(path);
  const auto header = reader.raw_header();
  if (header.size() < 2 || header[0] != "id")
    throw std::runtime_error(path + ": feature CSV header must start with 'id,f0,...'");
  const bool has_label = header.back() == "label";
  const std::size_t p = header.size() - 1 - (has_label ? 1 : 0);
  if (p < 1) throw std::runtime_error(path + ": feature CSV has no feature columns");
  for (std::size_t i = 0; i < p; ++i) {
    if (header[i + 1] != "f" + std::to_string(i))
      throw std::runtime_error(path + ": feature column " + std::to_string(i + 1) +
                               " must be named f" + std::to_string(i));
  }

  FeatureTable table;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> f;
  const std::size_t cols = header.size();
  while (reader.next_row(f, cols, cols)) {
    table.ids.push_back(f[0]);
    std::vector<double> row(p);
    for (std::size_t i = 0; i < p; ++i)
      row[i] = reader.parse_double(f[i + 1], "feature f" + std::to_string(i));
    rows.push_back(std::move(row));
    if (has_label) table.labels.push_back(f.back());
  }
  table.X.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(p));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < p; ++c)
      table.X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return table;
}

void save_features(const FeatureTable& table, const std::string& path) {
  if (static_cast<Eigen::Index>(table.ids.size()) != table.X.rows())
    throw std::invalid_argument("feature table: id count and matrix rows differ");
  const bool has_label = !table.labels.empty();
  if (has_label && table.labels.size() != table.ids.size())
    throw std::invalid_argument("feature table: label count and id count differ");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write features: " + path);
  out << "id";
  for (Eigen::Index c = 0; c < table.X.cols(); ++c) out << ",f" << c;
  if (has_label) out << ",label";
  out << "\n";
  char buf[32];
  for (Eigen::Index r = 0; r < table.X.rows(); ++r) {
    out << table.ids[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < table.X.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", table.X(r, c));
      out << ',' << buf;
    }
    if (has_label) out << ',' << table.labels[static_cast<std::size_t>(r)];
    out << "\n";
  }
  if (!out) throw std::runtime_error("short write to " + path);
}

}  // namespace phseg
