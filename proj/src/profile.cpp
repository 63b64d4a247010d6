#include "phseg/profile.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "phseg/csv.hpp"

namespace phseg {

Eigen::VectorXd PhProfile::feature_vector() const {
  Eigen::VectorXd out(p0.size() + p1.size());
  out.head(p0.size()) = p0.matrix();
  out.tail(p1.size()) = p1.matrix();
  return out;
}

Eigen::ArrayXd normalize_curve(const Eigen::ArrayXi& curve, double epsilon) {
  if (curve.size() == 0) throw std::invalid_argument("normalize_curve: empty curve");
  if (epsilon <= 0.0) throw std::invalid_argument("normalize_curve: epsilon must be positive");
  const Eigen::ArrayXd smoothed = curve.cast<double>() + epsilon;
  return smoothed / smoothed.sum();
}

PhProfile profile_from_curves(const BettiCurves& curves, const Filtration& filtration,
                              double epsilon) {
  return PhProfile{filtration, normalize_curve(curves.beta0, epsilon),
                   normalize_curve(curves.beta1, epsilon)};
}

PhpResult php(const GrayImage& img, const Filtration& filtration, ComplementMode mode,
              double epsilon) {
  BettiCurves curves = betti_curves(img, filtration, mode);
  PhProfile profile = profile_from_curves(curves, filtration, epsilon);
  return PhpResult{std::move(curves), std::move(profile)};
}

void save_php_csv(const std::string& path, const PhpResult& result) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write profile CSV: " + path);
  out << "t,beta0,beta1,p0,p1\n";
  const auto& ts = result.profile.filtration.thresholds();
  char buf0[32], buf1[32];
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const Eigen::Index e = static_cast<Eigen::Index>(i);
    std::snprintf(buf0, sizeof buf0, "%.17g", result.profile.p0[e]);
    std::snprintf(buf1, sizeof buf1, "%.17g", result.profile.p1[e]);
    out << ts[i] << ',' << result.curves.beta0[e] << ',' << result.curves.beta1[e] << ',' << buf0
        << ',' << buf1 << '\n';
  }
  if (!out) throw std::runtime_error("short write to " + path);
}

PhpResult load_php_csv(const std::string& path) {
  CsvReader reader(path);
  reader.expect_header({"t", "beta0", "beta1", "p0", "p1"});
  std::vector<int> ts;
  std::vector<int> b0, b1;
  std::vector<double> p0, p1;
  std::vector<std::string> f;
  while (reader.next_row(f, 5, 5)) {
    ts.push_back(static_cast<int>(reader.parse_long(f[0], "threshold")));
    b0.push_back(static_cast<int>(reader.parse_long(f[1], "beta0")));
    b1.push_back(static_cast<int>(reader.parse_long(f[2], "beta1")));
    p0.push_back(reader.parse_double(f[3], "p0"));
    p1.push_back(reader.parse_double(f[4], "p1"));
  }
  if (ts.empty()) throw std::runtime_error(path + ": profile CSV has no rows");
  Filtration filtration(ts);
  BettiCurves curves{Eigen::Map<Eigen::ArrayXi>(b0.data(), static_cast<Eigen::Index>(b0.size())),
                     Eigen::Map<Eigen::ArrayXi>(b1.data(), static_cast<Eigen::Index>(b1.size()))};
  PhProfile profile{
      filtration,
      Eigen::Map<Eigen::ArrayXd>(p0.data(), static_cast<Eigen::Index>(p0.size())),
      Eigen::Map<Eigen::ArrayXd>(p1.data(), static_cast<Eigen::Index>(p1.size()))};
  return PhpResult{std::move(curves), std::move(profile)};
}

}  // namespace phseg
