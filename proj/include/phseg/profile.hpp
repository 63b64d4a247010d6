// Persistent homology profiles: the beta0/beta1 curves of a tile's
// threshold filtration, smoothed and normalized into two discrete
// probability distributions.
#pragma once

#include <string>

#include "phseg/betti.hpp"
#include "phseg/filtration.hpp"

namespace phseg {

constexpr double kProfileEpsilon = 1e-4;  // per-bin smoothing before normalization

struct PhProfile {
  Filtration filtration;
  Eigen::ArrayXd p0;
  Eigen::ArrayXd p1;

  bool operator==(const PhProfile& o) const {
    return filtration == o.filtration && p0.size() == o.p0.size() && p1.size() == o.p1.size() &&
           (p0 == o.p0).all() && (p1 == o.p1).all();
  }
  bool operator!=(const PhProfile& o) const { return !(*this == o); }

  // p0 followed by p1: the 2k-2 feature vector.
  Eigen::VectorXd feature_vector() const;
};

struct PhpResult {
  BettiCurves curves;
  PhProfile profile;
};

// Adds epsilon to every bin and divides by the sum, so all entries are
// strictly positive and the curve integrates to one.
Eigen::ArrayXd normalize_curve(const Eigen::ArrayXi& curve, double epsilon = kProfileEpsilon);

PhpResult php(const GrayImage& img, const Filtration& filtration,
              ComplementMode mode = ComplementMode::bounded_voids,
              double epsilon = kProfileEpsilon);

PhProfile profile_from_curves(const BettiCurves& curves, const Filtration& filtration,
                              double epsilon = kProfileEpsilon);

// CSV with header `t,beta0,beta1,p0,p1`, one row per threshold. Doubles are
// written with 17 significant digits and round-trip exactly.
void save_php_csv(const std::string& path, const PhpResult& result);
PhpResult load_php_csv(const std::string& path);

}  // namespace phseg
