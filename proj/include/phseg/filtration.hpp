// Threshold filtrations of 8-bit images. The sublevel set at t is the set
// of pixels with intensity strictly below t, so t=0 is empty and t=256 is
// the whole image.
#pragma once

#include <vector>

#include "phseg/image.hpp"

namespace phseg {

class Filtration {
public:
  // 15 uniform thresholds {16,32,...,240}: k=16 levels, feature length 30.
  static Filtration defaults();

  Filtration() : Filtration(defaults()) {}
  explicit Filtration(std::vector<int> thresholds);

  const std::vector<int>& thresholds() const { return thresholds_; }
  int levels() const { return static_cast<int>(thresholds_.size()); }  // k-1
  int k() const { return levels() + 1; }
  int feature_length() const { return 2 * k() - 2; }

  bool operator==(const Filtration& other) const { return thresholds_ == other.thresholds_; }
  bool operator!=(const Filtration& other) const { return !(*this == other); }

private:
  std::vector<int> thresholds_;
};

Mask sublevel_mask(const GrayImage& img, int t);

}  // namespace phseg
