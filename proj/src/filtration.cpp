#include "phseg/filtration.hpp"

#include <stdexcept>
#include <string>

namespace phseg {

Filtration Filtration::defaults() {
  std::vector<int> ts;
  for (int t = 16; t <= 240; t += 16) ts.push_back(t);
  return Filtration(std::move(ts));
}

Filtration::Filtration(std::vector<int> thresholds) : thresholds_(std::move(thresholds)) {
  if (thresholds_.empty()) throw std::invalid_argument("filtration needs at least one threshold");
  int prev = 0;
  for (const int t : thresholds_) {
    if (t < 1 || t > 255)
      throw std::invalid_argument("filtration threshold " + std::to_string(t) +
                                  " outside [1,255]");
    if (t <= prev)
      throw std::invalid_argument("filtration thresholds must be strictly increasing");
    prev = t;
  }
}

Mask sublevel_mask(const GrayImage& img, int t) {
  if (t < 0 || t > 256)
    throw std::invalid_argument("sublevel threshold " + std::to_string(t) + " outside [0,256]");
  return (img.cast<int>() < t).eval();
}

}  // namespace phseg
