// Betti numbers of thresholded images by connected-component counting.
//
// Foreground components use 8-connectivity and complement components use
// 4-connectivity, the dual pairing that keeps hole counts consistent.
// beta1 defaults to bounded voids: complement components that do not touch
// the image border. LiteralComplement counts every complement component.
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "phseg/filtration.hpp"
#include "phseg/image.hpp"

namespace phseg {

enum class ComplementMode { bounded_voids, literal };

long betti0(const Mask& mask);
long betti1(const Mask& mask, ComplementMode mode = ComplementMode::bounded_voids);

struct BettiCurves {
  Eigen::ArrayXi beta0;
  Eigen::ArrayXi beta1;

  bool operator==(const BettiCurves& o) const {
    return beta0.size() == o.beta0.size() && beta1.size() == o.beta1.size() &&
           (beta0 == o.beta0).all() && (beta1 == o.beta1).all();
  }
};

// Pixels bucketed by intensity: the insertion order of the incremental
// engine. level_start[v]..level_start[v+1] indexes pixels of intensity v.
struct PixelOrder {
  Eigen::Index width = 0;
  Eigen::Index height = 0;
  std::array<std::uint32_t, 257> level_start{};
  std::vector<std::uint32_t> pixels;  // row-major pixel indices
};

PixelOrder order_pixels(const GrayImage& img);

// Component counts after inserting whole intensity levels, from which the
// Betti curve at any threshold can be read off:
//   fg_leq[v]          8-connected components of {I <= v}
//   comp_geq[v]        4-connected components of {I >= v}
//   comp_geq_border[v] those touching the image border
struct LevelCounts {
  std::array<std::int32_t, 256> fg_leq{};
  std::array<std::int32_t, 257> comp_geq{};
  std::array<std::int32_t, 257> comp_geq_border{};
};

LevelCounts sweep_levels(const PixelOrder& order);

BettiCurves betti_curves(const PixelOrder& order, const Filtration& filtration,
                         ComplementMode mode = ComplementMode::bounded_voids);
BettiCurves betti_curves(const GrayImage& img, const Filtration& filtration,
                         ComplementMode mode = ComplementMode::bounded_voids);

}  // namespace phseg
