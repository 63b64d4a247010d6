// Activation tensors produced by an upstream feature extractor, flattened
// to a 2D saliency map and reduced to one scalar score per patch.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "phseg/image.hpp"

namespace phseg {

struct ActivationTensor {
  std::uint32_t w = 0, h = 0, z = 0;
  std::vector<float> data;  // z varies fastest: index (iw*h + ih)*z + iz

  float at(std::uint32_t iw, std::uint32_t ih, std::uint32_t iz) const {
    return data[(static_cast<std::size_t>(iw) * h + ih) * z + iz];
  }
  void validate() const;  // dims >= 1, size matches, all values finite
};

// Binary format: magic "ACTV", three little-endian u32 dims (W,H,Z), then
// W*H*Z little-endian f32 values, z fastest.
ActivationTensor load_activation(const std::string& path);
void save_activation(const std::string& path, const ActivationTensor& t);

// F(w,h) = sum_z |a(w,h,z)|^2, min-max normalized to [0,1].
// A constant map normalizes to all zeros.
PlaneXd flatten_activation(const ActivationTensor& t);

// Lower median: central tendency of the flattened map.
double patch_score(const Eigen::Ref<const PlaneXd>& map);

}  // namespace phseg
