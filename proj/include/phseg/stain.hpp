// Optical-density stain separation of H&E tiles and extraction of the
// hematoxylin intensity channel that feeds the filtration.
#pragma once

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "phseg/image.hpp"

namespace phseg {

// Rows are unit OD vectors for hematoxylin, eosin and a residual stain.
class StainMatrix {
public:
  // Standard Ruifrok-Johnston H&E basis; residual completes the frame.
  static StainMatrix ruifrok_johnston();

  // Rows are re-normalized; a missing residual row is built from h x e.
  static StainMatrix from_rows(const Eigen::Vector3d& h, const Eigen::Vector3d& e,
                               std::optional<Eigen::Vector3d> residual = std::nullopt);

  // JSON object {"h":[..],"e":[..],"r":[..]} with "r" optional.
  static StainMatrix load_json(const std::string& path);
  void save_json(const std::string& path) const;

  const Eigen::Matrix3d& rows() const { return m_; }
  const Eigen::Matrix3d& inverse() const { return inv_; }

  Eigen::Vector3d hematoxylin() const { return m_.row(0); }
  Eigen::Vector3d eosin() const { return m_.row(1); }
  Eigen::Vector3d residual() const { return m_.row(2); }

private:
  StainMatrix(Eigen::Matrix3d m);

  Eigen::Matrix3d m_;
  Eigen::Matrix3d inv_;
};

inline double optical_density(std::uint8_t v) {
  // max(I,1) keeps the log finite on pure black pixels.
  return -std::log10(static_cast<double>(std::max<int>(v, 1)) / 255.0);
}

struct ConcentrationPlanes {
  PlaneXd hema, eosin, residual;
};

// Linear map of [0, c_max] onto [255, 0]: zero concentration is brightest.
inline std::uint8_t concentration_to_intensity(double c, double c_max = 2.0) {
  const double frac = std::min(std::max(c, 0.0) / c_max, 1.0);
  return static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - frac)));
}

// Per pixel: OD_c = -log10(max(I_c,1)/255); concentrations = OD * M^-1,
// negatives clamped to zero.
ConcentrationPlanes stain_deconvolve(const RgbImage& patch, const StainMatrix& m);

// Hematoxylin concentrations scaled from [0, c_max] to [0,255] and inverted:
// dense nuclei map to low intensities so sublevel sets grow onto them first.
GrayImage hematoxylin_channel(const RgbImage& patch, const StainMatrix& m, double c_max = 2.0);

}  // namespace phseg
