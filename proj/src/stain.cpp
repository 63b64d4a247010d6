#include "phseg/stain.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace phseg {

StainMatrix::StainMatrix(Eigen::Matrix3d m) : m_(std::move(m)) {
  Eigen::FullPivLU<Eigen::Matrix3d> lu(m_);
  if (!lu.isInvertible())
    throw std::runtime_error("stain matrix is singular; rows must be linearly independent");
  inv_ = lu.inverse();
}

StainMatrix StainMatrix::ruifrok_johnston() {
  return from_rows({0.650, 0.704, 0.286}, {0.072, 0.990, 0.105});
}

StainMatrix StainMatrix::from_rows(const Eigen::Vector3d& h, const Eigen::Vector3d& e,
                                   std::optional<Eigen::Vector3d> residual) {
  if (h.norm() == 0.0 || e.norm() == 0.0)
    throw std::runtime_error("stain vectors must be non-zero");
  Eigen::Matrix3d m;
  m.row(0) = h.normalized();
  m.row(1) = e.normalized();
  if (residual) {
    if (residual->norm() == 0.0) throw std::runtime_error("residual stain vector is zero");
    m.row(2) = residual->normalized();
  } else {
    const Eigen::Vector3d cross = m.row(0).cross(m.row(1));
    if (cross.norm() < 1e-12)
      throw std::runtime_error("hematoxylin and eosin vectors are collinear");
    m.row(2) = cross.normalized();
  }
  return StainMatrix(m);
}

namespace {

Eigen::Vector3d json_vec3(const nlohmann::json& j, const std::string& key) {
  const auto& arr = j.at(key);
  if (!arr.is_array() || arr.size() != 3)
    throw std::runtime_error("stain JSON: '" + key + "' must be an array of 3 numbers");
  return {arr[0].get<double>(), arr[1].get<double>(), arr[2].get<double>()};
}

}  // namespace

StainMatrix StainMatrix::load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open stain matrix file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("stain JSON parse error in " + path + ": " + e.what());
  }
  std::optional<Eigen::Vector3d> r;
  if (j.contains("r")) r = json_vec3(j, "r");
  return from_rows(json_vec3(j, "h"), json_vec3(j, "e"), r);
}

void StainMatrix::save_json(const std::string& path) const {
  nlohmann::json j;
  j["h"] = {m_(0, 0), m_(0, 1), m_(0, 2)};
  j["e"] = {m_(1, 0), m_(1, 1), m_(1, 2)};
  j["r"] = {m_(2, 0), m_(2, 1), m_(2, 2)};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write stain matrix file: " + path);
  out << j.dump(2) << "\n";
}

ConcentrationPlanes stain_deconvolve(const RgbImage& patch, const StainMatrix& m) {
  if (patch.empty()) throw std::invalid_argument("stain_deconvolve: empty patch");
  const Eigen::Index h = patch.height(), w = patch.width();
  ConcentrationPlanes out{PlaneXd(h, w), PlaneXd(h, w), PlaneXd(h, w)};

  // Precomputed OD lookup; 8-bit inputs admit one.
  double od_lut[256];
  for (int v = 0; v < 256; ++v) od_lut[v] = optical_density(static_cast<std::uint8_t>(v));

  const Eigen::Matrix3d& inv = m.inverse();
  const std::uint8_t* pr = patch.r.data();
  const std::uint8_t* pg = patch.g.data();
  const std::uint8_t* pb = patch.b.data();
  for (Eigen::Index i = 0; i < h * w; ++i) {
    const Eigen::RowVector3d od(od_lut[pr[i]], od_lut[pg[i]], od_lut[pb[i]]);
    const Eigen::RowVector3d c = od * inv;
    out.hema.data()[i] = std::max(c[0], 0.0);
    out.eosin.data()[i] = std::max(c[1], 0.0);
    out.residual.data()[i] = std::max(c[2], 0.0);
  }
  return out;
}

GrayImage hematoxylin_channel(const RgbImage& patch, const StainMatrix& m, double c_max) {
  if (c_max <= 0.0) throw std::invalid_argument("hematoxylin_channel: c_max must be positive");
  const ConcentrationPlanes planes = stain_deconvolve(patch, m);
  GrayImage out(patch.height(), patch.width());
  const double* c = planes.hema.data();
  for (Eigen::Index i = 0; i < out.size(); ++i)
    out.data()[i] = concentration_to_intensity(c[i], c_max);
  return out;
}

}  // namespace phseg
