#include "phseg/activation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace phseg {

static_assert(std::endian::native == std::endian::little,
              "activation IO assumes a little-endian host");

void ActivationTensor::validate() const {
  if (w < 1 || h < 1 || z < 1)
    throw std::runtime_error("activation tensor dimensions must be >= 1");
  if (data.size() != static_cast<std::size_t>(w) * h * z)
    throw std::runtime_error("activation tensor payload size mismatch");
  for (const float v : data)
    if (!std::isfinite(v)) throw std::runtime_error("activation tensor contains non-finite value");
}

ActivationTensor load_activation(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open activation file: " + path);
  char magic[4];
  in.read(magic, 4);
  if (in.gcount() != 4 || std::memcmp(magic, "ACTV", 4) != 0)
    throw std::runtime_error("bad magic in activation file: " + path);
  std::uint32_t dims[3];
  in.read(reinterpret_cast<char*>(dims), sizeof dims);
  if (in.gcount() != sizeof dims)
    throw std::runtime_error("truncated activation header: " + path);
  ActivationTensor t;
  t.w = dims[0];
  t.h = dims[1];
  t.z = dims[2];
  if (t.w < 1 || t.h < 1 || t.z < 1)
    throw std::runtime_error("activation dims must be >= 1 in " + path);
  const std::size_t count = static_cast<std::size_t>(t.w) * t.h * t.z;
  t.data.resize(count);
  in.read(reinterpret_cast<char*>(t.data.data()),
          static_cast<std::streamsize>(count * sizeof(float)));
  if (in.gcount() != static_cast<std::streamsize>(count * sizeof(float)))
    throw std::runtime_error("truncated activation payload: " + path);
  t.validate();
  return t;
}

void save_activation(const std::string& path, const ActivationTensor& t) {
  t.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write activation file: " + path);
  out.write("ACTV", 4);
  const std::uint32_t dims[3] = {t.w, t.h, t.z};
  out.write(reinterpret_cast<const char*>(dims), sizeof dims);
  out.write(reinterpret_cast<const char*>(t.data.data()),
            static_cast<std::streamsize>(t.data.size() * sizeof(float)));
  if (!out) throw std::runtime_error("short write to " + path);
}

PlaneXd flatten_activation(const ActivationTensor& t) {
  t.validate();
  PlaneXd map(t.w, t.h);
  for (std::uint32_t iw = 0; iw < t.w; ++iw) {
    for (std::uint32_t ih = 0; ih < t.h; ++ih) {
      double acc = 0.0;
      const float* slice = t.data.data() + (static_cast<std::size_t>(iw) * t.h + ih) * t.z;
      for (std::uint32_t iz = 0; iz < t.z; ++iz) {
        const double a = std::abs(static_cast<double>(slice[iz]));
        acc += a * a;
      }
      map(iw, ih) = acc;
    }
  }
  const double lo = map.minCoeff(), hi = map.maxCoeff();
  if (hi == lo) return PlaneXd::Zero(t.w, t.h);
  return ((map - lo) / (hi - lo)).eval();
}

double patch_score(const Eigen::Ref<const PlaneXd>& map) {
  if (map.size() == 0) throw std::invalid_argument("patch_score: empty map");
  std::vector<double> values(map.data(), map.data() + map.size());
  const std::size_t mid = (values.size() - 1) / 2;  // lower median on even counts
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid),
                   values.end());
  return values[mid];
}

}  // namespace phseg
