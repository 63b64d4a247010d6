#include "phseg/synth.hpp"

#include <cmath>
#include <filesystem>
#include <vector>

#include "phseg/image_io.hpp"

namespace phseg {
namespace {

// Smooth per-tile texture: bilinear interpolation of a random lattice.
class ValueNoise {
public:
  ValueNoise(Rng& rng, int size, int cell) : cell_(cell), nx_(size / cell + 2) {
    lattice_.resize(static_cast<std::size_t>(nx_) * nx_);
    for (auto& v : lattice_) v = rng.uniform();
  }

  double at(double x, double y) const {
    const double gx = x / cell_, gy = y / cell_;
    const int ix = static_cast<int>(gx), iy = static_cast<int>(gy);
    const double fx = gx - ix, fy = gy - iy;
    const double a = lattice_[idx(ix, iy)], b = lattice_[idx(ix + 1, iy)];
    const double c = lattice_[idx(ix, iy + 1)], d = lattice_[idx(ix + 1, iy + 1)];
    return (a * (1 - fx) + b * fx) * (1 - fy) + (c * (1 - fx) + d * fx) * fy;
  }

private:
  std::size_t idx(int x, int y) const {
    return static_cast<std::size_t>(std::min(y, nx_ - 1)) * nx_ + std::min(x, nx_ - 1);
  }
  int cell_;
  int nx_;
  std::vector<double> lattice_;
};

struct Blob {
  double x, y, r, c0;
  double phase3, phase5, amp3, amp5;  // angular irregularity, zero for round blobs
};

void paint_blob(PlaneXd& hema, const Blob& blob, const ValueNoise* texture, int size) {
  const double reach = blob.r * 1.8;
  const int x0 = std::max(0, static_cast<int>(blob.x - reach));
  const int x1 = std::min(size - 1, static_cast<int>(blob.x + reach));
  const int y0 = std::max(0, static_cast<int>(blob.y - reach));
  const int y1 = std::min(size - 1, static_cast<int>(blob.y + reach));
  for (int py = y0; py <= y1; ++py) {
    for (int px = x0; px <= x1; ++px) {
      const double dx = px - blob.x, dy = py - blob.y;
      const double d = std::sqrt(dx * dx + dy * dy);
      double radius = blob.r;
      if (blob.amp3 != 0.0 || blob.amp5 != 0.0) {
        const double theta = std::atan2(dy, dx);
        radius *= 1.0 + blob.amp3 * std::sin(3 * theta + blob.phase3) +
                  blob.amp5 * std::sin(5 * theta + blob.phase5);
      }
      if (radius <= 0.5 || d >= radius) continue;
      const double u = d / radius;
      const double edge = std::min(1.0, (1.0 - u * u) * 3.0);  // flat core, soft rim
      double c = blob.c0 * edge;
      if (texture) c *= 0.55 + 0.9 * texture->at(px, py);
      auto& cell = hema(py, px);
      cell = std::max(cell, c);
    }
  }
}

RgbImage render(const PlaneXd& hema, const PlaneXd& eosin, const StainMatrix& stain, int size) {
  const Eigen::Vector3d h = stain.hematoxylin(), e = stain.eosin();
  RgbImage img(GrayImage(size, size), GrayImage(size, size), GrayImage(size, size));
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const double ch = hema(y, x), ce = eosin(y, x);
      for (int c = 0; c < 3; ++c) {
        const double od = ch * h[c] + ce * e[c];
        const double v = std::round(255.0 * std::pow(10.0, -od));
        const auto byte = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
        (c == 0 ? img.r : c == 1 ? img.g : img.b)(y, x) = byte;
      }
    }
  }
  return img;
}

}  // namespace

RgbImage synth_tile(TileLabel cls, Rng& rng, int size, const StainMatrix& stain) {
  PlaneXd hema(size, size), eosin(size, size);
  const ValueNoise background(rng, size, 16);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const double n = background.at(x, y);
      if (cls == TileLabel::tumor) {
        hema(y, x) = 0.06 + 0.04 * n;
        eosin(y, x) = 0.28 + 0.10 * n;
      } else {
        hema(y, x) = 0.02 + 0.02 * n;
        eosin(y, x) = 0.22 + 0.08 * n;
      }
    }
  }

  if (cls == TileLabel::tumor) {
    // Dense overlapping irregular blobs with heterogeneous interiors.
    const ValueNoise texture(rng, size, 4);
    const int count = rng.range(45, 65);
    for (int i = 0; i < count; ++i) {
      Blob b;
      b.x = rng.uniform(0.0, size);
      b.y = rng.uniform(0.0, size);
      b.r = rng.uniform(8.0, 15.0);
      b.c0 = rng.uniform(0.75, 1.15);
      b.amp3 = rng.uniform(0.15, 0.3);
      b.amp5 = rng.uniform(0.1, 0.2);
      b.phase3 = rng.uniform(0.0, 2 * M_PI);
      b.phase5 = rng.uniform(0.0, 2 * M_PI);
      paint_blob(hema, b, &texture, size);
    }
  } else {
    // Sparse round well-separated nuclei.
    const int target = rng.range(14, 24);
    std::vector<Blob> placed;
    for (int i = 0; i < target; ++i) {
      for (int attempt = 0; attempt < 40; ++attempt) {
        Blob b{};
        b.r = rng.uniform(6.0, 10.0);
        b.x = rng.uniform(b.r, size - b.r);
        b.y = rng.uniform(b.r, size - b.r);
        b.c0 = rng.uniform(0.85, 1.05);
        bool clear = true;
        for (const auto& other : placed) {
          const double dx = b.x - other.x, dy = b.y - other.y;
          const double min_gap = b.r + other.r + 6.0;
          if (dx * dx + dy * dy < min_gap * min_gap) {
            clear = false;
            break;
          }
        }
        if (clear) {
          placed.push_back(b);
          paint_blob(hema, b, nullptr, size);
          break;
        }
      }
    }
  }
  return render(hema, eosin, stain, size);
}

TileManifest synth_corpus(const SynthOptions& options, const std::string& out_dir) {
  if (options.per_class < 1) throw std::invalid_argument("synth: per_class must be >= 1");
  namespace fs = std::filesystem;
  const fs::path tiles_dir = fs::path(out_dir) / "tiles";
  fs::create_directories(tiles_dir);

  TileManifest manifest;
  const int side = static_cast<int>(std::ceil(std::sqrt(2.0 * options.per_class)));
  int index = 0;
  for (const TileLabel cls : {TileLabel::tumor, TileLabel::normal}) {
    for (int i = 0; i < options.per_class; ++i, ++index) {
      // One derived stream per tile: tiles are reproducible individually.
      Rng rng = Rng::derive(options.seed, static_cast<std::uint64_t>(index));
      const RgbImage tile = synth_tile(cls, rng, options.tile_size);
      TileEntry e;
      e.id = std::string(to_string(cls)) + "_" + std::to_string(i);
      const fs::path file = tiles_dir / (e.id + ".png");
      save_png(file.string(), tile);
      e.path = file.string();
      e.x = static_cast<long>(index % side) * options.tile_size;
      e.y = static_cast<long>(index / side) * options.tile_size;
      e.label = cls;
      manifest.entries.push_back(std::move(e));
    }
  }
  save_manifest(manifest, (fs::path(out_dir) / "manifest.csv").string());
  return manifest;
}

}  // namespace phseg
