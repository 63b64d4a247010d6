// Dense 8-bit raster types. Row-major so the storage order matches the
// byte order of PGM/PPM/PNG scanlines.
#pragma once

#include <cstdint>
#include <stdexcept>

#include <Eigen/Dense>

namespace phseg {

using GrayImage = Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using PlaneXd = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// RGB raster held as three planes of identical shape.
struct RgbImage {
  GrayImage r, g, b;

  RgbImage() = default;
  RgbImage(GrayImage r_, GrayImage g_, GrayImage b_)
      : r(std::move(r_)), g(std::move(g_)), b(std::move(b_)) {
    if (g.rows() != r.rows() || g.cols() != r.cols() || b.rows() != r.rows() ||
        b.cols() != r.cols())
      throw std::invalid_argument("RgbImage: channel planes differ in shape");
  }

  static RgbImage constant(Eigen::Index height, Eigen::Index width, std::uint8_t rv,
                           std::uint8_t gv, std::uint8_t bv) {
    return RgbImage(GrayImage::Constant(height, width, rv),
                    GrayImage::Constant(height, width, gv),
                    GrayImage::Constant(height, width, bv));
  }

  Eigen::Index width() const { return r.cols(); }
  Eigen::Index height() const { return r.rows(); }
  bool empty() const { return r.size() == 0; }
};

inline GrayImage crop(const GrayImage& img, Eigen::Index x, Eigen::Index y, Eigen::Index w,
                      Eigen::Index h) {
  if (x < 0 || y < 0 || x + w > img.cols() || y + h > img.rows())
    throw std::invalid_argument("crop: window outside image");
  return img.block(y, x, h, w);
}

inline RgbImage crop(const RgbImage& img, Eigen::Index x, Eigen::Index y, Eigen::Index w,
                     Eigen::Index h) {
  return RgbImage(crop(img.r, x, y, w, h), crop(img.g, x, y, w, h), crop(img.b, x, y, w, h));
}

// Quarter turn clockwise: out(i,j) = in(H-1-j, i).
inline GrayImage rotate90(const GrayImage& img) {
  return img.transpose().rowwise().reverse().eval();
}

inline GrayImage flip_horizontal(const GrayImage& img) { return img.rowwise().reverse().eval(); }

inline GrayImage flip_vertical(const GrayImage& img) { return img.colwise().reverse().eval(); }

inline RgbImage rotate90(const RgbImage& img) {
  return RgbImage(rotate90(img.r), rotate90(img.g), rotate90(img.b));
}

inline RgbImage flip_horizontal(const RgbImage& img) {
  return RgbImage(flip_horizontal(img.r), flip_horizontal(img.g), flip_horizontal(img.b));
}

inline RgbImage flip_vertical(const RgbImage& img) {
  return RgbImage(flip_vertical(img.r), flip_vertical(img.g), flip_vertical(img.b));
}

// The 8 symmetries of the square: i in [0,3] rotations, [4,7] flipped rotations.
template <typename Img>
Img dihedral_transform(const Img& img, int i) {
  Img out = (i & 4) ? flip_horizontal(img) : img;
  for (int turns = i & 3; turns > 0; --turns) out = rotate90(out);
  return out;
}

}  // namespace phseg
