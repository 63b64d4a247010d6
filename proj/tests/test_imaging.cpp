#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "phseg/image.hpp"
#include "phseg/image_io.hpp"
#include "phseg/rng.hpp"
#include "phseg/stain.hpp"
#include "phseg/tile.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "oracles.hpp"

using namespace phseg;
namespace fs = std::filesystem;

namespace {

RgbImage single_pixel(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  return RgbImage::constant(1, 1, r, g, b);
}

// Renders a pixel from known concentrations via Beer-Lambert, 8-bit rounded.
RgbImage pixel_from_concentrations(const StainMatrix& m, double ch, double ce, double cr) {
  const Eigen::RowVector3d od =
      ch * m.hematoxylin().transpose() + ce * m.eosin().transpose() + cr * m.residual().transpose();
  std::uint8_t v[3];
  for (int c = 0; c < 3; ++c)
    v[c] = static_cast<std::uint8_t>(
        std::clamp(std::round(255.0 * std::pow(10.0, -od[c])), 0.0, 255.0));
  return single_pixel(v[0], v[1], v[2]);
}

}  // namespace

TEST_CASE("stain matrix rows are unit length and invertible") {
  const StainMatrix m = StainMatrix::ruifrok_johnston();
  for (int r = 0; r < 3; ++r) CHECK(m.rows().row(r).norm() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK((m.rows() * m.inverse() - Eigen::Matrix3d::Identity()).norm() < 1e-12);
  CHECK_THROWS_AS(StainMatrix::from_rows({1, 0, 0}, {1, 0, 0}), std::runtime_error);
}

TEST_CASE("white pixels carry zero optical density and zero concentrations") {
  const StainMatrix m = StainMatrix::ruifrok_johnston();
  const auto planes = stain_deconvolve(single_pixel(255, 255, 255), m);
  CHECK(planes.hema(0, 0) == 0.0);
  CHECK(planes.eosin(0, 0) == 0.0);
  CHECK(planes.residual(0, 0) == 0.0);
}

TEST_CASE("a pure hematoxylin pixel deconvolves to unit hema concentration") {
  const StainMatrix m = StainMatrix::ruifrok_johnston();
  const RgbImage px = pixel_from_concentrations(m, 1.0, 0.0, 0.0);
  const auto planes = stain_deconvolve(px, m);
  CHECK(std::abs(planes.hema(0, 0) - 1.0) < 0.02);  // 8-bit rounding slack
  CHECK(planes.eosin(0, 0) < 0.02);
  CHECK(planes.residual(0, 0) < 0.02);
}

TEST_CASE("black pixels stay finite through the max(I,1) clamp") {
  const StainMatrix m = StainMatrix::ruifrok_johnston();
  const auto planes = stain_deconvolve(single_pixel(0, 0, 0), m);
  CHECK(std::isfinite(planes.hema(0, 0)));
  CHECK(std::isfinite(planes.eosin(0, 0)));
  CHECK(std::isfinite(planes.residual(0, 0)));
}

TEST_CASE("deconvolution round-trips OD within 0.02 for non-negative concentrations") {
  const StainMatrix m = StainMatrix::ruifrok_johnston();
  Rng rng(17);
  for (int trial = 0; trial < 500; ++trial) {
    const double ch = rng.uniform(0.0, 1.0);
    const double ce = rng.uniform(0.0, 0.5);
    const RgbImage px = pixel_from_concentrations(m, ch, ce, 0.0);
    const auto planes = stain_deconvolve(px, m);
    const Eigen::RowVector3d reconstructed = planes.hema(0, 0) * m.hematoxylin().transpose() +
                                             planes.eosin(0, 0) * m.eosin().transpose() +
                                             planes.residual(0, 0) * m.residual().transpose();
    const Eigen::RowVector3d od(optical_density(px.r(0, 0)), optical_density(px.g(0, 0)),
                                optical_density(px.b(0, 0)));
    CHECK((reconstructed - od).cwiseAbs().maxCoeff() < 0.02);
  }
}

TEST_CASE("hematoxylin channel maps concentration linearly and inverted") {
  const StainMatrix m = StainMatrix::ruifrok_johnston();
  // All-white patch: zero concentration, brightest output.
  const GrayImage white = hematoxylin_channel(RgbImage::constant(3, 3, 255, 255, 255), m);
  CHECK((white == 255).all());

  // Saturating concentration (>= c_max) maps to 0.
  const RgbImage dark = pixel_from_concentrations(m, 2.1, 0.0, 0.0);
  CHECK(hematoxylin_channel(dark, m)(0, 0) == 0);

  // Scale endpoints and midpoint of the linear map itself.
  CHECK(concentration_to_intensity(0.0) == 255);
  CHECK(concentration_to_intensity(2.0) == 0);
  CHECK(concentration_to_intensity(1.0) == 128);  // round(255*(1-0.5))

  // Through the 8-bit render/deconvolve cycle the midpoint stays within
  // one step of 128.
  const RgbImage mid = pixel_from_concentrations(m, 1.0, 0.0, 0.0);
  const int v = hematoxylin_channel(mid, m)(0, 0);
  CHECK(std::abs(v - 128) <= 1);
}

TEST_CASE("hematoxylin channel is deterministic and in range") {
  const StainMatrix m = StainMatrix::ruifrok_johnston();
  Rng rng(23);
  RgbImage img(oracle::random_image(rng, 12, 12), oracle::random_image(rng, 12, 12),
               oracle::random_image(rng, 12, 12));
  const GrayImage a = hematoxylin_channel(img, m);
  const GrayImage b = hematoxylin_channel(img, m);
  CHECK((a == b).all());
}

TEST_CASE("tiling counts full tiles in raster order") {
  CHECK(tile(512, 512, 256, 256).entries.size() == 4);
  CHECK(tile(300, 300, 256, 256).entries.size() == 1);
  CHECK(tile(512, 512, 256, 128).entries.size() == 9);
  CHECK(tile(100, 100, 256, 256).entries.empty());  // smaller than a tile
  CHECK_THROWS_AS(tile(10, 10, 0, 1), std::invalid_argument);

  const TileManifest m = tile(512, 512, 256, 128);
  for (const auto& e : m.entries) {
    CHECK(e.x % 128 == 0);
    CHECK(e.y % 128 == 0);
    CHECK(e.x + 256 <= 512);
    CHECK(e.y + 256 <= 512);
  }
}

TEST_CASE("manifest CSV round-trips with labels") {
  const auto dir = fs::temp_directory_path() / "phseg_manifest_rt";
  fs::create_directories(dir);
  TileManifest m;
  m.entries.push_back({"a", (dir / "a.png").string(), 0, 0, TileLabel::tumor});
  m.entries.push_back({"b", (dir / "b.png").string(), 256, 0, TileLabel::normal});
  m.entries.push_back({"c", (dir / "c.png").string(), 0, 256, std::nullopt});
  const auto path = dir / "manifest.csv";
  save_manifest(m, path.string());
  const TileManifest back = load_manifest(path.string());
  REQUIRE(back.entries.size() == 3);
  CHECK(back.entries[0].label == TileLabel::tumor);
  CHECK(back.entries[1].label == TileLabel::normal);
  CHECK_FALSE(back.entries[2].label.has_value());
  CHECK(back.entries[1].x == 256);
  CHECK(fs::path(back.entries[0].path).is_absolute());
  fs::remove_all(dir);
}

TEST_CASE("malformed manifests fail with line numbers") {
  const auto path = fs::temp_directory_path() / "phseg_manifest_bad.csv";
  {
    std::ofstream out(path);
    out << "tile_id,path,x,y,label\n";
    out << "a,tile.png,0,0,tumor\n";
    out << "b,tile.png,zero,0,tumor\n";
  }
  try {
    load_manifest(path.string());
    FAIL("expected a parse error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find(":3:") != std::string::npos);
  }
  fs::remove(path);
}

TEST_CASE("duplicate tile ids are rejected") {
  TileManifest m;
  m.entries.push_back({"a", "x.png", 0, 0, std::nullopt});
  m.entries.push_back({"a", "y.png", 0, 0, std::nullopt});
  CHECK_THROWS_AS(m.validate(), std::runtime_error);
}

TEST_CASE("image IO round-trips across formats") {
  Rng rng(31);
  RgbImage img(oracle::random_image(rng, 21, 17), oracle::random_image(rng, 21, 17),
               oracle::random_image(rng, 21, 17));
  const auto dir = fs::temp_directory_path() / "phseg_imageio";
  fs::create_directories(dir);
  for (const char* name : {"t.png", "t.ppm"}) {
    const auto path = (dir / name).string();
    save_image(path, img);
    const RgbImage back = load_rgb(path);
    CHECK((back.r == img.r).all());
    CHECK((back.g == img.g).all());
    CHECK((back.b == img.b).all());
  }
  const GrayImage gray = oracle::random_image(rng, 9, 13);
  for (const char* name : {"g.png", "g.pgm"}) {
    const auto path = (dir / name).string();
    save_image(path, gray);
    CHECK((load_gray(path) == gray).all());
    const RgbImage rgb = load_rgb(path);  // gray promotes to identical channels
    CHECK((rgb.r == gray).all());
    CHECK((rgb.b == gray).all());
  }
  fs::remove_all(dir);
}

TEST_CASE("dihedral transforms compose correctly") {
  Rng rng(41);
  const GrayImage img = oracle::random_image(rng, 6, 11);
  GrayImage four = img;
  for (int i = 0; i < 4; ++i) four = rotate90(four);
  CHECK((four == img).all());
  CHECK((flip_horizontal(flip_horizontal(img)) == img).all());
  CHECK((flip_vertical(flip_vertical(img)) == img).all());
  CHECK(rotate90(img).rows() == img.cols());
  // crop bounds are enforced
  CHECK_THROWS_AS(crop(img, 8, 0, 5, 5), std::invalid_argument);
}
