#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "phseg/image_io.hpp"
#include "phseg/profile.hpp"
#include "phseg/stain.hpp"
#include "phseg/synth.hpp"

#include <filesystem>
#include <fstream>

using namespace phseg;
namespace fs = std::filesystem;

namespace {

std::string file_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("synth writes n tiles per class plus a labeled manifest") {
  const auto dir = fs::temp_directory_path() / "phseg_synth_count";
  fs::remove_all(dir);
  const TileManifest m = synth_corpus({.per_class = 5, .seed = 2, .tile_size = 64}, dir.string());
  CHECK(m.entries.size() == 10);
  CHECK(m.ids(TileLabel::tumor).size() == 5);
  CHECK(m.ids(TileLabel::normal).size() == 5);
  for (const auto& e : m.entries) CHECK(fs::exists(e.path));
  const TileManifest reloaded = load_manifest((fs::path(dir) / "manifest.csv").string());
  CHECK(reloaded.entries.size() == 10);
  fs::remove_all(dir);
}

TEST_CASE("synth is byte-identical per seed and differs across seeds") {
  const auto dir_a = fs::temp_directory_path() / "phseg_synth_a";
  const auto dir_b = fs::temp_directory_path() / "phseg_synth_b";
  const auto dir_c = fs::temp_directory_path() / "phseg_synth_c";
  for (const auto& d : {dir_a, dir_b, dir_c}) fs::remove_all(d);
  synth_corpus({.per_class = 2, .seed = 7, .tile_size = 64}, dir_a.string());
  synth_corpus({.per_class = 2, .seed = 7, .tile_size = 64}, dir_b.string());
  synth_corpus({.per_class = 2, .seed = 8, .tile_size = 64}, dir_c.string());

  bool any_differs_across_seeds = false;
  for (const auto& entry : fs::directory_iterator(dir_a / "tiles")) {
    const auto name = entry.path().filename();
    CHECK(file_bytes(entry.path()) == file_bytes(dir_b / "tiles" / name));
    if (file_bytes(entry.path()) != file_bytes(dir_c / "tiles" / name))
      any_differs_across_seeds = true;
  }
  CHECK(any_differs_across_seeds);
  for (const auto& d : {dir_a, dir_b, dir_c}) fs::remove_all(d);
}

TEST_CASE("classes separate in beta0 mass at high thresholds") {
  // Mean per-class p0 mass over the top third of the filtration differs by
  // at least two per-class standard deviations.
  const StainMatrix stain = StainMatrix::ruifrok_johnston();
  const Filtration f = Filtration::defaults();
  const int n = 20, top_bins = 5;
  std::vector<double> mass_t, mass_n;
  for (int i = 0; i < 2 * n; ++i) {
    const TileLabel cls = i < n ? TileLabel::tumor : TileLabel::normal;
    Rng rng = Rng::derive(31, static_cast<std::uint64_t>(i));
    const RgbImage tile = synth_tile(cls, rng, 128);
    const PhProfile p = php(hematoxylin_channel(tile, stain), f).profile;
    const double mass = p.p0.tail(top_bins).sum();
    (cls == TileLabel::tumor ? mass_t : mass_n).push_back(mass);
  }
  const auto stats = [](const std::vector<double>& v) {
    double mean = 0;
    for (const double x : v) mean += x;
    mean /= v.size();
    double var = 0;
    for (const double x : v) var += (x - mean) * (x - mean);
    return std::pair{mean, std::sqrt(var / (v.size() - 1))};
  };
  const auto [mu_t, sd_t] = stats(mass_t);
  const auto [mu_n, sd_n] = stats(mass_n);
  CHECK(std::abs(mu_t - mu_n) >= 2.0 * std::max(sd_t, sd_n));
}
