#include "phseg/segment.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>

#include "phseg/csv.hpp"
#include "phseg/image_io.hpp"
#include "phseg/parallel.hpp"
#include "phseg/profile.hpp"

namespace phseg {

PatchDecision FastPipeline::classify_tile(const RgbImage& tile, std::string id) const {
  const GrayImage hema = hematoxylin_channel(tile, stain, c_max);
  const PhpResult result = php(hema, exemplars.filtration, mode);
  return classify_fast(result.profile, exemplars, fast, std::move(id));
}

PatchDecision AccuratePipeline::classify_tile(const RgbImage& tile, const std::string& id) const {
  const Eigen::Index row = external.find(id);
  if (row < 0) throw std::runtime_error("no external feature row for tile " + id);

  const GrayImage hema = hematoxylin_channel(tile, stain, c_max);
  const PhpResult result = php(hema, filtration, mode);
  const double o1 = forest_php.predict(result.profile.feature_vector());
  const double o2 = forest_external.predict(external.X.row(row).transpose());

  PatchDecision d;
  d.id = id;
  d.label = ensemble_predict(o1, o2) == 1 ? TileLabel::tumor : TileLabel::normal;
  d.score_t = o1;
  d.score_n = o2;
  d.prob = 0.5 * (o1 + o2);
  return d;
}

SegmentResult segment(const TileManifest& manifest, const Pipeline& pipeline, int workers) {
  manifest.validate();
  const std::size_t n = manifest.entries.size();
  std::vector<std::optional<PatchDecision>> slots(n);
  std::vector<std::string> errors(n);

  parallel_for(n, workers, [&](std::size_t i) {
    const TileEntry& entry = manifest.entries[i];
    try {
      const RgbImage tile = load_rgb(entry.path);
      slots[i] = std::visit(
          [&](const auto& p) { return p.classify_tile(tile, entry.id); }, pipeline);
    } catch (const std::exception& ex) {
      errors[i] = "tile " + entry.id + ": " + ex.what();
    }
  });

  SegmentResult out;
  for (std::size_t i = 0; i < n; ++i) {
    if (slots[i])
      out.decisions.push_back(std::move(*slots[i]));
    else
      out.failures.push_back(errors[i]);
  }
  out.map = build_map(manifest, out.decisions);
  return out;
}

ProbabilityMap build_map(const TileManifest& manifest,
                         const std::vector<PatchDecision>& decisions) {
  ProbabilityMap map;
  for (const auto& e : manifest.entries) {
    map.xs.push_back(e.x);
    map.ys.push_back(e.y);
  }
  std::sort(map.xs.begin(), map.xs.end());
  map.xs.erase(std::unique(map.xs.begin(), map.xs.end()), map.xs.end());
  std::sort(map.ys.begin(), map.ys.end());
  map.ys.erase(std::unique(map.ys.begin(), map.ys.end()), map.ys.end());

  const auto rows = static_cast<Eigen::Index>(map.ys.size());
  const auto cols = static_cast<Eigen::Index>(map.xs.size());
  map.prob = Eigen::ArrayXXd::Zero(rows, cols);
  map.label = Eigen::ArrayXXi::Constant(rows, cols, -1);

  for (const auto& d : decisions) {
    const TileEntry* e = manifest.find(d.id);
    if (!e) continue;
    const auto cx = std::lower_bound(map.xs.begin(), map.xs.end(), e->x) - map.xs.begin();
    const auto cy = std::lower_bound(map.ys.begin(), map.ys.end(), e->y) - map.ys.begin();
    map.label(cy, cx) = d.label == TileLabel::tumor ? 1 : 0;
    map.prob(cy, cx) = d.prob.value_or(d.label == TileLabel::tumor ? 1.0 : 0.0);
  }
  return map;
}

void save_decisions(const std::vector<PatchDecision>& decisions, const TileManifest& manifest,
                    const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write decisions: " + path);
  out << "tile_id,x,y,label,score_t,score_n,prob\n";
  char bt[32], bn[32], bp[32];
  for (const auto& d : decisions) {
    const TileEntry* e = manifest.find(d.id);
    const long x = e ? e->x : 0, y = e ? e->y : 0;
    std::snprintf(bt, sizeof bt, "%.17g", d.score_t);
    std::snprintf(bn, sizeof bn, "%.17g", d.score_n);
    std::snprintf(bp, sizeof bp, "%.17g", d.prob.value_or(-1.0));
    out << d.id << ',' << x << ',' << y << ',' << to_string(d.label) << ',' << bt << ',' << bn
        << ',' << bp << '\n';
  }
  if (!out) throw std::runtime_error("short write to " + path);
}

std::vector<PatchDecision> load_decisions(const std::string& path) {
  CsvReader reader(path);
  reader.expect_header({"tile_id", "x", "y", "label", "score_t", "score_n", "prob"});
  std::vector<PatchDecision> out;
  std::vector<std::string> f;
  while (reader.next_row(f, 7, 7)) {
    PatchDecision d;
    d.id = f[0];
    try {
      d.label = parse_label(f[3]);
    } catch (const std::exception& ex) {
      reader.fail(ex.what());
    }
    d.score_t = reader.parse_double(f[4], "score_t");
    d.score_n = reader.parse_double(f[5], "score_n");
    const double prob = reader.parse_double(f[6], "prob");
    if (prob >= 0.0) d.prob = prob;
    out.push_back(std::move(d));
  }
  return out;
}

void save_label_grid(const ProbabilityMap& map, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write label grid: " + path);
  for (Eigen::Index r = 0; r < map.label.rows(); ++r) {
    for (Eigen::Index c = 0; c < map.label.cols(); ++c) {
      const int v = map.label(r, c);
      out << (v < 0 ? '.' : v == 1 ? 'T' : 'N');
    }
    out << '\n';
  }
}

void save_overlay_png(const TileManifest& manifest, const std::vector<PatchDecision>& decisions,
                      const std::string& path) {
  std::map<std::string, TileLabel> labels;
  for (const auto& d : decisions) labels[d.id] = d.label;

  long max_x = 0, max_y = 0;
  bool any = false;
  std::vector<const TileEntry*> drawable;
  for (const auto& e : manifest.entries) {
    if (!labels.count(e.id)) continue;
    drawable.push_back(&e);
  }
  // Tile sizes come from the files themselves; compose on a white canvas.
  std::vector<RgbImage> tiles(drawable.size());
  for (std::size_t i = 0; i < drawable.size(); ++i) {
    tiles[i] = load_rgb(drawable[i]->path);
    max_x = std::max(max_x, drawable[i]->x + static_cast<long>(tiles[i].width()));
    max_y = std::max(max_y, drawable[i]->y + static_cast<long>(tiles[i].height()));
    any = true;
  }
  if (!any) throw std::runtime_error("overlay: no classified tiles to draw");

  RgbImage canvas = RgbImage::constant(max_y, max_x, 255, 255, 255);
  for (std::size_t i = 0; i < drawable.size(); ++i) {
    const auto& e = *drawable[i];
    const auto& t = tiles[i];
    const bool tumor = labels[e.id] == TileLabel::tumor;
    for (Eigen::Index r = 0; r < t.height(); ++r) {
      for (Eigen::Index c = 0; c < t.width(); ++c) {
        int rv = t.r(r, c), gv = t.g(r, c), bv = t.b(r, c);
        if (tumor) {  // red tint on predicted tumor tiles
          rv = static_cast<int>(0.6 * rv + 0.4 * 255.0);
          gv = static_cast<int>(0.6 * gv);
          bv = static_cast<int>(0.6 * bv);
        }
        canvas.r(e.y + r, e.x + c) = static_cast<std::uint8_t>(rv);
        canvas.g(e.y + r, e.x + c) = static_cast<std::uint8_t>(gv);
        canvas.b(e.y + r, e.x + c) = static_cast<std::uint8_t>(bv);
      }
    }
  }
  save_png(path, canvas);
}

}  // namespace phseg
