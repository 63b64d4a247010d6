#include "phseg/tile.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <unordered_set>

#include "phseg/csv.hpp"

namespace phseg {

TileLabel parse_label(const std::string& s) {
  if (s == "tumor") return TileLabel::tumor;
  if (s == "normal") return TileLabel::normal;
  throw std::runtime_error("unknown label '" + s + "' (expected 'tumor' or 'normal')");
}

void TileManifest::validate() const {
  std::unordered_set<std::string> seen;
  for (const auto& e : entries) {
    if (e.id.empty()) throw std::runtime_error("manifest entry with empty tile id");
    if (!seen.insert(e.id).second)
      throw std::runtime_error("duplicate tile id in manifest: " + e.id);
    if (e.x < 0 || e.y < 0)
      throw std::runtime_error("negative tile offset for " + e.id);
  }
}

const TileEntry* TileManifest::find(const std::string& id) const {
  for (const auto& e : entries)
    if (e.id == id) return &e;
  return nullptr;
}

std::vector<std::string> TileManifest::ids(std::optional<TileLabel> cls) const {
  std::vector<std::string> out;
  for (const auto& e : entries)
    if (!cls || (e.label && *e.label == *cls)) out.push_back(e.id);
  return out;
}

TileManifest tile(Eigen::Index image_width, Eigen::Index image_height, int tile_size,
                  int stride) {
  if (tile_size < 1 || stride < 1)
    throw std::invalid_argument("tile: tile_size and stride must be >= 1");
  TileManifest m;
  if (image_width < tile_size || image_height < tile_size) return m;  // no full tile fits
  long index = 0;
  for (Eigen::Index y = 0; y + tile_size <= image_height; y += stride) {
    for (Eigen::Index x = 0; x + tile_size <= image_width; x += stride) {
      TileEntry e;
      e.id = "tile_" + std::to_string(index++);
      e.x = static_cast<long>(x);
      e.y = static_cast<long>(y);
      m.entries.push_back(std::move(e));
    }
  }
  return m;
}

TileManifest load_manifest(const std::string& path) {
  CsvReader reader(path);
  reader.expect_header({"tile_id", "path", "x", "y"});

  const std::filesystem::path base = std::filesystem::path(path).parent_path();
  TileManifest m;
  std::vector<std::string> f;
  while (reader.next_row(f, 4, 5)) {
    TileEntry e;
    e.id = f[0];
    e.path = f[1];
    if (!e.path.empty() && std::filesystem::path(e.path).is_relative())
      e.path = (base / e.path).string();
    e.x = reader.parse_long(f[2], "x offset");
    e.y = reader.parse_long(f[3], "y offset");
    if (e.x < 0 || e.y < 0) reader.fail("tile offsets must be non-negative");
    if (f.size() == 5 && !f[4].empty()) {
      try {
        e.label = parse_label(f[4]);
      } catch (const std::exception& ex) {
        reader.fail(ex.what());
      }
    }
    m.entries.push_back(std::move(e));
  }
  try {
    m.validate();
  } catch (const std::exception& ex) {
    throw std::runtime_error(path + ": " + ex.what());
  }
  return m;
}

void save_manifest(const TileManifest& manifest, const std::string& path) {
  manifest.validate();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write manifest: " + path);
  const std::filesystem::path base = std::filesystem::path(path).parent_path();
  out << "tile_id,path,x,y,label\n";
  for (const auto& e : manifest.entries) {
    // Keep paths relative to the manifest when they live beneath it.
    std::string p = e.path;
    if (!base.empty() && !p.empty()) {
      const auto rel = std::filesystem::relative(p, base);
      if (!rel.empty() && rel.native().rfind("..", 0) != 0) p = rel.string();
    }
    out << e.id << ',' << p << ',' << e.x << ',' << e.y << ','
        << (e.label ? to_string(*e.label) : "") << '\n';
  }
  if (!out) throw std::runtime_error("short write to " + path);
}

}  // namespace phseg
