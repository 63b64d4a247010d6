// Tile manifests: the unit of work for every pipeline stage.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "phseg/image.hpp"

namespace phseg {

enum class TileLabel { tumor, normal };

inline const char* to_string(TileLabel l) { return l == TileLabel::tumor ? "tumor" : "normal"; }

TileLabel parse_label(const std::string& s);  // accepts "tumor"/"normal"

struct TileEntry {
  std::string id;
  std::string path;
  long x = 0;
  long y = 0;
  std::optional<TileLabel> label;
};

struct TileManifest {
  std::vector<TileEntry> entries;

  void validate() const;  // unique ids, non-negative offsets
  const TileEntry* find(const std::string& id) const;
  std::vector<std::string> ids(std::optional<TileLabel> cls = std::nullopt) const;
};

// Raster-order full tiles; partial edge tiles are dropped.
TileManifest tile(Eigen::Index image_width, Eigen::Index image_height, int tile_size, int stride);

inline TileManifest tile(const RgbImage& img, int tile_size, int stride) {
  return tile(img.width(), img.height(), tile_size, stride);
}

// CSV `tile_id,path,x,y[,label]` with a header row. Relative tile paths are
// resolved against the manifest's directory on load.
TileManifest load_manifest(const std::string& path);
void save_manifest(const TileManifest& manifest, const std::string& path);

}  // namespace phseg
