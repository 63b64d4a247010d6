// Labeled reference profiles for the fast classifier, persisted as a JSON
// manifest plus optional per-profile CSVs.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "phseg/profile.hpp"
#include "phseg/stain.hpp"
#include "phseg/tile.hpp"

namespace phseg {

struct ExemplarEntry {
  std::string id;
  PhProfile profile;
};

struct ExemplarSet {
  std::string method;  // selection provenance: "scores", "kmeans", "random", ...
  std::uint64_t seed = 0;
  Filtration filtration = Filtration::defaults();
  std::vector<ExemplarEntry> tumor;
  std::vector<ExemplarEntry> normal;

  void validate() const;  // both classes non-empty, one shared filtration
};

struct ExemplarBuildOptions {
  Filtration filtration = Filtration::defaults();
  StainMatrix stain = StainMatrix::ruifrok_johnston();
  ComplementMode mode = ComplementMode::bounded_voids;
  double c_max = 2.0;
  std::string method = "manual";
  std::uint64_t seed = 0;
  int workers = 0;
  std::optional<std::string> profiles_dir;  // per-profile CSVs when set
};

// Computes the PHP of every selected tile and assembles the reference set.
ExemplarSet build_exemplar_set(const TileManifest& manifest,
                               const std::vector<std::string>& tumor_ids,
                               const std::vector<std::string>& normal_ids,
                               const ExemplarBuildOptions& options);

void save_exemplar_set(const ExemplarSet& set, const std::string& path);
ExemplarSet load_exemplar_set(const std::string& path);

}  // namespace phseg
