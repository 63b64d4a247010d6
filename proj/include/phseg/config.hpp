// Run configuration: one JSON file, overridable per-flag on the CLI.
// Unknown keys are rejected so typos fail loudly.
#pragma once

#include <cstdint>
#include <string>

#include "phseg/betti.hpp"
#include "phseg/classify.hpp"
#include "phseg/filtration.hpp"
#include "phseg/forest.hpp"
#include "phseg/stain.hpp"

namespace phseg {

struct Config {
  Filtration filtration = Filtration::defaults();
  std::string stain_path;  // empty = built-in Ruifrok-Johnston basis
  StainMatrix stain = StainMatrix::ruifrok_johnston();
  double c_max = 2.0;
  FastConfig fast;
  ForestConfig forest;
  std::uint64_t seed = 1;
  bool literal_complement = false;
  int workers = 0;  // 0 = hardware concurrency

  ComplementMode mode() const {
    return literal_complement ? ComplementMode::literal : ComplementMode::bounded_voids;
  }

  static Config load(const std::string& path);
  static Config from_json_text(const std::string& text, const std::string& origin);
  void save(const std::string& path) const;
};

}  // namespace phseg
