// Synthetic H&E-like tiles for desk-scale evaluation. Tumor-like tiles are
// dense fields of overlapping irregular textured blobs; normal-like tiles
// are sparse well-separated round blobs on a bright background. Pixels are
// rendered through the Beer-Lambert model, so stain deconvolution recovers
// the generating concentrations.
#pragma once

#include <cstdint>
#include <string>

#include "phseg/rng.hpp"
#include "phseg/stain.hpp"
#include "phseg/tile.hpp"

namespace phseg {

struct SynthOptions {
  int per_class = 50;
  std::uint64_t seed = 1;
  int tile_size = 256;
};

RgbImage synth_tile(TileLabel cls, Rng& rng, int size = 256,
                    const StainMatrix& stain = StainMatrix::ruifrok_johnston());

// Writes `<out_dir>/tiles/<id>.png` plus `<out_dir>/manifest.csv` with
// ground-truth labels. Byte-identical output for a fixed seed.
TileManifest synth_corpus(const SynthOptions& options, const std::string& out_dir);

}  // namespace phseg
