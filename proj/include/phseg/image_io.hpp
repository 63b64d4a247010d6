// Raster file IO: 8-bit PNG (via libpng), binary PGM (P5) and PPM (P6).
// Format is chosen by file extension.
#pragma once

#include <string>

#include "phseg/image.hpp"

namespace phseg {

// Loads a tile as RGB. Grayscale sources are replicated across channels;
// palette/16-bit/alpha PNGs are normalized to 8-bit RGB.
RgbImage load_rgb(const std::string& path);

GrayImage load_gray(const std::string& path);  // errors on color sources

void save_image(const std::string& path, const RgbImage& img);
void save_image(const std::string& path, const GrayImage& img);

void save_png(const std::string& path, const RgbImage& img);
void save_png(const std::string& path, const GrayImage& img);
void save_pnm(const std::string& path, const RgbImage& img);  // P6
void save_pnm(const std::string& path, const GrayImage& img); // P5

}  // namespace phseg
