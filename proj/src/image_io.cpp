#include "phseg/image_io.hpp"

#include <png.h>

#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <vector>

namespace phseg {
namespace {

std::string lower_ext(const std::string& path) {
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos) return "";
  std::string ext = path.substr(dot + 1);
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext;
}

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// ---- PNG ----

struct PngReadCtx {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngReadCtx() {
    if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
  }
};

struct PngWriteCtx {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngWriteCtx() {
    if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
  }
};

// Decodes any PNG to packed 8-bit samples with `channels` 1 or 3.
void read_png_file(const std::string& path, std::vector<std::uint8_t>& data, png_uint_32& width,
                   png_uint_32& height, int& channels) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw std::runtime_error("cannot open image: " + path);

  png_byte sig[8];
  if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8))
    throw std::runtime_error("not a PNG file: " + path);

  PngReadCtx ctx;
  ctx.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!ctx.png) throw std::runtime_error("png_create_read_struct failed");
  ctx.info = png_create_info_struct(ctx.png);
  if (!ctx.info) throw std::runtime_error("png_create_info_struct failed");
  if (setjmp(png_jmpbuf(ctx.png))) throw std::runtime_error("PNG decode error: " + path);

  png_init_io(ctx.png, fp.get());
  png_set_sig_bytes(ctx.png, 8);
  png_read_info(ctx.png, ctx.info);

  width = png_get_image_width(ctx.png, ctx.info);
  height = png_get_image_height(ctx.png, ctx.info);
  const png_byte color = png_get_color_type(ctx.png, ctx.info);
  const png_byte depth = png_get_bit_depth(ctx.png, ctx.info);

  if (depth == 16) png_set_strip_16(ctx.png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(ctx.png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(ctx.png);
  if (png_get_valid(ctx.png, ctx.info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(ctx.png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(ctx.png);
  png_read_update_info(ctx.png, ctx.info);

  channels = png_get_channels(ctx.png, ctx.info);
  if (channels != 1 && channels != 3)
    throw std::runtime_error("unsupported PNG channel count in " + path);

  const std::size_t row_bytes = png_get_rowbytes(ctx.png, ctx.info);
  data.resize(row_bytes * height);
  std::vector<png_bytep> rows(height);
  for (png_uint_32 y = 0; y < height; ++y) rows[y] = data.data() + y * row_bytes;
  png_read_image(ctx.png, rows.data());
  png_read_end(ctx.png, nullptr);
}

void write_png_file(const std::string& path, const std::uint8_t* data, png_uint_32 width,
                    png_uint_32 height, int channels) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw std::runtime_error("cannot write image: " + path);

  PngWriteCtx ctx;
  ctx.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!ctx.png) throw std::runtime_error("png_create_write_struct failed");
  ctx.info = png_create_info_struct(ctx.png);
  if (!ctx.info) throw std::runtime_error("png_create_info_struct failed");
  if (setjmp(png_jmpbuf(ctx.png))) throw std::runtime_error("PNG encode error: " + path);

  png_init_io(ctx.png, fp.get());
  png_set_IHDR(ctx.png, ctx.info, width, height, 8,
               channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(ctx.png, ctx.info);

  const std::size_t row_bytes = static_cast<std::size_t>(width) * channels;
  std::vector<png_bytep> rows(height);
  for (png_uint_32 y = 0; y < height; ++y)
    rows[y] = const_cast<png_bytep>(data + y * row_bytes);
  png_write_image(ctx.png, rows.data());
  png_write_end(ctx.png, nullptr);
}

// ---- PNM ----

int pnm_next_token(std::istream& in) {
  // Skips whitespace and '#' comments, returns a non-negative integer.
  while (in) {
    const int c = in.peek();
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      break;
    }
  }
  int value = -1;
  in >> value;
  return value;
}

void read_pnm(const std::string& path, std::vector<std::uint8_t>& data, int& width, int& height,
              int& channels) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open image: " + path);
  std::string magic;
  in >> magic;
  if (magic == "P5")
    channels = 1;
  else if (magic == "P6")
    channels = 3;
  else
    throw std::runtime_error("unsupported PNM magic '" + magic + "' in " + path);
  width = pnm_next_token(in);
  height = pnm_next_token(in);
  const int maxval = pnm_next_token(in);
  if (width <= 0 || height <= 0 || maxval != 255)
    throw std::runtime_error("unsupported PNM header in " + path + " (need 8-bit maxval 255)");
  in.get();  // single whitespace after header
  data.resize(static_cast<std::size_t>(width) * height * channels);
  in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (in.gcount() != static_cast<std::streamsize>(data.size()))
    throw std::runtime_error("truncated PNM payload in " + path);
}

void write_pnm(const std::string& path, const std::uint8_t* data, int width, int height,
               int channels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write image: " + path);
  out << (channels == 1 ? "P5" : "P6") << "\n" << width << " " << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(data),
            static_cast<std::streamsize>(width) * height * channels);
  if (!out) throw std::runtime_error("short write to " + path);
}

RgbImage packed_to_rgb(const std::vector<std::uint8_t>& data, Eigen::Index h, Eigen::Index w,
                       int channels) {
  GrayImage r(h, w), g(h, w), b(h, w);
  const std::uint8_t* p = data.data();
  if (channels == 1) {
    std::memcpy(r.data(), p, static_cast<std::size_t>(h) * w);
    g = r;
    b = r;
  } else {
    for (Eigen::Index i = 0; i < h * w; ++i) {
      r.data()[i] = p[3 * i];
      g.data()[i] = p[3 * i + 1];
      b.data()[i] = p[3 * i + 2];
    }
  }
  return RgbImage(std::move(r), std::move(g), std::move(b));
}

std::vector<std::uint8_t> rgb_to_packed(const RgbImage& img) {
  std::vector<std::uint8_t> out(static_cast<std::size_t>(img.height()) * img.width() * 3);
  for (Eigen::Index i = 0; i < img.height() * img.width(); ++i) {
    out[3 * i] = img.r.data()[i];
    out[3 * i + 1] = img.g.data()[i];
    out[3 * i + 2] = img.b.data()[i];
  }
  return out;
}

}  // namespace

RgbImage load_rgb(const std::string& path) {
  const std::string ext = lower_ext(path);
  std::vector<std::uint8_t> data;
  int channels = 0;
  if (ext == "png") {
    png_uint_32 w = 0, h = 0;
    read_png_file(path, data, w, h, channels);
    return packed_to_rgb(data, static_cast<Eigen::Index>(h), static_cast<Eigen::Index>(w),
                         channels);
  }
  if (ext == "pgm" || ext == "ppm" || ext == "pnm") {
    int w = 0, h = 0;
    read_pnm(path, data, w, h, channels);
    return packed_to_rgb(data, h, w, channels);
  }
  throw std::runtime_error("unsupported image extension '." + ext + "' for " + path);
}

GrayImage load_gray(const std::string& path) {
  const RgbImage img = load_rgb(path);
  if ((img.r != img.g).any() || (img.r != img.b).any())
    throw std::runtime_error("expected a grayscale image, got color content: " + path);
  return img.r;
}

void save_png(const std::string& path, const RgbImage& img) {
  const auto packed = rgb_to_packed(img);
  write_png_file(path, packed.data(), static_cast<png_uint_32>(img.width()),
                 static_cast<png_uint_32>(img.height()), 3);
}

void save_png(const std::string& path, const GrayImage& img) {
  write_png_file(path, img.data(), static_cast<png_uint_32>(img.cols()),
                 static_cast<png_uint_32>(img.rows()), 1);
}

void save_pnm(const std::string& path, const RgbImage& img) {
  const auto packed = rgb_to_packed(img);
  write_pnm(path, packed.data(), static_cast<int>(img.width()), static_cast<int>(img.height()),
            3);
}

void save_pnm(const std::string& path, const GrayImage& img) {
  write_pnm(path, img.data(), static_cast<int>(img.cols()), static_cast<int>(img.rows()), 1);
}

void save_image(const std::string& path, const RgbImage& img) {
  const std::string ext = lower_ext(path);
  if (ext == "png")
    save_png(path, img);
  else if (ext == "ppm" || ext == "pnm")
    save_pnm(path, img);
  else
    throw std::runtime_error("unsupported image extension '." + ext + "' for " + path);
}

void save_image(const std::string& path, const GrayImage& img) {
  const std::string ext = lower_ext(path);
  if (ext == "png")
    save_png(path, img);
  else if (ext == "pgm" || ext == "pnm")
    save_pnm(path, img);
  else
    throw std::runtime_error("unsupported image extension '." + ext + "' for " + path);
}

}  // namespace phseg
