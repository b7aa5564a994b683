#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "micky/submodular.hpp"

namespace micky {

// Row-major grayscale image with intensities in [0, 1]; pixel p = row * width + col.
struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> pixels;

  GrayImage() = default;
  GrayImage(std::size_t w, std::size_t h, double fill = 0.0) : width(w), height(h), pixels(w * h, fill) {}

  std::size_t size() const { return pixels.size(); }
  double& at(std::size_t row, std::size_t col) { return pixels[row * width + col]; }
  double at(std::size_t row, std::size_t col) const { return pixels[row * width + col]; }
};

enum class PgmFormat { Plain, Binary };  // P2, P5

// Reads P2/P5 with maxval <= 255; intensity = gray / maxval.
GrayImage read_pgm(std::istream& in);
GrayImage load_pgm(const std::filesystem::path& path);

// Writes gray = round(255 * intensity) after clamping to [0, 1].
void write_pgm(std::ostream& out, const GrayImage& image, PgmFormat format = PgmFormat::Plain);
void save_pgm(const GrayImage& image, const std::filesystem::path& path,
              PgmFormat format = PgmFormat::Plain);

// Binary mask, 1 on X.
GrayImage mask_from_set(const Subset& X, std::size_t width, std::size_t height);

struct DiskFixture {
  std::size_t size = 64;
  double foreground = 0.8;
  double background = 0.2;
  double radius_fraction = 0.3;  // radius as a fraction of the side
};

// Bright disk centred in a dark square; a pixel is inside when its centre is
// within the radius.
GrayImage make_disk_fixture(const DiskFixture& fixture);
Subset disk_mask(const DiskFixture& fixture);

// I + u clamped to [0, 1], u ~ Uniform[-amplitude, amplitude].
GrayImage add_noise(const GrayImage& image, double amplitude, std::uint64_t seed);

}  // namespace micky
