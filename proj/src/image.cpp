#include "micky/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "micky/random.hpp"

namespace micky {
namespace {

// Next whitespace-delimited header token, skipping '#' comments.
std::string header_token(std::istream& in) {
  std::string tok;
  char c = 0;
  while (in.get(c)) {
    if (c == '#') {
      std::string skipped;
      std::getline(in, skipped);
      if (!tok.empty()) break;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(c);
  }
  return tok;
}

std::size_t header_number(std::istream& in, const char* what) {
  const std::string tok = header_token(in);
  if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
    throw std::runtime_error(std::string("pgm: malformed ") + what + " '" + tok + "'");
  }
  return std::stoul(tok);
}

}  // namespace

GrayImage read_pgm(std::istream& in) {
  const std::string magic = header_token(in);
  if (magic != "P2" && magic != "P5") throw std::runtime_error("pgm: bad magic '" + magic + "'");
  const std::size_t width = header_number(in, "width");
  const std::size_t height = header_number(in, "height");
  const std::size_t maxval = header_number(in, "maxval");
  if (width == 0 || height == 0) throw std::runtime_error("pgm: empty image");
  if (maxval == 0 || maxval > 255) {
    throw std::runtime_error("pgm: maxval " + std::to_string(maxval) + " unsupported (1..255)");
  }
  GrayImage image(width, height);
  const double scale = static_cast<double>(maxval);
  if (magic == "P2") {
    for (double& v : image.pixels) {
      long long gray = -1;
      if (!(in >> gray)) throw std::runtime_error("pgm: truncated pixel data");
      if (gray < 0 || gray > static_cast<long long>(maxval)) {
        throw std::runtime_error("pgm: pixel value " + std::to_string(gray) + " out of range");
      }
      v = static_cast<double>(gray) / scale;
    }
  } else {
    // header_token consumed exactly one whitespace byte after maxval.
    std::vector<unsigned char> raw(width * height);
    if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()))) {
      throw std::runtime_error("pgm: truncated pixel data");
    }
    for (std::size_t p = 0; p < raw.size(); ++p) {
      if (raw[p] > maxval) throw std::runtime_error("pgm: pixel value out of range");
      image.pixels[p] = static_cast<double>(raw[p]) / scale;
    }
  }
  return image;
}

GrayImage load_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open image '" + path.string() + "'");
  try {
    return read_pgm(in);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

void write_pgm(std::ostream& out, const GrayImage& image, PgmFormat format) {
  auto gray = [](double v) {
    return static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
  };
  if (format == PgmFormat::Plain) {
    out << "P2\n" << image.width << ' ' << image.height << "\n255\n";
    for (std::size_t r = 0; r < image.height; ++r) {
      for (std::size_t c = 0; c < image.width; ++c) {
        out << (c ? " " : "") << gray(image.at(r, c));
      }
      out << '\n';
    }
  } else {
    out << "P5\n" << image.width << ' ' << image.height << "\n255\n";
    for (double v : image.pixels) out.put(static_cast<char>(gray(v)));
  }
}

void save_pgm(const GrayImage& image, const std::filesystem::path& path, PgmFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write image '" + path.string() + "'");
  write_pgm(out, image, format);
  if (!out) throw std::runtime_error("failed writing image '" + path.string() + "'");
}

GrayImage mask_from_set(const Subset& X, std::size_t width, std::size_t height) {
  if (X.ground_size() != width * height) {
    throw std::out_of_range("mask: set ground size does not match the image");
  }
  GrayImage mask(width, height);
  for (Element p : X.members()) mask.pixels[p] = 1.0;
  return mask;
}

Subset disk_mask(const DiskFixture& fixture) {
  const double d = static_cast<double>(fixture.size);
  const double centre = d / 2.0;
  const double radius = fixture.radius_fraction * d;
  Subset mask(fixture.size * fixture.size);
  for (std::size_t r = 0; r < fixture.size; ++r) {
    for (std::size_t c = 0; c < fixture.size; ++c) {
      const double dy = static_cast<double>(r) + 0.5 - centre;
      const double dx = static_cast<double>(c) + 0.5 - centre;
      if (dx * dx + dy * dy <= radius * radius) mask.insert(r * fixture.size + c);
    }
  }
  return mask;
}

GrayImage make_disk_fixture(const DiskFixture& fixture) {
  if (fixture.size == 0) throw std::invalid_argument("fixture size must be positive");
  GrayImage image(fixture.size, fixture.size, fixture.background);
  for (Element p : disk_mask(fixture).members()) image.pixels[p] = fixture.foreground;
  return image;
}

GrayImage add_noise(const GrayImage& image, double amplitude, std::uint64_t seed) {
  if (!(amplitude >= 0.0)) throw std::invalid_argument("noise amplitude must be nonnegative");
  GrayImage out = image;
  if (amplitude == 0.0) return out;
  std::mt19937_64 rng = make_stream(seed, 0, StreamTag::Noise);
  for (double& v : out.pixels) {
    const double u = (2.0 * uniform01(rng) - 1.0) * amplitude;
    v = std::clamp(v + u, 0.0, 1.0);
  }
  return out;
}

}  // namespace micky
