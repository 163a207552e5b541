#include "ddah/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

#include "ddah/error.hpp"

namespace ddah {

namespace {

class PgmReader {
 public:
  PgmReader(std::vector<char> data, std::string path) : data_(std::move(data)), path_(std::move(path)) {}

  std::size_t number() {
    skip_space_and_comments();
    if (pos_ >= data_.size() || !std::isdigit(static_cast<unsigned char>(data_[pos_])))
      throw IoError(path_, "malformed graymap header");
    std::size_t v = 0;
    while (pos_ < data_.size() && std::isdigit(static_cast<unsigned char>(data_[pos_]))) {
      v = v * 10 + static_cast<std::size_t>(data_[pos_++] - '0');
      if (v > (1u << 24)) throw IoError(path_, "graymap header value out of range");
    }
    return v;
  }

  std::string magic() {
    if (data_.size() < 2) throw IoError(path_, "file too short for a graymap");
    pos_ = 2;
    return std::string(data_.begin(), data_.begin() + 2);
  }

  // Exactly one whitespace byte separates the header from binary raster data.
  void single_space() {
    if (pos_ >= data_.size() || !std::isspace(static_cast<unsigned char>(data_[pos_])))
      throw IoError(path_, "malformed graymap header");
    ++pos_;
  }

  std::size_t remaining() const { return data_.size() - pos_; }
  unsigned char byte() { return static_cast<unsigned char>(data_[pos_++]); }

 private:
  void skip_space_and_comments() {
    while (pos_ < data_.size()) {
      if (std::isspace(static_cast<unsigned char>(data_[pos_]))) {
        ++pos_;
      } else if (data_[pos_] == '#') {
        while (pos_ < data_.size() && data_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::vector<char> data_;
  std::string path_;
  std::size_t pos_ = 0;
};

}  // namespace

GrayImage load_grayscale(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open image");
  std::vector<char> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  PgmReader reader(std::move(data), path.string());

  const std::string magic = reader.magic();
  if (magic != "P5" && magic != "P2")
    throw IoError(path.string(), "unsupported image format (expected P5/P2 graymap), magic '" + magic + "'");
  GrayImage img;
  img.width = reader.number();
  img.height = reader.number();
  const std::size_t maxval = reader.number();
  if (img.width == 0 || img.height == 0) throw IoError(path.string(), "graymap has zero size");
  if (maxval == 0 || maxval > 65535) throw IoError(path.string(), "graymap maxval out of range");

  const std::size_t count = img.width * img.height;
  std::vector<std::size_t> raw(count);
  if (magic == "P5") {
    reader.single_space();
    const std::size_t bytes_per = maxval > 255 ? 2 : 1;
    if (reader.remaining() < count * bytes_per) throw IoError(path.string(), "truncated raster data");
    for (auto& v : raw) v = bytes_per == 2 ? (std::size_t{reader.byte()} << 8) | reader.byte() : reader.byte();
  } else {
    for (auto& v : raw) {
      try {
        v = reader.number();
      } catch (const IoError&) {
        throw IoError(path.string(), "truncated raster data");
      }
    }
  }
  img.pixels.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (raw[i] > maxval) throw IoError(path.string(), "pixel value exceeds maxval");
    img.pixels[i] = maxval == 255 ? static_cast<std::uint8_t>(raw[i])
                                  : static_cast<std::uint8_t>(std::lround(255.0 * static_cast<double>(raw[i]) /
                                                                          static_cast<double>(maxval)));
  }
  return img;
}

void save_pgm(const std::filesystem::path& path, const GrayImage& image) {
  if (image.pixels.size() != image.width * image.height)
    throw InvalidArgument("save_pgm: pixel count does not match dimensions");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out << "P5\n" << image.width << ' ' << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels.data()), static_cast<std::streamsize>(image.pixels.size()));
  if (!out) throw IoError(path.string(), "write failed");
}

Matrix to_matrix(const GrayImage& image) {
  Matrix m(static_cast<Eigen::Index>(image.height), static_cast<Eigen::Index>(image.width));
  for (std::size_t y = 0; y < image.height; ++y)
    for (std::size_t x = 0; x < image.width; ++x)
      m(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x)) = image.at(x, y);
  return m;
}

Matrix resize_bilinear(const Matrix& image, std::size_t target_width, std::size_t target_height) {
  if (target_width == 0 || target_height == 0) throw InvalidArgument("resize_bilinear: target size must be positive");
  if (image.rows() == 0 || image.cols() == 0) throw InvalidArgument("resize_bilinear: empty source image");
  const Eigen::Index src_h = image.rows();
  const Eigen::Index src_w = image.cols();
  if (static_cast<std::size_t>(src_w) == target_width && static_cast<std::size_t>(src_h) == target_height)
    return image;

  const double sx = static_cast<double>(src_w) / static_cast<double>(target_width);
  const double sy = static_cast<double>(src_h) / static_cast<double>(target_height);
  // Source coordinate of a destination pixel centre, clamped to the grid.
  auto locate = [](std::size_t dst, double scale, Eigen::Index extent, Eigen::Index& lo, Eigen::Index& hi,
                   double& frac) {
    double s = (static_cast<double>(dst) + 0.5) * scale - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(extent - 1));
    lo = static_cast<Eigen::Index>(std::floor(s));
    hi = std::min(lo + 1, extent - 1);
    frac = s - static_cast<double>(lo);
  };

  Matrix out(static_cast<Eigen::Index>(target_height), static_cast<Eigen::Index>(target_width));
  for (std::size_t y = 0; y < target_height; ++y) {
    Eigen::Index y0, y1;
    double fy;
    locate(y, sy, src_h, y0, y1, fy);
    for (std::size_t x = 0; x < target_width; ++x) {
      Eigen::Index x0, x1;
      double fx;
      locate(x, sx, src_w, x0, x1, fx);
      const double top = image(y0, x0) * (1.0 - fx) + image(y0, x1) * fx;
      const double bottom = image(y1, x0) * (1.0 - fx) + image(y1, x1) * fx;
      out(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x)) = top * (1.0 - fy) + bottom * fy;
    }
  }
  return out;
}

ImageVector normalize(const Matrix& image) {
  ImageVector v{Vector(image.size()), static_cast<std::size_t>(image.cols()), static_cast<std::size_t>(image.rows())};
  Eigen::Index k = 0;
  for (Eigen::Index y = 0; y < image.rows(); ++y)
    for (Eigen::Index x = 0; x < image.cols(); ++x) v.pixels(k++) = std::clamp(image(y, x) / 255.0, 0.0, 1.0);
  return v;
}

ImageVector normalize(const GrayImage& image) { return normalize(to_matrix(image)); }

ImageVector preprocess(const std::filesystem::path& path, std::size_t size) {
  return normalize(resize_bilinear(to_matrix(load_grayscale(path)), size, size));
}

}  // namespace ddah
