#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "ddah/nn.hpp"

namespace ddah {

/// 8-bit grayscale raster, row-major.
struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;

  std::uint8_t at(std::size_t x, std::size_t y) const { return pixels[y * width + x]; }
  friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

/// Flattened row-major intensities in [0,1].
struct ImageVector {
  Vector pixels;
  std::size_t width = 0;
  std::size_t height = 0;
};

/// Reads a portable graymap (binary P5 or ASCII P2, maxval <= 255; other
/// maxvals are rescaled to 0..255). Throws IoError naming the path.
GrayImage load_grayscale(const std::filesystem::path& path);
void save_pgm(const std::filesystem::path& path, const GrayImage& image);

/// Intensities as a height x width matrix in the original 0..255 units.
Matrix to_matrix(const GrayImage& image);

/// Bilinear resampling with pixel-centre alignment and edge clamping.
Matrix resize_bilinear(const Matrix& image, std::size_t target_width, std::size_t target_height);

/// Divides by 255 and flattens row-major.
ImageVector normalize(const Matrix& image);
ImageVector normalize(const GrayImage& image);

/// load -> resize to size x size -> normalize.
ImageVector preprocess(const std::filesystem::path& path, std::size_t size);

}  // namespace ddah
