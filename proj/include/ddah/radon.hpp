#pragma once

// Discrete Radon projections, median-binarized Radon barcodes (RBC) and the
// autoencoder-learned Radon barcode (RABC).

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ddah/binary_code.hpp"
#include "ddah/hasher.hpp"
#include "ddah/nn.hpp"

namespace ddah {

struct RadonProjectionSet {
  std::string id;
  std::vector<double> angles;  // radians
  Matrix projections;          // n_angles x n_bins

  std::size_t n_angles() const { return static_cast<std::size_t>(projections.rows()); }
  std::size_t n_bins() const { return static_cast<std::size_t>(projections.cols()); }

  /// Angle-major concatenation of all projections.
  Vector flatten() const;
};

/// n angles evenly spaced over [0, pi): k*pi/n.
std::vector<double> default_angles(std::size_t n_angles);

/// Projects an N x N image (rows are image rows) at each angle into N bins.
///
/// The projection at angle theta is the image rotated by -theta about its
/// centre and summed over columns. It is computed pixel-driven: the centre of
/// pixel (x, y) lands at offset t = (x-c)cos(theta) + (y-c)sin(theta) + c along
/// the detector and its intensity is split linearly between the two nearest
/// bins. Angle 0 therefore gives exact column sums, and every pixel's mass is
/// kept (mass falling past the detector ends is accumulated into the edge bins).
RadonProjectionSet radon_projections(const Matrix& image, std::size_t n_angles,
                                     std::size_t expected_size = 256, std::string id = {});

RadonProjectionSet radon_projections(const Matrix& image, const std::vector<double>& angles,
                                     std::size_t expected_size = 256, std::string id = {});

/// Median of the values: mean of the two middle order statistics for an even
/// count.
double median(std::vector<double> values);

/// One bit per bin: 1 iff the bin is >= the median of its own projection.
BinaryCode radon_barcode(const RadonProjectionSet& projections);

/// Per-dimension min-max scaling fitted on training vectors.
class ProjectionScaler {
 public:
  ProjectionScaler() = default;
  ProjectionScaler(Vector min, Vector max);

  /// columns of train are samples.
  static ProjectionScaler fit(const Matrix& train);

  std::size_t dim() const { return static_cast<std::size_t>(min_.size()); }
  const Vector& min() const { return min_; }
  const Vector& max() const { return max_; }

  /// (x - min) / (max - min) clipped to [0,1]; constant dimensions map to 0.
  Vector apply(const Vector& x) const;
  Matrix apply(const Matrix& columns) const;
  Vector invert(const Vector& scaled) const;

  void save(const std::filesystem::path& path) const;
  static ProjectionScaler load(const std::filesystem::path& path);

 private:
  Vector min_, max_;
};

struct RabcOptions {
  std::size_t code_bits = 2048;
  PretrainOptions pretrain{};
  FineTuneOptions fine_tune{TrainOptions{2200, 16}};
};

struct RabcResult {
  Network encoder;
  PretrainedStack pretrained;
  std::vector<double> fine_tune_history;
};

/// Single-pair de-noising autoencoder [(dim, code_bits)] over scaled
/// projections, trained with layer_train then fine_tune; returns the encoder.
RabcResult train_rabc(const Matrix& scaled_projections, const RabcOptions& options, Rng& rng);

/// Projection dump: "DDAHP1", u32 n_angles, u32 n_bins, then per record
/// u32 id length, id bytes and n_angles*n_bins little-endian f64 values.
void save_projections(const std::filesystem::path& path, const std::vector<RadonProjectionSet>& sets);
std::vector<RadonProjectionSet> load_projections(const std::filesystem::path& path);

}  // namespace ddah
