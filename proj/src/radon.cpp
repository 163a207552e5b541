#include "ddah/radon.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "ddah/binio.hpp"
#include "ddah/error.hpp"

namespace ddah {

Vector RadonProjectionSet::flatten() const {
  Vector out(projections.size());
  Eigen::Index k = 0;
  for (Eigen::Index a = 0; a < projections.rows(); ++a)
    for (Eigen::Index b = 0; b < projections.cols(); ++b) out(k++) = projections(a, b);
  return out;
}

std::vector<double> default_angles(std::size_t n_angles) {
  std::vector<double> angles(n_angles);
  for (std::size_t k = 0; k < n_angles; ++k)
    angles[k] = std::numbers::pi * static_cast<double>(k) / static_cast<double>(n_angles);
  return angles;
}

RadonProjectionSet radon_projections(const Matrix& image, std::size_t n_angles,
                                     std::size_t expected_size, std::string id) {
  if (n_angles == 0) throw InvalidArgument("radon: need at least one angle");
  return radon_projections(image, default_angles(n_angles), expected_size, std::move(id));
}

RadonProjectionSet radon_projections(const Matrix& image, const std::vector<double>& angles,
                                     std::size_t expected_size, std::string id) {
  if (image.rows() != image.cols())
    throw InvalidArgument("radon: image must be square, got " + std::to_string(image.rows()) + "x" +
                          std::to_string(image.cols()));
  if (static_cast<std::size_t>(image.rows()) != expected_size)
    throw InvalidArgument("radon: image must be " + std::to_string(expected_size) + "x" +
                          std::to_string(expected_size) + ", got " + std::to_string(image.rows()) +
                          "x" + std::to_string(image.cols()));
  if (angles.empty()) throw InvalidArgument("radon: need at least one angle");

  const Eigen::Index n = image.rows();
  const double centre = (static_cast<double>(n) - 1.0) / 2.0;
  RadonProjectionSet set{std::move(id), angles, Matrix::Zero(static_cast<Eigen::Index>(angles.size()), n)};
  for (std::size_t a = 0; a < angles.size(); ++a) {
    const double c = std::cos(angles[a]);
    const double s = std::sin(angles[a]);
    auto bins = set.projections.row(static_cast<Eigen::Index>(a));
    for (Eigen::Index y = 0; y < n; ++y) {
      const double row_offset = (static_cast<double>(y) - centre) * s + centre;
      for (Eigen::Index x = 0; x < n; ++x) {
        const double v = image(y, x);
        if (v == 0.0) continue;
        const double t = (static_cast<double>(x) - centre) * c + row_offset;
        const double lo = std::floor(t);
        const double frac = t - lo;
        const auto lo_bin = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(lo), 0, n - 1);
        const auto hi_bin = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(lo) + 1, 0, n - 1);
        bins(lo_bin) += v * (1.0 - frac);
        if (frac != 0.0) bins(hi_bin) += v * frac;
      }
    }
  }
  return set;
}

double median(std::vector<double> values) {
  if (values.empty()) throw InvalidArgument("median: no values");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return lower + (upper - lower) / 2.0;
}

BinaryCode radon_barcode(const RadonProjectionSet& set) {
  const std::size_t bins = set.n_bins();
  BinaryCode code(set.n_angles() * bins);
  for (std::size_t a = 0; a < set.n_angles(); ++a) {
    const auto row = set.projections.row(static_cast<Eigen::Index>(a));
    const double m = median(std::vector<double>(row.begin(), row.end()));
    for (std::size_t b = 0; b < bins; ++b)
      if (row(static_cast<Eigen::Index>(b)) >= m) code.set(a * bins + b, true);
  }
  return code;
}

ProjectionScaler::ProjectionScaler(Vector min, Vector max) : min_(std::move(min)), max_(std::move(max)) {
  if (min_.size() != max_.size()) throw InvalidArgument("scaler: min/max length mismatch");
  for (Eigen::Index i = 0; i < min_.size(); ++i)
    if (!(min_(i) <= max_(i))) throw InvalidArgument("scaler: min > max at dimension " + std::to_string(i));
}

ProjectionScaler ProjectionScaler::fit(const Matrix& train) {
  if (train.cols() == 0 || train.rows() == 0) throw InvalidArgument("scaler: empty training set");
  return ProjectionScaler(train.rowwise().minCoeff(), train.rowwise().maxCoeff());
}

Vector ProjectionScaler::apply(const Vector& x) const {
  if (x.size() != min_.size())
    throw InvalidArgument("scaler: vector of length " + std::to_string(x.size()) + ", fitted on " +
                          std::to_string(min_.size()));
  Vector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double range = max_(i) - min_(i);
    out(i) = range > 0.0 ? std::clamp((x(i) - min_(i)) / range, 0.0, 1.0) : 0.0;
  }
  return out;
}

Matrix ProjectionScaler::apply(const Matrix& columns) const {
  Matrix out(columns.rows(), columns.cols());
  for (Eigen::Index c = 0; c < columns.cols(); ++c) out.col(c) = apply(Vector(columns.col(c)));
  return out;
}

Vector ProjectionScaler::invert(const Vector& scaled) const {
  if (scaled.size() != min_.size()) throw InvalidArgument("scaler: length mismatch in invert");
  return (min_.array() + scaled.array() * (max_ - min_).array()).matrix();
}

namespace {
constexpr std::string_view kScalerMagic = "DDAHS1";
constexpr std::string_view kProjectionMagic = "DDAHP1";

void expect_magic(std::istream& in, std::string_view magic, const std::string& path) {
  std::string got(magic.size(), '\0');
  if (!in.read(got.data(), static_cast<std::streamsize>(got.size())) || got != magic)
    throw LoadError(path + ": bad magic, expected '" + std::string(magic) + "', found '" + got + "'");
}
}  // namespace

void ProjectionScaler::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out.write(kScalerMagic.data(), static_cast<std::streamsize>(kScalerMagic.size()));
  binio::put_u32(out, static_cast<std::uint32_t>(dim()));
  for (Eigen::Index i = 0; i < min_.size(); ++i) binio::put_f64(out, min_(i));
  for (Eigen::Index i = 0; i < max_.size(); ++i) binio::put_f64(out, max_(i));
}

ProjectionScaler ProjectionScaler::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open scaler file");
  expect_magic(in, kScalerMagic, path.string());
  try {
    const std::uint32_t dim = binio::get_u32(in);
    Vector lo(dim), hi(dim);
    for (std::uint32_t i = 0; i < dim; ++i) lo(i) = binio::get_f64(in);
    for (std::uint32_t i = 0; i < dim; ++i) hi(i) = binio::get_f64(in);
    return ProjectionScaler(std::move(lo), std::move(hi));
  } catch (const LoadError& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
}

RabcResult train_rabc(const Matrix& scaled_projections, const RabcOptions& options, Rng& rng) {
  if (scaled_projections.cols() == 0) throw InvalidArgument("train_rabc: no projections");
  if ((scaled_projections.array() < 0.0).any() || (scaled_projections.array() > 1.0).any())
    throw InvalidArgument("train_rabc: inputs must be scaled into [0,1]");
  const EncoderGeometry geometry(
      {{static_cast<std::size_t>(scaled_projections.rows()), options.code_bits}});
  RabcResult result;
  result.pretrained = layer_train(scaled_projections, geometry, options.pretrain, rng);
  auto tuned = fine_tune(scaled_projections, geometry, result.pretrained, options.fine_tune, rng);
  result.fine_tune_history = std::move(tuned.history);
  result.encoder = build_encoder(tuned.model);
  return result;
}

void save_projections(const std::filesystem::path& path, const std::vector<RadonProjectionSet>& sets) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out.write(kProjectionMagic.data(), static_cast<std::streamsize>(kProjectionMagic.size()));
  const std::size_t angles = sets.empty() ? 0 : sets.front().n_angles();
  const std::size_t bins = sets.empty() ? 0 : sets.front().n_bins();
  binio::put_u32(out, static_cast<std::uint32_t>(angles));
  binio::put_u32(out, static_cast<std::uint32_t>(bins));
  for (const auto& set : sets) {
    if (set.n_angles() != angles || set.n_bins() != bins)
      throw InvalidArgument("save_projections: inconsistent projection shapes");
    binio::put_u32(out, static_cast<std::uint32_t>(set.id.size()));
    out.write(set.id.data(), static_cast<std::streamsize>(set.id.size()));
    const Vector flat = set.flatten();
    for (Eigen::Index i = 0; i < flat.size(); ++i) binio::put_f64(out, flat(i));
  }
  if (!out) throw IoError(path.string(), "write failed");
}

std::vector<RadonProjectionSet> load_projections(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open projection file");
  expect_magic(in, kProjectionMagic, path.string());
  std::vector<RadonProjectionSet> sets;
  try {
    const std::uint32_t angles = binio::get_u32(in);
    const std::uint32_t bins = binio::get_u32(in);
    const auto angle_values = default_angles(angles);
    while (in.peek() != std::char_traits<char>::eof()) {
      const std::uint32_t len = binio::get_u32(in);
      if (len > 4096) throw LoadError("implausible id length");
      RadonProjectionSet set;
      set.id.resize(len);
      if (!in.read(set.id.data(), len)) throw LoadError("truncated id");
      set.angles = angle_values;
      set.projections.resize(angles, bins);
      for (std::uint32_t a = 0; a < angles; ++a)
        for (std::uint32_t b = 0; b < bins; ++b) set.projections(a, b) = binio::get_f64(in);
      sets.push_back(std::move(set));
    }
  } catch (const LoadError& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
  return sets;
}

}  // namespace ddah
