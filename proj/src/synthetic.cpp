#include "ddah/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "ddah/error.hpp"
#include "ddah/rng.hpp"

namespace ddah {

namespace {

struct Ellipse {
  double cx, cy, ax, ay, angle, intensity;
};

struct Bar {
  double cx, cy, length, width, angle, intensity;
};

struct ClassPrototype {
  double background;
  Ellipse body;
  Bar bone;
};

std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

ClassPrototype make_prototype(std::size_t c, std::uint64_t seed) {
  const std::size_t group = c / 3;
  Rng group_rng(mix(seed, 2 * group));
  const double body_angle = group_rng.uniform(0.0, std::numbers::pi);
  const double bone_angle = group_rng.uniform(0.0, std::numbers::pi);
  const double body_scale = group_rng.uniform(0.22, 0.36);

  Rng rng(mix(seed, 2 * c + 1));
  ClassPrototype p;
  p.background = rng.uniform(0.03, 0.15);
  p.body = {0.5 + rng.uniform(-0.12, 0.12),
            0.5 + rng.uniform(-0.12, 0.12),
            body_scale * rng.uniform(0.8, 1.25),
            body_scale * rng.uniform(0.55, 1.0),
            body_angle + rng.uniform(-0.35, 0.35),
            rng.uniform(0.35, 0.6)};
  p.bone = {p.body.cx + rng.uniform(-0.12, 0.12),
            p.body.cy + rng.uniform(-0.12, 0.12),
            rng.uniform(0.3, 0.6),
            rng.uniform(0.04, 0.09),
            bone_angle + rng.uniform(-0.5, 0.5),
            rng.uniform(0.7, 0.95)};
  return p;
}

// Soft inside-test: 1 well inside, 0 well outside, linear over `edge`.
double soft(double signed_distance, double edge) {
  return std::clamp(0.5 - signed_distance / edge, 0.0, 1.0);
}

GrayImage render(const ClassPrototype& proto, std::size_t size, Rng& rng) {
  ClassPrototype p = proto;
  p.body.cx += rng.uniform(-0.03, 0.03);
  p.body.cy += rng.uniform(-0.03, 0.03);
  p.body.ax *= rng.uniform(0.94, 1.06);
  p.body.ay *= rng.uniform(0.94, 1.06);
  p.body.angle += rng.uniform(-0.08, 0.08);
  p.body.intensity += rng.uniform(-0.04, 0.04);
  p.bone.cx += rng.uniform(-0.03, 0.03);
  p.bone.cy += rng.uniform(-0.03, 0.03);
  p.bone.length *= rng.uniform(0.94, 1.06);
  p.bone.angle += rng.uniform(-0.08, 0.08);
  p.bone.intensity += rng.uniform(-0.04, 0.04);

  const double n = static_cast<double>(size);
  const double edge = 1.5 / n;
  const double cb = std::cos(p.body.angle), sb = std::sin(p.body.angle);
  const double cr = std::cos(p.bone.angle), sr = std::sin(p.bone.angle);

  GrayImage img{size, size, std::vector<std::uint8_t>(size * size)};
  for (std::size_t y = 0; y < size; ++y) {
    for (std::size_t x = 0; x < size; ++x) {
      const double u = (static_cast<double>(x) + 0.5) / n;
      const double v = (static_cast<double>(y) + 0.5) / n;

      double du = u - p.body.cx, dv = v - p.body.cy;
      const double eu = (du * cb + dv * sb) / p.body.ax;
      const double ev = (-du * sb + dv * cb) / p.body.ay;
      const double body_r = std::sqrt(eu * eu + ev * ev);
      const double body = soft((body_r - 1.0) * std::min(p.body.ax, p.body.ay), edge);

      du = u - p.bone.cx;
      dv = v - p.bone.cy;
      const double along = std::abs(du * cr + dv * sr) - p.bone.length / 2;
      const double across = std::abs(-du * sr + dv * cr) - p.bone.width / 2;
      const double bone = soft(std::max(along, across), edge);

      double value = p.background;
      value += (p.body.intensity - value) * body;
      value += (p.bone.intensity - value) * bone;
      value += 0.04 * rng.normal();
      img.pixels[y * size + x] = static_cast<std::uint8_t>(std::lround(std::clamp(value, 0.0, 1.0) * 255.0));
    }
  }
  return img;
}

char digit(std::size_t v) { return static_cast<char>('0' + v % 10); }
char letter(std::size_t v) { return static_cast<char>('a' + v % 26); }

}  // namespace

IrmaCode synthetic_class_code(std::size_t c) {
  const std::size_t group = c / 3;
  const std::size_t member = c % 3;
  std::string text = "1121-";
  text += {digit(group), letter(group / 10), '0', '-'};
  text += {digit(group), digit(member), digit(group / 260), '-'};
  text += "700";
  return IrmaCode::parse(text);
}

SyntheticDataset generate_synthetic(std::size_t n, std::size_t classes, std::size_t size, std::uint64_t seed) {
  if (n == 0 || classes == 0) throw InvalidArgument("generate_synthetic: n and classes must be >= 1");
  if (size < 4) throw InvalidArgument("generate_synthetic: image size must be >= 4");
  std::vector<ClassPrototype> prototypes;
  prototypes.reserve(classes);
  for (std::size_t c = 0; c < classes; ++c) prototypes.push_back(make_prototype(c, seed));

  SyntheticDataset data;
  Rng rng(seed);
  const int width = static_cast<int>(std::to_string(n - 1).size());
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t label = i % classes;
    std::ostringstream id;
    id << "img" << std::setw(width) << std::setfill('0') << i;
    data.ids.push_back(id.str());
    data.images.push_back(render(prototypes[label], size, rng));
    data.codes.push_back(synthetic_class_code(label));
    data.labels.push_back(label);
  }
  return data;
}

std::vector<bool> synthetic_test_mask(const SyntheticDataset& data, double test_fraction) {
  if (!(test_fraction >= 0.0 && test_fraction < 1.0))
    throw InvalidArgument("synthetic split: test fraction must lie in [0,1)");
  std::vector<bool> mask(data.size(), false);
  std::vector<std::size_t> seen;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const std::size_t label = data.labels[i];
    if (seen.size() <= label) seen.resize(label + 1, 0);
    const std::size_t m = seen[label]++;
    // Member m goes to test when the running quota crosses an integer.
    mask[i] = std::floor(static_cast<double>(m + 1) * test_fraction) >
              std::floor(static_cast<double>(m) * test_fraction);
  }
  return mask;
}

SyntheticSplit write_synthetic(const std::filesystem::path& dir, const SyntheticDataset& data, double test_fraction) {
  std::filesystem::create_directories(dir / "images");
  const auto mask = synthetic_test_mask(data, test_fraction);
  SyntheticSplit split;
  split.train.root = split.test.root = dir;
  split.train.split = Split::train;
  split.test.split = Split::test;
  std::vector<std::pair<std::string, IrmaCode>> all_codes;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const std::filesystem::path rel = std::filesystem::path("images") / (data.ids[i] + ".pgm");
    save_pgm(dir / rel, data.images[i]);
    ManifestEntry entry{data.ids[i], rel, data.codes[i]};
    (mask[i] ? split.test : split.train).entries.push_back(std::move(entry));
    all_codes.emplace_back(data.ids[i], data.codes[i]);
  }
  save_manifest(dir / "train.manifest", split.train);
  save_manifest(dir / "test.manifest", split.test);
  save_irma_codes(dir / "irma_codes.txt", all_codes);
  return split;
}

}  // namespace ddah
