#include <filesystem>
#include <fstream>
#include <set>

#include "doctest.h"
#include "ddah/error.hpp"
#include "ddah/image.hpp"
#include "ddah/manifest.hpp"
#include "ddah/synthetic.hpp"

using namespace ddah;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("graymap loading") {
  TempDir tmp("ddah_pgm_test");
  {
    std::ofstream out(tmp.path / "a.pgm", std::ios::binary);
    out << "P5\n# comment\n2 2\n255\n";
    const unsigned char px[] = {0, 128, 255, 64};
    out.write(reinterpret_cast<const char*>(px), 4);
  }
  const GrayImage img = load_grayscale(tmp.path / "a.pgm");
  CHECK(img.width == 2);
  CHECK(img.height == 2);
  CHECK(img.at(0, 0) == 0);
  CHECK(img.at(1, 0) == 128);
  CHECK(img.at(0, 1) == 255);
  CHECK(img.at(1, 1) == 64);
  const ImageVector v = normalize(img);
  CHECK(v.pixels(2) == 1.0);
  CHECK(v.pixels(0) == 0.0);
  CHECK(v.pixels(1) == doctest::Approx(0.50196).epsilon(1e-4));
  CHECK(v.pixels.size() == 4);

  std::ofstream(tmp.path / "ascii.pgm") << "P2 2 1 15\n0 15\n";
  const GrayImage ascii = load_grayscale(tmp.path / "ascii.pgm");
  CHECK(ascii.at(1, 0) == 255);

  {
    std::ofstream out(tmp.path / "short.pgm", std::ios::binary);
    out << "P5\n4 4\n255\n" << "abc";
  }
  CHECK_THROWS_AS(load_grayscale(tmp.path / "short.pgm"), IoError);
  std::ofstream(tmp.path / "junk.pgm") << "GIF89a";
  CHECK_THROWS_AS(load_grayscale(tmp.path / "junk.pgm"), IoError);
  CHECK_THROWS_AS(load_grayscale(tmp.path / "missing.pgm"), IoError);

  save_pgm(tmp.path / "copy.pgm", img);
  CHECK(load_grayscale(tmp.path / "copy.pgm") == img);
}

TEST_CASE("bilinear resizing") {
  const Matrix constant = Matrix::Constant(7, 5, 42.0);
  const Matrix up = resize_bilinear(constant, 13, 9);
  CHECK(up.rows() == 9);
  CHECK(up.cols() == 13);
  CHECK((up.array() - 42.0).abs().maxCoeff() < 1e-12);

  Matrix any(3, 4);
  any << 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12;
  CHECK(resize_bilinear(any, 4, 3) == any);

  // 2x downscale samples midway between source pixels: checkerboard -> grey.
  Matrix board(8, 8);
  for (Eigen::Index y = 0; y < 8; ++y)
    for (Eigen::Index x = 0; x < 8; ++x) board(y, x) = (x + y) % 2 ? 255.0 : 0.0;
  const Matrix grey = resize_bilinear(board, 4, 4);
  CHECK((grey.array() - 127.5).abs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(resize_bilinear(any, 0, 3), InvalidArgument);
}

TEST_CASE("synthetic generator contract") {
  const auto data = generate_synthetic(100, 5, 32, 11);
  CHECK(data.size() == 100);
  std::set<std::string> codes;
  std::vector<int> per_class(5, 0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    codes.insert(data.codes[i].to_string());
    ++per_class[data.labels[i]];
  }
  CHECK(codes.size() == 5);
  for (int count : per_class) CHECK(count == 20);

  const auto again = generate_synthetic(100, 5, 32, 11);
  CHECK(again.images == data.images);
  CHECK(generate_synthetic(100, 5, 32, 12).images != data.images);
  CHECK_THROWS_AS(generate_synthetic(0, 5, 32, 1), InvalidArgument);
}

TEST_CASE("synthetic classes are separable in pixel space") {
  const auto data = generate_synthetic(200, 10, 32, 3);
  std::vector<Vector> px;
  for (const auto& img : data.images) px.push_back(normalize(img).pixels);
  double intra = 0, inter = 0;
  std::size_t n_intra = 0, n_inter = 0;
  for (std::size_t a = 0; a < px.size(); ++a) {
    for (std::size_t b = a + 1; b < px.size(); ++b) {
      const double d = (px[a] - px[b]).norm();
      if (data.labels[a] == data.labels[b]) {
        intra += d;
        ++n_intra;
      } else {
        inter += d;
        ++n_inter;
      }
    }
  }
  CHECK(intra / static_cast<double>(n_intra) < inter / static_cast<double>(n_inter));
}

TEST_CASE("synthetic dataset on disk and manifests") {
  TempDir tmp("ddah_synth_test");
  const auto data = generate_synthetic(40, 4, 16, 5);
  const auto split = write_synthetic(tmp.path, data, 0.2);
  CHECK(split.train.size() == 32);
  CHECK(split.test.size() == 8);

  const auto train = load_manifest(tmp.path / "train.manifest");
  CHECK(train.split == Split::train);
  CHECK(train.size() == 32);
  REQUIRE(train.entries[0].irma);
  const Matrix images = load_images(train, 16, 3);
  CHECK(images.rows() == 256);
  CHECK(images.cols() == 32);
  CHECK(images == load_images(train, 16, 1));
  CHECK((images.array() >= 0.0).all());
  CHECK((images.array() <= 1.0).all());

  std::ofstream(tmp.path / "dup.manifest") << "a;images/img00.pgm\na;images/img01.pgm\n";
  CHECK_THROWS_AS(load_manifest(tmp.path / "dup.manifest"), LoadError);
  std::ofstream(tmp.path / "missing.manifest") << "a;images/nope.pgm\n";
  CHECK_THROWS_AS(load_manifest(tmp.path / "missing.manifest"), LoadError);
  CHECK_NOTHROW(load_manifest(tmp.path / "missing.manifest", false));
}
