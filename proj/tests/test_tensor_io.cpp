#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "se2conv/tensor.hpp"
#include "se2conv/tensor_io.hpp"

using namespace se2conv;

TEST_CASE("tensor shape, indexing, reshape") {
  TensorF t({2, 3, 4});
  CHECK(t.rank() == 3);
  CHECK(t.size() == 24);
  CHECK(t.dim(0) == 2);
  CHECK(t.dim(2) == 4);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = float(i);
  CHECK(t.at({1, 2, 3}) == 23.0f);
  CHECK(t.at({0, 0, 1}) == 1.0f);
  CHECK(t.offset({1, 0, 0}) == 12);

  TensorF r = t.reshaped({4, 6});
  CHECK(r.rank() == 2);
  CHECK(r.at({3, 5}) == 23.0f);
  CHECK_THROWS(t.reshaped({5, 5}));

  TensorF scalar(std::vector<std::size_t>{});
  CHECK(scalar.rank() == 0);
  CHECK(scalar.size() == 1);
}

TEST_CASE("tensor finiteness and fill") {
  TensorD t({3});
  t.fill(2.5);
  CHECK(t[1] == 2.5);
  CHECK(t.all_finite());
  t[2] = std::numeric_limits<double>::infinity();
  CHECK_FALSE(t.all_finite());
  t[2] = std::nan("");
  CHECK_FALSE(t.all_finite());
}

TEST_CASE("se2t round trip preserves shape, precision, and bytes") {
  TensorF tf({2, 3});
  for (std::size_t i = 0; i < tf.size(); ++i) tf[i] = 0.5f * float(i) - 1.25f;
  std::ostringstream buf;
  write_se2t(buf, tf);
  std::string bytes = buf.str();

  std::istringstream in(bytes);
  CHECK(peek_se2t_precision(in) == 4);
  TensorF back = read_se2t<float>(in);
  REQUIRE(back.shape() == tf.shape());
  for (std::size_t i = 0; i < tf.size(); ++i) CHECK(back[i] == tf[i]);

  // Writing the same tensor twice gives identical bytes.
  std::ostringstream buf2;
  write_se2t(buf2, tf);
  CHECK(buf2.str() == bytes);
}

TEST_CASE("se2t double precision and cross-precision read") {
  TensorD td({4});
  td[0] = 1.0 / 3.0;
  td[1] = -2e-300;
  td[2] = 7e300;
  td[3] = 0.0;
  std::ostringstream buf;
  write_se2t(buf, td);
  std::istringstream in(buf.str());
  CHECK(peek_se2t_precision(in) == 8);
  TensorD back = read_se2t<double>(in);
  for (std::size_t i = 0; i < 4; ++i) CHECK(back[i] == td[i]);

  // read_se2t_any converts across precisions.
  std::istringstream in2(buf.str());
  TensorF asf = read_se2t_any<float>(in2);
  CHECK(asf[0] == doctest::Approx(1.0f / 3.0f));
}

TEST_CASE("se2t rejects corrupt input") {
  TensorF t({2, 2});
  t.fill(1.0f);
  std::ostringstream buf;
  write_se2t(buf, t);
  std::string bytes = buf.str();

  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  std::istringstream in1(bad_magic);
  CHECK_THROWS_AS(read_se2t<float>(in1), io_error);

  std::string truncated = bytes.substr(0, bytes.size() - 3);
  std::istringstream in2(truncated);
  CHECK_THROWS_AS(read_se2t<float>(in2), io_error);

  std::istringstream in3(bytes);
  CHECK_THROWS_AS(read_se2t<double>(in3), io_error);  // precision mismatch
}

TEST_CASE("se2t file round trip via atomic writes") {
  std::string path = "tmp_roundtrip.se2t";
  TensorD t({3, 2});
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = double(i) * 1.5;
  write_se2t_file(path, t);
  TensorD back = read_se2t_file<double>(path);
  CHECK(back.shape() == t.shape());
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(back[i] == t[i]);
  std::remove(path.c_str());
  CHECK_THROWS_AS(read_se2t_file<double>(path), io_error);
}

TEST_CASE("pnm read and ppm write") {
  // Hand-written 2x2 P6 image, maxval 255.
  std::string path = "tmp_img.ppm";
  {
    std::ofstream out(path, std::ios::binary);
    out << "P6\n2 2\n255\n";
    unsigned char px[12] = {255, 0, 0, 0, 255, 0, 0, 0, 255, 255, 255, 255};
    out.write(reinterpret_cast<const char*>(px), 12);
  }
  TensorF img = read_pnm_file(path);
  REQUIRE(img.rank() == 3);
  CHECK(img.dim(0) == 2);
  CHECK(img.dim(1) == 2);
  CHECK(img.dim(2) == 3);
  CHECK(img.at({0, 0, 0}) == doctest::Approx(1.0f));
  CHECK(img.at({0, 1, 1}) == doctest::Approx(1.0f));
  CHECK(img.at({1, 1, 2}) == doctest::Approx(1.0f));
  CHECK(img.at({1, 0, 0}) == doctest::Approx(0.0f));

  write_ppm_file(path, img);
  TensorF back = read_pnm_file(path);
  for (std::size_t i = 0; i < img.size(); ++i) CHECK(back[i] == doctest::Approx(img[i]));
  std::remove(path.c_str());
}

TEST_CASE("pgm single channel") {
  std::string path = "tmp_img.pgm";
  {
    std::ofstream out(path, std::ios::binary);
    out << "P5\n3 1\n255\n";
    unsigned char px[3] = {0, 128, 255};
    out.write(reinterpret_cast<const char*>(px), 3);
  }
  TensorF img = read_pnm_file(path);
  REQUIRE(img.rank() == 3);
  CHECK(img.dim(2) == 1);
  CHECK(img.at({0, 2, 0}) == doctest::Approx(1.0f));
  std::remove(path.c_str());
}
