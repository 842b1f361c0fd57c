#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "skelemotion/motion_encoder.hpp"
#include "support/fixtures.hpp"
#include "support/naive_oracle.hpp"

using namespace skelemotion;
using std::numbers::pi;

namespace {

ChainMatrix matrix_from(std::size_t rows, std::size_t frames, auto&& value) {
  ChainMatrix s{Array3<double>(rows, frames, 3)};
  for (std::size_t c = 0; c < rows; ++c) {
    for (std::size_t t = 0; t < frames; ++t) {
      for (std::size_t a = 0; a < 3; ++a) s.values(c, t, a) = value(c, t, a);
    }
  }
  return s;
}

MotionTensor single_motion(double x, double y, double z) {
  MotionTensor d{Array3<double>(1, 1, 3), 1};
  d.values(0, 0, 0) = x;
  d.values(0, 0, 1) = y;
  d.values(0, 0, 2) = z;
  return d;
}

MagnitudeMap constant_magnitude(std::size_t rows, std::size_t cols, double v, int distance) {
  return MagnitudeMap{Array3<double>(rows, cols, 1, v), distance};
}

OrientationMap random_orientation(std::mt19937_64& rng, std::size_t rows, std::size_t cols, int distance) {
  std::uniform_real_distribution<double> u(-pi, pi);
  OrientationMap theta{Array3<double>(rows, cols, 3), distance};
  for (double& v : theta.values.flat()) v = u(rng);
  return theta;
}

oracle::Grid3 to_grid(const ChainMatrix& s) {
  oracle::Grid3 g(s.chain_length(), std::vector<oracle::Vec3>(s.frame_count()));
  for (std::size_t c = 0; c < s.chain_length(); ++c) {
    for (std::size_t t = 0; t < s.frame_count(); ++t) {
      g[c][t] = {s.values(c, t, 0), s.values(c, t, 1), s.values(c, t, 2)};
    }
  }
  return g;
}

}  // namespace

TEST_CASE("motion_difference") {
  SUBCASE("constant input") {
    const auto d = motion_difference(matrix_from(4, 8, [](auto...) { return 1.25; }), 3);
    for (double v : d.values.flat()) CHECK(v == 0.0);
  }
  SUBCASE("linear motion") {
    const auto d = motion_difference(
        matrix_from(5, 9, [](std::size_t, std::size_t t, std::size_t a) { return a == 0 ? double(t) : 0.0; }), 2);
    CHECK(d.distance == 2);
    CHECK(d.values.dim1() == 7);
    for (std::size_t c = 0; c < 5; ++c) {
      for (std::size_t t = 0; t < 7; ++t) {
        CHECK(d.values(c, t, 0) == 2.0);
        CHECK(d.values(c, t, 1) == 0.0);
        CHECK(d.values(c, t, 2) == 0.0);
      }
    }
  }
  SUBCASE("output length is T - d") {
    const auto d = motion_difference(matrix_from(49, 60, [](auto...) { return 0.0; }), 10);
    CHECK(d.values.dim0() == 49);
    CHECK(d.values.dim1() == 50);
    CHECK(d.values.dim2() == 3);
  }
  SUBCASE("too short") {
    const auto s = matrix_from(2, 5, [](auto...) { return 0.0; });
    CHECK_THROWS_WITH_AS(motion_difference(s, 5), doctest::Contains("sequence too short for distance d=5"),
                         Error);
    CHECK_THROWS_AS(motion_difference(s, 0), Error);
  }
}

TEST_CASE("magnitude") {
  CHECK(magnitude(single_motion(0, 0, 0)).values(0, 0, 0) == 0.0);
  CHECK(magnitude(single_motion(3, 4, 0)).values(0, 0, 0) == 5.0);
  CHECK(magnitude(single_motion(1, 1, 1)).values(0, 0, 0) == doctest::Approx(1.7320508).epsilon(1e-8));
  CHECK(magnitude(single_motion(1, 1, 1)).values.dim2() == 1);
}

TEST_CASE("orientation") {
  SUBCASE("equal components") {
    CHECK(orientation(single_motion(1, 1, 0)).values(0, 0, 0) == doctest::Approx(pi / 4));
  }
  SUBCASE("zero displacement") {
    const auto o = orientation(single_motion(0, 0, 0));
    CHECK(o.values(0, 0, 0) == 0.0);
    CHECK(o.values(0, 0, 1) == 0.0);
    CHECK(o.values(0, 0, 2) == 0.0);
  }
  SUBCASE("unit x displacement") {
    const auto o = orientation(single_motion(1, 0, 0));
    CHECK(o.values(0, 0, 0) == 0.0);                        // xy: atan2(0, 1)
    CHECK(o.values(0, 0, 1) == 0.0);                        // yz: (0, 0) convention
    CHECK(o.values(0, 0, 2) == doctest::Approx(pi / 2));    // zx: atan2(1, 0)
    CHECK(oracle::angle(0, 1) == 0.0);
    CHECK(oracle::angle(0, 0) == 0.0);
    CHECK(oracle::angle(1, 0) == doctest::Approx(pi / 2));
  }
  SUBCASE("all quadrants agree with the scalar oracle") {
    for (double x : {-2.0, -0.5, 0.0, 0.5, 2.0}) {
      for (double y : {-1.5, 0.0, 1.5}) {
        for (double z : {-0.3, 0.0, 0.7}) {
          const auto o = orientation(single_motion(x, y, z));
          CHECK(o.values(0, 0, 0) == doctest::Approx(oracle::angle(y, x)).epsilon(1e-12));
          CHECK(o.values(0, 0, 1) == doctest::Approx(oracle::angle(z, y)).epsilon(1e-12));
          CHECK(o.values(0, 0, 2) == doctest::Approx(oracle::angle(x, z)).epsilon(1e-12));
          for (double v : o.values.flat()) CHECK((v >= -pi && v <= pi));
        }
      }
    }
  }
}

TEST_CASE("filter_orientation") {
  std::mt19937_64 rng(4);
  const OrientationMap theta = random_orientation(rng, 3, 6, 1);

  SUBCASE("below threshold everywhere") {
    const auto f = filter_orientation(theta, constant_magnitude(3, 6, 0.003, 1), 0.004);
    for (double v : f.values.flat()) CHECK(v == 0.0);
  }
  SUBCASE("above threshold everywhere") {
    CHECK(filter_orientation(theta, constant_magnitude(3, 6, 0.01, 1), 0.004).values == theta.values);
  }
  SUBCASE("equal to threshold is kept") {
    CHECK(filter_orientation(theta, constant_magnitude(3, 6, 0.004, 1), 0.004).values == theta.values);
  }
  SUBCASE("cell-wise") {
    MagnitudeMap m = constant_magnitude(3, 6, 1.0, 1);
    m.values(1, 2, 0) = 0.0;
    const auto f = filter_orientation(theta, m, 0.004);
    for (std::size_t c = 0; c < 3; ++c) {
      for (std::size_t t = 0; t < 6; ++t) {
        for (std::size_t p = 0; p < 3; ++p) {
          CHECK(f.values(c, t, p) == ((c == 1 && t == 2) ? 0.0 : theta.values(c, t, p)));
        }
      }
    }
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(filter_orientation(theta, constant_magnitude(3, 5, 1.0, 1), 0.004), Error);
    CHECK_THROWS_AS(filter_orientation(theta, constant_magnitude(3, 6, 1.0, 2), 0.004), Error);
  }
}

TEST_CASE("filter_orientation_tsa") {
  std::mt19937_64 rng(6);
  const OrientationMap theta10 = random_orientation(rng, 4, 5, 10);

  SUBCASE("0.01 < 0.004 * 10 is zeroed") {
    const auto f = filter_orientation_tsa(theta10, constant_magnitude(4, 5, 0.01, 10), 0.004, 10);
    for (double v : f.values.flat()) CHECK(v == 0.0);
  }
  SUBCASE("0.05 >= 0.04 is kept") {
    CHECK(filter_orientation_tsa(theta10, constant_magnitude(4, 5, 0.05, 10), 0.004, 10).values ==
          theta10.values);
  }
  SUBCASE("d = 1 is the plain filter") {
    const OrientationMap theta1 = random_orientation(rng, 4, 5, 1);
    MagnitudeMap m{Array3<double>(4, 5, 1), 1};
    std::uniform_real_distribution<double> u(0.0, 0.008);
    for (double& v : m.values.flat()) v = u(rng);
    m.values(0, 0, 0) = 0.004;
    CHECK(filter_orientation_tsa(theta1, m, 0.004, 1).values == filter_orientation(theta1, m, 0.004).values);
  }
  SUBCASE("distance mismatch") {
    CHECK_THROWS_AS(filter_orientation_tsa(theta10, constant_magnitude(4, 5, 1.0, 10), 0.004, 5), Error);
  }
}

TEST_CASE("normalize") {
  SUBCASE("all-zero magnitude") {
    const auto n = normalize(Array3<double>(2, 3, 1, 0.0), NormalizeStrategy::magnitude);
    for (double v : n.flat()) CHECK(v == 0.0);
  }
  SUBCASE("magnitude divides by the maximum") {
    Array3<double> a(1, 3, 1);
    a(0, 0, 0) = 2.0;
    a(0, 1, 0) = 1.0;
    a(0, 2, 0) = 0.0;
    const auto n = normalize(a, NormalizeStrategy::magnitude);
    CHECK(n(0, 0, 0) == 1.0);
    CHECK(n(0, 1, 0) == 0.5);
    CHECK(n(0, 2, 0) == 0.0);
  }
  SUBCASE("orientation affine map") {
    Array3<double> a(1, 3, 1);
    a(0, 0, 0) = -pi;
    a(0, 1, 0) = pi;
    a(0, 2, 0) = 0.0;
    const auto n = normalize(a, NormalizeStrategy::orientation);
    CHECK(n(0, 0, 0) == 0.0);
    CHECK(n(0, 1, 0) == 1.0);
    CHECK(n(0, 2, 0) == 0.5);
  }
}

TEST_CASE("resize_temporal") {
  SUBCASE("same width is the identity") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0, 1);
    Array3<double> a(4, 10, 2);
    for (double& v : a.flat()) v = u(rng);
    CHECK(resize_temporal(a, 10) == a);
  }
  SUBCASE("two columns to three") {
    Array3<double> a(1, 2, 1);
    a(0, 1, 0) = 1.0;
    const auto r = resize_temporal(a, 3);
    CHECK(r(0, 0, 0) == 0.0);
    CHECK(r(0, 1, 0) == 0.5);
    CHECK(r(0, 2, 0) == 1.0);
  }
  SUBCASE("single column broadcasts") {
    Array3<double> a(2, 1, 1);
    a(0, 0, 0) = 0.25;
    a(1, 0, 0) = 0.75;
    const auto r = resize_temporal(a, 5);
    for (std::size_t j = 0; j < 5; ++j) {
      CHECK(r(0, j, 0) == 0.25);
      CHECK(r(1, j, 0) == 0.75);
    }
  }
  SUBCASE("matches the scalar oracle on random input") {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> u(0, 1);
    Array3<double> a(49, 37, 3);
    for (double& v : a.flat()) v = u(rng);
    const auto r = resize_temporal(a, 100);
    REQUIRE(r.dim1() == 100);
    for (std::size_t c = 0; c < 49; ++c) {
      for (std::size_t k = 0; k < 3; ++k) {
        std::vector<double> series(37);
        for (std::size_t t = 0; t < 37; ++t) series[t] = a(c, t, k);
        const auto expect = oracle::resample(series, 100);
        for (std::size_t j = 0; j < 100; ++j) CHECK(std::abs(r(c, j, k) - expect[j]) < 1e-6);
        CHECK(r(c, 0, k) == a(c, 0, k));
        CHECK(r(c, 99, k) == a(c, 36, k));
      }
    }
  }
  SUBCASE("downsampling keeps endpoints") {
    Array3<double> a(1, 300, 1);
    for (std::size_t t = 0; t < 300; ++t) a(0, t, 0) = static_cast<double>(t);
    const auto r = resize_temporal(a, 100);
    CHECK(r(0, 0, 0) == 0.0);
    CHECK(r(0, 99, 0) == 299.0);
    for (std::size_t j = 1; j < 100; ++j) CHECK(r(0, j, 0) > r(0, j - 1, 0));
  }
}

TEST_CASE("channel descriptors") {
  const std::vector<ChannelDescriptor> layout = {{0, ChannelKind::magnitude, 5, ""},
                                                 {1, ChannelKind::orientation, 10, "xy"},
                                                 {0, ChannelKind::coordinate, 0, "z"},
                                                 {1, ChannelKind::padding, 0, ""}};
  const std::string text = layout_to_string(layout);
  CHECK(text == "p0/mag/d5,p1/ori/d10/xy,p0/coord/z,p1/pad");
  CHECK(parse_layout(text) == layout);
  CHECK(parse_layout("").empty());
  CHECK_THROWS_AS(parse_layout("q0/mag"), Error);
  CHECK_THROWS_AS(parse_layout("p0/bogus"), Error);
  CHECK_THROWS_AS(parse_layout("p0/mag/d5/xy/extra"), Error);
}

TEST_CASE("encoder configuration") {
  SUBCASE("defaults") {
    const EncoderConfig cfg;
    CHECK(cfg.magnitude_distances == std::vector<int>{5, 10, 15});
    CHECK(cfg.orientation_distances == std::vector<int>{1, 10, 20});
    CHECK(cfg.magnitude_threshold == 0.004);
    CHECK(cfg.target_width == 100);
    CHECK(cfg.max_persons == 2);
    CHECK_NOTHROW(validate(cfg));
  }
  SUBCASE("file overrides") {
    const auto cfg = parse_encoder_config(
        "# test\nrepresentation = orientation\norientation_distances = 2, 4\nthreshold=0.01\n"
        "width = 64\npersons = 1\nnormalization = across-scales\n");
    CHECK(cfg.representation == Representation::orientation);
    CHECK(cfg.orientation_distances == std::vector<int>{2, 4});
    CHECK(cfg.magnitude_distances == std::vector<int>{5, 10, 15});
    CHECK(cfg.magnitude_threshold == 0.01);
    CHECK(cfg.target_width == 64);
    CHECK(cfg.max_persons == 1);
    CHECK(cfg.normalization == Normalization::across_scales);
    CHECK(parse_encoder_config("distances = 3,6").magnitude_distances == std::vector<int>{3, 6});
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(parse_encoder_config("width 100"), ParseError);
    CHECK_THROWS_AS(parse_encoder_config("speed = 3"), ParseError);
    CHECK_THROWS_AS(parse_encoder_config("threshold = fast"), ParseError);
    EncoderConfig cfg;
    cfg.magnitude_distances = {10, 5};
    CHECK_THROWS_AS(validate(cfg), Error);
    cfg = {};
    cfg.target_width = 1;
    CHECK_THROWS_AS(validate(cfg), Error);
    cfg = {};
    cfg.magnitude_threshold = -1;
    CHECK_THROWS_AS(validate(cfg), Error);
  }
}

TEST_CASE("encode_skelemotion shapes") {
  std::mt19937_64 rng(12);
  const auto track = fixtures::random_track(rng, 64);
  const ChainOrder chain = default_chain();
  EncoderConfig cfg;

  SUBCASE("magnitude TSA") {
    const auto img = encode_skelemotion(track, chain, cfg);
    CHECK(img.rows() == 49);
    CHECK(img.width() == 100);
    CHECK(img.channels() == 3);
    CHECK(layout_to_string(img.layout) == "p0/mag/d5,p0/mag/d10,p0/mag/d15");
  }
  SUBCASE("orientation TSA") {
    cfg.representation = Representation::orientation;
    const auto img = encode_skelemotion(track, chain, cfg);
    CHECK(img.channels() == 9);
    CHECK(to_string(img.layout[0]) == "p0/ori/d1/xy");
    CHECK(to_string(img.layout[8]) == "p0/ori/d20/zx");
  }
  SUBCASE("magnitude and orientation") {
    cfg.representation = Representation::magnitude_orientation;
    const auto img = encode_skelemotion(track, chain, cfg);
    CHECK(img.channels() == 12);
    CHECK(img.layout[2].kind == ChannelKind::magnitude);
    CHECK(img.layout[3].kind == ChannelKind::orientation);
  }
  SUBCASE("too short") {
    CHECK_THROWS_WITH_AS(encode_skelemotion(fixtures::random_track(rng, 15), chain, cfg),
                         doctest::Contains("at least 16"), Error);
  }
  SUBCASE("non-dense track") {
    auto t = track;
    t.present[3] = false;
    CHECK_THROWS_AS(encode_skelemotion(t, chain, cfg), Error);
  }
}

TEST_CASE("encode_skelemotion of a stationary track") {
  const auto track = fixtures::constant_track(40, 0.3);
  EncoderConfig cfg;
  cfg.representation = Representation::magnitude_orientation;
  const auto img = encode_skelemotion(track, default_chain(), cfg);
  for (std::size_t r = 0; r < img.rows(); ++r) {
    for (std::size_t w = 0; w < img.width(); ++w) {
      for (std::size_t k = 0; k < 3; ++k) CHECK(img.values(r, w, k) == 0.0f);
      for (std::size_t k = 3; k < 12; ++k) CHECK(img.values(r, w, k) == 0.5f);
    }
  }
}

TEST_CASE("encode_skelemotion pipeline against the oracle") {
  // Rebuild the magnitude-TSA and orientation-TSA images from oracle maps with
  // the documented normalization and resampling and compare.
  std::mt19937_64 rng(99);
  const auto track = fixtures::random_track(rng, 47);
  const ChainOrder chain = default_chain();
  EncoderConfig cfg;
  cfg.representation = Representation::magnitude_orientation;
  const auto img = encode_skelemotion(track, chain, cfg);
  const auto grid = to_grid(build_chain_matrix(track, chain));

  std::size_t channel = 0;
  for (int d : cfg.magnitude_distances) {
    const auto mag = oracle::magnitude(oracle::displacement(grid, d));
    double peak = 0;
    for (const auto& row : mag) {
      for (double v : row) peak = std::max(peak, v);
    }
    for (std::size_t c = 0; c < mag.size(); ++c) {
      std::vector<double> series;
      for (double v : mag[c]) series.push_back(v / peak);
      const auto expect = oracle::resample(series, 100);
      for (std::size_t j = 0; j < 100; ++j) CHECK(std::abs(img.values(c, j, channel) - expect[j]) < 1e-6);
    }
    ++channel;
  }
  for (int d : cfg.orientation_distances) {
    const auto disp = oracle::displacement(grid, d);
    const auto theta = oracle::filtered(oracle::orientation(disp), oracle::magnitude(disp), 0.004 * d);
    for (std::size_t p = 0; p < 3; ++p) {
      for (std::size_t c = 0; c < theta.size(); ++c) {
        std::vector<double> series;
        for (const auto& v : theta[c]) series.push_back((v[p] + pi) / (2 * pi));
        const auto expect = oracle::resample(series, 100);
        for (std::size_t j = 0; j < 100; ++j) CHECK(std::abs(img.values(c, j, channel) - expect[j]) < 1e-6);
      }
      ++channel;
    }
  }
}

TEST_CASE("across-scales normalization shares one maximum") {
  const auto track = fixtures::linear_track(50, {0.01, 0.0, 0.0});
  EncoderConfig cfg;
  cfg.normalization = Normalization::across_scales;
  const auto img = encode_skelemotion(track, default_chain(), cfg);
  // Constant velocity: magnitude grows linearly with d, so d=5 and d=10 map to 1/3 and 2/3.
  CHECK(img.values(0, 0, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
  CHECK(img.values(0, 0, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
  CHECK(img.values(0, 0, 2) == doctest::Approx(1.0).epsilon(1e-6));
  cfg.normalization = Normalization::per_scale;
  const auto per = encode_skelemotion(track, default_chain(), cfg);
  CHECK(per.values(0, 0, 0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("stack_persons") {
  std::mt19937_64 rng(13);
  const ChainOrder chain = default_chain();
  const EncoderConfig cfg;
  const auto a = encode_skelemotion(fixtures::random_track(rng, 30, 1), chain, cfg);
  const auto b = encode_skelemotion(fixtures::random_track(rng, 30, 2), chain, cfg);

  SUBCASE("two persons") {
    const std::vector<EncodedImage> both = {a, b};
    const auto s = stack_persons(both, 2);
    CHECK(s.channels() == 6);
    CHECK(s.values(10, 20, 1) == a.values(10, 20, 1));
    CHECK(s.values(10, 20, 4) == b.values(10, 20, 1));
    CHECK(s.layout[4].person == 1);
    CHECK(s.layout[4].scale == 10);
  }
  SUBCASE("padding") {
    const std::vector<EncodedImage> one = {a};
    const auto s = stack_persons(one, 2);
    CHECK(s.channels() == 6);
    for (std::size_t r = 0; r < 49; ++r) {
      for (std::size_t w = 0; w < 100; ++w) {
        for (std::size_t k = 3; k < 6; ++k) CHECK(s.values(r, w, k) == 0.0f);
      }
    }
    CHECK(s.layout[5].kind == ChannelKind::padding);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(stack_persons({}, 2), Error);
    EncoderConfig narrow = cfg;
    narrow.target_width = 50;
    const std::vector<EncodedImage> mixed = {a, encode_skelemotion(fixtures::random_track(rng, 30), chain, narrow)};
    CHECK_THROWS_AS(stack_persons(mixed, 2), Error);
    const std::vector<EncodedImage> three = {a, a, a};
    CHECK_THROWS_AS(stack_persons(three, 2), Error);
  }
}

TEST_CASE("early_fuse") {
  std::mt19937_64 rng(14);
  const ChainOrder chain = default_chain();
  EncoderConfig cfg;
  const auto mag = encode_skelemotion(fixtures::random_track(rng, 30), chain, cfg);
  cfg.representation = Representation::orientation;
  const auto ori = encode_skelemotion(fixtures::random_track(rng, 30), chain, cfg);

  const std::vector<EncodedImage> pair = {mag, ori};
  const auto fused = early_fuse(pair);
  CHECK(fused.channels() == 12);
  CHECK(fused.values(3, 7, 3) == ori.values(3, 7, 0));
  CHECK(fused.layout.size() == 12);

  const std::vector<EncodedImage> single = {mag};
  CHECK(early_fuse(single) == mag);

  EncodedImage short_rows{Array3<float>(25, 100, 3), mag.layout};
  const std::vector<EncodedImage> mismatched = {mag, short_rows};
  CHECK_THROWS_AS(early_fuse(mismatched), Error);
}

TEST_CASE("encoded values stay in [0, 1] and are reproducible") {
  std::mt19937_64 rng(15);
  EncoderConfig cfg;
  cfg.representation = Representation::magnitude_orientation;
  for (int i = 0; i < 10; ++i) {
    const auto track = fixtures::random_track(rng, 21 + 10 * i);
    const auto img = encode_skelemotion(track, default_chain(), cfg);
    for (float v : img.values.flat()) CHECK((v >= 0.0f && v <= 1.0f));
    CHECK(encode_skelemotion(track, default_chain(), cfg) == img);
  }
}

TEST_CASE("raising the threshold only zeroes more cells") {
  std::mt19937_64 rng(16);
  const auto s = build_chain_matrix(fixtures::random_track(rng, 40), default_chain());
  for (int d : {1, 5, 10}) {
    const auto motion = motion_difference(s, d);
    const auto theta = orientation(motion);
    const auto mag = magnitude(motion);
    std::size_t previous = 0;
    for (double m : {0.0, 0.01, 0.05, 0.1, 0.2, 0.4}) {
      const auto f = filter_orientation_tsa(theta, mag, m, d);
      std::size_t zeroed = 0;
      for (std::size_t c = 0; c < 49; ++c) {
        for (std::size_t t = 0; t < f.values.dim1(); ++t) zeroed += f.values(c, t, 0) == 0.0 && f.values(c, t, 1) == 0.0 && f.values(c, t, 2) == 0.0;
      }
      CHECK(zeroed >= previous);
      previous = zeroed;
    }
  }
}
