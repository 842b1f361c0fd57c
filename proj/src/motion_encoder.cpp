#include "skelemotion/motion_encoder.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "text_util.hpp"

namespace skelemotion {

// ---------------------------------------------------------------------------
// Channel descriptors

namespace {

std::string_view kind_tag(ChannelKind k) {
  switch (k) {
    case ChannelKind::magnitude: return "mag";
    case ChannelKind::orientation: return "ori";
    case ChannelKind::coordinate: return "coord";
    case ChannelKind::naive_motion: return "naive";
    case ChannelKind::padding: return "pad";
  }
  return "?";
}

ChannelKind parse_kind(std::string_view tag) {
  if (tag == "mag") return ChannelKind::magnitude;
  if (tag == "ori") return ChannelKind::orientation;
  if (tag == "coord") return ChannelKind::coordinate;
  if (tag == "naive") return ChannelKind::naive_motion;
  if (tag == "pad") return ChannelKind::padding;
  throw Error("unknown channel kind '" + std::string(tag) + "'");
}

}  // namespace

std::string to_string(const ChannelDescriptor& d) {
  std::string s = "p" + std::to_string(d.person) + "/" + std::string(kind_tag(d.kind));
  if (d.scale > 0) s += "/d" + std::to_string(d.scale);
  if (!d.component.empty()) s += "/" + d.component;
  return s;
}

ChannelDescriptor parse_channel_descriptor(std::string_view text) {
  const auto parts = detail::split_on(text, '/');
  auto fail = [&] { return Error("malformed channel descriptor '" + std::string(text) + "'"); };
  if (parts.size() < 2 || parts[0].size() < 2 || parts[0][0] != 'p') throw fail();
  ChannelDescriptor d;
  auto person = detail::parse_integer<int>(parts[0].substr(1));
  if (!person || *person < 0) throw fail();
  d.person = *person;
  d.kind = parse_kind(parts[1]);
  std::size_t i = 2;
  if (i < parts.size() && parts[i].size() > 1 && parts[i][0] == 'd') {
    auto scale = detail::parse_integer<int>(parts[i].substr(1));
    if (!scale || *scale <= 0) throw fail();
    d.scale = *scale;
    ++i;
  }
  if (i < parts.size()) d.component = std::string(parts[i++]);
  if (i != parts.size()) throw fail();
  return d;
}

std::string layout_to_string(const std::vector<ChannelDescriptor>& layout) {
  std::string s;
  for (std::size_t i = 0; i < layout.size(); ++i) {
    if (i) s += ',';
    s += to_string(layout[i]);
  }
  return s;
}

std::vector<ChannelDescriptor> parse_layout(std::string_view text) {
  std::vector<ChannelDescriptor> layout;
  if (text.empty()) return layout;
  for (auto part : detail::split_on(text, ',')) layout.push_back(parse_channel_descriptor(part));
  return layout;
}

// ---------------------------------------------------------------------------
// Configuration

std::string_view to_string(Representation r) {
  switch (r) {
    case Representation::magnitude: return "magnitude";
    case Representation::orientation: return "orientation";
    case Representation::magnitude_orientation: return "magnitude+orientation";
  }
  return "?";
}

Representation parse_representation(std::string_view name) {
  if (name == "magnitude") return Representation::magnitude;
  if (name == "orientation") return Representation::orientation;
  if (name == "magnitude+orientation") return Representation::magnitude_orientation;
  throw Error("unknown representation '" + std::string(name) + "'");
}

std::string_view to_string(Normalization n) {
  return n == Normalization::per_scale ? "per-scale" : "across-scales";
}

Normalization parse_normalization(std::string_view name) {
  if (name == "per-scale") return Normalization::per_scale;
  if (name == "across-scales") return Normalization::across_scales;
  throw Error("unknown normalization '" + std::string(name) + "'");
}

std::vector<int> parse_distances(std::string_view text) {
  std::vector<int> out;
  for (auto part : detail::split_on(text, ',')) {
    auto v = detail::parse_integer<int>(part);
    if (!v) throw Error("invalid distance '" + std::string(detail::trim(part)) + "'");
    out.push_back(*v);
  }
  return out;
}

namespace {

void validate_distances(const std::vector<int>& d, const char* name) {
  if (d.empty()) throw Error(std::string(name) + " must not be empty");
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] < 1) throw Error(std::string(name) + " must be positive");
    if (i > 0 && d[i] <= d[i - 1]) throw Error(std::string(name) + " must be strictly increasing");
  }
}

}  // namespace

void validate(const EncoderConfig& cfg) {
  if (cfg.representation != Representation::orientation) {
    validate_distances(cfg.magnitude_distances, "magnitude distances");
  }
  if (cfg.representation != Representation::magnitude) {
    validate_distances(cfg.orientation_distances, "orientation distances");
  }
  if (!(cfg.magnitude_threshold >= 0.0) || !std::isfinite(cfg.magnitude_threshold)) {
    throw Error("threshold must be a finite non-negative number");
  }
  if (cfg.target_width < 2) throw Error("target width must be at least 2");
  if (cfg.max_persons < 1) throw Error("persons must be at least 1");
}

EncoderConfig parse_encoder_config(std::string_view text, EncoderConfig base) {
  EncoderConfig cfg = std::move(base);
  detail::LineReader reader(text);
  while (auto raw = reader.next()) {
    std::string_view line = *raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(reader.line_number(), "expected key = value");
    const std::string_view key = detail::trim(line.substr(0, eq));
    const std::string_view value = detail::trim(line.substr(eq + 1));
    try {
      if (key == "representation") {
        cfg.representation = parse_representation(value);
      } else if (key == "distances") {
        cfg.magnitude_distances = cfg.orientation_distances = parse_distances(value);
      } else if (key == "magnitude_distances") {
        cfg.magnitude_distances = parse_distances(value);
      } else if (key == "orientation_distances") {
        cfg.orientation_distances = parse_distances(value);
      } else if (key == "threshold") {
        auto v = detail::parse_double(value);
        if (!v) throw Error("invalid number '" + std::string(value) + "'");
        cfg.magnitude_threshold = *v;
      } else if (key == "width" || key == "persons") {
        auto v = detail::parse_integer<std::size_t>(value);
        if (!v) throw Error("invalid integer '" + std::string(value) + "'");
        (key == "width" ? cfg.target_width : cfg.max_persons) = *v;
      } else if (key == "normalization") {
        cfg.normalization = parse_normalization(value);
      } else {
        throw Error("unknown key '" + std::string(key) + "'");
      }
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(reader.line_number(), e.what());
    }
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Motion maps

MotionTensor motion_difference(const ChainMatrix& chain_matrix, int distance) {
  const Array3<double>& s = chain_matrix.values;
  const std::size_t frames = s.dim1();
  if (distance < 1) throw Error("distance must be positive");
  const auto d = static_cast<std::size_t>(distance);
  if (d >= frames) {
    throw Error("sequence too short for distance d=" + std::to_string(distance) + ": " +
                std::to_string(frames) + " frames");
  }
  const std::size_t steps = frames - d;
  MotionTensor out{Array3<double>(s.dim0(), steps, 3), distance};
  for (std::size_t c = 0; c < s.dim0(); ++c) {
    for (std::size_t t = 0; t < steps; ++t) {
      for (std::size_t a = 0; a < 3; ++a) out.values(c, t, a) = s(c, t + d, a) - s(c, t, a);
    }
  }
  return out;
}

MagnitudeMap magnitude(const MotionTensor& motion) {
  const Array3<double>& d = motion.values;
  MagnitudeMap out{Array3<double>(d.dim0(), d.dim1(), 1), motion.distance};
  for (std::size_t c = 0; c < d.dim0(); ++c) {
    for (std::size_t t = 0; t < d.dim1(); ++t) {
      const double x = d(c, t, 0), y = d(c, t, 1), z = d(c, t, 2);
      out.values(c, t, 0) = std::sqrt(x * x + y * y + z * z);
    }
  }
  return out;
}

namespace {

// Four-quadrant arctangent with the undefined (0, 0) case mapped to 0.
double planar_angle(double num, double den) {
  if (num == 0.0 && den == 0.0) return 0.0;
  return std::atan2(num, den);
}

void check_compatible(const OrientationMap& theta, const MagnitudeMap& mag) {
  if (theta.values.dim0() != mag.values.dim0() || theta.values.dim1() != mag.values.dim1() ||
      theta.values.dim2() != 3 || mag.values.dim2() != 1) {
    throw Error("orientation and magnitude maps have mismatched dimensions");
  }
  if (theta.distance != mag.distance) {
    throw Error("orientation and magnitude maps were computed at different distances");
  }
}

OrientationMap zero_below(const OrientationMap& theta, const MagnitudeMap& mag, double limit) {
  OrientationMap out = theta;
  for (std::size_t c = 0; c < mag.values.dim0(); ++c) {
    for (std::size_t t = 0; t < mag.values.dim1(); ++t) {
      if (mag.values(c, t, 0) < limit) {
        out.values(c, t, 0) = out.values(c, t, 1) = out.values(c, t, 2) = 0.0;
      }
    }
  }
  return out;
}

}  // namespace

OrientationMap orientation(const MotionTensor& motion) {
  const Array3<double>& d = motion.values;
  OrientationMap out{Array3<double>(d.dim0(), d.dim1(), 3), motion.distance};
  for (std::size_t c = 0; c < d.dim0(); ++c) {
    for (std::size_t t = 0; t < d.dim1(); ++t) {
      const double x = d(c, t, 0), y = d(c, t, 1), z = d(c, t, 2);
      out.values(c, t, static_cast<std::size_t>(Plane::xy)) = planar_angle(y, x);
      out.values(c, t, static_cast<std::size_t>(Plane::yz)) = planar_angle(z, y);
      out.values(c, t, static_cast<std::size_t>(Plane::zx)) = planar_angle(x, z);
    }
  }
  return out;
}

OrientationMap filter_orientation(const OrientationMap& theta, const MagnitudeMap& mag,
                                  double threshold) {
  check_compatible(theta, mag);
  return zero_below(theta, mag, threshold);
}

OrientationMap filter_orientation_tsa(const OrientationMap& theta, const MagnitudeMap& mag,
                                      double threshold, int distance) {
  check_compatible(theta, mag);
  if (distance != theta.distance) {
    throw Error("filter distance " + std::to_string(distance) + " does not match map distance " +
                std::to_string(theta.distance));
  }
  return zero_below(theta, mag, threshold * distance);
}

// ---------------------------------------------------------------------------
// Image assembly

Array3<double> normalize(const Array3<double>& values, NormalizeStrategy strategy) {
  Array3<double> out = values;
  auto flat = out.flat();
  if (strategy == NormalizeStrategy::magnitude) {
    double peak = 0.0;
    for (double v : flat) peak = std::max(peak, v);
    const double scale = std::max(peak, kNormalizeEpsilon);
    for (double& v : flat) v /= scale;
  } else {
    constexpr double pi = std::numbers::pi;
    for (double& v : flat) v = (v + pi) / (2.0 * pi);
  }
  return out;
}

Array3<double> resize_temporal(const Array3<double>& image, std::size_t width) {
  const std::size_t rows = image.dim0(), cols = image.dim1(), ch = image.dim2();
  if (cols < 1) throw Error("cannot resize an image with no columns");
  if (width < 1) throw Error("target width must be positive");
  Array3<double> out(rows, width, ch);
  for (std::size_t j = 0; j < width; ++j) {
    std::size_t lo = 0;
    double frac = 0.0;
    if (cols > 1 && width > 1) {
      const double pos = static_cast<double>(j * (cols - 1)) / static_cast<double>(width - 1);
      lo = std::min(static_cast<std::size_t>(pos), cols - 1);
      frac = pos - static_cast<double>(lo);
    }
    const std::size_t hi = std::min(lo + 1, cols - 1);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t k = 0; k < ch; ++k) {
        const double a = image(r, lo, k);
        out(r, j, k) = frac == 0.0 ? a : a + (image(r, hi, k) - a) * frac;
      }
    }
  }
  return out;
}

Array3<double> concat_channels(std::span<const Array3<double>> parts) {
  if (parts.empty()) throw Error("nothing to concatenate");
  const std::size_t rows = parts[0].dim0(), width = parts[0].dim1();
  std::size_t total = 0;
  for (const auto& p : parts) {
    if (p.dim0() != rows || p.dim1() != width) {
      throw Error("cannot stack images of shape " + std::to_string(p.dim0()) + "x" +
                  std::to_string(p.dim1()) + " and " + std::to_string(rows) + "x" +
                  std::to_string(width));
    }
    total += p.dim2();
  }
  Array3<double> out(rows, width, total);
  std::size_t offset = 0;
  for (const auto& p : parts) {
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t w = 0; w < width; ++w) {
        for (std::size_t k = 0; k < p.dim2(); ++k) out(r, w, offset + k) = p(r, w, k);
      }
    }
    offset += p.dim2();
  }
  return out;
}

EncodedImage to_encoded_image(const Array3<double>& values, std::vector<ChannelDescriptor> layout) {
  if (layout.size() != values.dim2()) throw Error("channel layout does not match channel count");
  EncodedImage img{Array3<float>(values.dim0(), values.dim1(), values.dim2()), std::move(layout)};
  auto src = values.flat();
  auto dst = img.values.flat();
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[i] = static_cast<float>(std::clamp(src[i], 0.0, 1.0));
  }
  return img;
}

EncodedImage encode_skelemotion(const BodyTrack& track, const ChainOrder& chain,
                                const EncoderConfig& cfg) {
  validate(cfg);
  if (!track.dense()) throw Error("track has missing frames; densify before encoding");

  const bool want_mag = cfg.representation != Representation::orientation;
  const bool want_ori = cfg.representation != Representation::magnitude;
  int longest = 0;
  if (want_mag) longest = std::max(longest, cfg.magnitude_distances.back());
  if (want_ori) longest = std::max(longest, cfg.orientation_distances.back());
  if (track.frame_count() <= static_cast<std::size_t>(longest)) {
    throw Error("track too short: " + std::to_string(track.frame_count()) +
                " frames, at least " + std::to_string(longest + 1) + " required");
  }

  const ChainMatrix s = build_chain_matrix(track, chain);
  std::vector<Array3<double>> parts;
  std::vector<ChannelDescriptor> layout;

  if (want_mag) {
    std::vector<Array3<double>> maps;
    for (int d : cfg.magnitude_distances) maps.push_back(magnitude(motion_difference(s, d)).values);
    if (cfg.normalization == Normalization::per_scale) {
      for (auto& m : maps) m = normalize(m, NormalizeStrategy::magnitude);
    } else {
      double peak = 0.0;
      for (const auto& m : maps) {
        for (double v : m.flat()) peak = std::max(peak, v);
      }
      const double scale = std::max(peak, kNormalizeEpsilon);
      for (auto& m : maps) {
        for (double& v : m.flat()) v /= scale;
      }
    }
    for (std::size_t i = 0; i < maps.size(); ++i) {
      parts.push_back(resize_temporal(maps[i], cfg.target_width));
      layout.push_back({0, ChannelKind::magnitude, cfg.magnitude_distances[i], ""});
    }
  }

  if (want_ori) {
    static constexpr const char* planes[] = {"xy", "yz", "zx"};
    for (int d : cfg.orientation_distances) {
      const MotionTensor motion = motion_difference(s, d);
      const OrientationMap filtered = filter_orientation_tsa(orientation(motion), magnitude(motion),
                                                             cfg.magnitude_threshold, d);
      parts.push_back(
          resize_temporal(normalize(filtered.values, NormalizeStrategy::orientation), cfg.target_width));
      for (const char* plane : planes) layout.push_back({0, ChannelKind::orientation, d, plane});
    }
  }

  return to_encoded_image(concat_channels(parts), std::move(layout));
}

EncodedImage stack_persons(std::span<const EncodedImage> images, std::size_t max_persons) {
  if (images.empty()) throw Error("no person images to stack");
  if (max_persons < 1) throw Error("max_persons must be at least 1");
  if (images.size() > max_persons) {
    throw Error("got " + std::to_string(images.size()) + " person images for max_persons=" +
                std::to_string(max_persons));
  }
  const EncodedImage& first = images[0];
  const std::size_t rows = first.rows(), width = first.width(), per_person = first.channels();
  for (const auto& img : images) {
    if (img.rows() != rows || img.width() != width || img.channels() != per_person) {
      throw Error("person images have mismatched shapes");
    }
  }

  EncodedImage out{Array3<float>(rows, width, per_person * max_persons, 0.0f), {}};
  for (std::size_t p = 0; p < max_persons; ++p) {
    if (p < images.size()) {
      const EncodedImage& img = images[p];
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t w = 0; w < width; ++w) {
          for (std::size_t k = 0; k < per_person; ++k) {
            out.values(r, w, p * per_person + k) = img.values(r, w, k);
          }
        }
      }
      for (auto d : img.layout) {
        d.person = static_cast<int>(p);
        out.layout.push_back(std::move(d));
      }
    } else {
      for (std::size_t k = 0; k < per_person; ++k) {
        out.layout.push_back({static_cast<int>(p), ChannelKind::padding, 0, ""});
      }
    }
  }
  return out;
}

EncodedImage early_fuse(std::span<const EncodedImage> images) {
  if (images.empty()) throw Error("no images to fuse");
  const std::size_t rows = images[0].rows(), width = images[0].width();
  std::size_t total = 0;
  for (const auto& img : images) {
    if (img.rows() != rows || img.width() != width) {
      throw Error("cannot fuse images of shape " + std::to_string(img.rows()) + "x" +
                  std::to_string(img.width()) + " and " + std::to_string(rows) + "x" +
                  std::to_string(width));
    }
    total += img.channels();
  }
  EncodedImage out{Array3<float>(rows, width, total), {}};
  std::size_t offset = 0;
  for (const auto& img : images) {
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t w = 0; w < width; ++w) {
        for (std::size_t k = 0; k < img.channels(); ++k) out.values(r, w, offset + k) = img.values(r, w, k);
      }
    }
    out.layout.insert(out.layout.end(), img.layout.begin(), img.layout.end());
    offset += img.channels();
  }
  return out;
}

}  // namespace skelemotion
