#include "skelemotion/tensor_io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace skelemotion {

namespace {

static_assert(sizeof(float) == 4 && std::numeric_limits<float>::is_iec559);

using Kind = TensorFormatError::Kind;

template <class UInt>
void put(std::string& out, UInt v) {
  for (std::size_t i = 0; i < sizeof(UInt); ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

template <class UInt>
UInt get(std::string_view in, std::size_t offset) {
  UInt v = 0;
  for (std::size_t i = 0; i < sizeof(UInt); ++i) {
    v |= static_cast<UInt>(static_cast<unsigned char>(in[offset + i])) << (8 * i);
  }
  return v;
}

std::uint32_t checked_u32(std::size_t v, const char* what) {
  if (v > 0xFFFFFFFFu) throw Error(std::string(what) + " does not fit in 32 bits");
  return static_cast<std::uint32_t>(v);
}

}  // namespace

std::string serialize_tensor(const EncodedImage& img) {
  const std::string layout = layout_to_string(img.layout);
  if (img.layout.size() != img.channels()) throw Error("channel layout does not match channel count");
  std::string out;
  out.reserve(kTensorFixedHeaderSize + layout.size() + img.values.size() * 4);
  out.append(kTensorMagic, sizeof(kTensorMagic));
  put<std::uint16_t>(out, kTensorVersion);
  put<std::uint16_t>(out, kDtypeFloat32);
  put<std::uint32_t>(out, checked_u32(img.rows(), "rows"));
  put<std::uint32_t>(out, checked_u32(img.width(), "width"));
  put<std::uint32_t>(out, checked_u32(img.channels(), "channels"));
  put<std::uint32_t>(out, checked_u32(layout.size(), "layout"));
  out += layout;
  for (float v : img.values.flat()) put<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

TensorHeader parse_tensor_header(std::string_view bytes) {
  if (bytes.size() < sizeof(kTensorMagic) ||
      std::memcmp(bytes.data(), kTensorMagic, sizeof(kTensorMagic)) != 0) {
    // A short prefix of the magic is still a (truncated) tensor file.
    if (bytes.size() < sizeof(kTensorMagic) &&
        std::memcmp(bytes.data(), kTensorMagic, bytes.size()) == 0 && !bytes.empty()) {
      throw TensorFormatError(Kind::truncated_header, "unexpected end of header");
    }
    throw TensorFormatError(Kind::not_a_tensor_file, "not a tensor file");
  }
  if (bytes.size() < 10) throw TensorFormatError(Kind::truncated_header, "unexpected end of header");
  TensorHeader h;
  h.version = get<std::uint16_t>(bytes, 8);
  if (h.version != kTensorVersion) {
    throw TensorFormatError(Kind::unsupported_version,
                            "unsupported version " + std::to_string(h.version));
  }
  if (bytes.size() < kTensorFixedHeaderSize) {
    throw TensorFormatError(Kind::truncated_header, "unexpected end of header");
  }
  h.dtype = get<std::uint16_t>(bytes, 10);
  if (h.dtype != kDtypeFloat32) {
    throw TensorFormatError(Kind::unsupported_dtype, "unsupported dtype " + std::to_string(h.dtype));
  }
  h.rows = get<std::uint32_t>(bytes, 12);
  h.width = get<std::uint32_t>(bytes, 16);
  h.channels = get<std::uint32_t>(bytes, 20);
  const std::uint32_t layout_len = get<std::uint32_t>(bytes, 24);
  if (bytes.size() - kTensorFixedHeaderSize < layout_len) {
    throw TensorFormatError(Kind::truncated_header, "unexpected end of header");
  }
  h.layout = std::string(bytes.substr(kTensorFixedHeaderSize, layout_len));
  return h;
}

EncodedImage deserialize_tensor(std::string_view bytes) {
  const TensorHeader h = parse_tensor_header(bytes);
  std::vector<ChannelDescriptor> layout;
  try {
    layout = parse_layout(h.layout);
  } catch (const Error& e) {
    throw TensorFormatError(Kind::malformed_layout, std::string("malformed channel layout: ") + e.what());
  }
  if (layout.size() != h.channels) {
    throw TensorFormatError(Kind::malformed_layout, "channel layout lists " + std::to_string(layout.size()) +
                                                        " channels, header says " +
                                                        std::to_string(h.channels));
  }
  const std::size_t count = std::size_t{h.rows} * h.width * h.channels;
  const std::size_t offset = h.payload_offset();
  const std::size_t available = bytes.size() - offset;
  if (available / 4 < count) throw TensorFormatError(Kind::truncated_payload, "unexpected end of payload");
  if (available != count * 4) throw TensorFormatError(Kind::trailing_data, "trailing bytes after payload");

  EncodedImage img{Array3<float>(h.rows, h.width, h.channels), std::move(layout)};
  auto dst = img.values.flat();
  for (std::size_t i = 0; i < count; ++i) dst[i] = std::bit_cast<float>(get<std::uint32_t>(bytes, offset + 4 * i));
  return img;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("failed reading " + path.string());
  return std::move(buf).str();
}

std::size_t write_tensor(const EncodedImage& img, const std::filesystem::path& path) {
  const std::string bytes = serialize_tensor(img);
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw IoError("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot rename into " + path.string());
  }
  return bytes.size();
}

EncodedImage read_tensor(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  try {
    return deserialize_tensor(bytes);
  } catch (const TensorFormatError& e) {
    throw TensorFormatError(e.kind(), path.string() + ": " + e.what());
  }
}

TensorHeader read_tensor_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string head(kTensorFixedHeaderSize, '\0');
  in.read(head.data(), static_cast<std::streamsize>(head.size()));
  head.resize(static_cast<std::size_t>(in.gcount()));
  if (head.size() == kTensorFixedHeaderSize) {
    const std::uint32_t layout_len = get<std::uint32_t>(head, 24);
    std::string layout(layout_len, '\0');
    in.read(layout.data(), static_cast<std::streamsize>(layout.size()));
    layout.resize(static_cast<std::size_t>(in.gcount()));
    head += layout;
  }
  return parse_tensor_header(head);
}

std::uint8_t quantize(float v) {
  const double scaled = std::floor(static_cast<double>(v) * 255.0 + 0.5);
  return static_cast<std::uint8_t>(std::clamp(scaled, 0.0, 255.0));
}

std::vector<std::uint8_t> preview_pixels(const EncodedImage& img, const std::vector<std::size_t>& channels) {
  if (channels.size() != 1 && channels.size() != 3) {
    throw Error("preview needs 1 or 3 channels, got " + std::to_string(channels.size()));
  }
  for (std::size_t c : channels) {
    if (c >= img.channels()) {
      throw Error("channel " + std::to_string(c) + " out of range for " +
                  std::to_string(img.channels()) + "-channel image");
    }
  }
  std::vector<std::uint8_t> pixels;
  pixels.reserve(img.rows() * img.width() * channels.size());
  for (std::size_t r = 0; r < img.rows(); ++r) {
    for (std::size_t w = 0; w < img.width(); ++w) {
      for (std::size_t c : channels) pixels.push_back(quantize(img.values(r, w, c)));
    }
  }
  return pixels;
}

void export_png(const EncodedImage& img, const std::vector<std::size_t>& channels,
                const std::filesystem::path& path) {
  const std::vector<std::uint8_t> pixels = preview_pixels(img, channels);
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.rows());
  image.format = channels.size() == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&image, path.string().c_str(), 0, pixels.data(), 0, nullptr)) {
    const std::string reason = image.message;
    png_image_free(&image);
    throw IoError("cannot write " + path.string() + ": " + reason);
  }
}

}  // namespace skelemotion
