#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "skelemotion/motion_encoder.hpp"

namespace skelemotion {

// TensorFile layout, little-endian throughout:
//
//   offset  size  field
//   0       8     magic "SKMOTNSR"
//   8       2     version (u16, currently 1)
//   10      2     dtype (u16, 1 = IEEE-754 binary32)
//   12      4     rows C (u32)
//   16      4     width W (u32)
//   20      4     channels ch (u32)
//   24      4     layout length L in bytes (u32)
//   28      L     channel layout string (see layout_to_string)
//   28+L    4*C*W*ch  payload, C outermost, channel innermost
inline constexpr char kTensorMagic[8] = {'S', 'K', 'M', 'O', 'T', 'N', 'S', 'R'};
inline constexpr std::uint16_t kTensorVersion = 1;
inline constexpr std::uint16_t kDtypeFloat32 = 1;
inline constexpr std::size_t kTensorFixedHeaderSize = 28;

class TensorFormatError : public Error {
 public:
  enum class Kind {
    not_a_tensor_file,
    unsupported_version,
    unsupported_dtype,
    truncated_header,
    truncated_payload,
    malformed_layout,
    trailing_data,
  };
  TensorFormatError(Kind kind, const std::string& message) : Error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

struct TensorHeader {
  std::uint16_t version = kTensorVersion;
  std::uint16_t dtype = kDtypeFloat32;
  std::uint32_t rows = 0;
  std::uint32_t width = 0;
  std::uint32_t channels = 0;
  std::string layout;

  std::size_t payload_offset() const { return kTensorFixedHeaderSize + layout.size(); }
};

std::string serialize_tensor(const EncodedImage& img);
TensorHeader parse_tensor_header(std::string_view bytes);
EncodedImage deserialize_tensor(std::string_view bytes);

// Writes through a temporary sibling file and renames it into place.
// Returns the number of bytes written.
std::size_t write_tensor(const EncodedImage& img, const std::filesystem::path& path);
EncodedImage read_tensor(const std::filesystem::path& path);

// Reads only as many bytes as the header needs.
TensorHeader read_tensor_header(const std::filesystem::path& path);

// round-half-up of v * 255, clamped to [0, 255].
std::uint8_t quantize(float v);

// Interleaved 8-bit pixels, width W and height C, 1 or 3 channels.
std::vector<std::uint8_t> preview_pixels(const EncodedImage& img, const std::vector<std::size_t>& channels);

// Grayscale for one selected channel, RGB for three.
void export_png(const EncodedImage& img, const std::vector<std::size_t>& channels,
                const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);

}  // namespace skelemotion
