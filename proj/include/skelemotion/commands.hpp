#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "skelemotion/chain_builder.hpp"
#include "skelemotion/motion_encoder.hpp"
#include "skelemotion/skeleton_data.hpp"

namespace skelemotion {

// Values accepted by --representation.
enum class RepresentationTag {
  coord,
  tssi,
  naive_motion,
  skelemotion_mag,
  skelemotion_ori,
  skelemotion_magori,
};

std::string_view to_string(RepresentationTag tag);
RepresentationTag parse_representation_tag(std::string_view name);

// Comma-separated tags, e.g. "skelemotion-mag,tssi"; several tags are early-fused
// in the given order.
std::vector<RepresentationTag> parse_representation_tags(std::string_view list);

// Encodes the selected persons of one sequence under every tag, stacks persons
// per tag and early-fuses the tags.
EncodedImage encode_sample(const SkeletonSequence& seq, const std::vector<RepresentationTag>& tags,
                           const ChainOrder& chain, const EncoderConfig& cfg);

// Reads a `.skeleton` (NTU) or `.json` (interchange) file. NTU sample ids come
// from the file stem.
SkeletonSequence load_sequence(const std::filesystem::path& path);

// Directories contribute their *.skeleton and *.json files; patterns with
// `*`/`?` in the file name are matched against the parent directory. The
// result is sorted and de-duplicated.
std::vector<std::filesystem::path> expand_inputs(const std::vector<std::string>& inputs);

struct JobSpec {
  std::vector<std::string> inputs;
  std::filesystem::path output_dir;
  EncoderConfig config;
  std::vector<RepresentationTag> representations{RepresentationTag::skelemotion_mag};
  std::optional<std::filesystem::path> manifest;
  ChainOrder chain = default_chain();
  std::size_t workers = 1;
};

struct EncodeSummary {
  std::size_t encoded = 0;
  std::size_t failed = 0;
  std::size_t skipped = 0;  // not listed in the manifest
  double elapsed_seconds = 0.0;
};

// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// Writes <output_dir>/<sample_id>.tensor per input. Per-sample failures are
// logged to `err` as `error: <file>: <reason>` and counted. Returns 0 when
// nothing failed, 1 otherwise and 2 when the output directory is unusable.
int cmd_encode(const JobSpec& job, std::ostream& out, std::ostream& err, EncodeSummary* summary = nullptr);

// Prints `<rows> <width> <channels>` then dtype, version and layout lines.
int cmd_info(const std::filesystem::path& path, std::ostream& out, std::ostream& err);

int cmd_preview(const std::filesystem::path& path, const std::vector<std::size_t>& channels,
                const std::filesystem::path& png, std::ostream& out, std::ostream& err);

struct SplitJob {
  std::filesystem::path metadata_table;
  Protocol protocol = Protocol::cross_subject;
  SplitSpec split;
  std::filesystem::path output_dir;
};

// Writes <output_dir>/<protocol>.train.txt and <protocol>.test.txt.
int cmd_split(const SplitJob& job, std::ostream& out, std::ostream& err);

// Fuses score files, writes the fused table to `fused_out` and prints
// per-class and mean accuracy.
int cmd_fuse(const std::vector<std::filesystem::path>& score_files, const std::filesystem::path& labels,
             const std::filesystem::path& fused_out, std::ostream& out, std::ostream& err);

}  // namespace skelemotion
