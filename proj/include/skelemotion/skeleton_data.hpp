#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "skelemotion/array3.hpp"

namespace skelemotion {

// Kinect v2 skeletons, as distributed with NTU RGB+D 60/120.
inline constexpr std::size_t kJointCount = 25;

// Camera-space joint coordinate in meters.
struct JointPosition {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const JointPosition&, const JointPosition&) = default;
};

using JointFrame = std::array<JointPosition, kJointCount>;

// Raised by the text parsers. line() is 1-based, 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// One tracked person. frames is aligned to the global frame index of the
// owning sequence; present[t] is false where the body was not detected, and
// the corresponding frame holds zeros.
struct BodyTrack {
  std::uint64_t body_id = 0;
  std::vector<JointFrame> frames;
  std::vector<bool> present;

  std::size_t frame_count() const { return frames.size(); }
  std::size_t observed_count() const;
  bool dense() const;

  friend bool operator==(const BodyTrack&, const BodyTrack&) = default;
};

struct SampleMetadata {
  std::optional<int> action;
  std::optional<int> subject;
  std::optional<int> camera;
  std::optional<int> setup;
  std::optional<int> replication;

  friend bool operator==(const SampleMetadata&, const SampleMetadata&) = default;
};

struct SkeletonSequence {
  std::string sample_id;
  std::size_t frame_count = 0;
  std::vector<BodyTrack> bodies;
  SampleMetadata metadata;

  friend bool operator==(const SkeletonSequence&, const SkeletonSequence&) = default;
};

// Parses the NTU `.skeleton` text layout. Each body block is a header line
// whose first field is the body id, an optional joint-count line, then 25 joint
// lines whose first three fields are x y z. Bodies are matched across frames by id.
SkeletonSequence parse_ntu_skeleton(std::string_view text, std::string sample_id = "");

// Decodes the NTU file naming scheme SsssCcccPpppRrrrAaaa. Returns an empty
// metadata record for names that do not follow it.
SampleMetadata parse_ntu_sample_name(std::string_view sample_id);

// JSON interchange document, see README for the field list.
SkeletonSequence parse_interchange(std::string_view text);
std::string write_interchange(const SkeletonSequence& seq);

// Structural checks shared by both parsers; throws Error.
void validate(const SkeletonSequence& seq);

// Fills missing frames with the last observed frame; frames before the first
// observation take the first observed frame.
BodyTrack densify(const BodyTrack& track);

// Sum over consecutive frames and joints of the squared displacement, computed
// on the densified track.
double motion_energy(const BodyTrack& track);

// Up to max_bodies densified tracks, highest motion energy first, ties by
// ascending body_id.
std::vector<BodyTrack> select_bodies(const SkeletonSequence& seq, std::size_t max_bodies);

// Dataset protocols.

enum class Protocol { cross_subject, cross_view, cross_setup };

std::string_view to_string(Protocol p);
Protocol parse_protocol(std::string_view name);

struct SampleInfo {
  std::string sample_id;
  SampleMetadata metadata;
};

struct SplitSpec {
  std::set<int> training_subjects;  // cross-subject
  int test_camera = 1;              // cross-view
};

struct DatasetManifest {
  Protocol protocol = Protocol::cross_subject;
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
  std::vector<std::string> warnings;
};

DatasetManifest build_manifest(const std::vector<SampleInfo>& samples, Protocol protocol,
                               const SplitSpec& split);

// Manifest split file: `# protocol: <name>` and `# split: train|test` header
// lines followed by one sample id per line.
std::string write_manifest_split(Protocol protocol, std::string_view split,
                                 const std::vector<std::string>& ids);

struct ManifestSplit {
  Protocol protocol = Protocol::cross_subject;
  std::string split;
  std::vector<std::string> ids;
};

ManifestSplit parse_manifest_split(std::string_view text);

// Whitespace-separated table with a header row. Recognised columns: sample_id
// (required), action, subject, camera, setup, replication. `-` marks a missing
// value. Columns absent from the table are filled from the NTU sample name.
std::vector<SampleInfo> parse_metadata_table(std::string_view text);

}  // namespace skelemotion
