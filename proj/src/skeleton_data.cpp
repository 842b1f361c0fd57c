#include "skelemotion/skeleton_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <regex>
#include <sstream>

#include "json.hpp"
#include "text_util.hpp"

namespace skelemotion {

using detail::LineReader;
using detail::parse_double;
using detail::parse_integer;
using detail::split_ws;

ParseError::ParseError(std::size_t line, const std::string& message)
    : Error(line > 0 ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}

std::size_t BodyTrack::observed_count() const {
  return static_cast<std::size_t>(std::count(present.begin(), present.end(), true));
}

bool BodyTrack::dense() const {
  return std::all_of(present.begin(), present.end(), [](bool p) { return p; });
}

namespace {

bool finite(const JointPosition& p) {
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

}  // namespace

void validate(const SkeletonSequence& seq) {
  if (seq.frame_count < 1) throw Error("sequence has no frames");
  if (seq.bodies.empty()) throw Error("sequence has no bodies");
  for (const auto& body : seq.bodies) {
    const std::string who = "body " + std::to_string(body.body_id);
    if (body.frames.size() != seq.frame_count || body.present.size() != seq.frame_count) {
      throw Error(who + ": frame array length " + std::to_string(body.frames.size()) +
                  " does not match sequence frame count " + std::to_string(seq.frame_count));
    }
    if (body.observed_count() == 0) throw Error(who + ": no observed frames");
    for (std::size_t t = 0; t < body.frames.size(); ++t) {
      for (const auto& joint : body.frames[t]) {
        if (!finite(joint)) {
          throw Error(who + ": non-finite coordinate at frame " + std::to_string(t + 1));
        }
      }
    }
  }
}

// ---------------------------------------------------------------------------
// NTU .skeleton

SampleMetadata parse_ntu_sample_name(std::string_view sample_id) {
  static const std::regex pattern(R"(S(\d{3})C(\d{3})P(\d{3})R(\d{3})A(\d{3}))");
  std::match_results<std::string_view::const_iterator> m;
  SampleMetadata meta;
  if (!std::regex_search(sample_id.begin(), sample_id.end(), m, pattern)) return meta;
  meta.setup = std::stoi(m[1].str());
  meta.camera = std::stoi(m[2].str());
  meta.subject = std::stoi(m[3].str());
  meta.replication = std::stoi(m[4].str());
  meta.action = std::stoi(m[5].str());
  return meta;
}

SkeletonSequence parse_ntu_skeleton(std::string_view text, std::string sample_id) {
  LineReader reader(text);

  auto next = [&](const std::string& what) {
    auto line = reader.next_nonblank();
    if (!line) {
      throw ParseError(reader.line_number(), "unexpected end of file while reading " + what);
    }
    return split_ws(*line);
  };
  auto count_field = [&](const std::vector<std::string_view>& fields, const std::string& what) {
    if (fields.size() != 1) throw ParseError(reader.line_number(), "expected " + what);
    auto value = parse_integer<long long>(fields[0]);
    if (!value || *value < 0) {
      throw ParseError(reader.line_number(), "invalid " + what + " '" + std::string(fields[0]) + "'");
    }
    return static_cast<std::size_t>(*value);
  };

  const std::size_t frame_total = count_field(next("frame count"), "frame count");
  if (frame_total == 0) throw ParseError(reader.line_number(), "frame count must be positive");

  SkeletonSequence seq;
  seq.sample_id = std::move(sample_id);
  seq.frame_count = frame_total;
  seq.metadata = parse_ntu_sample_name(seq.sample_id);
  std::map<std::uint64_t, std::size_t> index_of;

  for (std::size_t f = 0; f < frame_total; ++f) {
    const std::string frame_tag = "frame " + std::to_string(f + 1);
    const std::size_t body_count = count_field(next(frame_tag + " body count"), frame_tag + " body count");

    for (std::size_t b = 0; b < body_count; ++b) {
      auto header = next(frame_tag + " body header");
      auto id = parse_integer<std::uint64_t>(header[0]);
      if (!id) {
        throw ParseError(reader.line_number(),
                         frame_tag + ": invalid body id '" + std::string(header[0]) + "'");
      }

      auto fields = next(frame_tag + " joints");
      if (fields.size() == 1) {
        const std::size_t joints = count_field(fields, frame_tag + " joint count");
        if (joints != kJointCount) {
          throw ParseError(reader.line_number(), frame_tag + ": body has " + std::to_string(joints) +
                                                     " joints, expected " + std::to_string(kJointCount));
        }
        fields = next(frame_tag + " joint 1");
      }

      JointFrame joints{};
      for (std::size_t j = 0; j < kJointCount; ++j) {
        if (j > 0) fields = next(frame_tag + " joint " + std::to_string(j + 1));
        if (fields.size() < 3) {
          throw ParseError(reader.line_number(), frame_tag + ": expected joint line " +
                                                     std::to_string(j + 1) + " of " +
                                                     std::to_string(kJointCount) + ", found " +
                                                     std::to_string(fields.size()) + " field(s)");
        }
        double xyz[3];
        for (int a = 0; a < 3; ++a) {
          auto v = parse_double(fields[a]);
          if (!v) {
            throw ParseError(reader.line_number(), frame_tag + ": non-numeric coordinate '" +
                                                       std::string(fields[a]) + "'");
          }
          if (!std::isfinite(*v)) {
            throw ParseError(reader.line_number(), frame_tag + ": non-finite coordinate");
          }
          xyz[a] = *v;
        }
        joints[j] = {xyz[0], xyz[1], xyz[2]};
      }

      auto [it, inserted] = index_of.try_emplace(*id, seq.bodies.size());
      if (inserted) {
        BodyTrack track;
        track.body_id = *id;
        track.frames.assign(frame_total, JointFrame{});
        track.present.assign(frame_total, false);
        seq.bodies.push_back(std::move(track));
      }
      BodyTrack& track = seq.bodies[it->second];
      if (track.present[f]) {
        throw ParseError(reader.line_number(),
                         frame_tag + ": body " + std::to_string(*id) + " appears twice");
      }
      track.frames[f] = joints;
      track.present[f] = true;
    }
  }

  if (reader.next_nonblank()) {
    throw ParseError(reader.line_number(), "trailing data after " + std::to_string(frame_total) + " frames");
  }
  if (seq.bodies.empty()) throw Error("sequence has no bodies");
  return seq;
}

// ---------------------------------------------------------------------------
// Interchange

namespace {

using nlohmann::json;

json metadata_to_json(const SampleMetadata& m) {
  auto field = [](const std::optional<int>& v) { return v ? json(*v) : json(nullptr); };
  return json{{"action", field(m.action)},   {"subject", field(m.subject)},
              {"camera", field(m.camera)},   {"setup", field(m.setup)},
              {"replication", field(m.replication)}};
}

std::optional<int> optional_int(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_number_integer()) throw Error(std::string("metadata.") + key + " must be an integer or null");
  return it->get<int>();
}

const json& require(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw Error(std::string("missing field '") + key + "'");
  return *it;
}

}  // namespace

std::string write_interchange(const SkeletonSequence& seq) {
  json bodies = json::array();
  for (const auto& body : seq.bodies) {
    json frames = json::array();
    for (std::size_t t = 0; t < body.frames.size(); ++t) {
      if (!body.present[t]) {
        frames.push_back(nullptr);
        continue;
      }
      json joints = json::array();
      for (const auto& p : body.frames[t]) joints.push_back({p.x, p.y, p.z});
      frames.push_back(std::move(joints));
    }
    bodies.push_back({{"body_id", body.body_id}, {"frames", std::move(frames)}});
  }
  json doc{{"format", "skelemotion-sequence"},
           {"version", 1},
           {"sample_id", seq.sample_id},
           {"frame_count", seq.frame_count},
           {"metadata", metadata_to_json(seq.metadata)},
           {"bodies", std::move(bodies)}};
  return doc.dump(1) + "\n";
}

SkeletonSequence parse_interchange(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("invalid JSON: ") + e.what());
  }
  try {
    if (!doc.is_object()) throw Error("document must be a JSON object");
    if (auto it = doc.find("format"); it != doc.end() && *it != "skelemotion-sequence") {
      throw Error("unknown format tag");
    }
    if (auto it = doc.find("version"); it != doc.end() && *it != 1) {
      throw Error("unsupported version");
    }

    SkeletonSequence seq;
    seq.sample_id = require(doc, "sample_id").get<std::string>();
    const json& fc = require(doc, "frame_count");
    if (!fc.is_number_unsigned() || fc.get<std::size_t>() == 0) {
      throw Error("frame_count must be a positive integer");
    }
    seq.frame_count = fc.get<std::size_t>();

    if (auto it = doc.find("metadata"); it != doc.end() && !it->is_null()) {
      if (!it->is_object()) throw Error("metadata must be an object");
      seq.metadata.action = optional_int(*it, "action");
      seq.metadata.subject = optional_int(*it, "subject");
      seq.metadata.camera = optional_int(*it, "camera");
      seq.metadata.setup = optional_int(*it, "setup");
      seq.metadata.replication = optional_int(*it, "replication");
    }

    const json& bodies = require(doc, "bodies");
    if (!bodies.is_array()) throw Error("bodies must be an array");
    if (bodies.empty()) throw Error("sequence has no bodies");

    for (const auto& b : bodies) {
      BodyTrack track;
      const json& id = require(b, "body_id");
      if (!id.is_number_unsigned()) throw Error("body_id must be a non-negative integer");
      track.body_id = id.get<std::uint64_t>();
      const std::string who = "body " + std::to_string(track.body_id);

      const json& frames = require(b, "frames");
      if (!frames.is_array() || frames.size() != seq.frame_count) {
        throw Error(who + ": frames must be an array of frame_count entries");
      }
      for (std::size_t t = 0; t < frames.size(); ++t) {
        const json& frame = frames[t];
        JointFrame joints{};
        if (frame.is_null()) {
          track.frames.push_back(joints);
          track.present.push_back(false);
          continue;
        }
        if (!frame.is_array() || frame.size() != kJointCount) {
          throw Error(who + ": frame " + std::to_string(t + 1) + " must hold " +
                      std::to_string(kJointCount) + " joints");
        }
        for (std::size_t j = 0; j < kJointCount; ++j) {
          const json& p = frame[j];
          if (!p.is_array() || p.size() != 3 || !p[0].is_number() || !p[1].is_number() ||
              !p[2].is_number()) {
            throw Error(who + ": frame " + std::to_string(t + 1) + " joint " + std::to_string(j + 1) +
                        " must be [x, y, z]");
          }
          joints[j] = {p[0].get<double>(), p[1].get<double>(), p[2].get<double>()};
        }
        track.frames.push_back(joints);
        track.present.push_back(true);
      }
      seq.bodies.push_back(std::move(track));
    }
    validate(seq);
    return seq;
  } catch (const json::exception& e) {
    throw Error(std::string("schema violation: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Body selection

BodyTrack densify(const BodyTrack& track) {
  const std::size_t n = track.frames.size();
  auto first = std::find(track.present.begin(), track.present.end(), true);
  if (first == track.present.end()) {
    throw Error("body " + std::to_string(track.body_id) + " has no observed frames");
  }
  BodyTrack out = track;
  const JointFrame* last = &track.frames[static_cast<std::size_t>(first - track.present.begin())];
  for (std::size_t t = 0; t < n; ++t) {
    if (track.present[t]) {
      last = &track.frames[t];
    } else {
      out.frames[t] = *last;
    }
    out.present[t] = true;
  }
  return out;
}

double motion_energy(const BodyTrack& track) {
  const BodyTrack dense = track.dense() ? track : densify(track);
  double energy = 0.0;
  for (std::size_t t = 1; t < dense.frames.size(); ++t) {
    for (std::size_t j = 0; j < kJointCount; ++j) {
      const auto& a = dense.frames[t - 1][j];
      const auto& b = dense.frames[t][j];
      const double dx = b.x - a.x, dy = b.y - a.y, dz = b.z - a.z;
      energy += dx * dx + dy * dy + dz * dz;
    }
  }
  return energy;
}

std::vector<BodyTrack> select_bodies(const SkeletonSequence& seq, std::size_t max_bodies) {
  if (max_bodies < 1) throw Error("max_bodies must be at least 1");
  if (seq.bodies.empty()) throw Error("sequence has no bodies");

  struct Ranked {
    double energy;
    BodyTrack track;
  };
  std::vector<Ranked> ranked;
  ranked.reserve(seq.bodies.size());
  for (const auto& body : seq.bodies) {
    BodyTrack dense = densify(body);
    const double e = motion_energy(dense);
    ranked.push_back({e, std::move(dense)});
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    if (a.energy != b.energy) return a.energy > b.energy;
    return a.track.body_id < b.track.body_id;
  });

  std::vector<BodyTrack> out;
  const std::size_t n = std::min(max_bodies, ranked.size());
  for (std::size_t i = 0; i < n; ++i) out.push_back(std::move(ranked[i].track));
  return out;
}

// ---------------------------------------------------------------------------
// Manifests

std::string_view to_string(Protocol p) {
  switch (p) {
    case Protocol::cross_subject: return "cross-subject";
    case Protocol::cross_view: return "cross-view";
    case Protocol::cross_setup: return "cross-setup";
  }
  return "unknown";
}

Protocol parse_protocol(std::string_view name) {
  if (name == "cross-subject") return Protocol::cross_subject;
  if (name == "cross-view") return Protocol::cross_view;
  if (name == "cross-setup") return Protocol::cross_setup;
  throw Error("unknown protocol '" + std::string(name) + "'");
}

DatasetManifest build_manifest(const std::vector<SampleInfo>& samples, Protocol protocol,
                               const SplitSpec& split) {
  const char* field = protocol == Protocol::cross_subject ? "subject"
                      : protocol == Protocol::cross_view  ? "camera"
                                                          : "setup";
  auto key_of = [&](const SampleMetadata& m) -> std::optional<int> {
    switch (protocol) {
      case Protocol::cross_subject: return m.subject;
      case Protocol::cross_view: return m.camera;
      case Protocol::cross_setup: return m.setup;
    }
    return std::nullopt;
  };

  std::vector<std::string> missing;
  std::set<std::string> seen;
  for (const auto& s : samples) {
    if (!seen.insert(s.sample_id).second) throw Error("duplicate sample id '" + s.sample_id + "'");
    if (!key_of(s.metadata)) missing.push_back(s.sample_id);
  }
  if (!missing.empty()) {
    std::string msg = std::string("missing ") + field + " metadata for sample(s):";
    for (const auto& id : missing) msg += " " + id;
    throw Error(msg);
  }

  DatasetManifest manifest;
  manifest.protocol = protocol;
  for (const auto& s : samples) {
    const int key = *key_of(s.metadata);
    bool train = false;
    switch (protocol) {
      case Protocol::cross_subject: train = split.training_subjects.count(key) > 0; break;
      case Protocol::cross_view: train = key != split.test_camera; break;
      case Protocol::cross_setup: train = key % 2 == 0; break;
    }
    (train ? manifest.train_ids : manifest.test_ids).push_back(s.sample_id);
  }
  if (manifest.train_ids.empty()) manifest.warnings.push_back("training split is empty");
  if (manifest.test_ids.empty()) manifest.warnings.push_back("test split is empty");
  return manifest;
}

std::string write_manifest_split(Protocol protocol, std::string_view split,
                                 const std::vector<std::string>& ids) {
  std::ostringstream out;
  out << "# protocol: " << to_string(protocol) << "\n# split: " << split << "\n";
  for (const auto& id : ids) out << id << "\n";
  return out.str();
}

ManifestSplit parse_manifest_split(std::string_view text) {
  LineReader reader(text);
  ManifestSplit result;
  bool have_protocol = false;
  while (auto line = reader.next_nonblank()) {
    std::string_view s = detail::trim(*line);
    if (s.starts_with("#")) {
      s = detail::trim(s.substr(1));
      if (s.starts_with("protocol:")) {
        result.protocol = parse_protocol(detail::trim(s.substr(9)));
        have_protocol = true;
      } else if (s.starts_with("split:")) {
        result.split = std::string(detail::trim(s.substr(6)));
      }
      continue;
    }
    result.ids.emplace_back(s);
  }
  if (!have_protocol) throw ParseError(0, "manifest has no '# protocol:' header");
  return result;
}

std::vector<SampleInfo> parse_metadata_table(std::string_view text) {
  LineReader reader(text);
  auto header_line = reader.next_nonblank();
  if (!header_line) throw ParseError(0, "metadata table is empty");
  const auto header = split_ws(*header_line);
  const std::size_t header_lineno = reader.line_number();

  static const std::vector<std::string_view> known = {"sample_id", "action", "subject",
                                                      "camera", "setup", "replication"};
  std::vector<int> column_field(header.size(), -1);
  int id_column = -1;
  std::set<int> provided;
  for (std::size_t c = 0; c < header.size(); ++c) {
    auto it = std::find(known.begin(), known.end(), header[c]);
    if (it == known.end()) continue;
    column_field[c] = static_cast<int>(it - known.begin());
    provided.insert(column_field[c]);
    if (column_field[c] == 0) id_column = static_cast<int>(c);
  }
  if (id_column < 0) throw ParseError(header_lineno, "metadata table has no sample_id column");

  std::vector<SampleInfo> samples;
  while (auto line = reader.next_nonblank()) {
    const auto fields = split_ws(*line);
    if (fields.size() != header.size()) {
      throw ParseError(reader.line_number(), "expected " + std::to_string(header.size()) +
                                                 " columns, found " + std::to_string(fields.size()));
    }
    SampleInfo info;
    info.sample_id = std::string(fields[static_cast<std::size_t>(id_column)]);
    const SampleMetadata from_name = parse_ntu_sample_name(info.sample_id);
    std::optional<int>* slots[] = {nullptr, &info.metadata.action, &info.metadata.subject,
                                   &info.metadata.camera, &info.metadata.setup,
                                   &info.metadata.replication};
    const std::optional<int>* named[] = {nullptr, &from_name.action, &from_name.subject,
                                         &from_name.camera, &from_name.setup,
                                         &from_name.replication};
    for (int f = 1; f < 6; ++f) {
      if (!provided.count(f)) *slots[f] = *named[f];
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const int f = column_field[c];
      if (f <= 0 || fields[c] == "-") continue;
      auto v = parse_integer<int>(fields[c]);
      if (!v) {
        throw ParseError(reader.line_number(), "column " + std::string(header[c]) +
                                                   ": invalid integer '" + std::string(fields[c]) + "'");
      }
      *slots[f] = *v;
    }
    samples.push_back(std::move(info));
  }
  return samples;
}

}  // namespace skelemotion
