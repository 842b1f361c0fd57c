#include "skelemotion/commands.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

#include "skelemotion/baselines.hpp"
#include "skelemotion/fusion_eval.hpp"
#include "skelemotion/tensor_io.hpp"
#include "text_util.hpp"

namespace skelemotion {

namespace fs = std::filesystem;

std::string_view to_string(RepresentationTag tag) {
  switch (tag) {
    case RepresentationTag::coord: return "coord";
    case RepresentationTag::tssi: return "tssi";
    case RepresentationTag::naive_motion: return "naive-motion";
    case RepresentationTag::skelemotion_mag: return "skelemotion-mag";
    case RepresentationTag::skelemotion_ori: return "skelemotion-ori";
    case RepresentationTag::skelemotion_magori: return "skelemotion-magori";
  }
  return "?";
}

RepresentationTag parse_representation_tag(std::string_view name) {
  for (auto tag : {RepresentationTag::coord, RepresentationTag::tssi, RepresentationTag::naive_motion,
                   RepresentationTag::skelemotion_mag, RepresentationTag::skelemotion_ori,
                   RepresentationTag::skelemotion_magori}) {
    if (to_string(tag) == name) return tag;
  }
  throw Error("unknown representation '" + std::string(name) + "'");
}

std::vector<RepresentationTag> parse_representation_tags(std::string_view list) {
  std::vector<RepresentationTag> tags;
  for (auto part : detail::split_on(list, ',')) tags.push_back(parse_representation_tag(detail::trim(part)));
  return tags;
}

namespace {

EncodedImage encode_person(const BodyTrack& body, RepresentationTag tag, const ChainOrder& chain,
                           const EncoderConfig& cfg) {
  EncoderConfig local = cfg;
  switch (tag) {
    case RepresentationTag::coord: return encode_coordinate_image(body, cfg);
    case RepresentationTag::tssi: return encode_tssi(body, chain, cfg);
    case RepresentationTag::naive_motion: return encode_naive_motion(body, cfg);
    case RepresentationTag::skelemotion_mag: local.representation = Representation::magnitude; break;
    case RepresentationTag::skelemotion_ori: local.representation = Representation::orientation; break;
    case RepresentationTag::skelemotion_magori:
      local.representation = Representation::magnitude_orientation;
      break;
  }
  return encode_skelemotion(body, chain, local);
}

}  // namespace

EncodedImage encode_sample(const SkeletonSequence& seq, const std::vector<RepresentationTag>& tags,
                           const ChainOrder& chain, const EncoderConfig& cfg) {
  if (tags.empty()) throw Error("no representation selected");
  validate(cfg);
  const std::vector<BodyTrack> bodies = select_bodies(seq, cfg.max_persons);
  std::vector<EncodedImage> per_tag;
  for (RepresentationTag tag : tags) {
    std::vector<EncodedImage> persons;
    for (const auto& body : bodies) persons.push_back(encode_person(body, tag, chain, cfg));
    per_tag.push_back(stack_persons(persons, cfg.max_persons));
  }
  return per_tag.size() == 1 ? std::move(per_tag[0]) : early_fuse(per_tag);
}

SkeletonSequence load_sequence(const fs::path& path) {
  const std::string text = read_file(path);
  if (path.extension() == ".json") return parse_interchange(text);
  return parse_ntu_skeleton(text, path.stem().string());
}

std::vector<fs::path> expand_inputs(const std::vector<std::string>& inputs) {
  std::set<fs::path> found;
  auto wanted = [](const fs::path& p) {
    return fs::is_regular_file(p) && (p.extension() == ".skeleton" || p.extension() == ".json");
  };
  for (const auto& input : inputs) {
    const fs::path p(input);
    const std::string name = p.filename().string();
    if (name.find_first_of("*?[") != std::string::npos) {
      const fs::path dir = p.has_parent_path() ? p.parent_path() : fs::path(".");
      if (!fs::is_directory(dir)) throw Error("no such directory: " + dir.string());
      for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && fnmatch(name.c_str(), entry.path().filename().c_str(), 0) == 0) {
          found.insert(entry.path());
        }
      }
    } else if (fs::is_directory(p)) {
      for (const auto& entry : fs::directory_iterator(p)) {
        if (wanted(entry.path())) found.insert(entry.path());
      }
    } else {
      // Missing files are kept so the batch reports them as per-sample failures.
      found.insert(p);
    }
  }
  return {found.begin(), found.end()};
}

// ---------------------------------------------------------------------------
// encode

namespace {

bool usable_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!fs::is_directory(dir, ec)) return false;
  const fs::path probe = dir / ".skelemotion-write-probe";
  {
    std::ofstream f(probe);
    if (!f) return false;
  }
  fs::remove(probe, ec);
  return true;
}

bool safe_sample_id(const std::string& id) {
  return !id.empty() && id != "." && id != ".." && id.find('/') == std::string::npos &&
         id.find('\\') == std::string::npos;
}

}  // namespace

int cmd_encode(const JobSpec& job, std::ostream& out, std::ostream& err, EncodeSummary* summary) {
  const auto start = std::chrono::steady_clock::now();
  if (job.workers < 1) {
    err << "error: worker count must be at least 1\n";
    return kExitUsage;
  }
  try {
    validate(job.config);
    validate_chain(job.chain);
    if (job.representations.empty()) throw Error("no representation selected");
    // Early fusion concatenates channels, so every tag must produce the same row count.
    auto rows = [&](RepresentationTag t) {
      const bool joint_rows = t == RepresentationTag::coord || t == RepresentationTag::naive_motion;
      return joint_rows ? kJointCount : job.chain.length();
    };
    for (auto tag : job.representations) {
      if (rows(tag) != rows(job.representations.front())) {
        throw Error("cannot early-fuse " + std::string(to_string(job.representations.front())) + " (" +
                    std::to_string(rows(job.representations.front())) + " rows) with " +
                    std::string(to_string(tag)) + " (" + std::to_string(rows(tag)) + " rows)");
      }
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  if (!usable_directory(job.output_dir)) {
    err << "error: output directory not writable: " << job.output_dir.string() << "\n";
    return kExitUsage;
  }

  std::optional<std::set<std::string>> allowed;
  std::vector<fs::path> files;
  try {
    if (job.manifest) {
      const ManifestSplit m = parse_manifest_split(read_file(*job.manifest));
      allowed.emplace(m.ids.begin(), m.ids.end());
    }
    files = expand_inputs(job.inputs);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  std::mutex mu;  // guards err, claims and the counters below
  std::map<std::string, std::vector<std::size_t>> claims;
  EncodeSummary result;
  std::atomic<std::size_t> next{0};

  auto fail = [&](const fs::path& file, const std::string& reason) {
    std::lock_guard lock(mu);
    ++result.failed;
    err << "error: " << file.string() << ": " << reason << "\n";
  };

  auto worker = [&] {
    for (std::size_t i = next++; i < files.size(); i = next++) {
      const fs::path& file = files[i];
      try {
        const SkeletonSequence seq = load_sequence(file);
        if (!safe_sample_id(seq.sample_id)) throw Error("unusable sample id '" + seq.sample_id + "'");
        if (allowed && !allowed->count(seq.sample_id)) {
          std::lock_guard lock(mu);
          ++result.skipped;
          continue;
        }
        {
          std::lock_guard lock(mu);
          auto& owners = claims[seq.sample_id];
          owners.push_back(i);
          if (owners.size() > 1) continue;  // resolved after the batch
        }
        const EncodedImage img = encode_sample(seq, job.representations, job.chain, job.config);
        write_tensor(img, job.output_dir / (seq.sample_id + ".tensor"));
        std::lock_guard lock(mu);
        ++result.encoded;
      } catch (const std::exception& e) {
        fail(file, e.what());
      }
    }
  };

  {
    const std::size_t n = std::min(job.workers, std::max<std::size_t>(files.size(), 1));
    std::vector<std::jthread> pool;
    pool.reserve(n);
    for (std::size_t w = 0; w < n; ++w) pool.emplace_back(worker);
  }

  // Ids produced by more than one input are dropped entirely so the outcome
  // does not depend on scheduling.
  for (const auto& [id, owners] : claims) {
    if (owners.size() < 2) continue;
    std::error_code ec;
    if (fs::remove(job.output_dir / (id + ".tensor"), ec)) --result.encoded;
    for (std::size_t i : owners) fail(files[i], "duplicate sample id '" + id + "'");
  }

  result.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out << "encoded " << result.encoded << " failed " << result.failed << " skipped " << result.skipped
      << " elapsed " << std::fixed << std::setprecision(3) << result.elapsed_seconds << "s\n";
  out.unsetf(std::ios::fixed);
  if (summary) *summary = result;
  return result.failed == 0 ? kExitOk : kExitFailure;
}

// ---------------------------------------------------------------------------
// info / preview

int cmd_info(const fs::path& path, std::ostream& out, std::ostream& err) {
  try {
    const TensorHeader h = read_tensor_header(path);
    out << h.rows << " " << h.width << " " << h.channels << "\n";
    out << "dtype float32-le\n";
    out << "version " << h.version << "\n";
    out << "layout " << h.layout << "\n";
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << path.string() << ": " << e.what() << "\n";
    return kExitFailure;
  }
}

int cmd_preview(const fs::path& path, const std::vector<std::size_t>& channels, const fs::path& png,
                std::ostream& out, std::ostream& err) {
  try {
    const EncodedImage img = read_tensor(path);
    export_png(img, channels, png);
    out << "wrote " << png.string() << " (" << img.width() << "x" << img.rows() << ", "
        << (channels.size() == 1 ? "gray" : "rgb") << ")\n";
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

// ---------------------------------------------------------------------------
// split

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw IoError("failed writing " + path.string());
}

}  // namespace

int cmd_split(const SplitJob& job, std::ostream& out, std::ostream& err) {
  try {
    const auto samples = parse_metadata_table(read_file(job.metadata_table));
    const DatasetManifest m = build_manifest(samples, job.protocol, job.split);
    for (const auto& w : m.warnings) err << "warning: " << w << "\n";
    std::error_code ec;
    fs::create_directories(job.output_dir, ec);
    const std::string stem(to_string(job.protocol));
    const fs::path train = job.output_dir / (stem + ".train.txt");
    const fs::path test = job.output_dir / (stem + ".test.txt");
    write_text(train, write_manifest_split(job.protocol, "train", m.train_ids));
    write_text(test, write_manifest_split(job.protocol, "test", m.test_ids));
    out << "train " << m.train_ids.size() << " " << train.string() << "\n";
    out << "test " << m.test_ids.size() << " " << test.string() << "\n";
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

// ---------------------------------------------------------------------------
// fuse

int cmd_fuse(const std::vector<fs::path>& score_files, const fs::path& labels, const fs::path& fused_out,
             std::ostream& out, std::ostream& err) {
  try {
    if (score_files.empty()) throw Error("no score files given");
    std::vector<ScoreMatrix> inputs;
    for (const auto& p : score_files) {
      try {
        inputs.push_back(parse_score_file(read_file(p)));
      } catch (const ParseError& e) {
        throw Error(p.string() + ": " + e.what());
      }
    }
    const ScoreMatrix fused = late_fuse(inputs);
    write_text(fused_out, write_score_file(fused));
    const AccuracyReport report = per_class_accuracy(fused, parse_labels_file(read_file(labels)));
    out << std::setprecision(6);
    for (const auto& c : report.per_class) {
      out << "class " << c.label << " " << c.correct << "/" << c.total << " " << c.accuracy() << "\n";
    }
    out << "mean_accuracy " << report.mean_accuracy << "\n";
    out << "overall_accuracy " << report.overall_accuracy << "\n";
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace skelemotion
