// skelemotion: batch encoder and evaluation utilities for skeleton image
// representations. Run `skelemotion --help` for the command list.

#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "skelemotion/commands.hpp"
#include "skelemotion/tensor_io.hpp"

namespace sm = skelemotion;

namespace {

std::set<int> parse_int_set(const std::string& text) {
  std::set<int> out;
  for (int v : sm::parse_distances(text)) out.insert(v);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Skeleton sequence image encoder"};
  app.require_subcommand(1);

  // encode
  auto* encode = app.add_subcommand("encode", "Encode skeleton files into tensor files");
  std::vector<std::string> inputs;
  std::string out_dir, representation = "skelemotion-mag", distances, config_path, chain_path, manifest;
  double threshold = 0.0;
  std::size_t width = 0, persons = 0, workers = 1;
  std::string normalization;
  encode->add_option("inputs", inputs, "Skeleton files, directories or name patterns")->required();
  encode->add_option("--out", out_dir, "Output directory")->required();
  auto* rep_opt = encode->add_option(
      "--representation", representation,
      "coord, tssi, naive-motion, skelemotion-mag, skelemotion-ori, skelemotion-magori; "
      "a comma list is early-fused");
  auto* dist_opt = encode->add_option("--distances", distances, "Temporal distances, e.g. 5,10,15");
  auto* thr_opt = encode->add_option("--threshold", threshold, "Orientation magnitude threshold");
  auto* width_opt = encode->add_option("--width", width, "Output width in columns");
  auto* persons_opt = encode->add_option("--persons", persons, "Persons stacked per sample");
  auto* norm_opt = encode->add_option("--normalization", normalization, "per-scale or across-scales");
  encode->add_option("--config", config_path, "Encoder configuration file (flags win)");
  encode->add_option("--chain", chain_path, "Chain order file, one joint index per line");
  encode->add_option("--manifest", manifest, "Only encode samples listed in this manifest");
  encode->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);

  // info
  auto* info = app.add_subcommand("info", "Print a tensor file header");
  std::string info_path;
  info->add_option("tensor", info_path)->required();

  // preview
  auto* preview = app.add_subcommand("preview", "Export tensor channels as a PNG");
  std::string preview_path, png_path;
  std::vector<std::size_t> channels{0};
  preview->add_option("tensor", preview_path)->required();
  preview->add_option("--channels", channels, "One (gray) or three (RGB) channel indices")->delimiter(',');
  preview->add_option("--out", png_path)->required();

  // split
  auto* split = app.add_subcommand("split", "Write train/test manifests for a protocol");
  std::string table_path, protocol, train_subjects, split_out;
  int test_camera = 1;
  split->add_option("metadata", table_path, "Metadata table")->required();
  split->add_option("--protocol", protocol, "cross-subject, cross-view or cross-setup")->required();
  split->add_option("--train-subjects", train_subjects, "Comma list of training subject ids");
  split->add_option("--test-camera", test_camera, "Camera held out by cross-view");
  split->add_option("--out", split_out, "Output directory")->required();

  // fuse
  auto* fuse = app.add_subcommand("fuse", "Late-fuse score files and report accuracy");
  std::vector<std::string> score_files;
  std::string labels_path, fused_path;
  fuse->add_option("scores", score_files, "Score files")->required();
  fuse->add_option("--labels", labels_path, "Labels file")->required();
  fuse->add_option("--out", fused_path, "Fused score file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : sm::kExitUsage;
  }

  try {
    if (*encode) {
      sm::JobSpec job;
      job.inputs = inputs;
      job.output_dir = out_dir;
      job.workers = workers;
      if (!config_path.empty()) job.config = sm::parse_encoder_config(sm::read_file(config_path));
      if (*dist_opt) job.config.magnitude_distances = job.config.orientation_distances = sm::parse_distances(distances);
      if (*thr_opt) job.config.magnitude_threshold = threshold;
      if (*width_opt) job.config.target_width = width;
      if (*persons_opt) job.config.max_persons = persons;
      if (*norm_opt) job.config.normalization = sm::parse_normalization(normalization);
      if (*rep_opt || config_path.empty()) {
        job.representations = sm::parse_representation_tags(representation);
      } else {
        switch (job.config.representation) {
          case sm::Representation::magnitude: job.representations = {sm::RepresentationTag::skelemotion_mag}; break;
          case sm::Representation::orientation: job.representations = {sm::RepresentationTag::skelemotion_ori}; break;
          case sm::Representation::magnitude_orientation:
            job.representations = {sm::RepresentationTag::skelemotion_magori};
            break;
        }
      }
      if (!chain_path.empty()) job.chain = sm::parse_chain(sm::read_file(chain_path));
      if (!manifest.empty()) job.manifest = manifest;
      return sm::cmd_encode(job, std::cout, std::cerr);
    }
    if (*info) return sm::cmd_info(info_path, std::cout, std::cerr);
    if (*preview) return sm::cmd_preview(preview_path, channels, png_path, std::cout, std::cerr);
    if (*split) {
      sm::SplitJob job;
      job.metadata_table = table_path;
      job.protocol = sm::parse_protocol(protocol);
      job.output_dir = split_out;
      job.split.test_camera = test_camera;
      if (job.protocol == sm::Protocol::cross_subject) {
        if (train_subjects.empty()) throw sm::Error("cross-subject needs --train-subjects");
        job.split.training_subjects = parse_int_set(train_subjects);
      }
      return sm::cmd_split(job, std::cout, std::cerr);
    }
    if (*fuse) {
      std::vector<std::filesystem::path> paths(score_files.begin(), score_files.end());
      return sm::cmd_fuse(paths, labels_path, fused_path, std::cout, std::cerr);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return sm::kExitUsage;
  }
  return sm::kExitUsage;
}
