#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "skelemotion/array3.hpp"

namespace skelemotion {

// Per-sample class scores, N rows by K classes.
class ScoreMatrix {
 public:
  ScoreMatrix() = default;
  ScoreMatrix(std::vector<std::string> sample_ids, std::vector<std::string> class_labels,
              std::vector<double> scores);

  std::size_t sample_count() const { return sample_ids_.size(); }
  std::size_t class_count() const { return class_labels_.size(); }
  const std::vector<std::string>& sample_ids() const { return sample_ids_; }
  const std::vector<std::string>& class_labels() const { return class_labels_; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(scores_).subspan(i * class_count(), class_count());
  }
  double at(std::size_t i, std::size_t k) const { return scores_[i * class_count() + k]; }
  const std::vector<double>& scores() const { return scores_; }

  // Index of the highest score, lowest index on ties.
  std::size_t predicted_class(std::size_t i) const;

  friend bool operator==(const ScoreMatrix&, const ScoreMatrix&) = default;

 private:
  std::vector<std::string> sample_ids_;
  std::vector<std::string> class_labels_;
  std::vector<double> scores_;
};

// Elementwise arithmetic mean of matrices over identical samples and classes.
ScoreMatrix late_fuse(std::span<const ScoreMatrix> matrices);

struct ClassAccuracy {
  std::string label;
  std::size_t correct = 0;
  std::size_t total = 0;
  double accuracy() const { return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0; }
};

struct AccuracyReport {
  std::vector<ClassAccuracy> per_class;  // classes with at least one sample, in class order
  double mean_accuracy = 0.0;            // unweighted over per_class
  double overall_accuracy = 0.0;         // fraction of all samples
};

AccuracyReport per_class_accuracy(const ScoreMatrix& preds,
                                  const std::map<std::string, std::string>& labels);

// Score file: header `sample_id <class>...`, then `<id> <score>...` per row.
ScoreMatrix parse_score_file(std::string_view text);
std::string write_score_file(const ScoreMatrix& m);

// Labels file: `<sample_id> <class>` per line; an optional `sample_id label`
// header and `#` comment lines are skipped.
std::map<std::string, std::string> parse_labels_file(std::string_view text);

}  // namespace skelemotion
