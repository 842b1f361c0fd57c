#include "skelemotion/fusion_eval.hpp"

#include <cmath>
#include <cstdio>
#include <set>

#include "skelemotion/skeleton_data.hpp"
#include "text_util.hpp"

namespace skelemotion {

ScoreMatrix::ScoreMatrix(std::vector<std::string> sample_ids, std::vector<std::string> class_labels,
                         std::vector<double> scores)
    : sample_ids_(std::move(sample_ids)), class_labels_(std::move(class_labels)), scores_(std::move(scores)) {
  if (class_labels_.size() < 2) throw Error("score matrix needs at least 2 classes");
  if (scores_.size() != sample_ids_.size() * class_labels_.size()) {
    throw Error("score matrix has " + std::to_string(scores_.size()) + " values for " +
                std::to_string(sample_ids_.size()) + " samples x " +
                std::to_string(class_labels_.size()) + " classes");
  }
}

std::size_t ScoreMatrix::predicted_class(std::size_t i) const {
  const auto r = row(i);
  std::size_t best = 0;
  for (std::size_t k = 1; k < r.size(); ++k) {
    if (r[k] > r[best]) best = k;
  }
  return best;
}

ScoreMatrix late_fuse(std::span<const ScoreMatrix> matrices) {
  if (matrices.empty()) throw Error("no score matrices to fuse");
  const ScoreMatrix& ref = matrices[0];
  for (std::size_t m = 1; m < matrices.size(); ++m) {
    const ScoreMatrix& other = matrices[m];
    if (other.class_labels() != ref.class_labels()) {
      for (std::size_t k = 0; k < std::max(ref.class_count(), other.class_count()); ++k) {
        const std::string a = k < ref.class_count() ? ref.class_labels()[k] : "<none>";
        const std::string b = k < other.class_count() ? other.class_labels()[k] : "<none>";
        if (a != b) {
          throw Error("class mismatch in input " + std::to_string(m + 1) + " at column " +
                      std::to_string(k + 1) + ": '" + a + "' vs '" + b + "'");
        }
      }
    }
    if (other.sample_ids() != ref.sample_ids()) {
      for (std::size_t i = 0; i < std::max(ref.sample_count(), other.sample_count()); ++i) {
        const std::string a = i < ref.sample_count() ? ref.sample_ids()[i] : "<none>";
        const std::string b = i < other.sample_count() ? other.sample_ids()[i] : "<none>";
        if (a != b) {
          throw Error("sample mismatch in input " + std::to_string(m + 1) + " at row " +
                      std::to_string(i + 1) + ": '" + a + "' vs '" + b + "'");
        }
      }
    }
  }

  // Running mean: identical inputs come back bit for bit, which sum / k does not
  // guarantee for k that are not powers of two.
  std::vector<double> mean = ref.scores();
  for (std::size_t m = 1; m < matrices.size(); ++m) {
    const double n = static_cast<double>(m + 1);
    const auto& s = matrices[m].scores();
    for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += (s[i] - mean[i]) / n;
  }
  return ScoreMatrix(ref.sample_ids(), ref.class_labels(), std::move(mean));
}

AccuracyReport per_class_accuracy(const ScoreMatrix& preds,
                                  const std::map<std::string, std::string>& labels) {
  std::map<std::string, std::size_t> class_index;
  for (std::size_t k = 0; k < preds.class_count(); ++k) class_index[preds.class_labels()[k]] = k;

  std::vector<ClassAccuracy> tally(preds.class_count());
  for (std::size_t k = 0; k < tally.size(); ++k) tally[k].label = preds.class_labels()[k];

  std::size_t correct = 0;
  for (std::size_t i = 0; i < preds.sample_count(); ++i) {
    const std::string& id = preds.sample_ids()[i];
    auto label = labels.find(id);
    if (label == labels.end()) throw Error("sample '" + id + "' has no label");
    auto k = class_index.find(label->second);
    if (k == class_index.end()) {
      throw Error("sample '" + id + "' has label '" + label->second + "' which is not a scored class");
    }
    ClassAccuracy& c = tally[k->second];
    ++c.total;
    if (preds.predicted_class(i) == k->second) {
      ++c.correct;
      ++correct;
    }
  }

  AccuracyReport report;
  double sum = 0.0;
  for (auto& c : tally) {
    if (c.total == 0) continue;
    sum += c.accuracy();
    report.per_class.push_back(c);
  }
  if (!report.per_class.empty()) report.mean_accuracy = sum / static_cast<double>(report.per_class.size());
  if (preds.sample_count()) {
    report.overall_accuracy = static_cast<double>(correct) / static_cast<double>(preds.sample_count());
  }
  return report;
}

ScoreMatrix parse_score_file(std::string_view text) {
  detail::LineReader reader(text);
  auto header_line = reader.next_nonblank();
  if (!header_line) throw ParseError(0, "score file is empty");
  const auto header = detail::split_ws(*header_line);
  if (header.size() < 3 || header[0] != "sample_id") {
    throw ParseError(reader.line_number(), "header must be 'sample_id' followed by at least 2 class labels");
  }
  std::vector<std::string> classes(header.begin() + 1, header.end());
  std::set<std::string> unique(classes.begin(), classes.end());
  if (unique.size() != classes.size()) throw ParseError(reader.line_number(), "duplicate class label");

  std::vector<std::string> ids;
  std::vector<double> scores;
  while (auto line = reader.next_nonblank()) {
    const auto fields = detail::split_ws(*line);
    if (fields.size() != header.size()) {
      throw ParseError(reader.line_number(), "expected " + std::to_string(header.size()) +
                                                 " fields, found " + std::to_string(fields.size()));
    }
    ids.emplace_back(fields[0]);
    for (std::size_t k = 1; k < fields.size(); ++k) {
      auto v = detail::parse_double(fields[k]);
      if (!v || !std::isfinite(*v)) {
        throw ParseError(reader.line_number(), "invalid score '" + std::string(fields[k]) + "'");
      }
      scores.push_back(*v);
    }
  }
  return ScoreMatrix(std::move(ids), std::move(classes), std::move(scores));
}

std::string write_score_file(const ScoreMatrix& m) {
  std::string out = "sample_id";
  for (const auto& c : m.class_labels()) out += " " + c;
  out += "\n";
  char buf[32];
  for (std::size_t i = 0; i < m.sample_count(); ++i) {
    out += m.sample_ids()[i];
    for (double v : m.row(i)) {
      std::snprintf(buf, sizeof(buf), " %.17g", v);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

std::map<std::string, std::string> parse_labels_file(std::string_view text) {
  detail::LineReader reader(text);
  std::map<std::string, std::string> labels;
  bool first = true;
  while (auto line = reader.next_nonblank()) {
    const std::string_view s = detail::trim(*line);
    if (s.starts_with("#")) continue;
    const auto fields = detail::split_ws(s);
    if (first && fields.size() == 2 && fields[0] == "sample_id") {
      first = false;
      continue;
    }
    first = false;
    if (fields.size() != 2) throw ParseError(reader.line_number(), "expected '<sample_id> <label>'");
    if (!labels.emplace(fields[0], fields[1]).second) {
      throw ParseError(reader.line_number(), "duplicate label for '" + std::string(fields[0]) + "'");
    }
  }
  return labels;
}

}  // namespace skelemotion
