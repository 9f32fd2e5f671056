#include "mahadet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "mahadet/errors.hpp"

namespace mahadet::metrics {

namespace {

struct Counts {
  std::int64_t positives = 0;
  std::int64_t negatives = 0;
};

Counts checked_counts(std::span<const ScoredSample> samples, const char* where) {
  Counts counts;
  for (const auto& s : samples) {
    if (!std::isfinite(s.score)) {
      throw Error(std::string(where) + ": non-finite score");
    }
    if (s.is_positive) {
      ++counts.positives;
    } else {
      ++counts.negatives;
    }
  }
  if (counts.positives == 0 || counts.negatives == 0) {
    throw SingleClass(std::string(where) + ": need both classes, got " +
                      std::to_string(counts.positives) + " positive and " +
                      std::to_string(counts.negatives) + " negative samples");
  }
  return counts;
}

// Sorted copy, ascending by score.
std::vector<ScoredSample> sorted_by_score(std::span<const ScoredSample> samples) {
  std::vector<ScoredSample> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const ScoredSample& a, const ScoredSample& b) { return a.score < b.score; });
  return sorted;
}

}  // namespace

std::vector<ScoredSample> make_samples(const Vector& positive_scores,
                                       const Vector& negative_scores) {
  std::vector<ScoredSample> samples;
  samples.reserve(static_cast<std::size_t>(positive_scores.size() + negative_scores.size()));
  for (Eigen::Index i = 0; i < positive_scores.size(); ++i) {
    samples.push_back({positive_scores[i], true});
  }
  for (Eigen::Index i = 0; i < negative_scores.size(); ++i) {
    samples.push_back({negative_scores[i], false});
  }
  return samples;
}

double auroc(std::span<const ScoredSample> samples) {
  const Counts counts = checked_counts(samples, "auroc");
  const auto sorted = sorted_by_score(samples);
  // Sum of positive ranks with ties sharing their average rank.
  double positive_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j].score == sorted[i].score) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // ranks are 1-based
    for (std::size_t k = i; k < j; ++k) {
      if (sorted[k].is_positive) positive_rank_sum += avg_rank;
    }
    i = j;
  }
  const double p = static_cast<double>(counts.positives);
  const double n = static_cast<double>(counts.negatives);
  return (positive_rank_sum - p * (p + 1.0) / 2.0) / (p * n);
}

double tnr_at_tpr(std::span<const ScoredSample> samples, double tpr_target) {
  const Counts counts = checked_counts(samples, "tnr_at_tpr");
  if (tpr_target <= 0.0 || tpr_target > 1.0) {
    throw Error("tnr_at_tpr: target outside (0, 1]");
  }
  std::vector<double> positive_scores;
  positive_scores.reserve(static_cast<std::size_t>(counts.positives));
  for (const auto& s : samples) {
    if (s.is_positive) positive_scores.push_back(s.score);
  }
  std::sort(positive_scores.begin(), positive_scores.end(), std::greater<>());
  // Smallest k with k/P >= target; threshold at the k-th largest positive.
  const auto k = static_cast<std::size_t>(
      std::ceil(tpr_target * static_cast<double>(counts.positives) - 1e-12));
  const double threshold = positive_scores[std::max<std::size_t>(k, 1) - 1];

  std::int64_t true_negatives = 0;
  for (const auto& s : samples) {
    if (!s.is_positive && s.score < threshold) ++true_negatives;
  }
  return static_cast<double>(true_negatives) / static_cast<double>(counts.negatives);
}

double aupr(std::span<const ScoredSample> samples, PositiveSide side) {
  const Counts counts = checked_counts(samples, "aupr");
  std::vector<ScoredSample> working(samples.begin(), samples.end());
  if (side == PositiveSide::out) {
    for (auto& s : working) {
      s.score = -s.score;
      s.is_positive = !s.is_positive;
    }
  }
  std::sort(working.begin(), working.end(),
            [](const ScoredSample& a, const ScoredSample& b) { return a.score > b.score; });
  const double total_positives =
      side == PositiveSide::in ? static_cast<double>(counts.positives)
                               : static_cast<double>(counts.negatives);

  double area = 0.0;
  double prev_recall = 0.0;
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::size_t i = 0;
  while (i < working.size()) {
    std::size_t j = i;
    while (j < working.size() && working[j].score == working[i].score) ++j;
    for (std::size_t k = i; k < j; ++k) {
      if (working[k].is_positive) {
        ++tp;
      } else {
        ++fp;
      }
    }
    const double recall = static_cast<double>(tp) / total_positives;
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    area += (recall - prev_recall) * precision;
    prev_recall = recall;
    i = j;
  }
  return area;
}

double detection_accuracy(std::span<const ScoredSample> samples) {
  const Counts counts = checked_counts(samples, "detection_accuracy");
  const auto sorted = sorted_by_score(samples);
  const double p = static_cast<double>(counts.positives);
  const double n = static_cast<double>(counts.negatives);

  // Walk thresholds upward; at threshold just above sorted[i], samples
  // 0..i are predicted negative.
  double best = 0.5;  // threshold below every score: TPR 1, TNR 0
  std::int64_t positives_below = 0;
  std::int64_t negatives_below = 0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j].score == sorted[i].score) ++j;
    for (std::size_t k = i; k < j; ++k) {
      if (sorted[k].is_positive) {
        ++positives_below;
      } else {
        ++negatives_below;
      }
    }
    const double tpr = (p - static_cast<double>(positives_below)) / p;
    const double tnr = static_cast<double>(negatives_below) / n;
    best = std::max(best, 0.5 * (tpr + tnr));
    i = j;
  }
  return best;
}

EvalReport evaluate(std::span<const ScoredSample> samples) {
  const Counts counts = checked_counts(samples, "evaluate");
  EvalReport report;
  report.tnr_at_tpr95 = tnr_at_tpr(samples, 0.95);
  report.auroc = auroc(samples);
  report.detection_accuracy = detection_accuracy(samples);
  report.aupr_in = aupr(samples, PositiveSide::in);
  report.aupr_out = aupr(samples, PositiveSide::out);
  report.num_positive = counts.positives;
  report.num_negative = counts.negatives;
  return report;
}

std::string format_table(const std::vector<std::pair<std::string, EvalReport>>& rows,
                         const std::vector<std::string>& selected) {
  const std::vector<std::string> columns = selected.empty() ? kMetricKeys : selected;
  const std::vector<std::pair<std::string, std::string>> headers = {
      {"tnr_at_tpr95", "TNR@TPR95"},
      {"auroc", "AUROC"},
      {"detection_accuracy", "Detection acc."},
      {"aupr_in", "AUPR-in"},
      {"aupr_out", "AUPR-out"}};

  std::size_t name_width = 6;
  for (const auto& [name, report] : rows) name_width = std::max(name_width, name.size());

  std::string out = "method";
  out.append(name_width - 6, ' ');
  for (const auto& key : columns) {
    for (const auto& [k, header] : headers) {
      if (k == key) {
        out += "  ";
        out.append(header.size() < 10 ? 10 - header.size() : 0, ' ');
        out += header;
      }
    }
  }
  out += '\n';

  char buf[32];
  for (const auto& [name, report] : rows) {
    out += name;
    out.append(name_width - name.size(), ' ');
    for (const auto& key : columns) {
      double value = 0.0;
      if (key == "tnr_at_tpr95") value = report.tnr_at_tpr95;
      else if (key == "auroc") value = report.auroc;
      else if (key == "detection_accuracy") value = report.detection_accuracy;
      else if (key == "aupr_in") value = report.aupr_in;
      else if (key == "aupr_out") value = report.aupr_out;
      else throw Error("format_table: unknown metric " + key);
      std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * value);
      std::string cell(buf);
      std::size_t header_len = 10;
      for (const auto& [k, header] : headers) {
        if (k == key) header_len = std::max<std::size_t>(header.size(), 10);
      }
      out += "  ";
      out.append(header_len - cell.size(), ' ');
      out += cell;
    }
    out += '\n';
  }
  return out;
}

}  // namespace mahadet::metrics
