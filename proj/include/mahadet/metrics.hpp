#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mahadet/linalg.hpp"

namespace mahadet::metrics {

// One detector output; positive means in-distribution.
struct ScoredSample {
  double score = 0.0;
  bool is_positive = false;
};

std::vector<ScoredSample> make_samples(const Vector& positive_scores, const Vector& negative_scores);

// P(score_pos > score_neg) + 0.5 P(tie), via average ranks.
double auroc(std::span<const ScoredSample> samples);

// TNR at the smallest achievable TPR >= tpr_target under the
// "score >= threshold => positive" convention.
double tnr_at_tpr(std::span<const ScoredSample> samples, double tpr_target = 0.95);

enum class PositiveSide { in, out };

// Area under precision-recall with step interpolation; out side is computed
// on negated scores with flipped labels.
double aupr(std::span<const ScoredSample> samples, PositiveSide side);

// max over thresholds of (TPR + TNR)/2; never below 0.5.
double detection_accuracy(std::span<const ScoredSample> samples);

struct EvalReport {
  double tnr_at_tpr95 = 0.0;
  double auroc = 0.0;
  double detection_accuracy = 0.0;
  double aupr_in = 0.0;
  double aupr_out = 0.0;
  std::int64_t num_positive = 0;
  std::int64_t num_negative = 0;
};

EvalReport evaluate(std::span<const ScoredSample> samples);

// Aligned text table, one row per named report, metrics as percentages with
// two decimals. `selected` limits the columns (empty = all), using the keys
// tnr_at_tpr95, auroc, detection_accuracy, aupr_in, aupr_out.
std::string format_table(const std::vector<std::pair<std::string, EvalReport>>& rows,
                         const std::vector<std::string>& selected = {});

inline const std::vector<std::string> kMetricKeys = {
    "tnr_at_tpr95", "auroc", "detection_accuracy", "aupr_in", "aupr_out"};

}  // namespace mahadet::metrics
