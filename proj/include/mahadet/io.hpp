#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "mahadet/ensemble.hpp"
#include "mahadet/gda.hpp"
#include "mahadet/incremental.hpp"
#include "mahadet/metrics.hpp"
#include "mahadet/refnet.hpp"

namespace mahadet::io {

enum class Dtype : std::uint8_t { f32 = 1, f64 = 2 };

// Binary feature container: magic "MDFV", u32 version, u64 n, u64 d,
// u8 dtype, u8 has_labels, row-major payload, then n i32 labels. All fields
// little-endian. Paths ending in .csv use the CSV codec instead: header row,
// one sample per row, optional trailing "label" column.
gda::FeatureMatrix read_features(const std::filesystem::path& path);
void write_features(const std::filesystem::path& path, const gda::FeatureMatrix& data,
                    Dtype dtype = Dtype::f64);

gda::FeatureMatrix read_features_csv(const std::filesystem::path& path);
void write_features_csv(const std::filesystem::path& path, const gda::FeatureMatrix& data);

// Score files: CSV with a "score" column and an optional "is_positive"
// column.
struct ScoreFile {
  Vector scores;
  std::vector<int> is_positive;  // empty when the column is absent
};
ScoreFile read_scores(const std::filesystem::path& path);
void write_scores(const std::filesystem::path& path, const Vector& scores);

// --- JSON model persistence (full round-trip precision) -------------------

nlohmann::json gaussian_to_json(const gda::GaussianModel& model);
gda::GaussianModel gaussian_from_json(const nlohmann::json& j);

nlohmann::json models_to_json(const std::vector<gda::GaussianModel>& models);
std::vector<gda::GaussianModel> models_from_json(const nlohmann::json& j);

nlohmann::json refnet_to_json(const refnet::RefNet& net);
refnet::RefNet refnet_from_json(const nlohmann::json& j);

nlohmann::json detector_to_json(const ensemble::EnsembleDetector& detector);
// Layer models are persisted separately; the caller re-attaches them.
ensemble::EnsembleDetector detector_from_json(const nlohmann::json& j);

nlohmann::json state_to_json(const incremental::IncrementalState& state);
incremental::IncrementalState state_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const metrics::EvalReport& report);

nlohmann::json load_json(const std::filesystem::path& path);
void save_json(const std::filesystem::path& path, const nlohmann::json& j);

// --- run configuration -----------------------------------------------------

// Flat key = value configuration with # comments; numbers, quoted strings,
// booleans and [comma, separated] lists. Unknown keys are rejected by name.
struct RunConfig {
  std::uint64_t seed = 7;
  int classes = 4;
  int dim = 16;
  int train_per_class = 500;
  int val_per_side = 500;
  int test_per_side = 500;
  double ood_shift = 3.0;
  double mean_radius = 5.0;
  std::vector<int> hidden{32, 32};
  int epochs = 40;
  int batch_size = 32;
  double learning_rate = 0.05;
  double momentum = 0.9;
  std::vector<double> eps_grid;  // defaults to the standard noise grid
  std::vector<double> l2_grid{1e-4, 1e-2, 1.0};
  int outer_folds = 5;
  int inner_folds = 5;
  double rel_ridge = 1e-6;
  std::vector<std::string> metrics{"tnr_at_tpr95", "auroc", "detection_accuracy", "aupr_in",
                                   "aupr_out"};

  std::vector<double> effective_eps_grid() const;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

// Canonical key = value rendering; parse(echo(c)) == c.
std::string echo_config(const RunConfig& cfg);
nlohmann::json config_to_json(const RunConfig& cfg);

}  // namespace mahadet::io
