#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hydrate/classifiers.hpp"
#include "hydrate/dataset.hpp"
#include "hydrate/evaluation.hpp"
#include "hydrate/quality.hpp"
#include "hydrate/stats.hpp"
#include "json.hpp"

namespace hydrate {

/// Invalid configuration or command usage (exit code 64 in the CLI).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitData = 2;
inline constexpr int kExitUsage = 64;

struct PreprocessingConfig {
  QuartileMethod quartile_method = QuartileMethod::linear;
  double tukey_multiplier = 1.5;
  NormalizationMode normalization = NormalizationMode::zscore;
  std::size_t frozen_min_length = 2;
};

struct RunConfig {
  /// Folder-per-class corpus; the synthetic corpus is used when absent.
  std::optional<std::string> dataset_root;
  LabelMap label_map;
  SynthConfig synth = SynthConfig::defaults();
  std::vector<std::string> variables = canonical_variable_names();
  PreprocessingConfig preprocessing;
  ClassifierConfig classifiers;
  SplitSpec split;
  TestConfig stats;
  std::vector<std::string> models = {"dt", "knn", "nb"};
  /// Execution settings; they never influence outputs and are not echoed.
  unsigned threads = 1;
  std::string out = "out";

  /// Throws UsageError.
  void validate() const;
  /// Effective configuration without threads and out.
  nlohmann::ordered_json to_json() const;
  /// Absent keys keep their defaults; unknown keys throw UsageError.
  static RunConfig from_json(const nlohmann::ordered_json& j);
  static RunConfig load(const std::filesystem::path& path);
};

nlohmann::ordered_json synth_config_to_json(const SynthConfig& config);
/// Overlays the keys present in `j` onto `base`.
SynthConfig synth_config_from_json(const nlohmann::ordered_json& j, SynthConfig base);

/// Imputation, outlier fences and normalization fitted on training rows.
struct Preprocessor {
  ImputationModel imputer;
  FenceModel fences;
  NormalizationModel normalizer;

  /// impute -> winsorize -> normalize
  FeatureMatrix apply(const FeatureMatrix& raw) const;

  nlohmann::ordered_json to_json() const;
  static Preprocessor from_json(const nlohmann::ordered_json& j);
};

/// Fences come from the raw (observed) training values, the normalizer from
/// the imputed and winsorized training rows.
Preprocessor fit_preprocessor(const FeatureMatrix& raw_train, const PreprocessingConfig& config);

struct PreparedData {
  FeatureMatrix raw;  // flattened corpus before preprocessing
  TrainTest parts;    // preprocessed
  Preprocessor preprocessor;
};

/// The corpus named by the config: loaded from disk or generated.
std::vector<TimeSeriesInstance> load_instances(const RunConfig& config);
QualityOptions quality_options(const PreprocessingConfig& config);
/// Flatten, split, fit preprocessing on the training part and apply it to both.
PreparedData prepare(std::span<const TimeSeriesInstance> instances, const RunConfig& config);

/// One row per test point: origin, preprocessed features, truth, prediction.
std::string points_csv(const FeatureMatrix& test, std::span<const ClassLabel> predicted);

/// Model name -> per-class F1 vector, from {"dt": [..], "knn": [..]}.
ScoreVectors read_f1_file(const std::filesystem::path& path);
/// Per-class F1 vectors of saved evaluation reports.
ScoreVectors read_eval_reports(std::span<const std::filesystem::path> paths);

struct ModelSummary {
  std::string name;
  EvalReport report;
  double fit_seconds = 0.0;
};

/// Accuracy and per-class F1 at two decimals.
std::string summary_table(std::span<const ModelSummary> models);
/// Statistics at two decimals, p-values at three.
std::string comparison_table(std::span<const PairwiseComparison> rows);

// ---------------------------------------------------------------------------
// Commands. Each writes its outputs under `out` and echoes the effective
// configuration to out/config.json.
// ---------------------------------------------------------------------------

QualityReport run_qc(const RunConfig& config, const std::filesystem::path& out);
DatasetManifest run_synth(const RunConfig& config, const std::filesystem::path& out);
std::vector<ModelSummary> run_train(const RunConfig& config, const std::filesystem::path& out);
/// Loads models and preprocessing from `model_dir` (default out/models).
std::vector<ModelSummary> run_eval(const RunConfig& config, const std::filesystem::path& out,
                                   std::optional<std::filesystem::path> model_dir = std::nullopt);
std::vector<PairwiseComparison> run_compare(const ScoreVectors& scores, const TestConfig& stats,
                                            const std::filesystem::path& out);

struct PipelineResult {
  QualityReport quality;
  std::vector<ModelSummary> models;
  /// Absent when fewer than two models were trained.
  std::optional<std::vector<PairwiseComparison>> comparisons;
};

/// ingest -> QC -> split -> impute -> treat outliers -> normalize -> fit ->
/// evaluate -> compare. While running, out/INCOMPLETE names the current
/// stage; it is removed on success and left behind on failure.
PipelineResult run_pipeline(const RunConfig& config, const std::filesystem::path& out);

}  // namespace hydrate
