#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hydrate/dataset.hpp"
#include "json.hpp"

namespace hydrate {

enum class QuartileMethod {
  linear,        // interpolate at zero-based position (n - 1) * p
  nearest_rank,  // smallest order statistic with rank >= ceil(n * p)
};

struct BoxplotOptions {
  QuartileMethod method = QuartileMethod::linear;
  double whisker = 1.5;  // Tukey multiplier
};

struct BoxplotStats {
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double iqr = 0.0;
  double lower_fence = 0.0;
  double upper_fence = 0.0;
  std::size_t n_valid = 0;
  std::vector<std::size_t> outlier_row_indices;  // sorted
};

/// Quantile of an ascending, missing-free sample.
double quantile_sorted(std::span<const double> sorted, double p,
                       QuartileMethod method = QuartileMethod::linear);

/// Quartiles and Tukey fences over the non-missing values of `column`.
/// Needs at least four observed values.
BoxplotStats boxplot_stats(std::span<const double> column, const BoxplotOptions& options = {});

// ---------------------------------------------------------------------------

struct MissingScan {
  std::vector<std::size_t> counts;  // per column
  std::vector<double> fractions;    // per column, count / rows
  std::size_t total_missing = 0;
  double overall_fraction = 0.0;
};

MissingScan scan_missing(const FeatureMatrix& matrix);

struct FrozenScan {
  std::vector<std::string> frozen;  // >= min_length observed values, all identical
  std::vector<std::string> empty;   // no observed values at all
};

FrozenScan detect_frozen(const TimeSeriesInstance& instance, std::size_t min_length = 2);

// ---------------------------------------------------------------------------
// Fitted preprocessing
// ---------------------------------------------------------------------------

class ImputationModel {
 public:
  ImputationModel(std::vector<std::string> columns, std::vector<double> means);

  const std::vector<std::string>& columns() const noexcept { return columns_; }
  const std::vector<double>& means() const noexcept { return means_; }
  FeatureMatrix apply(const FeatureMatrix& matrix) const;

  nlohmann::ordered_json to_json() const;
  static ImputationModel from_json(const nlohmann::ordered_json& j);

 private:
  std::vector<std::string> columns_;
  std::vector<double> means_;
};

ImputationModel fit_imputer(const FeatureMatrix& train);

/// Per-column Tukey fences fitted on training data.
struct FenceModel {
  std::vector<std::string> columns;
  std::vector<BoxplotStats> stats;

  nlohmann::ordered_json to_json() const;
  static FenceModel from_json(const nlohmann::ordered_json& j);
};

FenceModel fit_fences(const FeatureMatrix& train, const BoxplotOptions& options = {});

/// Winsorizes every observed value into its column's fences.
FeatureMatrix treat_outliers(const FeatureMatrix& matrix, const FenceModel& fences);

enum class NormalizationMode { zscore, minmax };

class NormalizationModel {
 public:
  NormalizationModel(std::vector<std::string> columns, NormalizationMode mode,
                     std::vector<double> center, std::vector<double> scale);

  const std::vector<std::string>& columns() const noexcept { return columns_; }
  NormalizationMode mode() const noexcept { return mode_; }
  const std::vector<double>& center() const noexcept { return center_; }
  const std::vector<double>& scale() const noexcept { return scale_; }
  /// Columns whose scale is zero; they are only centered.
  std::vector<std::size_t> constant_columns() const;

  FeatureMatrix apply(const FeatureMatrix& matrix) const;

  nlohmann::ordered_json to_json() const;
  static NormalizationModel from_json(const nlohmann::ordered_json& j);

 private:
  std::vector<std::string> columns_;
  NormalizationMode mode_;
  std::vector<double> center_;
  std::vector<double> scale_;
};

/// zscore: center = mean, scale = population sd. minmax: center = min,
/// scale = max - min.
NormalizationModel fit_normalizer(const FeatureMatrix& train,
                                  NormalizationMode mode = NormalizationMode::zscore);

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

struct ChannelQuality {
  std::string name;
  std::string unit;
  std::size_t n_total = 0;
  std::size_t n_missing = 0;
  double missing_pct = 0.0;
  std::size_t n_instance_channels = 0;
  std::size_t n_frozen_instance_channels = 0;
  std::size_t n_empty_instance_channels = 0;
  double frozen_pct = 0.0;
  std::optional<BoxplotStats> boxplot;  // absent with fewer than 4 observed values
  double outlier_pct = 0.0;             // of observed values
};

struct CorpusQuality {
  std::size_t total_cells = 0;
  std::size_t missing_cells = 0;
  double overall_missing_pct = 0.0;
  std::size_t instance_channels = 0;
  std::size_t frozen_instance_channels = 0;
  double overall_frozen_pct = 0.0;
};

struct QualityOptions {
  BoxplotOptions boxplot;
  std::size_t frozen_min_length = 2;
};

struct QualityReport {
  std::size_t n_instances = 0;
  std::size_t n_rows = 0;
  std::vector<ChannelQuality> channels;  // the matrix columns
  CorpusQuality selected;                // aggregated over the matrix columns
  CorpusQuality all_channels;            // every channel present in the instances

  nlohmann::ordered_json to_json() const;
};

QualityReport quality_report(std::span<const TimeSeriesInstance> instances,
                             const FeatureMatrix& matrix, const QualityOptions& options = {});

/// Five-number summary plus outlier dots for one channel.
void write_boxplot_svg(std::ostream& out, const std::string& title, const BoxplotStats& stats,
                       std::span<const double> column);

}  // namespace hydrate
