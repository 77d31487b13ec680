#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hydrate/error.hpp"

namespace hydrate {

// ---------------------------------------------------------------------------
// Labels and variables
// ---------------------------------------------------------------------------

enum class ClassLabel : std::uint8_t { normal = 0, rapid_loss = 1, hydrate = 2 };

inline constexpr std::size_t kNumClasses = 3;
inline constexpr std::array<ClassLabel, kNumClasses> kAllClasses = {
    ClassLabel::normal, ClassLabel::rapid_loss, ClassLabel::hydrate};

constexpr int class_code(ClassLabel label) noexcept { return static_cast<int>(label); }
constexpr std::size_t class_index(ClassLabel label) noexcept {
  return static_cast<std::size_t>(label);
}

/// "NormalCondition", "RapidProductivityLoss" or "Hydrate".
std::string_view class_name(ClassLabel label) noexcept;
std::optional<ClassLabel> class_from_code(std::int64_t code) noexcept;
/// Accepts the full name or the numeric code rendered as text.
ClassLabel parse_class(std::string_view text);

struct SensorVariable {
  std::string name;
  std::string unit;
};

/// P-TPT (Pa), T-TPT (°C), P-MON-CKP (Pa), T-JUS-CKP (°C).
const std::vector<SensorVariable>& canonical_variables();
std::vector<std::string> canonical_variable_names();
/// Unit of a canonical variable, or empty for anything else.
std::string_view unit_of(std::string_view name) noexcept;
bool is_temperature(std::string_view name) noexcept;

// ---------------------------------------------------------------------------
// Readings
// ---------------------------------------------------------------------------

/// Missing readings are quiet NaNs throughout the library.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) noexcept { return std::isnan(v); }

/// Microseconds since the Unix epoch.
using Timestamp = std::int64_t;

enum class TimestampFormat { epoch_seconds, iso8601 };

struct Channel {
  std::string name;
  std::vector<double> values;
};

class TimeSeriesInstance {
 public:
  TimeSeriesInstance(std::string id, ClassLabel label, std::vector<Timestamp> timestamps,
                     TimestampFormat format, std::vector<Channel> channels);

  const std::string& id() const noexcept { return id_; }
  ClassLabel label() const noexcept { return label_; }
  std::size_t length() const noexcept { return timestamps_.size(); }
  const std::vector<Timestamp>& timestamps() const noexcept { return timestamps_; }
  TimestampFormat timestamp_format() const noexcept { return format_; }
  const std::vector<Channel>& channels() const noexcept { return channels_; }
  const Channel* find_channel(std::string_view name) const noexcept;

 private:
  std::string id_;
  ClassLabel label_;
  std::vector<Timestamp> timestamps_;
  TimestampFormat format_;
  std::vector<Channel> channels_;
};

// ---------------------------------------------------------------------------
// CSV ingestion
// ---------------------------------------------------------------------------

/// Maps raw values of the `class` column onto labels. A code mapped to
/// nullopt is ignored (useful for transient codes in field data). An empty
/// map means the identity mapping 0/1/2.
using LabelMap = std::map<std::int64_t, std::optional<ClassLabel>>;

struct LoadOptions {
  std::optional<ClassLabel> label;
  LabelMap label_map;
};

TimeSeriesInstance load_instance_csv(std::istream& in, std::string id,
                                     const LoadOptions& options = {});
TimeSeriesInstance load_instance_file(const std::filesystem::path& path, std::string id,
                                      const LoadOptions& options = {});

/// Writes values with 17 significant digits so reloading is bit-exact.
void write_instance_csv(std::ostream& out, const TimeSeriesInstance& instance,
                        bool include_class = true);

Timestamp parse_iso8601(std::string_view text);
std::string format_iso8601(Timestamp ts);

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

struct ManifestEntry {
  std::string id;
  std::string path;
  ClassLabel label;
};

struct DatasetManifest {
  std::vector<ManifestEntry> instances;
  std::array<std::size_t, kNumClasses> class_counts{};
  std::vector<std::string> warnings;
};

/// Directory name holding instances of a class ("0_normal", ...).
std::string_view class_directory(ClassLabel label) noexcept;

DatasetManifest build_manifest(const std::filesystem::path& root);
std::string manifest_to_json(const DatasetManifest& manifest);
std::vector<TimeSeriesInstance> load_corpus(const DatasetManifest& manifest,
                                            const LabelMap& label_map = {});
/// Writes instances in the folder-per-class layout and returns the manifest.
DatasetManifest write_corpus(const std::filesystem::path& root,
                             std::span<const TimeSeriesInstance> instances);

// ---------------------------------------------------------------------------
// Feature matrix
// ---------------------------------------------------------------------------

struct RowOrigin {
  std::size_t instance;    // index into FeatureMatrix::instance_ids()
  std::size_t time_index;  // position within that instance
  friend bool operator==(const RowOrigin&, const RowOrigin&) = default;
  friend auto operator<=>(const RowOrigin&, const RowOrigin&) = default;
};

/// Read-only view of a dense row-major block.
struct RowBlock {
  std::span<const double> data;
  std::size_t cols = 0;

  std::size_t rows() const noexcept { return cols == 0 ? 0 : data.size() / cols; }
  std::span<const double> row(std::size_t r) const noexcept {
    return data.subspan(r * cols, cols);
  }
};

class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::vector<std::string> columns, std::vector<double> data,
                std::vector<ClassLabel> labels, std::vector<RowOrigin> origins,
                std::vector<std::string> instance_ids);

  std::size_t rows() const noexcept { return labels_.size(); }
  std::size_t cols() const noexcept { return columns_.size(); }
  const std::vector<std::string>& columns() const noexcept { return columns_; }
  const std::vector<double>& data() const noexcept { return data_; }
  const std::vector<ClassLabel>& labels() const noexcept { return labels_; }
  const std::vector<RowOrigin>& origins() const noexcept { return origins_; }
  const std::vector<std::string>& instance_ids() const noexcept { return instance_ids_; }

  double at(std::size_t r, std::size_t c) const noexcept { return data_[r * cols() + c]; }
  std::span<const double> row(std::size_t r) const noexcept {
    return std::span<const double>(data_).subspan(r * cols(), cols());
  }
  std::vector<double> column(std::size_t c) const;
  RowBlock block() const noexcept { return {data_, cols()}; }
  std::size_t missing_count() const noexcept;

  /// Rows in the given order; instance ids are carried over unchanged.
  FeatureMatrix select_rows(std::span<const std::size_t> indices) const;
  /// Same rows, labels and origins with replacement cell values.
  FeatureMatrix with_data(std::vector<double> data) const;

 private:
  std::vector<std::string> columns_;
  std::vector<double> data_;
  std::vector<ClassLabel> labels_;
  std::vector<RowOrigin> origins_;
  std::vector<std::string> instance_ids_;
};

FeatureMatrix flatten(std::span<const TimeSeriesInstance> instances,
                      std::span<const std::string> variables);

// ---------------------------------------------------------------------------
// Train/test split
// ---------------------------------------------------------------------------

enum class SplitMode { row, instance };

struct SplitSpec {
  double test_fraction = 0.25;
  std::uint64_t seed = 42;
  SplitMode mode = SplitMode::row;
  bool stratified = true;
};

struct TrainTest {
  FeatureMatrix train;
  FeatureMatrix test;
};

TrainTest split(const FeatureMatrix& matrix, const SplitSpec& spec);

// ---------------------------------------------------------------------------
// Synthetic corpora
// ---------------------------------------------------------------------------

struct ChannelRegime {
  double mean = 0.0;
  double sd = 1.0;
  double ramp = 0.0;  // total drift from first to last sample
};

struct ClassRegime {
  std::size_t count = 0;
  std::size_t length = 50;
  std::vector<ChannelRegime> channels;  // one per SynthConfig::variables entry
};

enum class NoiseShape { gaussian, uniform };

struct SynthConfig {
  std::vector<std::string> variables = canonical_variable_names();
  std::array<ClassRegime, kNumClasses> classes;  // indexed by class code
  /// Loading of every channel on the shared latent term; the idiosyncratic
  /// part has weight sqrt(1 - latent_loading^2).
  double latent_loading = 0.97;
  /// Share of latent variance that is constant over an instance.
  double instance_share = 0.5;
  /// AR(1) coefficient of the time-varying latent part.
  double ar_coefficient = 0.9;
  NoiseShape noise = NoiseShape::gaussian;
  /// Hydrate temperature channels are clamped into this band.
  double hydrate_band_low = 0.0;
  double hydrate_band_high = 50.0;
  Timestamp start_time = 1'500'000'000LL * 1'000'000LL;
  std::int64_t step_seconds = 60;
  TimestampFormat timestamp_format = TimestampFormat::iso8601;

  double missing_fraction = 0.0;        // of all cells
  double frozen_fraction = 0.0;         // of all instance-channels
  std::vector<double> outlier_fractions;  // per variable, of non-missing cells; empty = none

  std::uint64_t seed = 42;

  /// Correlated regimes with the 597:344:84 class ratio and 50 samples per
  /// instance (51,250 rows).
  static SynthConfig defaults();
};

std::vector<TimeSeriesInstance> synth_generate(const SynthConfig& config);

}  // namespace hydrate
