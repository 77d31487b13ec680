#include "hydrate/quality.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace hydrate {

using nlohmann::ordered_json;

double quantile_sorted(std::span<const double> sorted, double p, QuartileMethod method) {
  if (sorted.empty()) throw Error(ErrorKind::insufficient_data, "quantile of an empty sample");
  if (method == QuartileMethod::nearest_rank) {
    const auto n = static_cast<double>(sorted.size());
    auto rank = static_cast<std::size_t>(std::ceil(n * p));
    rank = std::clamp<std::size_t>(rank, 1, sorted.size());
    return sorted[rank - 1];
  }
  const double pos = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(lo);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

BoxplotStats boxplot_stats(std::span<const double> column, const BoxplotOptions& options) {
  std::vector<double> observed;
  observed.reserve(column.size());
  for (double v : column) {
    if (!is_missing(v)) observed.push_back(v);
  }
  if (observed.size() < 4) {
    throw Error(ErrorKind::insufficient_data, "boxplot needs at least 4 observed values, got " +
                                                  std::to_string(observed.size()));
  }
  std::sort(observed.begin(), observed.end());

  BoxplotStats s;
  s.n_valid = observed.size();
  s.q1 = quantile_sorted(observed, 0.25, options.method);
  s.median = quantile_sorted(observed, 0.5, options.method);
  s.q3 = quantile_sorted(observed, 0.75, options.method);
  s.iqr = s.q3 - s.q1;
  s.lower_fence = s.q1 - options.whisker * s.iqr;
  s.upper_fence = s.q3 + options.whisker * s.iqr;
  for (std::size_t r = 0; r < column.size(); ++r) {
    const double v = column[r];
    if (!is_missing(v) && (v < s.lower_fence || v > s.upper_fence)) {
      s.outlier_row_indices.push_back(r);
    }
  }
  return s;
}

MissingScan scan_missing(const FeatureMatrix& matrix) {
  MissingScan scan;
  scan.counts.assign(matrix.cols(), 0);
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    for (std::size_t c = 0; c < matrix.cols(); ++c) {
      if (is_missing(matrix.at(r, c))) ++scan.counts[c];
    }
  }
  const auto n = static_cast<double>(matrix.rows());
  for (auto count : scan.counts) {
    scan.fractions.push_back(matrix.rows() ? static_cast<double>(count) / n : 0.0);
    scan.total_missing += count;
  }
  const std::size_t cells = matrix.rows() * matrix.cols();
  scan.overall_fraction = cells ? static_cast<double>(scan.total_missing) / static_cast<double>(cells) : 0.0;
  return scan;
}

FrozenScan detect_frozen(const TimeSeriesInstance& instance, std::size_t min_length) {
  if (min_length < 2) throw Error(ErrorKind::invalid_argument, "frozen min_length must be >= 2");
  FrozenScan scan;
  for (const auto& ch : instance.channels()) {
    std::size_t observed = 0;
    bool constant = true;
    double first = 0.0;
    for (double v : ch.values) {
      if (is_missing(v)) continue;
      if (observed == 0) {
        first = v;
      } else if (v != first) {
        constant = false;
      }
      ++observed;
    }
    if (observed == 0) {
      scan.empty.push_back(ch.name);
    } else if (constant && observed >= min_length) {
      scan.frozen.push_back(ch.name);
    }
  }
  return scan;
}

// ---------------------------------------------------------------------------

namespace {

void check_columns(const std::vector<std::string>& expected, const FeatureMatrix& matrix,
                   const char* what) {
  if (expected != matrix.columns()) {
    throw Error(ErrorKind::width_mismatch,
                std::string(what) + " was fitted on different columns than the input matrix");
  }
}

void check_no_missing(const FeatureMatrix& matrix, const char* what) {
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    for (std::size_t c = 0; c < matrix.cols(); ++c) {
      if (is_missing(matrix.at(r, c))) {
        throw Error(ErrorKind::invalid_argument,
                    std::string(what) + ": missing cells present (impute first)", r,
                    matrix.columns()[c]);
      }
    }
  }
}

const char* to_string(NormalizationMode m) { return m == NormalizationMode::zscore ? "zscore" : "minmax"; }

}  // namespace

ImputationModel::ImputationModel(std::vector<std::string> columns, std::vector<double> means)
    : columns_(std::move(columns)), means_(std::move(means)) {
  if (columns_.size() != means_.size()) {
    throw Error(ErrorKind::invalid_argument, "imputer needs one mean per column");
  }
  for (std::size_t c = 0; c < means_.size(); ++c) {
    if (!std::isfinite(means_[c])) {
      throw Error(ErrorKind::non_finite, "imputation mean is not finite", std::nullopt, columns_[c]);
    }
  }
}

FeatureMatrix ImputationModel::apply(const FeatureMatrix& matrix) const {
  check_columns(columns_, matrix, "imputer");
  std::vector<double> data = matrix.data();
  const std::size_t cols = matrix.cols();
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (is_missing(data[i])) data[i] = means_[i % cols];
  }
  return matrix.with_data(std::move(data));
}

ordered_json ImputationModel::to_json() const {
  return {{"columns", columns_}, {"means", means_}};
}

ImputationModel ImputationModel::from_json(const ordered_json& j) {
  return ImputationModel(j.at("columns").get<std::vector<std::string>>(),
                         j.at("means").get<std::vector<double>>());
}

ImputationModel fit_imputer(const FeatureMatrix& train) {
  std::vector<double> means(train.cols());
  for (std::size_t c = 0; c < train.cols(); ++c) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t r = 0; r < train.rows(); ++r) {
      const double v = train.at(r, c);
      if (!is_missing(v)) {
        sum += v;
        ++n;
      }
    }
    if (n == 0) {
      throw Error(ErrorKind::insufficient_data, "training column is entirely missing",
                  std::nullopt, train.columns()[c]);
    }
    means[c] = sum / static_cast<double>(n);
  }
  return ImputationModel(train.columns(), std::move(means));
}

// ---------------------------------------------------------------------------

ordered_json FenceModel::to_json() const {
  ordered_json j;
  j["columns"] = columns;
  j["lower"] = ordered_json::array();
  j["upper"] = ordered_json::array();
  for (const auto& s : stats) {
    j["lower"].push_back(s.lower_fence);
    j["upper"].push_back(s.upper_fence);
  }
  return j;
}

FenceModel FenceModel::from_json(const ordered_json& j) {
  FenceModel m;
  m.columns = j.at("columns").get<std::vector<std::string>>();
  const auto lower = j.at("lower").get<std::vector<double>>();
  const auto upper = j.at("upper").get<std::vector<double>>();
  if (lower.size() != m.columns.size() || upper.size() != m.columns.size()) {
    throw Error(ErrorKind::unsupported_format, "fence arrays do not match columns");
  }
  for (std::size_t c = 0; c < lower.size(); ++c) {
    BoxplotStats s;
    s.lower_fence = lower[c];
    s.upper_fence = upper[c];
    m.stats.push_back(s);
  }
  return m;
}

FenceModel fit_fences(const FeatureMatrix& train, const BoxplotOptions& options) {
  FenceModel m;
  m.columns = train.columns();
  for (std::size_t c = 0; c < train.cols(); ++c) {
    try {
      m.stats.push_back(boxplot_stats(train.column(c), options));
    } catch (const Error& e) {
      throw Error(e.kind(), e.what(), std::nullopt, train.columns()[c]);
    }
  }
  return m;
}

FeatureMatrix treat_outliers(const FeatureMatrix& matrix, const FenceModel& fences) {
  if (fences.stats.size() != fences.columns.size()) {
    throw Error(ErrorKind::width_mismatch, "fence model has inconsistent column count");
  }
  check_columns(fences.columns, matrix, "outlier fences");
  std::vector<double> data = matrix.data();
  const std::size_t cols = matrix.cols();
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (is_missing(data[i])) continue;
    const auto& s = fences.stats[i % cols];
    data[i] = std::clamp(data[i], s.lower_fence, s.upper_fence);
  }
  return matrix.with_data(std::move(data));
}

// ---------------------------------------------------------------------------

NormalizationModel::NormalizationModel(std::vector<std::string> columns, NormalizationMode mode,
                                       std::vector<double> center, std::vector<double> scale)
    : columns_(std::move(columns)), mode_(mode), center_(std::move(center)), scale_(std::move(scale)) {
  if (center_.size() != columns_.size() || scale_.size() != columns_.size()) {
    throw Error(ErrorKind::invalid_argument, "normalizer needs one center and scale per column");
  }
  for (double s : scale_) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw Error(ErrorKind::invalid_argument, "normalization scale must be finite and >= 0");
    }
  }
}

std::vector<std::size_t> NormalizationModel::constant_columns() const {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < scale_.size(); ++c) {
    if (scale_[c] == 0.0) out.push_back(c);
  }
  return out;
}

FeatureMatrix NormalizationModel::apply(const FeatureMatrix& matrix) const {
  check_columns(columns_, matrix, "normalizer");
  check_no_missing(matrix, "normalizer");
  std::vector<double> data = matrix.data();
  const std::size_t cols = matrix.cols();
  for (std::size_t i = 0; i < data.size(); ++i) {
    const std::size_t c = i % cols;
    data[i] -= center_[c];
    if (scale_[c] != 0.0) data[i] /= scale_[c];
  }
  return matrix.with_data(std::move(data));
}

ordered_json NormalizationModel::to_json() const {
  return {{"columns", columns_}, {"mode", to_string(mode_)}, {"center", center_}, {"scale", scale_}};
}

NormalizationModel NormalizationModel::from_json(const ordered_json& j) {
  const auto mode_text = j.at("mode").get<std::string>();
  NormalizationMode mode;
  if (mode_text == "zscore") {
    mode = NormalizationMode::zscore;
  } else if (mode_text == "minmax") {
    mode = NormalizationMode::minmax;
  } else {
    throw Error(ErrorKind::unsupported_format, "unknown normalization mode '" + mode_text + "'");
  }
  return NormalizationModel(j.at("columns").get<std::vector<std::string>>(), mode,
                            j.at("center").get<std::vector<double>>(),
                            j.at("scale").get<std::vector<double>>());
}

NormalizationModel fit_normalizer(const FeatureMatrix& train, NormalizationMode mode) {
  check_no_missing(train, "fit_normalizer");
  if (train.rows() == 0) throw Error(ErrorKind::insufficient_data, "cannot normalize zero rows");
  const auto n = static_cast<double>(train.rows());
  std::vector<double> center(train.cols()), scale(train.cols());
  for (std::size_t c = 0; c < train.cols(); ++c) {
    if (mode == NormalizationMode::zscore) {
      double sum = 0.0;
      for (std::size_t r = 0; r < train.rows(); ++r) sum += train.at(r, c);
      const double mean = sum / n;
      double ss = 0.0;
      for (std::size_t r = 0; r < train.rows(); ++r) {
        const double d = train.at(r, c) - mean;
        ss += d * d;
      }
      center[c] = mean;
      scale[c] = std::sqrt(ss / n);
    } else {
      double lo = train.at(0, c), hi = lo;
      for (std::size_t r = 1; r < train.rows(); ++r) {
        lo = std::min(lo, train.at(r, c));
        hi = std::max(hi, train.at(r, c));
      }
      center[c] = lo;
      scale[c] = hi - lo;
    }
  }
  return NormalizationModel(train.columns(), mode, std::move(center), std::move(scale));
}

// ---------------------------------------------------------------------------

namespace {

double pct(std::size_t part, std::size_t whole) {
  return whole ? 100.0 * static_cast<double>(part) / static_cast<double>(whole) : 0.0;
}

ordered_json corpus_json(const CorpusQuality& q) {
  return {{"total_cells", q.total_cells},
          {"missing_cells", q.missing_cells},
          {"overall_missing_pct", q.overall_missing_pct},
          {"instance_channels", q.instance_channels},
          {"frozen_instance_channels", q.frozen_instance_channels},
          {"overall_frozen_pct", q.overall_frozen_pct}};
}

}  // namespace

ordered_json QualityReport::to_json() const {
  ordered_json j;
  j["n_instances"] = n_instances;
  j["n_rows"] = n_rows;
  j["channels"] = ordered_json::array();
  for (const auto& ch : channels) {
    ordered_json c;
    c["name"] = ch.name;
    c["unit"] = ch.unit;
    c["n_total"] = ch.n_total;
    c["n_missing"] = ch.n_missing;
    c["missing_pct"] = ch.missing_pct;
    c["n_instance_channels"] = ch.n_instance_channels;
    c["n_frozen_instance_channels"] = ch.n_frozen_instance_channels;
    c["n_empty_instance_channels"] = ch.n_empty_instance_channels;
    c["frozen_pct"] = ch.frozen_pct;
    if (ch.boxplot) {
      const auto& b = *ch.boxplot;
      c["boxplot"] = {{"q1", b.q1},
                      {"median", b.median},
                      {"q3", b.q3},
                      {"iqr", b.iqr},
                      {"lower_fence", b.lower_fence},
                      {"upper_fence", b.upper_fence},
                      {"n_valid", b.n_valid},
                      {"n_outliers", b.outlier_row_indices.size()}};
    } else {
      c["boxplot"] = nullptr;
    }
    c["outlier_pct"] = ch.outlier_pct;
    j["channels"].push_back(std::move(c));
  }
  j["selected_channels"] = corpus_json(selected);
  j["all_channels"] = corpus_json(all_channels);
  return j;
}

QualityReport quality_report(std::span<const TimeSeriesInstance> instances,
                             const FeatureMatrix& matrix, const QualityOptions& options) {
  QualityReport report;
  report.n_instances = instances.size();
  report.n_rows = matrix.rows();

  std::vector<FrozenScan> frozen;
  frozen.reserve(instances.size());
  for (const auto& inst : instances) frozen.push_back(detect_frozen(inst, options.frozen_min_length));
  const auto contains = [](const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
  };

  const MissingScan missing = scan_missing(matrix);
  for (std::size_t c = 0; c < matrix.cols(); ++c) {
    ChannelQuality q;
    q.name = matrix.columns()[c];
    q.unit = std::string(unit_of(q.name));
    q.n_total = matrix.rows();
    q.n_missing = missing.counts[c];
    q.missing_pct = pct(q.n_missing, q.n_total);
    for (std::size_t i = 0; i < instances.size(); ++i) {
      if (instances[i].find_channel(q.name) == nullptr) continue;
      ++q.n_instance_channels;
      if (contains(frozen[i].frozen, q.name)) ++q.n_frozen_instance_channels;
      if (contains(frozen[i].empty, q.name)) ++q.n_empty_instance_channels;
    }
    q.frozen_pct = pct(q.n_frozen_instance_channels, q.n_instance_channels);
    if (q.n_total - q.n_missing >= 4) {
      q.boxplot = boxplot_stats(matrix.column(c), options.boxplot);
      q.outlier_pct = pct(q.boxplot->outlier_row_indices.size(), q.boxplot->n_valid);
    }

    report.selected.total_cells += q.n_total;
    report.selected.missing_cells += q.n_missing;
    report.selected.instance_channels += q.n_instance_channels;
    report.selected.frozen_instance_channels += q.n_frozen_instance_channels;
    report.channels.push_back(std::move(q));
  }
  report.selected.overall_missing_pct = pct(report.selected.missing_cells, report.selected.total_cells);
  report.selected.overall_frozen_pct =
      pct(report.selected.frozen_instance_channels, report.selected.instance_channels);

  auto& all = report.all_channels;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    for (const auto& ch : instances[i].channels()) {
      all.total_cells += ch.values.size();
      all.missing_cells += static_cast<std::size_t>(std::count_if(ch.values.begin(), ch.values.end(), is_missing));
      ++all.instance_channels;
    }
    all.frozen_instance_channels += frozen[i].frozen.size();
  }
  all.overall_missing_pct = pct(all.missing_cells, all.total_cells);
  all.overall_frozen_pct = pct(all.frozen_instance_channels, all.instance_channels);
  return report;
}

// ---------------------------------------------------------------------------

void write_boxplot_svg(std::ostream& out, const std::string& title, const BoxplotStats& stats,
                       std::span<const double> column) {
  constexpr double kWidth = 260, kHeight = 420, kTop = 40, kBottom = 390, kMid = 150, kHalfBox = 40;
  double lo = stats.lower_fence, hi = stats.upper_fence;
  double whisker_lo = stats.q1, whisker_hi = stats.q3;
  for (double v : column) {
    if (is_missing(v)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    if (v >= stats.lower_fence && v <= stats.upper_fence) {
      whisker_lo = std::min(whisker_lo, v);
      whisker_hi = std::max(whisker_hi, v);
    }
  }
  if (hi <= lo) hi = lo + 1.0;
  const auto y = [&](double v) { return kBottom - (v - lo) / (hi - lo) * (kBottom - kTop); };

  char buf[256];
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\">\n";
  out << "<text x=\"" << kMid << "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"14\">"
      << title << "</text>\n";
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"black\"/>\n", kMid,
                y(whisker_lo), kMid, y(stats.q1));
  out << buf;
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"black\"/>\n", kMid,
                y(stats.q3), kMid, y(whisker_hi));
  out << buf;
  for (double w : {whisker_lo, whisker_hi}) {
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"black\"/>\n",
                  kMid - kHalfBox / 2, y(w), kMid + kHalfBox / 2, y(w));
    out << buf;
  }
  std::snprintf(buf, sizeof buf,
                "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"#9ecae1\" "
                "stroke=\"black\"/>\n",
                kMid - kHalfBox, y(stats.q3), 2 * kHalfBox, y(stats.q1) - y(stats.q3));
  out << buf;
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"black\" "
                "stroke-width=\"2\"/>\n",
                kMid - kHalfBox, y(stats.median), kMid + kHalfBox, y(stats.median));
  out << buf;
  for (auto r : stats.outlier_row_indices) {
    std::snprintf(buf, sizeof buf,
                  "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"2\" fill=\"none\" stroke=\"#d62728\"/>\n",
                  kMid, y(column[r]));
    out << buf;
  }
  const double ticks[] = {lo, stats.q1, stats.median, stats.q3, hi};
  for (double t : ticks) {
    std::snprintf(buf, sizeof buf,
                  "<text x=\"8\" y=\"%.2f\" font-family=\"sans-serif\" font-size=\"10\">%.6g</text>\n",
                  y(t) + 3, t);
    out << buf;
  }
  out << "</svg>\n";
}

}  // namespace hydrate
