#include "hydrate/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <unordered_set>

namespace hydrate {

std::string_view class_name(ClassLabel label) noexcept {
  switch (label) {
    case ClassLabel::normal: return "NormalCondition";
    case ClassLabel::rapid_loss: return "RapidProductivityLoss";
    case ClassLabel::hydrate: return "Hydrate";
  }
  return "?";
}

std::optional<ClassLabel> class_from_code(std::int64_t code) noexcept {
  if (code < 0 || code >= static_cast<std::int64_t>(kNumClasses)) return std::nullopt;
  return static_cast<ClassLabel>(code);
}

ClassLabel parse_class(std::string_view text) {
  for (auto label : kAllClasses) {
    if (text == class_name(label)) return label;
  }
  std::int64_t code = -1;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, code);
  if (ec == std::errc{} && ptr == end) {
    if (auto label = class_from_code(code)) return *label;
  }
  throw Error(ErrorKind::invalid_argument, "unknown class label '" + std::string(text) + "'");
}

const std::vector<SensorVariable>& canonical_variables() {
  static const std::vector<SensorVariable> vars = {
      {"P-TPT", "Pa"}, {"T-TPT", "°C"}, {"P-MON-CKP", "Pa"}, {"T-JUS-CKP", "°C"}};
  return vars;
}

std::vector<std::string> canonical_variable_names() {
  std::vector<std::string> names;
  for (const auto& v : canonical_variables()) names.push_back(v.name);
  return names;
}

std::string_view unit_of(std::string_view name) noexcept {
  for (const auto& v : canonical_variables()) {
    if (v.name == name) return v.unit;
  }
  return {};
}

bool is_temperature(std::string_view name) noexcept { return unit_of(name) == "°C"; }

// ---------------------------------------------------------------------------

TimeSeriesInstance::TimeSeriesInstance(std::string id, ClassLabel label,
                                       std::vector<Timestamp> timestamps, TimestampFormat format,
                                       std::vector<Channel> channels)
    : id_(std::move(id)),
      label_(label),
      timestamps_(std::move(timestamps)),
      format_(format),
      channels_(std::move(channels)) {
  if (timestamps_.empty()) {
    throw Error(ErrorKind::empty_data, "instance '" + id_ + "' has no samples");
  }
  if (channels_.empty()) {
    throw Error(ErrorKind::invalid_argument, "instance '" + id_ + "' has no channels");
  }
  for (std::size_t i = 1; i < timestamps_.size(); ++i) {
    if (timestamps_[i] < timestamps_[i - 1]) {
      throw Error(ErrorKind::non_monotone_timestamp,
                  "instance '" + id_ + "' timestamps decrease", i + 1, "timestamp");
    }
  }
  std::unordered_set<std::string> seen;
  for (const auto& ch : channels_) {
    if (ch.values.size() != timestamps_.size()) {
      throw Error(ErrorKind::invalid_argument,
                  "channel length differs from timestamp count in instance '" + id_ + "'",
                  std::nullopt, ch.name);
    }
    if (!seen.insert(ch.name).second) {
      throw Error(ErrorKind::invalid_argument, "duplicate channel in instance '" + id_ + "'",
                  std::nullopt, ch.name);
    }
  }
}

const Channel* TimeSeriesInstance::find_channel(std::string_view name) const noexcept {
  for (const auto& ch : channels_) {
    if (ch.name == name) return &ch;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------

FeatureMatrix::FeatureMatrix(std::vector<std::string> columns, std::vector<double> data,
                             std::vector<ClassLabel> labels, std::vector<RowOrigin> origins,
                             std::vector<std::string> instance_ids)
    : columns_(std::move(columns)),
      data_(std::move(data)),
      labels_(std::move(labels)),
      origins_(std::move(origins)),
      instance_ids_(std::move(instance_ids)) {
  if (data_.size() != labels_.size() * columns_.size()) {
    throw Error(ErrorKind::invalid_argument, "feature matrix data size does not match shape");
  }
  if (origins_.size() != labels_.size()) {
    throw Error(ErrorKind::invalid_argument, "row origins do not match row count");
  }
  for (const auto& o : origins_) {
    if (o.instance >= instance_ids_.size()) {
      throw Error(ErrorKind::invalid_argument, "row origin refers to an unknown instance");
    }
  }
}

std::vector<double> FeatureMatrix::column(std::size_t c) const {
  std::vector<double> out(rows());
  for (std::size_t r = 0; r < rows(); ++r) out[r] = at(r, c);
  return out;
}

std::size_t FeatureMatrix::missing_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(data_.begin(), data_.end(), is_missing));
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> indices) const {
  std::vector<double> data;
  data.reserve(indices.size() * cols());
  std::vector<ClassLabel> labels;
  labels.reserve(indices.size());
  std::vector<RowOrigin> origins;
  origins.reserve(indices.size());
  for (auto r : indices) {
    if (r >= rows()) throw Error(ErrorKind::invalid_argument, "row index out of range");
    auto src = row(r);
    data.insert(data.end(), src.begin(), src.end());
    labels.push_back(labels_[r]);
    origins.push_back(origins_[r]);
  }
  return FeatureMatrix(columns_, std::move(data), std::move(labels), std::move(origins),
                       instance_ids_);
}

FeatureMatrix FeatureMatrix::with_data(std::vector<double> data) const {
  return FeatureMatrix(columns_, std::move(data), labels_, origins_, instance_ids_);
}

FeatureMatrix flatten(std::span<const TimeSeriesInstance> instances,
                      std::span<const std::string> variables) {
  if (variables.empty()) {
    throw Error(ErrorKind::invalid_argument, "no variables selected");
  }
  std::vector<const Channel*> chans(variables.size());
  std::size_t total = 0;
  for (const auto& inst : instances) total += inst.length();

  std::vector<double> data;
  data.reserve(total * variables.size());
  std::vector<ClassLabel> labels;
  labels.reserve(total);
  std::vector<RowOrigin> origins;
  origins.reserve(total);
  std::vector<std::string> ids;
  ids.reserve(instances.size());

  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto& inst = instances[i];
    for (std::size_t v = 0; v < variables.size(); ++v) {
      chans[v] = inst.find_channel(variables[v]);
      if (chans[v] == nullptr) {
        throw Error(ErrorKind::missing_variable,
                    "instance '" + inst.id() + "' lacks variable '" + variables[v] + "'",
                    std::nullopt, variables[v]);
      }
    }
    ids.push_back(inst.id());
    for (std::size_t t = 0; t < inst.length(); ++t) {
      for (const auto* ch : chans) data.push_back(ch->values[t]);
      labels.push_back(inst.label());
      origins.push_back({i, t});
    }
  }
  return FeatureMatrix(std::vector<std::string>(variables.begin(), variables.end()),
                       std::move(data), std::move(labels), std::move(origins), std::move(ids));
}

}  // namespace hydrate
