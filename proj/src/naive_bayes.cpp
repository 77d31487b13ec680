#include <cmath>
#include <numbers>

#include "hydrate/classifiers.hpp"

namespace hydrate {

using nlohmann::ordered_json;

GaussianNb::GaussianNb(std::array<ClassParams, kNumClasses> classes, std::size_t n_features,
                       double epsilon)
    : classes_(std::move(classes)), n_features_(n_features), epsilon_(epsilon) {
  if (!(epsilon_ > 0.0)) throw Error(ErrorKind::invalid_argument, "variance floor must be > 0");
  double prior_sum = 0.0;
  bool any = false;
  for (const auto& c : classes_) {
    if (!c.present) continue;
    any = true;
    if (c.mean.size() != n_features_ || c.var.size() != n_features_ ||
        !(c.prior > 0.0 && c.prior <= 1.0)) {
      throw Error(ErrorKind::invalid_argument, "malformed naive Bayes class parameters");
    }
    for (double v : c.var) {
      if (!(v >= epsilon_)) throw Error(ErrorKind::invalid_argument, "variance below floor");
    }
    prior_sum += c.prior;
  }
  if (!any || std::abs(prior_sum - 1.0) > 1e-12) {
    throw Error(ErrorKind::invalid_argument, "naive Bayes priors must sum to 1");
  }
}

GaussianNb GaussianNb::fit(RowBlock rows, std::span<const ClassLabel> labels, double var_smoothing) {
  check_training_data(rows, labels);
  if (!(var_smoothing > 0.0)) throw Error(ErrorKind::invalid_argument, "var_smoothing must be > 0");
  const std::size_t n = rows.rows();
  const std::size_t d = rows.cols;

  std::array<std::size_t, kNumClasses> count{};
  for (auto l : labels) ++count[class_index(l)];
  for (auto label : kAllClasses) {
    if (count[class_index(label)] == 1) {
      throw Error(ErrorKind::insufficient_data,
                  "class " + std::string(class_name(label)) + " has fewer than 2 training rows");
    }
  }

  std::array<ClassParams, kNumClasses> classes;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    if (count[c] == 0) continue;
    classes[c].present = true;
    classes[c].prior = static_cast<double>(count[c]) / static_cast<double>(n);
    classes[c].mean.assign(d, 0.0);
    classes[c].var.assign(d, 0.0);
  }
  for (std::size_t r = 0; r < n; ++r) {
    auto& p = classes[class_index(labels[r])];
    for (std::size_t j = 0; j < d; ++j) p.mean[j] += rows.data[r * d + j];
  }
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    for (auto& m : classes[c].mean) m /= static_cast<double>(count[c]);
  }
  for (std::size_t r = 0; r < n; ++r) {
    auto& p = classes[class_index(labels[r])];
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = rows.data[r * d + j] - p.mean[j];
      p.var[j] += diff * diff;
    }
  }

  // Floor relative to the largest total (all-class) population variance.
  double max_var = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    double mean = 0.0;
    for (std::size_t r = 0; r < n; ++r) mean += rows.data[r * d + j];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double diff = rows.data[r * d + j] - mean;
      ss += diff * diff;
    }
    max_var = std::max(max_var, ss / static_cast<double>(n));
  }
  // All features constant: fall back to an absolute floor.
  const double epsilon = var_smoothing * (max_var > 0.0 ? max_var : 1.0);

  for (std::size_t c = 0; c < kNumClasses; ++c) {
    for (auto& v : classes[c].var) v = std::max(v / static_cast<double>(count[c]), epsilon);
  }
  return GaussianNb(std::move(classes), d, epsilon);
}

ClassScores GaussianNb::scores(std::span<const double> row) const {
  check_row(row);
  ClassScores s;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const auto& p = classes_[c];
    if (!p.present) {
      s[c] = -std::numeric_limits<double>::infinity();
      continue;
    }
    double score = std::log(p.prior);
    for (std::size_t j = 0; j < n_features_; ++j) {
      const double diff = row[j] - p.mean[j];
      score += -0.5 * std::log(2.0 * std::numbers::pi * p.var[j]) - diff * diff / (2.0 * p.var[j]);
    }
    s[c] = score;
  }
  return s;
}

ordered_json GaussianNb::to_json() const {
  ordered_json j;
  j["format"] = "hydrate-model";
  j["version"] = kModelFormatVersion;
  j["kind"] = "nb";
  j["n_features"] = n_features_;
  j["epsilon"] = epsilon_;
  j["classes"] = ordered_json::array();
  for (auto label : kAllClasses) {
    const auto& p = classes_[class_index(label)];
    if (!p.present) continue;
    j["classes"].push_back({{"label", class_code(label)},
                            {"prior", p.prior},
                            {"mean", p.mean},
                            {"var", p.var}});
  }
  return j;
}

GaussianNb GaussianNb::from_json(const ordered_json& j) {
  std::array<ClassParams, kNumClasses> classes;
  for (const auto& cj : j.at("classes")) {
    const auto label = class_from_code(cj.at("label").get<std::int64_t>());
    if (!label) throw Error(ErrorKind::unsupported_format, "invalid label in naive Bayes model");
    auto& p = classes[class_index(*label)];
    p.present = true;
    p.prior = cj.at("prior").get<double>();
    p.mean = cj.at("mean").get<std::vector<double>>();
    p.var = cj.at("var").get<std::vector<double>>();
  }
  return GaussianNb(std::move(classes), j.at("n_features").get<std::size_t>(),
                    j.at("epsilon").get<double>());
}

}  // namespace hydrate
