#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hydrate/classifiers.hpp"
#include "hydrate/dataset.hpp"
#include "json.hpp"

namespace hydrate {

/// counts[i][j] = rows with true class classes[i] predicted as classes[j].
struct ConfusionMatrix {
  std::vector<ClassLabel> classes;
  std::vector<std::uint64_t> counts;  // row-major, classes.size()^2

  std::size_t size() const noexcept { return classes.size(); }
  std::uint64_t at(std::size_t truth, std::size_t predicted) const noexcept {
    return counts[truth * size() + predicted];
  }
  std::uint64_t total() const noexcept;
  std::uint64_t row_sum(std::size_t i) const noexcept;
  std::uint64_t column_sum(std::size_t j) const noexcept;

  static ConfusionMatrix from_counts(std::vector<ClassLabel> classes,
                                     std::vector<std::vector<std::uint64_t>> grid);
};

ConfusionMatrix confusion(std::span<const ClassLabel> truth, std::span<const ClassLabel> predicted,
                          std::span<const ClassLabel> classes = kAllClasses);

double accuracy(const ConfusionMatrix& m);

struct ClassMetric {
  ClassLabel label;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Zero denominators yield 0 for precision, recall and F1.
std::vector<ClassMetric> f1_per_class(const ConfusionMatrix& m);

struct EvalReport {
  std::string model;
  ConfusionMatrix matrix;
  double accuracy = 0.0;
  std::vector<ClassMetric> per_class;
  double macro_f1 = 0.0;

  nlohmann::ordered_json to_json() const;
  static EvalReport from_json(const nlohmann::ordered_json& j);
  /// Confusion grid with a header row and column of class names.
  std::string confusion_csv() const;
  /// F1 in the report's class order.
  std::vector<double> f1_scores() const;
};

EvalReport make_report(std::string model, ConfusionMatrix matrix);

EvalReport evaluate(const Classifier& model, const FeatureMatrix& test, unsigned threads = 1,
                    std::span<const ClassLabel> classes = kAllClasses);

}  // namespace hydrate
