#pragma once

#include <array>
#include <chrono>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hydrate/dataset.hpp"
#include "json.hpp"

namespace hydrate {

using ClassScores = std::array<double, kNumClasses>;

inline constexpr int kModelFormatVersion = 1;

/// Common fit/predict surface. Fitted models are immutable; every predict
/// call is a pure function of (model, row).
class Classifier {
 public:
  virtual ~Classifier() = default;

  /// "dt", "knn" or "nb".
  virtual std::string_view kind() const noexcept = 0;
  virtual std::size_t n_features() const noexcept = 0;

  /// Per-class scores for one row; absent classes score -inf.
  virtual ClassScores scores(std::span<const double> row) const = 0;
  /// Default: argmax of scores, ties to the lowest class code.
  virtual ClassLabel predict_row(std::span<const double> row) const;

  /// Rows are partitioned across `threads` workers; output order and values
  /// do not depend on the worker count.
  std::vector<ClassLabel> predict(RowBlock rows, unsigned threads = 1) const;
  std::vector<ClassScores> predict_scores(RowBlock rows, unsigned threads = 1) const;

  virtual nlohmann::ordered_json to_json() const = 0;

 protected:
  void check_row(std::span<const double> row) const;
};

ClassLabel argmax_lowest(const ClassScores& scores) noexcept;

/// Validates a training block: non-empty, finite, one label per row.
void check_training_data(RowBlock rows, std::span<const ClassLabel> labels);

// ---------------------------------------------------------------------------
// CART decision tree (Gini)
// ---------------------------------------------------------------------------

struct DecisionTreeParams {
  std::optional<std::size_t> max_depth = 16;  // nullopt = unlimited
  std::size_t min_samples_split = 2;
  double min_impurity_decrease = 0.0;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  std::uint32_t left = 0;
  std::uint32_t right = 0;
  std::array<std::uint64_t, kNumClasses> counts{};

  bool is_leaf() const noexcept { return feature < 0; }
};

class DecisionTree final : public Classifier {
 public:
  DecisionTree(std::vector<TreeNode> nodes, std::size_t n_features, DecisionTreeParams params);

  static DecisionTree fit(RowBlock rows, std::span<const ClassLabel> labels,
                          const DecisionTreeParams& params = {});

  std::string_view kind() const noexcept override { return "dt"; }
  std::size_t n_features() const noexcept override { return n_features_; }
  ClassScores scores(std::span<const double> row) const override;

  /// Index of the leaf a row lands in (value <= threshold goes left).
  std::size_t leaf_index(std::span<const double> row) const;
  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  const DecisionTreeParams& params() const noexcept { return params_; }
  std::size_t depth() const;

  nlohmann::ordered_json to_json() const override;
  static DecisionTree from_json(const nlohmann::ordered_json& j);

 private:
  std::vector<TreeNode> nodes_;  // nodes_[0] is the root
  std::size_t n_features_;
  DecisionTreeParams params_;
};

/// 1 - sum_c p_c^2 over a count vector.
double gini(const std::array<std::uint64_t, kNumClasses>& counts) noexcept;

// ---------------------------------------------------------------------------
// k nearest neighbours (exact, Euclidean)
// ---------------------------------------------------------------------------

struct Neighbor {
  double dist2;
  std::size_t index;
};

class KnnClassifier final : public Classifier {
 public:
  KnnClassifier(std::vector<double> train, std::size_t n_features, std::vector<ClassLabel> labels,
                std::size_t k);

  static KnnClassifier fit(RowBlock rows, std::span<const ClassLabel> labels, std::size_t k = 5);

  std::string_view kind() const noexcept override { return "knn"; }
  std::size_t n_features() const noexcept override { return n_features_; }
  std::size_t k() const noexcept { return k_; }
  std::size_t n_train() const noexcept { return labels_.size(); }

  /// Vote share of each class among the k neighbours.
  ClassScores scores(std::span<const double> row) const override;
  /// Majority vote; vote ties go to the tied class with the closest member,
  /// then to the lowest class code.
  ClassLabel predict_row(std::span<const double> row) const override;

  /// The k nearest training rows ordered by (squared distance, row index).
  std::vector<Neighbor> neighbors(std::span<const double> row) const;

  nlohmann::ordered_json to_json() const override;
  static KnnClassifier from_json(const nlohmann::ordered_json& j);

 private:
  std::vector<double> train_;
  std::size_t n_features_;
  std::vector<ClassLabel> labels_;
  std::size_t k_;
};

// ---------------------------------------------------------------------------
// Gaussian naive Bayes
// ---------------------------------------------------------------------------

class GaussianNb final : public Classifier {
 public:
  struct ClassParams {
    bool present = false;
    double prior = 0.0;
    std::vector<double> mean;
    std::vector<double> var;
  };

  GaussianNb(std::array<ClassParams, kNumClasses> classes, std::size_t n_features, double epsilon);

  /// var_smoothing is relative to the largest per-feature variance.
  static GaussianNb fit(RowBlock rows, std::span<const ClassLabel> labels,
                        double var_smoothing = 1e-9);

  std::string_view kind() const noexcept override { return "nb"; }
  std::size_t n_features() const noexcept override { return n_features_; }
  /// log prior + sum_j log N(x_j | mean, var).
  ClassScores scores(std::span<const double> row) const override;

  const std::array<ClassParams, kNumClasses>& classes() const noexcept { return classes_; }
  double epsilon() const noexcept { return epsilon_; }

  nlohmann::ordered_json to_json() const override;
  static GaussianNb from_json(const nlohmann::ordered_json& j);

 private:
  std::array<ClassParams, kNumClasses> classes_;
  std::size_t n_features_;
  double epsilon_;
};

// ---------------------------------------------------------------------------

std::unique_ptr<Classifier> load_model(const nlohmann::ordered_json& j);

struct ClassifierConfig {
  DecisionTreeParams tree;
  std::size_t knn_k = 5;
  double nb_var_smoothing = 1e-9;

  nlohmann::ordered_json to_json() const;
  /// Rejects unknown keys; absent keys keep their defaults.
  static ClassifierConfig from_json(const nlohmann::ordered_json& j);
};

struct TrainedModel {
  std::string name;
  std::unique_ptr<Classifier> model;
  std::chrono::duration<double> fit_time{};
};

/// Fits the requested kinds ("dt", "knn", "nb") in that order. With
/// threads > 1 the fits run concurrently; results are identical.
std::vector<TrainedModel> train_all(RowBlock rows, std::span<const ClassLabel> labels,
                                    const ClassifierConfig& config,
                                    std::span<const std::string> kinds, unsigned threads = 1);

}  // namespace hydrate
