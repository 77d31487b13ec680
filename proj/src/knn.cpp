#include <algorithm>
#include <queue>

#include "hydrate/classifiers.hpp"

namespace hydrate {

using nlohmann::ordered_json;

namespace {

bool closer(const Neighbor& a, const Neighbor& b) {
  return a.dist2 < b.dist2 || (a.dist2 == b.dist2 && a.index < b.index);
}

}  // namespace

KnnClassifier::KnnClassifier(std::vector<double> train, std::size_t n_features,
                             std::vector<ClassLabel> labels, std::size_t k)
    : train_(std::move(train)), n_features_(n_features), labels_(std::move(labels)), k_(k) {
  if (n_features_ == 0 || train_.size() != labels_.size() * n_features_) {
    throw Error(ErrorKind::invalid_argument, "k-NN training matrix does not match its labels");
  }
  if (k_ == 0) throw Error(ErrorKind::invalid_argument, "k must be positive");
  if (k_ > labels_.size()) {
    throw Error(ErrorKind::invalid_argument, "k = " + std::to_string(k_) + " exceeds the " +
                                                 std::to_string(labels_.size()) + " training rows");
  }
}

KnnClassifier KnnClassifier::fit(RowBlock rows, std::span<const ClassLabel> labels, std::size_t k) {
  check_training_data(rows, labels);
  return KnnClassifier(std::vector<double>(rows.data.begin(), rows.data.end()), rows.cols,
                       std::vector<ClassLabel>(labels.begin(), labels.end()), k);
}

std::vector<Neighbor> KnnClassifier::neighbors(std::span<const double> row) const {
  check_row(row);
  // Max-heap on (dist2, index): the top is the worst of the current k.
  std::priority_queue<Neighbor, std::vector<Neighbor>, decltype(&closer)> heap(&closer);
  const std::size_t d = n_features_;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    const double* x = train_.data() + i * d;
    double dist2 = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = row[j] - x[j];
      dist2 += diff * diff;
    }
    if (heap.size() < k_) {
      heap.push({dist2, i});
    } else if (dist2 < heap.top().dist2) {  // later rows lose exact distance ties
      heap.pop();
      heap.push({dist2, i});
    }
  }
  std::vector<Neighbor> out;
  out.reserve(k_);
  while (!heap.empty()) {
    out.push_back(heap.top());
    heap.pop();
  }
  std::reverse(out.begin(), out.end());
  return out;
}

ClassScores KnnClassifier::scores(std::span<const double> row) const {
  ClassScores s{};
  for (const auto& nb : neighbors(row)) s[class_index(labels_[nb.index])] += 1.0;
  for (auto& v : s) v /= static_cast<double>(k_);
  return s;
}

ClassLabel KnnClassifier::predict_row(std::span<const double> row) const {
  const auto near = neighbors(row);
  std::array<std::size_t, kNumClasses> votes{};
  std::array<double, kNumClasses> nearest;
  nearest.fill(std::numeric_limits<double>::infinity());
  for (const auto& nb : near) {
    const auto c = class_index(labels_[nb.index]);
    ++votes[c];
    nearest[c] = std::min(nearest[c], nb.dist2);
  }
  const std::size_t top = *std::max_element(votes.begin(), votes.end());
  std::size_t best = kNumClasses;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    if (votes[c] != top) continue;
    if (best == kNumClasses || nearest[c] < nearest[best]) best = c;
  }
  return static_cast<ClassLabel>(best);
}

ordered_json KnnClassifier::to_json() const {
  ordered_json j;
  j["format"] = "hydrate-model";
  j["version"] = kModelFormatVersion;
  j["kind"] = "knn";
  j["n_features"] = n_features_;
  j["k"] = k_;
  std::vector<int> codes;
  codes.reserve(labels_.size());
  for (auto l : labels_) codes.push_back(class_code(l));
  j["labels"] = codes;
  j["train"] = train_;
  return j;
}

KnnClassifier KnnClassifier::from_json(const ordered_json& j) {
  std::vector<ClassLabel> labels;
  for (auto code : j.at("labels").get<std::vector<std::int64_t>>()) {
    auto label = class_from_code(code);
    if (!label) throw Error(ErrorKind::unsupported_format, "invalid label in k-NN model");
    labels.push_back(*label);
  }
  return KnnClassifier(j.at("train").get<std::vector<double>>(),
                       j.at("n_features").get<std::size_t>(), std::move(labels),
                       j.at("k").get<std::size_t>());
}

}  // namespace hydrate
