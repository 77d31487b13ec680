#include <cmath>
#include <future>

#include "hydrate/classifiers.hpp"
#include "json_util.hpp"
#include "parallel.hpp"

namespace hydrate {

using nlohmann::ordered_json;

ClassLabel argmax_lowest(const ClassScores& scores) noexcept {
  std::size_t best = 0;
  for (std::size_t c = 1; c < kNumClasses; ++c) {
    if (scores[c] > scores[best]) best = c;
  }
  return static_cast<ClassLabel>(best);
}

void check_training_data(RowBlock rows, std::span<const ClassLabel> labels) {
  if (rows.cols == 0) throw Error(ErrorKind::invalid_argument, "training data has no features");
  if (rows.rows() == 0) throw Error(ErrorKind::insufficient_data, "empty training set");
  if (rows.data.size() % rows.cols != 0) {
    throw Error(ErrorKind::width_mismatch, "training block is not rectangular");
  }
  if (labels.size() != rows.rows()) {
    throw Error(ErrorKind::invalid_argument, "label count differs from row count");
  }
  for (std::size_t i = 0; i < rows.data.size(); ++i) {
    if (!std::isfinite(rows.data[i])) {
      throw Error(ErrorKind::non_finite, "training data contains a missing or non-finite value",
                  i / rows.cols);
    }
  }
}

void Classifier::check_row(std::span<const double> row) const {
  if (row.size() != n_features()) {
    throw Error(ErrorKind::width_mismatch, "row has " + std::to_string(row.size()) +
                                               " features, model expects " +
                                               std::to_string(n_features()));
  }
  for (double v : row) {
    if (!std::isfinite(v)) throw Error(ErrorKind::non_finite, "row contains a non-finite value");
  }
}

ClassLabel Classifier::predict_row(std::span<const double> row) const {
  return argmax_lowest(scores(row));
}

std::vector<ClassLabel> Classifier::predict(RowBlock rows, unsigned threads) const {
  if (rows.cols != n_features()) {
    throw Error(ErrorKind::width_mismatch, "input has " + std::to_string(rows.cols) +
                                               " columns, model expects " +
                                               std::to_string(n_features()));
  }
  std::vector<ClassLabel> out(rows.rows());
  detail::parallel_for(out.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) out[r] = predict_row(rows.row(r));
  });
  return out;
}

std::vector<ClassScores> Classifier::predict_scores(RowBlock rows, unsigned threads) const {
  if (rows.cols != n_features()) {
    throw Error(ErrorKind::width_mismatch, "input has " + std::to_string(rows.cols) +
                                               " columns, model expects " +
                                               std::to_string(n_features()));
  }
  std::vector<ClassScores> out(rows.rows());
  detail::parallel_for(out.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) out[r] = scores(rows.row(r));
  });
  return out;
}

std::unique_ptr<Classifier> load_model(const ordered_json& j) {
  if (!j.is_object() || j.value("format", std::string()) != "hydrate-model") {
    throw Error(ErrorKind::unsupported_format, "not a serialized hydrate model");
  }
  const int version = j.value("version", -1);
  if (version != kModelFormatVersion) {
    throw Error(ErrorKind::unsupported_format,
                "unsupported model format version " + std::to_string(version));
  }
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "dt") return std::make_unique<DecisionTree>(DecisionTree::from_json(j));
  if (kind == "knn") return std::make_unique<KnnClassifier>(KnnClassifier::from_json(j));
  if (kind == "nb") return std::make_unique<GaussianNb>(GaussianNb::from_json(j));
  throw Error(ErrorKind::unsupported_format, "unknown model kind '" + kind + "'");
}

// ---------------------------------------------------------------------------

ordered_json ClassifierConfig::to_json() const {
  ordered_json tree_j;
  tree_j["max_depth"] = tree.max_depth ? ordered_json(*tree.max_depth) : ordered_json(nullptr);
  tree_j["min_samples_split"] = tree.min_samples_split;
  tree_j["min_impurity_decrease"] = tree.min_impurity_decrease;
  return {{"decision_tree", tree_j},
          {"knn", {{"k", knn_k}}},
          {"naive_bayes", {{"var_smoothing", nb_var_smoothing}}}};
}

ClassifierConfig ClassifierConfig::from_json(const ordered_json& j) {
  detail::reject_unknown_keys(j, {"decision_tree", "knn", "naive_bayes"}, "classifiers");
  ClassifierConfig c;
  if (j.contains("decision_tree")) {
    const auto& t = j["decision_tree"];
    detail::reject_unknown_keys(t, {"max_depth", "min_samples_split", "min_impurity_decrease"},
                                "classifiers.decision_tree");
    if (t.contains("max_depth")) {
      c.tree.max_depth = t["max_depth"].is_null()
                             ? std::nullopt
                             : std::optional<std::size_t>(t["max_depth"].get<std::size_t>());
    }
    c.tree.min_samples_split = t.value("min_samples_split", c.tree.min_samples_split);
    c.tree.min_impurity_decrease = t.value("min_impurity_decrease", c.tree.min_impurity_decrease);
  }
  if (j.contains("knn")) {
    detail::reject_unknown_keys(j["knn"], {"k"}, "classifiers.knn");
    c.knn_k = j["knn"].value("k", c.knn_k);
  }
  if (j.contains("naive_bayes")) {
    detail::reject_unknown_keys(j["naive_bayes"], {"var_smoothing"}, "classifiers.naive_bayes");
    c.nb_var_smoothing = j["naive_bayes"].value("var_smoothing", c.nb_var_smoothing);
  }
  return c;
}

std::vector<TrainedModel> train_all(RowBlock rows, std::span<const ClassLabel> labels,
                                    const ClassifierConfig& config,
                                    std::span<const std::string> kinds, unsigned threads) {
  for (const auto& k : kinds) {
    if (k != "dt" && k != "knn" && k != "nb") {
      throw Error(ErrorKind::invalid_argument, "unknown model kind '" + k + "'");
    }
  }
  const auto fit_one = [&](const std::string& kind) {
    const auto start = std::chrono::steady_clock::now();
    TrainedModel m;
    m.name = kind;
    if (kind == "dt") {
      m.model = std::make_unique<DecisionTree>(DecisionTree::fit(rows, labels, config.tree));
    } else if (kind == "knn") {
      m.model = std::make_unique<KnnClassifier>(KnnClassifier::fit(rows, labels, config.knn_k));
    } else {
      m.model = std::make_unique<GaussianNb>(GaussianNb::fit(rows, labels, config.nb_var_smoothing));
    }
    m.fit_time = std::chrono::steady_clock::now() - start;
    return m;
  };

  std::vector<TrainedModel> out;
  if (threads <= 1) {
    for (const auto& k : kinds) out.push_back(fit_one(k));
    return out;
  }
  std::vector<std::future<TrainedModel>> pending;
  for (const auto& k : kinds) pending.push_back(std::async(std::launch::async, fit_one, k));
  for (auto& f : pending) out.push_back(f.get());
  return out;
}

}  // namespace hydrate
