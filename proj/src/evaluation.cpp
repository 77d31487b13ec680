#include "hydrate/evaluation.hpp"

#include <algorithm>
#include <sstream>

namespace hydrate {

using nlohmann::ordered_json;

std::uint64_t ConfusionMatrix::total() const noexcept {
  std::uint64_t t = 0;
  for (auto c : counts) t += c;
  return t;
}

std::uint64_t ConfusionMatrix::row_sum(std::size_t i) const noexcept {
  std::uint64_t s = 0;
  for (std::size_t j = 0; j < size(); ++j) s += at(i, j);
  return s;
}

std::uint64_t ConfusionMatrix::column_sum(std::size_t j) const noexcept {
  std::uint64_t s = 0;
  for (std::size_t i = 0; i < size(); ++i) s += at(i, j);
  return s;
}

ConfusionMatrix ConfusionMatrix::from_counts(std::vector<ClassLabel> classes,
                                             std::vector<std::vector<std::uint64_t>> grid) {
  if (grid.size() != classes.size()) {
    throw Error(ErrorKind::invalid_argument, "confusion grid does not match class list");
  }
  ConfusionMatrix m;
  m.classes = std::move(classes);
  for (const auto& row : grid) {
    if (row.size() != m.classes.size()) {
      throw Error(ErrorKind::invalid_argument, "confusion grid is not square");
    }
    m.counts.insert(m.counts.end(), row.begin(), row.end());
  }
  return m;
}

ConfusionMatrix confusion(std::span<const ClassLabel> truth, std::span<const ClassLabel> predicted,
                          std::span<const ClassLabel> classes) {
  if (truth.size() != predicted.size()) {
    throw Error(ErrorKind::invalid_argument, "truth and prediction lengths differ");
  }
  if (truth.empty()) throw Error(ErrorKind::insufficient_data, "no rows to evaluate");
  std::array<std::size_t, kNumClasses> pos;
  pos.fill(SIZE_MAX);
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (pos[class_index(classes[i])] != SIZE_MAX) {
      throw Error(ErrorKind::invalid_argument, "duplicate class in class list");
    }
    pos[class_index(classes[i])] = i;
  }
  ConfusionMatrix m;
  m.classes.assign(classes.begin(), classes.end());
  m.counts.assign(classes.size() * classes.size(), 0);
  for (std::size_t r = 0; r < truth.size(); ++r) {
    const auto i = pos[class_index(truth[r])];
    const auto j = pos[class_index(predicted[r])];
    if (i == SIZE_MAX || j == SIZE_MAX) {
      throw Error(ErrorKind::invalid_argument, "label outside the class list", r);
    }
    ++m.counts[i * classes.size() + j];
  }
  return m;
}

double accuracy(const ConfusionMatrix& m) {
  const auto total = m.total();
  if (total == 0) throw Error(ErrorKind::insufficient_data, "empty confusion matrix");
  std::uint64_t trace = 0;
  for (std::size_t i = 0; i < m.size(); ++i) trace += m.at(i, i);
  return static_cast<double>(trace) / static_cast<double>(total);
}

std::vector<ClassMetric> f1_per_class(const ConfusionMatrix& m) {
  if (m.total() == 0) throw Error(ErrorKind::insufficient_data, "empty confusion matrix");
  std::vector<ClassMetric> out;
  for (std::size_t k = 0; k < m.size(); ++k) {
    ClassMetric c{m.classes[k]};
    const auto tp = static_cast<double>(m.at(k, k));
    const auto col = m.column_sum(k);
    const auto row = m.row_sum(k);
    c.precision = col ? tp / static_cast<double>(col) : 0.0;
    c.recall = row ? tp / static_cast<double>(row) : 0.0;
    c.f1 = (c.precision + c.recall) > 0.0
               ? 2.0 * c.precision * c.recall / (c.precision + c.recall)
               : 0.0;
    out.push_back(c);
  }
  return out;
}

EvalReport make_report(std::string model, ConfusionMatrix matrix) {
  EvalReport r;
  r.model = std::move(model);
  r.accuracy = accuracy(matrix);
  r.per_class = f1_per_class(matrix);
  double sum = 0.0;
  for (const auto& c : r.per_class) sum += c.f1;
  r.macro_f1 = r.per_class.empty() ? 0.0 : sum / static_cast<double>(r.per_class.size());
  r.matrix = std::move(matrix);
  return r;
}

EvalReport evaluate(const Classifier& model, const FeatureMatrix& test, unsigned threads,
                    std::span<const ClassLabel> classes) {
  if (test.rows() == 0) throw Error(ErrorKind::insufficient_data, "empty test set");
  const auto predicted = model.predict(test.block(), threads);
  return make_report(std::string(model.kind()), confusion(test.labels(), predicted, classes));
}

std::vector<double> EvalReport::f1_scores() const {
  std::vector<double> out;
  for (const auto& c : per_class) out.push_back(c.f1);
  return out;
}

ordered_json EvalReport::to_json() const {
  ordered_json j;
  j["model"] = model;
  std::vector<std::string> names;
  for (auto c : matrix.classes) names.emplace_back(class_name(c));
  j["classes"] = names;
  ordered_json grid = ordered_json::array();
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    ordered_json row = ordered_json::array();
    for (std::size_t k = 0; k < matrix.size(); ++k) row.push_back(matrix.at(i, k));
    grid.push_back(row);
  }
  j["confusion"] = grid;
  j["total"] = matrix.total();
  j["accuracy"] = accuracy;
  j["macro_f1"] = macro_f1;
  j["per_class"] = ordered_json::array();
  for (const auto& c : per_class) {
    j["per_class"].push_back({{"class", class_name(c.label)},
                              {"precision", c.precision},
                              {"recall", c.recall},
                              {"f1", c.f1}});
  }
  return j;
}

EvalReport EvalReport::from_json(const ordered_json& j) {
  std::vector<ClassLabel> classes;
  for (const auto& name : j.at("classes")) classes.push_back(parse_class(name.get<std::string>()));
  auto grid = j.at("confusion").get<std::vector<std::vector<std::uint64_t>>>();
  return make_report(j.at("model").get<std::string>(),
                     ConfusionMatrix::from_counts(std::move(classes), std::move(grid)));
}

std::string EvalReport::confusion_csv() const {
  std::ostringstream out;
  out << "true\\predicted";
  for (auto c : matrix.classes) out << ',' << class_name(c);
  out << '\n';
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    out << class_name(matrix.classes[i]);
    for (std::size_t k = 0; k < matrix.size(); ++k) out << ',' << matrix.at(i, k);
    out << '\n';
  }
  return out.str();
}

}  // namespace hydrate
