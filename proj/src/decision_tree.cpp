#include <algorithm>
#include <numeric>

#include "hydrate/classifiers.hpp"
#include "json_util.hpp"

namespace hydrate {

using nlohmann::ordered_json;

double gini(const std::array<std::uint64_t, kNumClasses>& counts) noexcept {
  std::uint64_t n = 0;
  for (auto c : counts) n += c;
  if (n == 0) return 0.0;
  double sum_sq = 0.0;
  for (auto c : counts) {
    const double p = static_cast<double>(c) / static_cast<double>(n);
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

namespace {

using Counts = std::array<std::uint64_t, kNumClasses>;

// sum_c n_c^2 / n; the weighted child impurity is 1 - (left + right) / n, so
// maximising this sum over both children maximises the impurity decrease.
double purity_term(const Counts& counts, std::uint64_t n) {
  if (n == 0) return 0.0;
  double s = 0.0;
  for (auto c : counts) s += static_cast<double>(c) * static_cast<double>(c);
  return s / static_cast<double>(n);
}

struct Builder {
  RowBlock rows;
  std::span<const ClassLabel> labels;
  const DecisionTreeParams& params;
  std::vector<TreeNode> nodes;

  std::uint32_t build(std::vector<std::size_t>& idx, std::size_t depth) {
    TreeNode node;
    for (auto r : idx) ++node.counts[class_index(labels[r])];
    const auto id = static_cast<std::uint32_t>(nodes.size());
    nodes.push_back(node);

    const std::size_t n = idx.size();
    const bool pure = std::count_if(node.counts.begin(), node.counts.end(),
                                    [](auto c) { return c > 0; }) <= 1;
    if (pure || (params.max_depth && depth >= *params.max_depth) || n < params.min_samples_split) {
      return id;
    }

    int best_feature = -1;
    double best_threshold = 0.0;
    double best_term = -1.0;
    std::vector<std::size_t> order(idx);
    for (std::size_t f = 0; f < rows.cols; ++f) {
      const auto value = [&](std::size_t r) { return rows.data[r * rows.cols + f]; };
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double va = value(a), vb = value(b);
        return va < vb || (va == vb && a < b);
      });
      Counts left{};
      for (std::size_t i = 0; i + 1 < n; ++i) {
        ++left[class_index(labels[order[i]])];
        const double lo = value(order[i]);
        const double hi = value(order[i + 1]);
        if (!(lo < hi)) continue;
        Counts right{};
        for (std::size_t c = 0; c < kNumClasses; ++c) right[c] = node.counts[c] - left[c];
        const double term = purity_term(left, i + 1) + purity_term(right, n - i - 1);
        if (term > best_term) {
          best_term = term;
          best_feature = static_cast<int>(f);
          best_threshold = std::midpoint(lo, hi);
          if (!(best_threshold < hi)) best_threshold = lo;
        }
      }
    }
    if (best_feature < 0) return id;  // no two distinct values on any feature

    const double parent_term = purity_term(node.counts, n);
    const double decrease = std::max(0.0, (best_term - parent_term) / static_cast<double>(n));
    if (decrease < params.min_impurity_decrease) return id;

    std::vector<std::size_t> left_idx, right_idx;
    for (auto r : idx) {
      (rows.data[r * rows.cols + best_feature] <= best_threshold ? left_idx : right_idx).push_back(r);
    }
    idx.clear();
    idx.shrink_to_fit();
    const auto left_id = build(left_idx, depth + 1);
    const auto right_id = build(right_idx, depth + 1);
    nodes[id].feature = best_feature;
    nodes[id].threshold = best_threshold;
    nodes[id].left = left_id;
    nodes[id].right = right_id;
    return id;
  }
};

ordered_json node_to_json(const std::vector<TreeNode>& nodes, std::uint32_t id) {
  const auto& n = nodes[id];
  ordered_json j;
  if (!n.is_leaf()) {
    j["feature"] = n.feature;
    j["threshold"] = n.threshold;
  }
  j["counts"] = n.counts;
  if (!n.is_leaf()) {
    j["left"] = node_to_json(nodes, n.left);
    j["right"] = node_to_json(nodes, n.right);
  }
  return j;
}

std::uint32_t node_from_json(const ordered_json& j, std::vector<TreeNode>& nodes) {
  TreeNode node;
  node.counts = j.at("counts").get<Counts>();
  const auto id = static_cast<std::uint32_t>(nodes.size());
  nodes.push_back(node);
  if (j.contains("feature")) {
    const int feature = j.at("feature").get<int>();
    const double threshold = j.at("threshold").get<double>();
    const auto left = node_from_json(j.at("left"), nodes);
    const auto right = node_from_json(j.at("right"), nodes);
    nodes[id].feature = feature;
    nodes[id].threshold = threshold;
    nodes[id].left = left;
    nodes[id].right = right;
  }
  return id;
}

}  // namespace

DecisionTree::DecisionTree(std::vector<TreeNode> nodes, std::size_t n_features,
                           DecisionTreeParams params)
    : nodes_(std::move(nodes)), n_features_(n_features), params_(params) {
  if (nodes_.empty()) throw Error(ErrorKind::invalid_argument, "tree has no nodes");
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (n.is_leaf()) {
      std::uint64_t total = 0;
      for (auto c : n.counts) total += c;
      if (total == 0) throw Error(ErrorKind::invalid_argument, "tree leaf has no samples");
      continue;
    }
    if (static_cast<std::size_t>(n.feature) >= n_features_ || n.left <= i || n.right <= i ||
        n.left >= nodes_.size() || n.right >= nodes_.size()) {
      throw Error(ErrorKind::invalid_argument, "malformed tree node " + std::to_string(i));
    }
  }
}

DecisionTree DecisionTree::fit(RowBlock rows, std::span<const ClassLabel> labels,
                               const DecisionTreeParams& params) {
  check_training_data(rows, labels);
  if (params.min_samples_split < 2) {
    throw Error(ErrorKind::invalid_argument, "min_samples_split must be >= 2");
  }
  if (!(params.min_impurity_decrease >= 0.0)) {
    throw Error(ErrorKind::invalid_argument, "min_impurity_decrease must be >= 0");
  }
  Builder b{rows, labels, params, {}};
  std::vector<std::size_t> idx(rows.rows());
  std::iota(idx.begin(), idx.end(), 0);
  b.build(idx, 0);
  return DecisionTree(std::move(b.nodes), rows.cols, params);
}

std::size_t DecisionTree::leaf_index(std::span<const double> row) const {
  check_row(row);
  std::size_t i = 0;
  while (!nodes_[i].is_leaf()) {
    const auto& n = nodes_[i];
    i = row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return i;
}

ClassScores DecisionTree::scores(std::span<const double> row) const {
  const auto& leaf = nodes_[leaf_index(row)];
  ClassScores s{};
  for (std::size_t c = 0; c < kNumClasses; ++c) s[c] = static_cast<double>(leaf.counts[c]);
  return s;
}

std::size_t DecisionTree::depth() const {
  std::vector<std::size_t> d(nodes_.size(), 0);
  std::size_t deepest = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {  // children follow parents
    deepest = std::max(deepest, d[i]);
    if (!nodes_[i].is_leaf()) {
      d[nodes_[i].left] = d[i] + 1;
      d[nodes_[i].right] = d[i] + 1;
    }
  }
  return deepest;
}

ordered_json DecisionTree::to_json() const {
  ordered_json j;
  j["format"] = "hydrate-model";
  j["version"] = kModelFormatVersion;
  j["kind"] = "dt";
  j["n_features"] = n_features_;
  j["params"] = {{"max_depth", params_.max_depth ? ordered_json(*params_.max_depth) : ordered_json(nullptr)},
                 {"min_samples_split", params_.min_samples_split},
                 {"min_impurity_decrease", params_.min_impurity_decrease}};
  j["tree"] = node_to_json(nodes_, 0);
  return j;
}

DecisionTree DecisionTree::from_json(const ordered_json& j) {
  DecisionTreeParams p;
  const auto& pj = j.at("params");
  p.max_depth = pj.at("max_depth").is_null()
                    ? std::nullopt
                    : std::optional<std::size_t>(pj.at("max_depth").get<std::size_t>());
  p.min_samples_split = pj.at("min_samples_split").get<std::size_t>();
  p.min_impurity_decrease = pj.at("min_impurity_decrease").get<double>();
  std::vector<TreeNode> nodes;
  node_from_json(j.at("tree"), nodes);
  return DecisionTree(std::move(nodes), j.at("n_features").get<std::size_t>(), p);
}

}  // namespace hydrate
