#include <cmath>

#include "hydrate/dataset.hpp"
#include "hydrate/rng.hpp"

namespace hydrate {

namespace {

// Stream ids keep the shuffles of different classes independent.
constexpr std::uint64_t kUnstratifiedStream = 0x5117;
constexpr std::uint64_t kStratumStreamBase = 0x5200;

std::size_t test_count(std::size_t n, double fraction) {
  return static_cast<std::size_t>(std::llround(static_cast<double>(n) * fraction));
}

}  // namespace

TrainTest split(const FeatureMatrix& matrix, const SplitSpec& spec) {
  if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0)) {
    throw Error(ErrorKind::invalid_argument, "test_fraction must lie strictly inside (0, 1)");
  }

  // A unit is a row (row mode) or all rows of one instance (instance mode).
  std::vector<std::vector<std::size_t>> unit_rows;
  std::vector<ClassLabel> unit_label;
  if (spec.mode == SplitMode::row) {
    unit_rows.resize(matrix.rows());
    for (std::size_t r = 0; r < matrix.rows(); ++r) unit_rows[r] = {r};
    unit_label = matrix.labels();
  } else {
    std::vector<std::size_t> unit_of_instance(matrix.instance_ids().size(), SIZE_MAX);
    for (std::size_t r = 0; r < matrix.rows(); ++r) {
      const std::size_t inst = matrix.origins()[r].instance;
      if (unit_of_instance[inst] == SIZE_MAX) {
        unit_of_instance[inst] = unit_rows.size();
        unit_rows.emplace_back();
        unit_label.push_back(matrix.labels()[r]);
      }
      const std::size_t u = unit_of_instance[inst];
      if (unit_label[u] != matrix.labels()[r]) {
        throw Error(ErrorKind::invalid_argument,
                    "instance '" + matrix.instance_ids()[inst] + "' mixes labels");
      }
      unit_rows[u].push_back(r);
    }
  }

  const std::size_t n_units = unit_rows.size();
  const char* unit_word = spec.mode == SplitMode::row ? "rows" : "instances";
  if (n_units < 2) {
    throw Error(ErrorKind::degenerate_split, std::string("need at least 2 ") + unit_word);
  }

  std::vector<char> in_test(n_units, 0);
  std::size_t n_test = 0;
  if (spec.stratified) {
    std::array<std::vector<std::size_t>, kNumClasses> strata;
    for (std::size_t u = 0; u < n_units; ++u) strata[class_index(unit_label[u])].push_back(u);
    for (auto label : kAllClasses) {
      auto& units = strata[class_index(label)];
      if (units.empty()) continue;
      if (units.size() < 2) {
        throw Error(ErrorKind::degenerate_split, "class " + std::string(class_name(label)) +
                                                     " has fewer than 2 " + unit_word);
      }
      CounterRng rng(spec.seed, kStratumStreamBase + class_code(label));
      shuffle(units, rng);
      const std::size_t k = test_count(units.size(), spec.test_fraction);
      for (std::size_t i = 0; i < k; ++i) in_test[units[i]] = 1;
      n_test += k;
    }
  } else {
    std::vector<std::size_t> units(n_units);
    for (std::size_t u = 0; u < n_units; ++u) units[u] = u;
    CounterRng rng(spec.seed, kUnstratifiedStream);
    shuffle(units, rng);
    n_test = test_count(n_units, spec.test_fraction);
    for (std::size_t i = 0; i < n_test; ++i) in_test[units[i]] = 1;
  }
  if (n_test == 0 || n_test == n_units) {
    throw Error(ErrorKind::degenerate_split, "test_fraction leaves one side of the split empty");
  }

  std::vector<char> row_in_test(matrix.rows(), 0);
  for (std::size_t u = 0; u < n_units; ++u) {
    if (in_test[u]) {
      for (auto r : unit_rows[u]) row_in_test[r] = 1;
    }
  }
  std::vector<std::size_t> train_rows, test_rows;
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    (row_in_test[r] ? test_rows : train_rows).push_back(r);
  }
  return {matrix.select_rows(train_rows), matrix.select_rows(test_rows)};
}

}  // namespace hydrate
