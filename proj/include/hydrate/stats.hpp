#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hydrate/error.hpp"
#include "json.hpp"

namespace hydrate {

enum class TestMethod { auto_select, exact, asymptotic };

struct TestConfig {
  double alpha = 0.05;
  /// auto: Kolmogorov-Smirnov runs exact for pooled size <= kKsExactLimit,
  /// Mann-Whitney runs asymptotic with tie and continuity correction.
  TestMethod method = TestMethod::auto_select;

  void validate() const;
};

inline constexpr std::size_t kKsExactLimit = 25;

enum class MethodUsed { exact, asymptotic };

struct KsResult {
  double statistic = 0.0;  // D
  double p_value = 1.0;
  MethodUsed method = MethodUsed::exact;
};

struct MwuResult {
  double u = 0.0;  // statistic of the first sample, midranks
  double p_value = 1.0;
  std::optional<double> z;  // asymptotic only
  MethodUsed method = MethodUsed::asymptotic;
};

/// Fraction of `sample` that is <= x.
double ecdf_eval(std::span<const double> sample, double x);

/// Standard normal CDF.
double normal_cdf(double z);

/// Kolmogorov limit distribution Q(lambda) = P(sqrt(n) D > lambda).
double kolmogorov_survival(double lambda);

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b,
                       const TestConfig& config = {});

MwuResult mwu_two_sample(std::span<const double> a, std::span<const double> b,
                         const TestConfig& config = {});

/// Pooled midranks (1-based) of a followed by b.
std::vector<double> midranks(std::span<const double> pooled);

struct PairwiseComparison {
  std::string first;
  std::string second;
  KsResult ks;
  MwuResult mwu;
  /// Either test rejects at alpha (p < alpha).
  bool significant = false;
};

using ScoreVectors = std::vector<std::pair<std::string, std::vector<double>>>;

/// Every unordered pair (i < j) in input order.
std::vector<PairwiseComparison> compare_models(const ScoreVectors& scores,
                                               const TestConfig& config = {});

nlohmann::ordered_json comparisons_to_json(const std::vector<PairwiseComparison>& rows,
                                           const TestConfig& config);
/// Columns: comparison, ks_stat, ks_p, u_stat, u_p, significant_at_alpha.
std::string comparisons_to_csv(const std::vector<PairwiseComparison>& rows);

const char* to_string(MethodUsed m) noexcept;
const char* to_string(TestMethod m) noexcept;
TestMethod parse_test_method(const std::string& text);

}  // namespace hydrate
