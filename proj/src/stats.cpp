#include "hydrate/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <numeric>

#include "hydrate/error.hpp"

namespace hydrate {

using nlohmann::ordered_json;

namespace {

// Enumerations larger than this are refused rather than run for hours.
constexpr double kMaxEnumeration = 2e8;

void check_sample(std::span<const double> s, const char* which) {
  if (s.empty()) throw Error(ErrorKind::insufficient_data, std::string(which) + " sample is empty");
  for (double v : s) {
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::non_finite, std::string(which) + " sample has a non-finite value");
    }
  }
}

double binomial(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(r);
}

/// Visits every n-bit mask with exactly k bits set (Gosper's hack).
template <class Fn>
void for_each_combination(std::size_t n, std::size_t k, Fn&& fn) {
  if (n > 63) throw Error(ErrorKind::invalid_argument, "pooled sample too large to enumerate");
  if (binomial(n, k) > kMaxEnumeration) {
    throw Error(ErrorKind::invalid_argument,
                "exact enumeration of C(" + std::to_string(n) + ", " + std::to_string(k) +
                    ") assignments is too large; use the asymptotic method");
  }
  if (k == 0) {
    fn(std::uint64_t{0});
    return;
  }
  const std::uint64_t limit = std::uint64_t{1} << n;
  std::uint64_t mask = (std::uint64_t{1} << k) - 1;
  while (mask < limit) {
    fn(mask);
    const std::uint64_t c = mask & (~mask + 1);
    const std::uint64_t r = mask + c;
    mask = (((r ^ mask) >> 2) / c) | r;
  }
}

struct Pooled {
  std::vector<double> values;    // ascending
  std::vector<char> group_end;   // last position of a tie group
};

Pooled pool_sorted(std::span<const double> a, std::span<const double> b) {
  Pooled p;
  p.values.assign(a.begin(), a.end());
  p.values.insert(p.values.end(), b.begin(), b.end());
  std::sort(p.values.begin(), p.values.end());
  p.group_end.resize(p.values.size());
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    p.group_end[i] = (i + 1 == p.values.size() || p.values[i + 1] != p.values[i]) ? 1 : 0;
  }
  return p;
}

/// max |i * nb - j * na| over pooled evaluation points, i.e. D * na * nb.
std::int64_t ks_scaled(std::span<const double> a, std::span<const double> b) {
  std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const auto na = static_cast<std::int64_t>(sa.size());
  const auto nb = static_cast<std::int64_t>(sb.size());
  std::size_t i = 0, j = 0;
  std::int64_t best = 0;
  while (i < sa.size() || j < sb.size()) {
    double x;
    if (j == sb.size() || (i < sa.size() && sa[i] <= sb[j])) {
      x = sa[i];
    } else {
      x = sb[j];
    }
    while (i < sa.size() && sa[i] == x) ++i;
    while (j < sb.size() && sb[j] == x) ++j;
    best = std::max(best, std::abs(static_cast<std::int64_t>(i) * nb - static_cast<std::int64_t>(j) * na));
  }
  return best;
}

}  // namespace

void TestConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorKind::invalid_argument, "alpha must lie strictly inside (0, 1)");
  }
}

double ecdf_eval(std::span<const double> sample, double x) {
  check_sample(sample, "ECDF");
  const auto n = std::count_if(sample.begin(), sample.end(), [x](double v) { return v <= x; });
  return static_cast<double>(n) / static_cast<double>(sample.size());
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double kolmogorov_survival(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  double q;
  if (lambda < 1.18) {
    // Jacobi-theta form converges fast for small lambda.
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double sum = 0.0;
    for (int k = 1; k < 100; ++k) {
      const double m = 2.0 * k - 1.0;
      const double term = std::exp(-m * m * pi2 / (8.0 * lambda * lambda));
      sum += term;
      if (term < 1e-17 * sum) break;
    }
    q = 1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * sum;
  } else {
    double sum = 0.0;
    for (int k = 1; k < 100; ++k) {
      const double term = std::exp(-2.0 * k * k * lambda * lambda);
      sum += (k % 2 == 1) ? term : -term;
      if (term < 1e-17) break;
    }
    q = 2.0 * sum;
  }
  return std::clamp(q, 0.0, 1.0);
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b, const TestConfig& config) {
  config.validate();
  check_sample(a, "first");
  check_sample(b, "second");
  const std::size_t na = a.size(), nb = b.size(), n = na + nb;
  const std::int64_t observed = ks_scaled(a, b);

  KsResult r;
  r.statistic = static_cast<double>(observed) / (static_cast<double>(na) * static_cast<double>(nb));
  const bool exact = config.method == TestMethod::exact ||
                     (config.method == TestMethod::auto_select && n <= kKsExactLimit);
  if (!exact) {
    r.method = MethodUsed::asymptotic;
    const double en = std::sqrt(static_cast<double>(na) * static_cast<double>(nb) / static_cast<double>(n));
    r.p_value = kolmogorov_survival(r.statistic * en);
    return r;
  }

  r.method = MethodUsed::exact;
  const Pooled pooled = pool_sorted(a, b);
  const auto sna = static_cast<std::int64_t>(na), snb = static_cast<std::int64_t>(nb);
  std::uint64_t extreme = 0, total = 0;
  for_each_combination(n, na, [&](std::uint64_t mask) {
    ++total;
    std::int64_t i = 0, j = 0;
    for (std::size_t pos = 0; pos < n; ++pos) {
      if (mask >> pos & 1U) {
        ++i;
      } else {
        ++j;
      }
      if (pooled.group_end[pos] && std::abs(i * snb - j * sna) >= observed) {
        ++extreme;
        return;
      }
    }
  });
  r.p_value = std::clamp(static_cast<double>(extreme) / static_cast<double>(total), 0.0, 1.0);
  return r;
}

std::vector<double> midranks(std::span<const double> pooled) {
  std::vector<std::size_t> order(pooled.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return pooled[x] < pooled[y]; });
  std::vector<double> ranks(pooled.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

MwuResult mwu_two_sample(std::span<const double> a, std::span<const double> b, const TestConfig& config) {
  config.validate();
  check_sample(a, "first");
  check_sample(b, "second");
  const std::size_t na = a.size(), nb = b.size(), n = na + nb;

  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const auto ranks = midranks(pooled);
  double r1 = 0.0;
  for (std::size_t i = 0; i < na; ++i) r1 += ranks[i];

  const double dna = static_cast<double>(na), dnb = static_cast<double>(nb), dn = static_cast<double>(n);
  MwuResult r;
  r.u = r1 - dna * (dna + 1.0) / 2.0;
  const double mu = dna * dnb / 2.0;

  if (config.method == TestMethod::exact) {
    r.method = MethodUsed::exact;
    // Midranks are multiples of 1/2, so doubled rank sums are exact integers.
    std::vector<std::int64_t> twice(n);
    for (std::size_t i = 0; i < n; ++i) twice[i] = std::llround(2.0 * ranks[i]);
    const std::int64_t base = static_cast<std::int64_t>(na * (na + 1));
    const std::int64_t two_mu = static_cast<std::int64_t>(na * nb);
    const std::int64_t observed = std::abs(std::llround(2.0 * r1) - base - two_mu);
    std::uint64_t extreme = 0, total = 0;
    for_each_combination(n, na, [&](std::uint64_t mask) {
      ++total;
      std::int64_t sum = 0;
      for (std::size_t pos = 0; pos < n; ++pos) {
        if (mask >> pos & 1U) sum += twice[pos];
      }
      if (std::abs(sum - base - two_mu) >= observed) ++extreme;
    });
    r.p_value = std::clamp(static_cast<double>(extreme) / static_cast<double>(total), 0.0, 1.0);
    return r;
  }

  r.method = MethodUsed::asymptotic;
  std::vector<double> sorted = pooled;
  std::sort(sorted.begin(), sorted.end());
  double tie_sum = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    tie_sum += t * t * t - t;
    i = j;
  }
  const double var = dna * dnb / 12.0 * ((dn + 1.0) - tie_sum / (dn * (dn - 1.0)));
  if (!(var > 0.0)) {
    r.p_value = 1.0;
    return r;
  }
  const double diff = r.u - mu;
  const double sign = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
  const double z = (diff - 0.5 * sign) / std::sqrt(var);
  r.z = z;
  r.p_value = std::clamp(std::erfc(std::abs(z) / std::numbers::sqrt2), 0.0, 1.0);
  return r;
}

std::vector<PairwiseComparison> compare_models(const ScoreVectors& scores, const TestConfig& config) {
  config.validate();
  if (scores.size() < 2) {
    throw Error(ErrorKind::invalid_argument, "need at least two models to compare");
  }
  for (const auto& [name, v] : scores) {
    if (v.size() != scores.front().second.size()) {
      throw Error(ErrorKind::invalid_argument, "score vector of '" + name + "' has length " +
                                                   std::to_string(v.size()) + ", expected " +
                                                   std::to_string(scores.front().second.size()));
    }
  }
  std::vector<PairwiseComparison> out;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    for (std::size_t j = i + 1; j < scores.size(); ++j) {
      PairwiseComparison c;
      c.first = scores[i].first;
      c.second = scores[j].first;
      c.ks = ks_two_sample(scores[i].second, scores[j].second, config);
      c.mwu = mwu_two_sample(scores[i].second, scores[j].second, config);
      c.significant = c.ks.p_value < config.alpha || c.mwu.p_value < config.alpha;
      out.push_back(std::move(c));
    }
  }
  return out;
}

const char* to_string(MethodUsed m) noexcept { return m == MethodUsed::exact ? "exact" : "asymptotic"; }

const char* to_string(TestMethod m) noexcept {
  switch (m) {
    case TestMethod::auto_select: return "auto";
    case TestMethod::exact: return "exact";
    case TestMethod::asymptotic: return "asymptotic";
  }
  return "?";
}

TestMethod parse_test_method(const std::string& text) {
  if (text == "auto") return TestMethod::auto_select;
  if (text == "exact") return TestMethod::exact;
  if (text == "asymptotic") return TestMethod::asymptotic;
  throw Error(ErrorKind::invalid_argument, "unknown test method '" + text + "'");
}

ordered_json comparisons_to_json(const std::vector<PairwiseComparison>& rows, const TestConfig& config) {
  ordered_json j;
  j["alpha"] = config.alpha;
  j["method"] = to_string(config.method);
  ordered_json table = ordered_json::object();
  for (const auto& c : rows) {
    ordered_json mwu = {{"u", c.mwu.u}, {"p_value", c.mwu.p_value}};
    mwu["z"] = c.mwu.z ? ordered_json(*c.mwu.z) : ordered_json(nullptr);
    mwu["method"] = c.mwu.method == MethodUsed::exact ? "exact" : "asymptotic-tie-corrected";
    table[c.first + " vs. " + c.second] = {
        {"first", c.first},
        {"second", c.second},
        {"ks", {{"statistic", c.ks.statistic}, {"p_value", c.ks.p_value}, {"method", to_string(c.ks.method)}}},
        {"mwu", mwu},
        {"significant_at_alpha", c.significant}};
  }
  j["comparisons"] = table;
  return j;
}

std::string comparisons_to_csv(const std::vector<PairwiseComparison>& rows) {
  std::string out = "comparison,ks_stat,ks_p,u_stat,u_p,significant_at_alpha\n";
  char buf[256];
  for (const auto& c : rows) {
    std::snprintf(buf, sizeof buf, ",%.17g,%.17g,%.17g,%.17g,%s\n", c.ks.statistic, c.ks.p_value,
                  c.mwu.u, c.mwu.p_value, c.significant ? "true" : "false");
    out += c.first + " vs. " + c.second + buf;
  }
  return out;
}

}  // namespace hydrate
