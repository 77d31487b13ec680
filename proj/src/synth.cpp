#include <algorithm>
#include <cmath>
#include <cstdio>

#include "hydrate/dataset.hpp"
#include "hydrate/rng.hpp"

namespace hydrate {

SynthConfig SynthConfig::defaults() {
  SynthConfig c;
  // Channel order: P-TPT [Pa], T-TPT [°C], P-MON-CKP [Pa], T-JUS-CKP [°C].
  c.classes[class_index(ClassLabel::normal)] = {
      597, 50, {{2.0e7, 1.0e6, 0.0}, {80.0, 5.0, 0.0}, {1.0e7, 5.0e5, 0.0}, {55.0, 4.0, 0.0}}};
  // Pump-head pressure and both temperatures decline while the upstream choke
  // pressure builds up.
  c.classes[class_index(ClassLabel::rapid_loss)] = {
      344,
      50,
      {{2.1e7, 1.0e6, -1.0e7}, {75.0, 5.0, -65.0}, {0.95e7, 5.0e5, 0.65e7}, {50.0, 4.0, -40.0}}};
  // Low temperature, high choke pressure.
  c.classes[class_index(ClassLabel::hydrate)] = {
      84, 50, {{1.6e7, 1.5e6, 0.0}, {5.0, 3.0, 0.0}, {1.5e7, 5.0e5, 0.0}, {8.0, 3.0, 0.0}}};
  return c;
}

namespace {

constexpr std::uint64_t kFrozenStream = 1ULL << 40;
constexpr std::uint64_t kMissingStream = (1ULL << 40) + 1;
constexpr std::uint64_t kOutlierStreamBase = (1ULL << 40) + 16;

void check_fraction(double f, const char* what) {
  if (!(f >= 0.0 && f < 1.0)) {
    throw Error(ErrorKind::invalid_argument, std::string(what) + " must lie in [0, 1)");
  }
}

void validate(const SynthConfig& c) {
  if (c.variables.empty()) throw Error(ErrorKind::invalid_argument, "no variables to generate");
  std::size_t total = 0;
  for (auto label : kAllClasses) {
    const auto& regime = c.classes[class_index(label)];
    total += regime.count;
    if (regime.count == 0) continue;
    if (regime.length == 0) {
      throw Error(ErrorKind::invalid_argument,
                  "zero instance length for " + std::string(class_name(label)));
    }
    if (regime.channels.size() != c.variables.size()) {
      throw Error(ErrorKind::invalid_argument,
                  "regime of " + std::string(class_name(label)) + " has " +
                      std::to_string(regime.channels.size()) + " channels, expected " +
                      std::to_string(c.variables.size()));
    }
    for (const auto& ch : regime.channels) {
      if (!std::isfinite(ch.mean) || !std::isfinite(ch.sd) || !std::isfinite(ch.ramp) ||
          ch.sd < 0.0) {
        throw Error(ErrorKind::invalid_argument, "regime parameters must be finite, sd >= 0");
      }
    }
  }
  if (total == 0) throw Error(ErrorKind::invalid_argument, "zero total instances requested");
  if (!(c.latent_loading >= 0.0 && c.latent_loading <= 1.0) ||
      !(c.instance_share >= 0.0 && c.instance_share <= 1.0) ||
      !(std::abs(c.ar_coefficient) < 1.0)) {
    throw Error(ErrorKind::invalid_argument, "latent parameters out of range");
  }
  if (!(c.hydrate_band_low <= c.hydrate_band_high)) {
    throw Error(ErrorKind::invalid_argument, "hydrate temperature band is empty");
  }
  check_fraction(c.missing_fraction, "missing_fraction");
  check_fraction(c.frozen_fraction, "frozen_fraction");
  if (!c.outlier_fractions.empty() && c.outlier_fractions.size() != c.variables.size()) {
    throw Error(ErrorKind::invalid_argument, "outlier_fractions must have one entry per variable");
  }
  for (double f : c.outlier_fractions) check_fraction(f, "outlier fraction");
}

double draw(CounterRng& rng, NoiseShape shape) {
  if (shape == NoiseShape::gaussian) return rng.normal();
  return (2.0 * rng.uniform() - 1.0) * std::sqrt(3.0);  // unit variance
}

/// Chooses k distinct items from `pool` (partial Fisher-Yates); order of the
/// returned prefix is the selection order.
template <class T>
std::vector<T> choose(std::vector<T> pool, std::size_t k, CounterRng& rng) {
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

std::size_t rounded(double fraction, std::size_t n) {
  return static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
}

struct Draft {
  std::string id;
  ClassLabel label;
  std::vector<Timestamp> timestamps;
  std::vector<std::vector<double>> values;  // [channel][t]
};

Draft generate_instance(const SynthConfig& c, ClassLabel label, std::size_t global_index,
                        std::size_t class_ordinal) {
  const auto& regime = c.classes[class_index(label)];
  const std::size_t n = regime.length;
  CounterRng rng(c.seed, global_index);

  const double share = c.instance_share;
  const double phi = c.ar_coefficient;
  std::vector<double> latent(n);
  const double u = draw(rng, c.noise);
  double w = draw(rng, c.noise);
  for (std::size_t t = 0; t < n; ++t) {
    if (t > 0) w = phi * w + std::sqrt(1.0 - phi * phi) * draw(rng, c.noise);
    latent[t] = std::sqrt(share) * u + std::sqrt(1.0 - share) * w;
  }

  const double rho = c.latent_loading;
  const double idio = std::sqrt(1.0 - rho * rho);
  Draft d;
  char id[64];
  std::snprintf(id, sizeof id, "synth_%05zu", class_ordinal);
  d.id = std::string(class_directory(label)) + "/" + id;
  d.label = label;
  d.values.assign(c.variables.size(), std::vector<double>(n));
  for (std::size_t t = 0; t < n; ++t) {
    d.timestamps.push_back(c.start_time + static_cast<Timestamp>(t) * c.step_seconds * 1'000'000);
    const double tau = n > 1 ? static_cast<double>(t) / static_cast<double>(n - 1) : 0.0;
    for (std::size_t j = 0; j < c.variables.size(); ++j) {
      const auto& ch = regime.channels[j];
      double v = ch.mean + ch.ramp * tau + ch.sd * (rho * latent[t] + idio * draw(rng, c.noise));
      if (label == ClassLabel::hydrate && is_temperature(c.variables[j])) {
        v = std::clamp(v, c.hydrate_band_low, c.hydrate_band_high);
      }
      d.values[j][t] = v;
    }
  }
  return d;
}

struct Cell {
  std::uint32_t instance;
  std::uint32_t channel;
  std::uint32_t t;
};

}  // namespace

std::vector<TimeSeriesInstance> synth_generate(const SynthConfig& c) {
  validate(c);

  std::vector<Draft> drafts;
  std::size_t global = 0;
  for (auto label : kAllClasses) {
    for (std::size_t k = 0; k < c.classes[class_index(label)].count; ++k) {
      drafts.push_back(generate_instance(c, label, global++, k));
    }
  }
  const std::size_t n_channels = c.variables.size();

  // Frozen instance-channels hold their first value for the whole episode.
  std::vector<std::vector<char>> frozen(drafts.size(), std::vector<char>(n_channels, 0));
  if (c.frozen_fraction > 0.0) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pool;
    for (std::size_t i = 0; i < drafts.size(); ++i) {
      for (std::size_t j = 0; j < n_channels; ++j) {
        pool.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
      }
    }
    const std::size_t k = rounded(c.frozen_fraction, pool.size());
    CounterRng rng(c.seed, kFrozenStream);
    for (auto [i, j] : choose(std::move(pool), k, rng)) {
      auto& vals = drafts[i].values[j];
      std::fill(vals.begin(), vals.end(), vals.front());
      frozen[i][j] = 1;
    }
  }

  // Missing cells are drawn corpus-wide. The first two samples of a frozen
  // channel stay observed so it remains detectable.
  if (c.missing_fraction > 0.0) {
    std::size_t total_cells = 0;
    std::vector<Cell> pool;
    for (std::size_t i = 0; i < drafts.size(); ++i) {
      const std::size_t n = drafts[i].timestamps.size();
      total_cells += n * n_channels;
      for (std::size_t j = 0; j < n_channels; ++j) {
        for (std::size_t t = frozen[i][j] ? std::min<std::size_t>(2, n) : 0; t < n; ++t) {
          pool.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                          static_cast<std::uint32_t>(t)});
        }
      }
    }
    const std::size_t k = rounded(c.missing_fraction, total_cells);
    if (k > pool.size()) {
      throw Error(ErrorKind::invalid_argument, "missing_fraction too high for frozen channels");
    }
    CounterRng rng(c.seed, kMissingStream);
    for (const auto& cell : choose(std::move(pool), k, rng)) {
      drafts[cell.instance].values[cell.channel][cell.t] = kMissing;
    }
  }

  // Outliers replace observed cells of non-frozen channels with values well
  // beyond the channel's range, alternating above and below.
  for (std::size_t j = 0; j < c.outlier_fractions.size(); ++j) {
    if (c.outlier_fractions[j] <= 0.0) continue;
    std::size_t observed = 0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    std::vector<Cell> pool;
    for (std::size_t i = 0; i < drafts.size(); ++i) {
      const auto& vals = drafts[i].values[j];
      for (std::size_t t = 0; t < vals.size(); ++t) {
        if (is_missing(vals[t])) continue;
        ++observed;
        lo = std::min(lo, vals[t]);
        hi = std::max(hi, vals[t]);
        if (!frozen[i][j]) {
          pool.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                          static_cast<std::uint32_t>(t)});
        }
      }
    }
    const std::size_t k = rounded(c.outlier_fractions[j], observed);
    if (k > pool.size()) {
      throw Error(ErrorKind::invalid_argument,
                  "outlier fraction too high for variable '" + c.variables[j] + "'");
    }
    const double width = hi > lo ? hi - lo : 1.0;
    CounterRng rng(c.seed, kOutlierStreamBase + j);
    const auto picked = choose(std::move(pool), k, rng);
    for (std::size_t n = 0; n < picked.size(); ++n) {
      const double offset = width * (2.0 + rng.uniform());
      drafts[picked[n].instance].values[j][picked[n].t] = (n % 2 == 0) ? hi + offset : lo - offset;
    }
  }

  std::vector<TimeSeriesInstance> out;
  out.reserve(drafts.size());
  for (auto& d : drafts) {
    std::vector<Channel> channels;
    for (std::size_t j = 0; j < n_channels; ++j) {
      channels.push_back({c.variables[j], std::move(d.values[j])});
    }
    out.emplace_back(std::move(d.id), d.label, std::move(d.timestamps), c.timestamp_format,
                     std::move(channels));
  }
  return out;
}

}  // namespace hydrate
