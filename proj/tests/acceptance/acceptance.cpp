// Acceptance suite: one PASS/FAIL/SKIP line per criterion. Every check uses
// an oracle written independently of the library code it verifies.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "hydrate/pipeline.hpp"
#include "hydrate/rng.hpp"

using namespace hydrate;
namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct Outcome {
  enum class Status { pass, fail, skip } status = Status::pass;
  std::string detail;
};

struct Checker {
  std::vector<std::string> failures;
  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  Outcome outcome(const std::string& ok_detail) const {
    if (failures.empty()) return {Outcome::Status::pass, ok_detail};
    std::string d = failures.front();
    if (failures.size() > 1) d += " (+" + std::to_string(failures.size() - 1) + " more)";
    return {Outcome::Status::fail, d};
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

constexpr auto N = ClassLabel::normal;
constexpr auto R = ClassLabel::rapid_loss;
constexpr auto H = ClassLabel::hydrate;

// ---------------------------------------------------------------------------
// 1. Metric math on the published confusion matrices
// ---------------------------------------------------------------------------

Outcome metric_math() {
  const std::vector<ClassLabel> order{H, R, N};
  struct Case {
    const char* model;
    std::vector<std::vector<std::uint64_t>> grid;
    const char* printed_accuracy;
    std::array<const char*, 3> printed_f1;
  };
  const std::vector<Case> cases{
      {"dt", {{67926, 0, 0}, {0, 298608, 24}, {0, 25, 397209}}, "0.999", {"1.00", "1.00", "1.00"}},
      {"knn", {{67896, 0, 30}, {0, 297682, 950}, {85, 1088, 396061}}, "0.997", {"1.00", "1.00", "1.00"}},
      {"nb", {{1244, 32462, 34220}, {0, 298632, 0}, {329, 396402, 503}}, "0.393", {"0.04", "0.58", "0.00"}},
  };
  Checker c;
  std::vector<double> full;
  for (const auto& k : cases) {
    const auto m = ConfusionMatrix::from_counts(order, k.grid);
    const double acc = accuracy(m);
    const auto f1 = f1_per_class(m);
    // Printed accuracies are truncated, not rounded: 0.99994 appears as 0.999.
    c.expect(fmt("%.3f", std::floor(acc * 1000.0) / 1000.0) == k.printed_accuracy,
             std::string(k.model) + " accuracy " + fmt("%.5f", acc) + " != " + k.printed_accuracy);
    for (std::size_t i = 0; i < 3; ++i) {
      c.expect(fmt("%.2f", f1[i].f1) == k.printed_f1[i],
               std::string(k.model) + " F1[" + std::to_string(i) + "] " + fmt("%.4f", f1[i].f1));
    }
    // Independent oracle: trace / total and 2TP / (2TP + FP + FN).
    std::uint64_t trace = 0, total = 0;
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) {
        total += k.grid[i][j];
        if (i == j) trace += k.grid[i][j];
      }
    }
    c.expect(std::abs(acc - static_cast<double>(trace) / static_cast<double>(total)) < 1e-15,
             std::string(k.model) + " accuracy differs from trace/total");
    for (std::size_t i = 0; i < 3; ++i) {
      std::uint64_t fp = 0, fn = 0;
      for (std::size_t j = 0; j < 3; ++j) {
        if (j != i) {
          fp += k.grid[j][i];
          fn += k.grid[i][j];
        }
      }
      const double tp = static_cast<double>(k.grid[i][i]);
      const double oracle = 2 * tp / (2 * tp + static_cast<double>(fp + fn));
      c.expect(std::abs(f1[i].f1 - oracle) < 1e-12, std::string(k.model) + " F1 differs from 2TP/(2TP+FP+FN)");
    }
    full.push_back(acc);
  }
  // Full-precision accuracies implied by the published matrices.
  const double dt_full = 763743.0 / 763792.0, knn_full = 761639.0 / 763792.0, nb_full = 300379.0 / 763792.0;
  c.expect(std::abs(full[0] - 0.99994) < 5e-6, "dt accuracy " + fmt("%.6f", full[0]) + " vs 0.99994");
  c.expect(std::abs(full[1] - knn_full) < 5e-6, "knn accuracy " + fmt("%.6f", full[1]));
  c.expect(std::abs(full[2] - 0.39327) < 5e-6, "nb accuracy " + fmt("%.6f", full[2]) + " vs 0.39327");
  c.expect(std::abs(full[0] - dt_full) < 1e-15 && std::abs(full[2] - nb_full) < 1e-15, "ratio mismatch");
  return c.outcome("accuracies " + fmt("%.5f", full[0]) + " / " + fmt("%.5f", full[1]) + " / " +
                   fmt("%.5f", full[2]) + "; F1 columns reproduced");
}

// ---------------------------------------------------------------------------
// 2. Statistics on the published F1 vectors
// ---------------------------------------------------------------------------

Outcome statistics_oracle() {
  const ScoreVectors v{{"dt", {1, 1, 1}}, {"knn", {1, 1, 1}}, {"nb", {0.04, 0.58, 0.00}}};
  const auto rows = compare_models(v);
  Checker c;
  const std::array<const char*, 3> ks_d{"0.00", "1.00", "1.00"};
  const std::array<const char*, 3> ks_p{"1.000", "0.100", "0.100"};
  const std::array<const char*, 3> u{"4.5", "9.0", "9.0"};
  const std::array<const char*, 3> u_p{"1.000", "0.064", "0.064"};
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& r = rows[i];
    const std::string name = r.first + " vs. " + r.second;
    c.expect(fmt("%.2f", r.ks.statistic) == ks_d[i], name + " KS D " + fmt("%.4f", r.ks.statistic));
    c.expect(fmt("%.3f", r.ks.p_value) == ks_p[i], name + " KS p " + fmt("%.4f", r.ks.p_value));
    c.expect(fmt("%.1f", r.mwu.u) == u[i], name + " U " + fmt("%.2f", r.mwu.u));
    c.expect(fmt("%.3f", r.mwu.p_value) == u_p[i], name + " MWU p " + fmt("%.4f", r.mwu.p_value));
  }
  TestConfig exact;
  exact.method = TestMethod::exact;
  const auto ex = compare_models(v, exact);
  for (std::size_t i = 1; i < 3; ++i) {
    c.expect(fmt("%.3f", ex[i].mwu.p_value) == std::string("0.100"),
             "exact MWU p " + fmt("%.4f", ex[i].mwu.p_value));
  }
  return c.outcome("KS p 1.000/0.100/0.100, MWU U 4.5/9.0/9.0 p " + fmt("%.3f", rows[0].mwu.p_value) + "/" +
                   fmt("%.3f", rows[1].mwu.p_value) + "/" + fmt("%.3f", rows[2].mwu.p_value) +
                   ", exact MWU p " + fmt("%.3f", ex[1].mwu.p_value));
}

// ---------------------------------------------------------------------------
// 3. Exact tests against brute-force enumeration
// ---------------------------------------------------------------------------

double oracle_ks_d(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> points(a);
  points.insert(points.end(), b.begin(), b.end());
  double d = 0.0;
  for (double x : points) {
    double fa = 0, fb = 0;
    for (double v : a) fa += v <= x;
    for (double v : b) fb += v <= x;
    d = std::max(d, std::abs(fa / static_cast<double>(a.size()) - fb / static_cast<double>(b.size())));
  }
  return d;
}

double oracle_u(const std::vector<double>& a, const std::vector<double>& b) {
  double u = 0.0;
  for (double x : a) {
    for (double y : b) u += x > y ? 1.0 : (x == y ? 0.5 : 0.0);
  }
  return u;
}

/// Visits every way of choosing |a| of the pooled values as the first sample.
void enumerate_splits(const std::vector<double>& pooled, std::size_t na,
                      const std::function<void(const std::vector<double>&, const std::vector<double>&)>& fn) {
  std::vector<bool> pick(pooled.size(), false);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(na), true);
  // prev_permutation walks all distinct arrangements of the boolean mask.
  do {
    std::vector<double> a, b;
    for (std::size_t i = 0; i < pooled.size(); ++i) (pick[i] ? a : b).push_back(pooled[i]);
    fn(a, b);
  } while (std::prev_permutation(pick.begin(), pick.end()));
}

Outcome exact_enumeration() {
  CounterRng rng(20240601, 3);
  Checker c;
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t na = 1 + rng.below(6);
    const std::size_t nb = 1 + rng.below(std::min<std::size_t>(6, 12 - na));
    const double levels = static_cast<double>(2 + rng.below(6));  // small alphabets force ties
    std::vector<double> a, b;
    for (std::size_t i = 0; i < na; ++i) a.push_back(std::floor(rng.uniform() * levels));
    for (std::size_t i = 0; i < nb; ++i) b.push_back(std::floor(rng.uniform() * levels));

    std::vector<double> pooled(a);
    pooled.insert(pooled.end(), b.begin(), b.end());
    const double d_obs = oracle_ks_d(a, b);
    const double u_obs = oracle_u(a, b);
    const double mu = static_cast<double>(na * nb) / 2.0;
    std::size_t total = 0, ks_hits = 0, u_hits = 0;
    enumerate_splits(pooled, na, [&](const std::vector<double>& x, const std::vector<double>& y) {
      ++total;
      if (oracle_ks_d(x, y) >= d_obs - 1e-12) ++ks_hits;
      if (std::abs(oracle_u(x, y) - mu) >= std::abs(u_obs - mu) - 1e-12) ++u_hits;
    });
    const double ks_oracle = static_cast<double>(ks_hits) / static_cast<double>(total);
    const double u_oracle = static_cast<double>(u_hits) / static_cast<double>(total);

    TestConfig exact;
    exact.method = TestMethod::exact;
    const auto ks = ks_two_sample(a, b, exact);
    const auto mw = mwu_two_sample(a, b, exact);
    const double err = std::max({std::abs(ks.p_value - ks_oracle), std::abs(mw.p_value - u_oracle),
                                 std::abs(ks.statistic - d_obs), std::abs(mw.u - u_obs)});
    worst = std::max(worst, err);
    c.expect(err <= 1e-12, "trial " + std::to_string(trial) + " differs by " + fmt("%.3g", err));
  }
  return c.outcome("200 tied sample pairs, max |diff| " + fmt("%.1e", worst));
}

// ---------------------------------------------------------------------------
// 4. Quality report recovers injected corruption
// ---------------------------------------------------------------------------

Outcome qc_recovery() {
  auto cfg = SynthConfig::defaults();
  // Identical bounded regimes in every class: Tukey fences then flag only
  // injected values, so the ground truth is exactly what was injected.
  for (auto& r : cfg.classes) r.channels.assign(cfg.variables.size(), ChannelRegime{10.0, 1.0, 0.0});
  cfg.noise = NoiseShape::uniform;
  cfg.latent_loading = 0.0;
  cfg.missing_fraction = 0.2418;
  cfg.frozen_fraction = 0.0994;
  cfg.outlier_fractions = {0.1347, 0.0901, 0.0, 0.0636};

  const auto inst = synth_generate(cfg);
  const auto m = flatten(inst, cfg.variables);
  const auto report = quality_report(inst, m);

  Checker c;
  const double cells = static_cast<double>(m.rows() * m.cols());
  const double inst_channels = static_cast<double>(inst.size() * cfg.variables.size());
  const auto& s = report.selected;
  c.expect(std::abs(static_cast<double>(s.missing_cells) - 0.2418 * cells) <= 1.0,
           "missing cells " + std::to_string(s.missing_cells));
  c.expect(std::abs(s.overall_missing_pct - 24.18) <= 100.0 / cells + 1e-9,
           "missing pct " + fmt("%.4f", s.overall_missing_pct));
  c.expect(std::abs(static_cast<double>(s.frozen_instance_channels) - 0.0994 * inst_channels) <= 1.0,
           "frozen instance-channels " + std::to_string(s.frozen_instance_channels));
  std::string per_channel;
  for (std::size_t j = 0; j < report.channels.size(); ++j) {
    const auto& ch = report.channels[j];
    if (!ch.boxplot) {
      c.expect(false, ch.name + " has no boxplot");
      continue;
    }
    const double observed = static_cast<double>(ch.boxplot->n_valid);
    const double found = static_cast<double>(ch.boxplot->outlier_row_indices.size());
    c.expect(std::abs(found - cfg.outlier_fractions[j] * observed) <= 1.0,
             ch.name + " outliers " + fmt("%.0f", found) + " vs " + fmt("%.1f", cfg.outlier_fractions[j] * observed));
    per_channel += (j ? "/" : "") + fmt("%.2f", ch.outlier_pct);
  }
  return c.outcome("missing " + fmt("%.2f", s.overall_missing_pct) + "%, frozen " +
                   fmt("%.2f", s.overall_frozen_pct) + "%, outliers " + per_channel + "%");
}

// ---------------------------------------------------------------------------
// 5. Classifier oracles
// ---------------------------------------------------------------------------

struct Block {
  std::vector<double> x;
  std::vector<ClassLabel> y;
  std::size_t d;
  RowBlock block() const { return {x, d}; }
  std::span<const double> row(std::size_t i) const { return std::span<const double>(x).subspan(i * d, d); }
};

Block random_block(std::size_t n, std::size_t d, std::uint64_t stream) {
  CounterRng rng(77, stream);
  Block b{{}, {}, d};
  for (std::size_t i = 0; i < n; ++i) {
    const auto label = kAllClasses[rng.below(3)];
    for (std::size_t j = 0; j < d; ++j) {
      b.x.push_back(rng.normal() + (j == class_index(label) ? 1.2 : 0.0));
    }
    b.y.push_back(label);
  }
  return b;
}

ClassLabel oracle_knn(const Block& train, std::span<const double> q, std::size_t k) {
  std::vector<std::pair<double, std::size_t>> all;
  for (std::size_t i = 0; i < train.y.size(); ++i) {
    double s = 0;
    for (std::size_t j = 0; j < train.d; ++j) s += (q[j] - train.x[i * train.d + j]) * (q[j] - train.x[i * train.d + j]);
    all.emplace_back(s, i);
  }
  std::sort(all.begin(), all.end());
  std::array<int, 3> votes{};
  std::array<double, 3> nearest{INFINITY, INFINITY, INFINITY};
  for (std::size_t n = 0; n < k; ++n) {
    const auto c = class_index(train.y[all[n].second]);
    ++votes[c];
    nearest[c] = std::min(nearest[c], all[n].first);
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < 3; ++c) {
    if (votes[c] > votes[best] || (votes[c] == votes[best] && nearest[c] < nearest[best])) best = c;
  }
  return kAllClasses[best];
}

ClassLabel replay_tree(const ordered_json& node, std::span<const double> row) {
  const ordered_json* n = &node;
  while (n->contains("feature")) {
    const auto f = (*n)["feature"].get<std::size_t>();
    n = row[f] <= (*n)["threshold"].get<double>() ? &(*n)["left"] : &(*n)["right"];
  }
  const auto counts = (*n)["counts"].get<std::vector<std::uint64_t>>();
  std::size_t best = 0;
  for (std::size_t c = 1; c < counts.size(); ++c) {
    if (counts[c] > counts[best]) best = c;
  }
  return kAllClasses[best];
}

Outcome classifier_oracles() {
  const auto train = random_block(500, 4, 1);
  const auto test = random_block(200, 4, 2);
  Checker c;

  const auto knn = KnnClassifier::fit(train.block(), train.y, 5);
  const auto knn_pred = knn.predict(test.block(), 2);
  std::size_t knn_agree = 0;
  for (std::size_t i = 0; i < test.y.size(); ++i) knn_agree += knn_pred[i] == oracle_knn(train, test.row(i), 5);
  c.expect(knn_agree == test.y.size(), "k-NN agrees on " + std::to_string(knn_agree) + "/200");

  const auto tree = DecisionTree::fit(train.block(), train.y);
  const auto tree_json = tree.to_json();
  const auto tree_pred = tree.predict(test.block());
  std::size_t tree_agree = 0;
  for (std::size_t i = 0; i < test.y.size(); ++i) tree_agree += tree_pred[i] == replay_tree(tree_json["tree"], test.row(i));
  c.expect(tree_agree == test.y.size(), "tree agrees on " + std::to_string(tree_agree) + "/200");

  const double smoothing = 1e-9;
  const auto nb = GaussianNb::fit(train.block(), train.y, smoothing);
  // Independent parameter estimates and log-density evaluation.
  const std::size_t d = train.d, n = train.y.size();
  double max_var = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    double mean = 0, ss = 0;
    for (std::size_t i = 0; i < n; ++i) mean += train.x[i * d + j];
    mean /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) ss += (train.x[i * d + j] - mean) * (train.x[i * d + j] - mean);
    max_var = std::max(max_var, ss / static_cast<double>(n));
  }
  const double eps = smoothing * max_var;
  double worst = 0.0;
  for (std::size_t cls = 0; cls < 3; ++cls) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < n; ++i) {
      if (class_index(train.y[i]) == cls) rows.push_back(i);
    }
    const double cnt = static_cast<double>(rows.size());
    std::vector<double> mean(d, 0.0), var(d, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
      for (auto i : rows) mean[j] += train.x[i * d + j];
      mean[j] /= cnt;
      for (auto i : rows) var[j] += (train.x[i * d + j] - mean[j]) * (train.x[i * d + j] - mean[j]);
      var[j] = std::max(var[j] / cnt, eps);
    }
    for (std::size_t t = 0; t < test.y.size(); ++t) {
      double s = std::log(cnt / static_cast<double>(n));
      for (std::size_t j = 0; j < d; ++j) {
        const double z = test.x[t * d + j] - mean[j];
        s -= 0.5 * std::log(2.0 * std::numbers::pi * var[j]) + z * z / (2.0 * var[j]);
      }
      const double got = nb.scores(test.row(t))[cls];
      worst = std::max(worst, std::abs(got - s) / std::max(1.0, std::abs(s)));
    }
  }
  c.expect(worst <= 1e-12, "NB log-score differs by " + fmt("%.3g", worst));
  return c.outcome("k-NN " + std::to_string(knn_agree) + "/200, tree " + std::to_string(tree_agree) +
                   "/200, NB max rel diff " + fmt("%.1e", worst));
}

// ---------------------------------------------------------------------------
// 6. Qualitative reproduction on the default synthetic corpus
// ---------------------------------------------------------------------------

Outcome qualitative_table1() {
  RunConfig cfg;
  const auto inst = load_instances(cfg);
  const auto data = prepare(inst, cfg);
  Checker c;
  c.expect(data.raw.rows() >= 50'000, "corpus has only " + std::to_string(data.raw.rows()) + " rows");
  std::array<std::size_t, 3> per_class{};
  for (const auto& i : inst) ++per_class[class_index(i.label())];
  c.expect(per_class[0] == 597 && per_class[1] == 344 && per_class[2] == 84, "class ratio is not 597:344:84");

  const auto models = train_all(data.parts.train.block(), data.parts.train.labels(), cfg.classifiers, cfg.models, 1);
  std::map<std::string, EvalReport> r;
  for (const auto& m : models) r[m.name] = evaluate(*m.model, data.parts.test);
  const auto hydrate_f1 = [&](const std::string& name) { return r[name].per_class[class_index(H)].f1; };
  for (const char* strong : {"dt", "knn"}) {
    c.expect(r[strong].accuracy >= 0.99, std::string(strong) + " accuracy " + fmt("%.4f", r[strong].accuracy));
    c.expect(hydrate_f1(strong) >= 0.95, std::string(strong) + " hydrate F1 " + fmt("%.4f", hydrate_f1(strong)));
    c.expect(r["nb"].accuracy <= r[strong].accuracy - 0.05,
             "nb accuracy " + fmt("%.4f", r["nb"].accuracy) + " not 0.05 below " + strong);
  }
  c.expect(hydrate_f1("nb") < hydrate_f1("dt") && hydrate_f1("nb") < hydrate_f1("knn"),
           "nb hydrate F1 is not the minimum");
  return c.outcome(std::to_string(data.raw.rows()) + " rows; accuracy dt " + fmt("%.4f", r["dt"].accuracy) +
                   ", knn " + fmt("%.4f", r["knn"].accuracy) + ", nb " + fmt("%.4f", r["nb"].accuracy) +
                   "; hydrate F1 " + fmt("%.3f", hydrate_f1("dt")) + "/" + fmt("%.3f", hydrate_f1("knn")) + "/" +
                   fmt("%.3f", hydrate_f1("nb")));
}

// ---------------------------------------------------------------------------
// 7. Determinism of full pipeline runs
// ---------------------------------------------------------------------------

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    files[fs::relative(e.path(), root).generic_string()] = s.str();
  }
  return files;
}

Outcome determinism(const std::string& cli) {
  const auto base = fs::temp_directory_path() / "hydrate_acceptance_determinism";
  fs::remove_all(base);
  fs::create_directories(base);
  const std::vector<std::pair<std::string, unsigned>> runs{{"a", 1}, {"b", 1}, {"c", 4}};
  for (const auto& [name, threads] : runs) {
    const auto out = base / name;
    if (!cli.empty()) {
      const std::string cmd = "\"" + cli + "\" pipeline --seed 42 --threads " + std::to_string(threads) +
                              " --out \"" + out.string() + "\" > \"" + (base / (name + ".log")).string() + "\" 2>&1";
      if (std::system(cmd.c_str()) != 0) return {Outcome::Status::fail, "pipeline run '" + name + "' failed"};
    } else {
      RunConfig cfg;
      cfg.threads = threads;
      run_pipeline(cfg, out);
    }
  }
  const auto a = snapshot(base / "a"), b = snapshot(base / "b"), c = snapshot(base / "c");
  Checker chk;
  chk.expect(a.size() >= 15, "only " + std::to_string(a.size()) + " output files");
  chk.expect(a == b, "repeated runs differ");
  chk.expect(a == c, "--threads 4 output differs from --threads 1");
  return chk.outcome(std::to_string(a.size()) + " files byte-identical across 3 runs (threads 1, 1, 4)" +
                     (cli.empty() ? " [library]" : " [cli]"));
}

// ---------------------------------------------------------------------------
// 8. Optional real-data check
// ---------------------------------------------------------------------------

Outcome real_data() {
  const char* root = std::getenv("HYDRATE_3W_ROOT");
  if (root == nullptr || !fs::is_directory(root)) {
    return {Outcome::Status::skip, "set HYDRATE_3W_ROOT to a folder-per-class 3W copy to run"};
  }
  RunConfig cfg;
  cfg.dataset_root = root;
  // Folder names carry the label; observation codes only confirm it.
  cfg.label_map = {{0, std::nullopt}, {5, R}, {105, R}, {8, H}, {108, H}};
  const auto inst = load_instances(cfg);
  const auto raw = flatten(inst, cfg.variables);
  const auto report = quality_report(inst, raw);
  const auto data = prepare(inst, cfg);
  const std::vector<std::string> kinds{"dt", "knn"};
  const auto models = train_all(data.parts.train.block(), data.parts.train.labels(), cfg.classifiers, kinds, 4);
  Checker c;
  c.expect(std::abs(report.selected.overall_missing_pct - 24.18) <= 0.5,
           "missing " + fmt("%.2f", report.selected.overall_missing_pct) + "%");
  std::string accs;
  for (const auto& m : models) {
    const double acc = evaluate(*m.model, data.parts.test, 4).accuracy;
    c.expect(acc >= 0.99, m.name + " accuracy " + fmt("%.4f", acc));
    accs += " " + m.name + " " + fmt("%.4f", acc);
  }
  return c.outcome("missing " + fmt("%.2f", report.selected.overall_missing_pct) + "%," + accs);
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  struct Criterion {
    const char* name;
    double limit_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"metric-math oracle (published confusion matrices)", 1.0, metric_math},
      {"statistics oracle (published F1 vectors)", 1.0, statistics_oracle},
      {"exact-test enumeration equivalence", 60.0, exact_enumeration},
      {"QC ground-truth recovery", 30.0, qc_recovery},
      {"classifier oracles (k-NN, tree replay, NB formula)", 60.0, classifier_oracles},
      {"qualitative confusion-matrix reproduction", 300.0, qualitative_table1},
      {"determinism of pipeline outputs", 600.0, [&] { return determinism(cli); }},
      {"real-data check (optional)", 3600.0, real_data},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& k = criteria[i];
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = k.run();
    } catch (const std::exception& e) {
      o = {Outcome::Status::fail, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.status == Outcome::Status::pass && secs > k.limit_seconds) {
      o = {Outcome::Status::fail, "took " + fmt("%.1f", secs) + " s, limit " + fmt("%.0f", k.limit_seconds) + " s"};
    }
    const char* tag = o.status == Outcome::Status::pass ? "PASS" : o.status == Outcome::Status::fail ? "FAIL" : "SKIP";
    if (o.status == Outcome::Status::fail) ++failed;
    std::printf("%s [%zu] %s: %s (%.2f s)\n", tag, i + 1, k.name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%s: %d failing criteria\n", failed ? "FAILED" : "OK", failed);
  return failed ? 1 : 0;
}
