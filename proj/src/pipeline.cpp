#include "hydrate/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json_util.hpp"

namespace hydrate {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

const std::vector<std::string> kModelKinds = {"dt", "knn", "nb"};

void write_text(const fs::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot open '" + path.generic_string() + "' for writing");
  out << text;
  out.close();
  if (!out) throw Error(ErrorKind::io, "failed writing '" + path.generic_string() + "'");
}

void write_json(const fs::path& path, const ordered_json& j) { write_text(path, j.dump(2) + "\n"); }

ordered_json read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open '" + path.generic_string() + "'");
  try {
    return ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::unsupported_format,
                "'" + path.generic_string() + "' is not valid JSON: " + e.what());
  }
}

std::string safe_file_stem(const std::string& name) {
  std::string s = name;
  for (auto& ch : s) {
    const bool ok = (ch >= 'A' && ch <= 'Z') || (ch >= 'a' && ch <= 'z') || (ch >= '0' && ch <= '9') ||
                    ch == '-' || ch == '_' || ch == '.';
    if (!ok) ch = '_';
  }
  return s;
}

const char* quartile_name(QuartileMethod m) {
  return m == QuartileMethod::linear ? "linear" : "nearest_rank";
}

QuartileMethod parse_quartile(const std::string& s) {
  if (s == "linear") return QuartileMethod::linear;
  if (s == "nearest_rank") return QuartileMethod::nearest_rank;
  throw UsageError("unknown quartile_method '" + s + "'");
}

const char* normalization_name(NormalizationMode m) {
  return m == NormalizationMode::zscore ? "zscore" : "minmax";
}

NormalizationMode parse_normalization(const std::string& s) {
  if (s == "zscore") return NormalizationMode::zscore;
  if (s == "minmax") return NormalizationMode::minmax;
  throw UsageError("unknown normalization '" + s + "'");
}

const char* split_mode_name(SplitMode m) { return m == SplitMode::row ? "row" : "instance"; }

SplitMode parse_split_mode(const std::string& s) {
  if (s == "row") return SplitMode::row;
  if (s == "instance") return SplitMode::instance;
  throw UsageError("unknown split mode '" + s + "'");
}

void write_quality(const QualityReport& report, const FeatureMatrix& raw, const fs::path& out) {
  write_json(out / "quality_report.json", report.to_json());
  for (std::size_t c = 0; c < report.channels.size(); ++c) {
    const auto& ch = report.channels[c];
    if (!ch.boxplot) continue;
    std::ostringstream svg;
    const std::string title = ch.unit.empty() ? ch.name : ch.name + " (" + ch.unit + ")";
    write_boxplot_svg(svg, title, *ch.boxplot, raw.column(c));
    write_text(out / "boxplots" / (safe_file_stem(ch.name) + ".svg"), svg.str());
  }
}

void write_evaluation(const ModelSummary& m, const FeatureMatrix& test,
                      std::span<const ClassLabel> predicted, const fs::path& out) {
  write_json(out / ("eval_" + m.name + ".json"), m.report.to_json());
  write_text(out / ("eval_" + m.name + "_confusion.csv"), m.report.confusion_csv());
  write_text(out / ("points_" + m.name + ".csv"), points_csv(test, predicted));
}

FeatureMatrix flatten_selected(std::span<const TimeSeriesInstance> instances, const RunConfig& config) {
  return flatten(instances, config.variables);
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

void RunConfig::validate() const {
  if (variables.empty()) throw UsageError("variables list is empty");
  std::set<std::string> seen_vars;
  for (const auto& v : variables) {
    if (v.empty()) throw UsageError("empty variable name");
    if (!seen_vars.insert(v).second) throw UsageError("duplicate variable '" + v + "'");
  }
  if (models.empty()) throw UsageError("models list is empty");
  std::set<std::string> seen;
  for (const auto& m : models) {
    if (std::find(kModelKinds.begin(), kModelKinds.end(), m) == kModelKinds.end()) {
      throw UsageError("unknown model '" + m + "' (expected dt, knn or nb)");
    }
    if (!seen.insert(m).second) throw UsageError("duplicate model '" + m + "'");
  }
  if (!(preprocessing.tukey_multiplier >= 0.0) || !std::isfinite(preprocessing.tukey_multiplier)) {
    throw UsageError("tukey_multiplier must be finite and >= 0");
  }
  if (preprocessing.frozen_min_length < 2) throw UsageError("frozen_min_length must be >= 2");
  if (!(split.test_fraction > 0.0 && split.test_fraction < 1.0)) {
    throw UsageError("split.test_fraction must lie strictly inside (0, 1)");
  }
  if (!(stats.alpha > 0.0 && stats.alpha < 1.0)) throw UsageError("stats.alpha must lie inside (0, 1)");
  if (classifiers.knn_k == 0) throw UsageError("knn.k must be >= 1");
  if (classifiers.tree.min_samples_split < 2) throw UsageError("min_samples_split must be >= 2");
  if (!(classifiers.tree.min_impurity_decrease >= 0.0)) {
    throw UsageError("min_impurity_decrease must be >= 0");
  }
  if (!(classifiers.nb_var_smoothing > 0.0)) throw UsageError("var_smoothing must be > 0");
  if (threads == 0) throw UsageError("threads must be >= 1");
}

ordered_json synth_config_to_json(const SynthConfig& c) {
  ordered_json j;
  j["variables"] = c.variables;
  ordered_json classes = ordered_json::object();
  for (auto label : kAllClasses) {
    const auto& r = c.classes[class_index(label)];
    ordered_json channels = ordered_json::array();
    for (const auto& ch : r.channels) {
      channels.push_back({{"mean", ch.mean}, {"sd", ch.sd}, {"ramp", ch.ramp}});
    }
    classes[std::string(class_name(label))] = {
        {"count", r.count}, {"length", r.length}, {"channels", channels}};
  }
  j["classes"] = classes;
  j["latent_loading"] = c.latent_loading;
  j["instance_share"] = c.instance_share;
  j["ar_coefficient"] = c.ar_coefficient;
  j["noise"] = c.noise == NoiseShape::gaussian ? "gaussian" : "uniform";
  j["hydrate_band"] = {c.hydrate_band_low, c.hydrate_band_high};
  j["start_time"] = format_iso8601(c.start_time);
  j["step_seconds"] = c.step_seconds;
  j["timestamp_format"] = c.timestamp_format == TimestampFormat::iso8601 ? "iso8601" : "epoch_seconds";
  j["missing_fraction"] = c.missing_fraction;
  j["frozen_fraction"] = c.frozen_fraction;
  j["outlier_fractions"] = c.outlier_fractions;
  j["seed"] = c.seed;
  return j;
}

SynthConfig synth_config_from_json(const ordered_json& j, SynthConfig c) {
  detail::reject_unknown_keys(
      j,
      {"variables", "classes", "latent_loading", "instance_share", "ar_coefficient", "noise",
       "hydrate_band", "start_time", "step_seconds", "timestamp_format", "missing_fraction",
       "frozen_fraction", "outlier_fractions", "seed"},
      "synth");
  if (j.contains("variables")) c.variables = j["variables"].get<std::vector<std::string>>();
  if (j.contains("classes")) {
    const auto& cj = j["classes"];
    detail::reject_unknown_keys(cj, {"NormalCondition", "RapidProductivityLoss", "Hydrate"},
                                "synth.classes");
    for (auto label : kAllClasses) {
      const std::string key(class_name(label));
      if (!cj.contains(key)) continue;
      const auto& rj = cj[key];
      detail::reject_unknown_keys(rj, {"count", "length", "channels"}, "synth.classes." + key);
      auto& r = c.classes[class_index(label)];
      r.count = rj.value("count", r.count);
      r.length = rj.value("length", r.length);
      if (rj.contains("channels")) {
        r.channels.clear();
        for (const auto& chj : rj["channels"]) {
          detail::reject_unknown_keys(chj, {"mean", "sd", "ramp"}, "synth.classes." + key + ".channels");
          ChannelRegime ch;
          ch.mean = chj.value("mean", ch.mean);
          ch.sd = chj.value("sd", ch.sd);
          ch.ramp = chj.value("ramp", ch.ramp);
          r.channels.push_back(ch);
        }
      }
    }
  }
  c.latent_loading = j.value("latent_loading", c.latent_loading);
  c.instance_share = j.value("instance_share", c.instance_share);
  c.ar_coefficient = j.value("ar_coefficient", c.ar_coefficient);
  if (j.contains("noise")) {
    const auto s = j["noise"].get<std::string>();
    if (s == "gaussian") {
      c.noise = NoiseShape::gaussian;
    } else if (s == "uniform") {
      c.noise = NoiseShape::uniform;
    } else {
      throw UsageError("unknown synth.noise '" + s + "'");
    }
  }
  if (j.contains("hydrate_band")) {
    const auto band = j["hydrate_band"].get<std::vector<double>>();
    if (band.size() != 2) throw UsageError("synth.hydrate_band needs two numbers");
    c.hydrate_band_low = band[0];
    c.hydrate_band_high = band[1];
  }
  if (j.contains("start_time")) c.start_time = parse_iso8601(j["start_time"].get<std::string>());
  c.step_seconds = j.value("step_seconds", c.step_seconds);
  if (j.contains("timestamp_format")) {
    const auto s = j["timestamp_format"].get<std::string>();
    if (s == "iso8601") {
      c.timestamp_format = TimestampFormat::iso8601;
    } else if (s == "epoch_seconds") {
      c.timestamp_format = TimestampFormat::epoch_seconds;
    } else {
      throw UsageError("unknown synth.timestamp_format '" + s + "'");
    }
  }
  c.missing_fraction = j.value("missing_fraction", c.missing_fraction);
  c.frozen_fraction = j.value("frozen_fraction", c.frozen_fraction);
  if (j.contains("outlier_fractions")) {
    c.outlier_fractions = j["outlier_fractions"].get<std::vector<double>>();
  }
  c.seed = j.value("seed", c.seed);
  return c;
}

ordered_json RunConfig::to_json() const {
  ordered_json j;
  ordered_json labels = ordered_json::object();
  for (const auto& [code, label] : label_map) {
    labels[std::to_string(code)] = label ? ordered_json(std::string(class_name(*label))) : ordered_json(nullptr);
  }
  j["dataset"] = {{"root", dataset_root ? ordered_json(*dataset_root) : ordered_json(nullptr)},
                  {"label_map", labels}};
  j["synth"] = synth_config_to_json(synth);
  j["variables"] = variables;
  j["preprocessing"] = {{"quartile_method", quartile_name(preprocessing.quartile_method)},
                        {"tukey_multiplier", preprocessing.tukey_multiplier},
                        {"normalization", normalization_name(preprocessing.normalization)},
                        {"frozen_min_length", preprocessing.frozen_min_length}};
  j["classifiers"] = classifiers.to_json();
  j["split"] = {{"test_fraction", split.test_fraction},
                {"seed", split.seed},
                {"mode", split_mode_name(split.mode)},
                {"stratified", split.stratified}};
  j["stats"] = {{"alpha", stats.alpha}, {"method", to_string(stats.method)}};
  j["models"] = models;
  return j;
}

RunConfig RunConfig::from_json(const ordered_json& j) {
  RunConfig c;
  try {
    detail::reject_unknown_keys(j,
                                {"dataset", "synth", "variables", "preprocessing", "classifiers",
                                 "split", "stats", "models", "threads", "out"},
                                "config");
    if (j.contains("dataset")) {
      const auto& d = j["dataset"];
      detail::reject_unknown_keys(d, {"root", "label_map"}, "dataset");
      if (d.contains("root") && !d["root"].is_null()) c.dataset_root = d["root"].get<std::string>();
      if (d.contains("label_map")) {
        const auto& m = d["label_map"];
        if (!m.is_object()) throw UsageError("dataset.label_map must be an object");
        for (const auto& item : m.items()) {
          std::int64_t code = 0;
          try {
            std::size_t used = 0;
            code = std::stoll(item.key(), &used);
            if (used != item.key().size()) throw std::invalid_argument("trailing text");
          } catch (const std::exception&) {
            throw UsageError("dataset.label_map key '" + item.key() + "' is not an integer code");
          }
          const auto& v = item.value();
          if (v.is_null()) {
            c.label_map[code] = std::nullopt;
          } else if (v.is_number_integer()) {
            const auto label = class_from_code(v.get<std::int64_t>());
            if (!label) throw UsageError("dataset.label_map maps to an unknown class code");
            c.label_map[code] = *label;
          } else {
            c.label_map[code] = parse_class(v.get<std::string>());
          }
        }
      }
    }
    if (j.contains("synth")) c.synth = synth_config_from_json(j["synth"], c.synth);
    if (j.contains("variables")) c.variables = j["variables"].get<std::vector<std::string>>();
    if (j.contains("preprocessing")) {
      const auto& p = j["preprocessing"];
      detail::reject_unknown_keys(
          p, {"quartile_method", "tukey_multiplier", "normalization", "frozen_min_length"},
          "preprocessing");
      if (p.contains("quartile_method")) {
        c.preprocessing.quartile_method = parse_quartile(p["quartile_method"].get<std::string>());
      }
      c.preprocessing.tukey_multiplier = p.value("tukey_multiplier", c.preprocessing.tukey_multiplier);
      if (p.contains("normalization")) {
        c.preprocessing.normalization = parse_normalization(p["normalization"].get<std::string>());
      }
      c.preprocessing.frozen_min_length =
          p.value("frozen_min_length", c.preprocessing.frozen_min_length);
    }
    if (j.contains("classifiers")) c.classifiers = ClassifierConfig::from_json(j["classifiers"]);
    if (j.contains("split")) {
      const auto& s = j["split"];
      detail::reject_unknown_keys(s, {"test_fraction", "seed", "mode", "stratified"}, "split");
      c.split.test_fraction = s.value("test_fraction", c.split.test_fraction);
      c.split.seed = s.value("seed", c.split.seed);
      if (s.contains("mode")) c.split.mode = parse_split_mode(s["mode"].get<std::string>());
      c.split.stratified = s.value("stratified", c.split.stratified);
    }
    if (j.contains("stats")) {
      const auto& s = j["stats"];
      detail::reject_unknown_keys(s, {"alpha", "method"}, "stats");
      c.stats.alpha = s.value("alpha", c.stats.alpha);
      if (s.contains("method")) c.stats.method = parse_test_method(s["method"].get<std::string>());
    }
    if (j.contains("models")) c.models = j["models"].get<std::vector<std::string>>();
    c.threads = j.value("threads", c.threads);
    c.out = j.value("out", c.out);
  } catch (const Error& e) {
    throw UsageError(std::string("config: ") + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

RunConfig RunConfig::load(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open config file '" + path.generic_string() + "'");
  ordered_json j;
  try {
    j = ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("config file '" + path.generic_string() + "' is not valid JSON: " + e.what());
  }
  return from_json(j);
}

// ---------------------------------------------------------------------------
// Preprocessing
// ---------------------------------------------------------------------------

FeatureMatrix Preprocessor::apply(const FeatureMatrix& raw) const {
  return normalizer.apply(treat_outliers(imputer.apply(raw), fences));
}

ordered_json Preprocessor::to_json() const {
  return {{"imputer", imputer.to_json()}, {"fences", fences.to_json()}, {"normalizer", normalizer.to_json()}};
}

Preprocessor Preprocessor::from_json(const ordered_json& j) {
  detail::reject_unknown_keys(j, {"imputer", "fences", "normalizer"}, "preprocessing model");
  return {ImputationModel::from_json(j.at("imputer")), FenceModel::from_json(j.at("fences")),
          NormalizationModel::from_json(j.at("normalizer"))};
}

Preprocessor fit_preprocessor(const FeatureMatrix& raw_train, const PreprocessingConfig& config) {
  auto imputer = fit_imputer(raw_train);
  auto fences = fit_fences(raw_train, quality_options(config).boxplot);
  const auto treated = treat_outliers(imputer.apply(raw_train), fences);
  auto normalizer = fit_normalizer(treated, config.normalization);
  return {std::move(imputer), std::move(fences), std::move(normalizer)};
}

QualityOptions quality_options(const PreprocessingConfig& config) {
  QualityOptions o;
  o.boxplot.method = config.quartile_method;
  o.boxplot.whisker = config.tukey_multiplier;
  o.frozen_min_length = config.frozen_min_length;
  return o;
}

std::vector<TimeSeriesInstance> load_instances(const RunConfig& config) {
  if (config.dataset_root) {
    const auto manifest = build_manifest(*config.dataset_root);
    if (manifest.instances.empty()) {
      throw Error(ErrorKind::empty_data, "no instances found under '" + *config.dataset_root + "'");
    }
    return load_corpus(manifest, config.label_map);
  }
  return synth_generate(config.synth);
}

namespace {

PreparedData prepare_raw(FeatureMatrix raw, const RunConfig& config) {
  const auto raw_parts = split(raw, config.split);
  auto preprocessor = fit_preprocessor(raw_parts.train, config.preprocessing);
  TrainTest parts{preprocessor.apply(raw_parts.train), preprocessor.apply(raw_parts.test)};
  return {std::move(raw), std::move(parts), std::move(preprocessor)};
}

}  // namespace

PreparedData prepare(std::span<const TimeSeriesInstance> instances, const RunConfig& config) {
  return prepare_raw(flatten_selected(instances, config), config);
}

std::string points_csv(const FeatureMatrix& test, std::span<const ClassLabel> predicted) {
  if (predicted.size() != test.rows()) {
    throw Error(ErrorKind::invalid_argument, "one prediction per test row required");
  }
  std::string out = "instance,time_index";
  for (const auto& c : test.columns()) out += "," + c;
  out += ",true,predicted\n";
  char buf[64];
  for (std::size_t r = 0; r < test.rows(); ++r) {
    const auto& o = test.origins()[r];
    out += test.instance_ids()[o.instance];
    out += "," + std::to_string(o.time_index);
    for (double v : test.row(r)) {
      std::snprintf(buf, sizeof buf, ",%.17g", v);
      out += buf;
    }
    out += ",";
    out += class_name(test.labels()[r]);
    out += ",";
    out += class_name(predicted[r]);
    out += "\n";
  }
  return out;
}

ScoreVectors read_f1_file(const fs::path& path) {
  const auto j = read_json(path);
  if (!j.is_object()) {
    throw Error(ErrorKind::unsupported_format, "F1 file must map model names to score arrays");
  }
  ScoreVectors out;
  for (const auto& item : j.items()) {
    if (!item.value().is_array()) {
      throw Error(ErrorKind::unsupported_format, "F1 entry '" + item.key() + "' is not an array");
    }
    std::vector<double> v;
    for (const auto& x : item.value()) {
      if (!x.is_number()) {
        throw Error(ErrorKind::unsupported_format, "F1 entry '" + item.key() + "' has a non-number");
      }
      v.push_back(x.get<double>());
    }
    out.emplace_back(item.key(), std::move(v));
  }
  return out;
}

ScoreVectors read_eval_reports(std::span<const fs::path> paths) {
  ScoreVectors out;
  for (const auto& p : paths) {
    EvalReport r;
    try {
      r = EvalReport::from_json(read_json(p));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::unsupported_format,
                  "'" + p.generic_string() + "' is not an evaluation report: " + e.what());
    }
    out.emplace_back(r.model, r.f1_scores());
  }
  return out;
}

std::string summary_table(std::span<const ModelSummary> models) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-6s %9s", "model", "accuracy");
  out += buf;
  for (auto label : kAllClasses) {
    std::snprintf(buf, sizeof buf, " %22s", ("F1 " + std::string(class_name(label))).c_str());
    out += buf;
  }
  out += "   macro_F1   fit_s\n";
  for (const auto& m : models) {
    std::snprintf(buf, sizeof buf, "%-6s %9.4f", m.name.c_str(), m.report.accuracy);
    out += buf;
    for (const auto& c : m.report.per_class) {
      std::snprintf(buf, sizeof buf, " %22.2f", c.f1);
      out += buf;
    }
    std::snprintf(buf, sizeof buf, " %10.2f %7.2f\n", m.report.macro_f1, m.fit_seconds);
    out += buf;
  }
  return out;
}

std::string comparison_table(std::span<const PairwiseComparison> rows) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-14s %7s %7s %7s %7s %12s\n", "comparison", "KS D", "KS p", "MWU U",
                "MWU p", "significant");
  out += buf;
  for (const auto& c : rows) {
    const std::string name = c.first + " vs. " + c.second;
    std::snprintf(buf, sizeof buf, "%-14s %7.2f %7.3f %7.2f %7.3f %12s\n", name.c_str(), c.ks.statistic,
                  c.ks.p_value, c.mwu.u, c.mwu.p_value, c.significant ? "yes" : "no");
    out += buf;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

QualityReport run_qc(const RunConfig& config, const fs::path& out) {
  config.validate();
  const auto instances = load_instances(config);
  const auto raw = flatten_selected(instances, config);
  auto report = quality_report(instances, raw, quality_options(config.preprocessing));
  write_json(out / "config.json", config.to_json());
  write_quality(report, raw, out);
  return report;
}

DatasetManifest run_synth(const RunConfig& config, const fs::path& out) {
  config.validate();
  const auto instances = synth_generate(config.synth);
  auto manifest = write_corpus(out / "corpus", instances);
  write_json(out / "config.json", config.to_json());
  write_text(out / "manifest.json", manifest_to_json(manifest) + "\n");
  return manifest;
}

namespace {

std::vector<ModelSummary> fit_and_evaluate(const PreparedData& data, const RunConfig& config,
                                           const fs::path& out) {
  const auto& train = data.parts.train;
  const auto& test = data.parts.test;
  auto trained = train_all(train.block(), train.labels(), config.classifiers, config.models, config.threads);
  write_json(out / "models" / "preprocessing.json", data.preprocessor.to_json());
  std::vector<ModelSummary> summaries;
  for (auto& t : trained) {
    write_json(out / "models" / (t.name + ".json"), t.model->to_json());
    const auto predicted = t.model->predict(test.block(), config.threads);
    ModelSummary m{t.name, make_report(t.name, confusion(test.labels(), predicted)), t.fit_time.count()};
    write_evaluation(m, test, predicted, out);
    summaries.push_back(std::move(m));
  }
  return summaries;
}

}  // namespace

std::vector<ModelSummary> run_train(const RunConfig& config, const fs::path& out) {
  config.validate();
  const auto instances = load_instances(config);
  const auto data = prepare(instances, config);
  const auto& train = data.parts.train;
  auto trained = train_all(train.block(), train.labels(), config.classifiers, config.models, config.threads);
  write_json(out / "config.json", config.to_json());
  write_json(out / "models" / "preprocessing.json", data.preprocessor.to_json());
  std::vector<ModelSummary> summaries;
  for (auto& t : trained) {
    write_json(out / "models" / (t.name + ".json"), t.model->to_json());
    // Training accuracy only; held-out evaluation is the eval command's job.
    const auto predicted = t.model->predict(train.block(), config.threads);
    summaries.push_back(
        {t.name, make_report(t.name, confusion(train.labels(), predicted)), t.fit_time.count()});
  }
  return summaries;
}

std::vector<ModelSummary> run_eval(const RunConfig& config, const fs::path& out,
                                   std::optional<fs::path> model_dir) {
  config.validate();
  const fs::path dir = model_dir.value_or(out / "models");
  const auto preprocessor = Preprocessor::from_json(read_json(dir / "preprocessing.json"));
  if (preprocessor.imputer.columns() != config.variables) {
    throw Error(ErrorKind::width_mismatch, "saved preprocessing columns differ from config variables");
  }
  const auto instances = load_instances(config);
  const auto raw = flatten_selected(instances, config);
  const auto test = preprocessor.apply(split(raw, config.split).test);
  write_json(out / "config.json", config.to_json());
  std::vector<ModelSummary> summaries;
  for (const auto& name : config.models) {
    const auto model = load_model(read_json(dir / (name + ".json")));
    if (model->kind() != name) {
      throw Error(ErrorKind::unsupported_format, "model file '" + name + ".json' holds a " +
                                                     std::string(model->kind()) + " model");
    }
    const auto predicted = model->predict(test.block(), config.threads);
    ModelSummary m{name, make_report(name, confusion(test.labels(), predicted)), 0.0};
    write_evaluation(m, test, predicted, out);
    summaries.push_back(std::move(m));
  }
  return summaries;
}

std::vector<PairwiseComparison> run_compare(const ScoreVectors& scores, const TestConfig& stats,
                                            const fs::path& out) {
  if (scores.size() < 2) {
    throw UsageError("comparison needs at least two models, got " + std::to_string(scores.size()));
  }
  auto rows = compare_models(scores, stats);
  write_json(out / "comparison.json", comparisons_to_json(rows, stats));
  write_text(out / "comparison.csv", comparisons_to_csv(rows));
  return rows;
}

PipelineResult run_pipeline(const RunConfig& config, const fs::path& out) {
  config.validate();
  const fs::path marker = out / "INCOMPLETE";
  std::string stage;
  const auto enter = [&](const char* name) {
    stage = name;
    write_text(marker, "stage: " + stage + "\n");
  };

  PipelineResult result;
  try {
    enter("ingest");
    write_json(out / "config.json", config.to_json());
    const auto instances = load_instances(config);

    enter("qc");
    const auto raw = flatten_selected(instances, config);
    result.quality = quality_report(instances, raw, quality_options(config.preprocessing));
    write_quality(result.quality, raw, out);

    enter("preprocess");
    const auto data = prepare_raw(raw, config);

    enter("train+evaluate");
    result.models = fit_and_evaluate(data, config, out);

    enter("compare");
    if (result.models.size() >= 2) {
      ScoreVectors scores;
      for (const auto& m : result.models) scores.emplace_back(m.name, m.report.f1_scores());
      result.comparisons = run_compare(scores, config.stats, out);
    }
  } catch (const Error& e) {
    write_text(marker, "failed at stage: " + stage + "\n" + e.what() + "\n");
    throw Error(e.kind(), "stage '" + stage + "': " + e.what());
  } catch (const std::exception& e) {
    write_text(marker, "failed at stage: " + stage + "\n" + e.what() + "\n");
    throw;
  }
  std::error_code ec;
  fs::remove(marker, ec);
  return result;
}

}  // namespace hydrate
