#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hydrate/pipeline.hpp"

namespace fs = std::filesystem;
using namespace hydrate;

namespace {

struct GlobalFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::vector<std::string> models;
  std::optional<unsigned> threads;
};

RunConfig effective_config(const GlobalFlags& flags) {
  RunConfig c = flags.config_path.empty() ? RunConfig{} : RunConfig::load(flags.config_path);
  if (flags.seed) {
    c.synth.seed = *flags.seed;
    c.split.seed = *flags.seed;
  }
  if (flags.out) c.out = *flags.out;
  if (!flags.models.empty()) c.models = flags.models;
  if (flags.threads) c.threads = *flags.threads;
  c.validate();
  return c;
}

void print_quality(const QualityReport& r) {
  std::printf("%zu instances, %zu rows\n", r.n_instances, r.n_rows);
  std::printf("%-12s %10s %10s %10s\n", "channel", "missing%", "frozen%", "outlier%");
  for (const auto& c : r.channels) {
    std::printf("%-12s %10.2f %10.2f %10.2f\n", c.name.c_str(), c.missing_pct, c.frozen_pct, c.outlier_pct);
  }
  std::printf("overall missing %.2f%%, frozen %.2f%% (selected channels)\n", r.selected.overall_missing_pct,
              r.selected.overall_frozen_pct);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hydrate detection workflow on oil-well sensor time series"};
  app.require_subcommand(1);

  GlobalFlags flags;
  app.add_option("--config", flags.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--seed", flags.seed, "Seed for synthesis and the train/test split");
  app.add_option("--out", flags.out, "Output directory");
  app.add_option("--models", flags.models, "Models to run: dt,knn,nb")->delimiter(',');
  app.add_option("--threads", flags.threads, "Worker threads (outputs do not depend on it)")
      ->check(CLI::PositiveNumber);

  auto* qc = app.add_subcommand("qc", "Audit missing, frozen and outlying readings");
  auto* synth = app.add_subcommand("synth", "Write the synthetic corpus to <out>/corpus");
  auto* train = app.add_subcommand("train", "Fit preprocessing and models on the training split");
  auto* eval = app.add_subcommand("eval", "Evaluate saved models on the test split");
  std::string model_dir;
  eval->add_option("--model-dir", model_dir, "Directory holding saved models (default <out>/models)");
  auto* compare = app.add_subcommand("compare", "Pairwise KS and Mann-Whitney tests on F1 vectors");
  std::string f1_path;
  std::vector<std::string> report_paths;
  auto* from_f1 = compare->add_option("--from-f1", f1_path, "JSON object of model -> per-class F1");
  compare->add_option("--reports", report_paths, "Evaluation report files")->excludes(from_f1);
  auto* pipeline = app.add_subcommand("pipeline", "Run QC, training, evaluation and comparison");
  for (auto* sub : {qc, synth, train, eval, compare, pipeline}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const RunConfig config = effective_config(flags);
    const fs::path out = config.out;

    if (qc->parsed()) {
      print_quality(run_qc(config, out));
    } else if (synth->parsed()) {
      const auto manifest = run_synth(config, out);
      std::printf("wrote %zu instances to %s\n", manifest.instances.size(),
                  (out / "corpus").generic_string().c_str());
    } else if (train->parsed()) {
      const auto models = run_train(config, out);
      std::printf("training-set performance\n%s", summary_table(models).c_str());
    } else if (eval->parsed()) {
      std::optional<fs::path> dir;
      if (!model_dir.empty()) dir = model_dir;
      const auto models = run_eval(config, out, dir);
      std::printf("%s", summary_table(models).c_str());
    } else if (compare->parsed()) {
      ScoreVectors scores;
      if (!f1_path.empty()) {
        scores = read_f1_file(f1_path);
      } else if (!report_paths.empty()) {
        std::vector<fs::path> paths(report_paths.begin(), report_paths.end());
        scores = read_eval_reports(paths);
      } else {
        throw UsageError("compare needs --from-f1 <file> or --reports <files>");
      }
      const auto rows = run_compare(scores, config.stats, out);
      std::printf("%s", comparison_table(rows).c_str());
    } else if (pipeline->parsed()) {
      const auto result = run_pipeline(config, out);
      print_quality(result.quality);
      std::printf("\n%s", summary_table(result.models).c_str());
      if (result.comparisons) {
        std::printf("\n%s", comparison_table(*result.comparisons).c_str());
      } else {
        std::fprintf(stderr, "note: comparison skipped, it needs at least two models\n");
      }
    }
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const Error& e) {
    std::fprintf(stderr, "error [%s]: %s\n", to_string(e.kind()), e.what());
    return kExitData;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  }
  return kExitOk;
}
