#include <algorithm>
#include <fstream>

#include "hydrate/dataset.hpp"
#include "json.hpp"

namespace hydrate {

namespace fs = std::filesystem;

std::string_view class_directory(ClassLabel label) noexcept {
  switch (label) {
    case ClassLabel::normal: return "0_normal";
    case ClassLabel::rapid_loss: return "1_rapid_loss";
    case ClassLabel::hydrate: return "2_hydrate";
  }
  return "";
}

namespace {

std::optional<ClassLabel> label_for_directory(const std::string& name) {
  for (auto label : kAllClasses) {
    if (name == class_directory(label)) return label;
  }
  return std::nullopt;
}

std::vector<fs::path> sorted_entries(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

DatasetManifest build_manifest(const fs::path& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    throw Error(ErrorKind::io, "dataset root '" + root.string() + "' is not a directory");
  }
  DatasetManifest manifest;
  for (const auto& sub : sorted_entries(root)) {
    const std::string name = sub.filename().string();
    if (!fs::is_directory(sub)) {
      manifest.warnings.push_back("skipped non-directory entry '" + name + "'");
      continue;
    }
    const auto label = label_for_directory(name);
    if (!label) {
      manifest.warnings.push_back("skipped unknown directory '" + name + "'");
      continue;
    }
    for (const auto& file : sorted_entries(sub)) {
      if (!fs::is_regular_file(file) || file.extension() != ".csv") {
        manifest.warnings.push_back("skipped non-CSV entry '" + name + "/" +
                                    file.filename().string() + "'");
        continue;
      }
      manifest.instances.push_back(
          {name + "/" + file.stem().string(), file.generic_string(), *label});
      ++manifest.class_counts[class_index(*label)];
    }
  }
  return manifest;
}

std::string manifest_to_json(const DatasetManifest& manifest) {
  nlohmann::ordered_json j;
  j["instances"] = nlohmann::ordered_json::array();
  for (const auto& e : manifest.instances) {
    j["instances"].push_back({{"id", e.id}, {"path", e.path}, {"label", class_name(e.label)}});
  }
  nlohmann::ordered_json counts;
  for (auto label : kAllClasses) counts[std::string(class_name(label))] = manifest.class_counts[class_index(label)];
  j["class_counts"] = counts;
  j["warnings"] = manifest.warnings;
  return j.dump(2);
}

std::vector<TimeSeriesInstance> load_corpus(const DatasetManifest& manifest,
                                            const LabelMap& label_map) {
  std::vector<TimeSeriesInstance> out;
  out.reserve(manifest.instances.size());
  for (const auto& e : manifest.instances) {
    out.push_back(load_instance_file(e.path, e.id, LoadOptions{e.label, label_map}));
  }
  return out;
}

DatasetManifest write_corpus(const fs::path& root, std::span<const TimeSeriesInstance> instances) {
  for (auto label : kAllClasses) fs::create_directories(root / class_directory(label));
  for (const auto& inst : instances) {
    const std::string stem = fs::path(inst.id()).filename().string();
    const fs::path file = root / class_directory(inst.label()) / (stem + ".csv");
    std::ofstream out(file, std::ios::binary);
    if (!out) throw Error(ErrorKind::io, "cannot write '" + file.string() + "'");
    write_instance_csv(out, inst);
  }
  return build_manifest(root);
}

}  // namespace hydrate
