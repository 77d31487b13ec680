#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "hydrate/dataset.hpp"

using namespace hydrate;
namespace fs = std::filesystem;

namespace {

TimeSeriesInstance parse(const std::string& text, LoadOptions opts = {}) {
  std::istringstream in(text);
  return load_instance_csv(in, "test", opts);
}

ErrorKind kind_of(const std::string& text, LoadOptions opts = {}) {
  try {
    parse(text, opts);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorKind::io;
}

fs::path fresh_dir(const std::string& name) {
  auto p = fs::temp_directory_path() / ("hydrate_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST(Labels, NamesAndCodes) {
  EXPECT_EQ(class_name(ClassLabel::hydrate), "Hydrate");
  EXPECT_EQ(parse_class("RapidProductivityLoss"), ClassLabel::rapid_loss);
  EXPECT_EQ(parse_class("0"), ClassLabel::normal);
  EXPECT_FALSE(class_from_code(7).has_value());
  EXPECT_THROW(parse_class("hydrates"), Error);
}

TEST(Variables, Canonical) {
  const auto names = canonical_variable_names();
  ASSERT_EQ(names.size(), 4u);
  EXPECT_EQ(names[0], "P-TPT");
  EXPECT_EQ(unit_of("T-JUS-CKP"), "°C");
  EXPECT_TRUE(is_temperature("T-TPT"));
  EXPECT_FALSE(is_temperature("P-MON-CKP"));
}

TEST(Csv, ParsesIsoTimestampsAndMissingCells) {
  const auto inst = parse(
      "timestamp,P-TPT,T-TPT,class\n"
      "2017-02-01T10:00:00Z,1.5e7,,2\n"
      "2017-02-01T10:01:00Z,1.6e7,4.5,2\n");
  EXPECT_EQ(inst.label(), ClassLabel::hydrate);
  EXPECT_EQ(inst.length(), 2u);
  EXPECT_EQ(inst.timestamp_format(), TimestampFormat::iso8601);
  EXPECT_EQ(inst.timestamps()[1] - inst.timestamps()[0], 60'000'000);
  const auto* t = inst.find_channel("T-TPT");
  ASSERT_NE(t, nullptr);
  EXPECT_TRUE(is_missing(t->values[0]));
  EXPECT_DOUBLE_EQ(t->values[1], 4.5);
}

TEST(Csv, EpochSecondsCrlfBomAndNanToken) {
  const auto inst = parse("\xEF\xBB\xBFtimestamp,P-TPT\r\n100,NaN\r\n\r\n160,2\r\n",
                          LoadOptions{ClassLabel::normal, {}});
  EXPECT_EQ(inst.timestamp_format(), TimestampFormat::epoch_seconds);
  EXPECT_EQ(inst.timestamps()[0], 100'000'000);
  EXPECT_TRUE(is_missing(inst.channels()[0].values[0]));
  EXPECT_EQ(inst.length(), 2u);
}

TEST(Csv, QuotedFields) {
  const auto inst = parse("timestamp,\"P-TPT\"\n1,\"3.5\"\n", LoadOptions{ClassLabel::normal, {}});
  EXPECT_DOUBLE_EQ(inst.channels()[0].values[0], 3.5);
}

TEST(Csv, Errors) {
  EXPECT_EQ(kind_of("time,P-TPT,class\n1,2,0\n"), ErrorKind::malformed_csv);
  EXPECT_EQ(kind_of("timestamp,P-TPT,class\n1,2\n"), ErrorKind::malformed_csv);
  EXPECT_EQ(kind_of("timestamp,P-TPT,class\n1,abc,0\n"), ErrorKind::malformed_csv);
  EXPECT_EQ(kind_of("timestamp,P-TPT,class\n1,inf,0\n"), ErrorKind::malformed_csv);
  EXPECT_EQ(kind_of("timestamp,P-TPT,P-TPT,class\n1,2,3,0\n"), ErrorKind::malformed_csv);
  EXPECT_EQ(kind_of("timestamp,P-TPT,class\n2,1,0\n1,1,0\n"), ErrorKind::non_monotone_timestamp);
  EXPECT_EQ(kind_of("timestamp,P-TPT,class\n1,1,0\n2,1,1\n"), ErrorKind::label_conflict);
  EXPECT_EQ(kind_of("timestamp,P-TPT\n1,1\n"), ErrorKind::missing_label);
  EXPECT_EQ(kind_of("timestamp,P-TPT,class\n"), ErrorKind::empty_data);
  EXPECT_EQ(kind_of("timestamp,P-TPT,class\n1,1,0\n", LoadOptions{ClassLabel::hydrate, {}}),
            ErrorKind::label_conflict);
  EXPECT_EQ(kind_of("timestamp,P-TPT,class\n1,1,0\n2017-01-01T00:00:00Z,1,0\n"),
            ErrorKind::malformed_csv);
}

TEST(Csv, ErrorNamesRowAndColumn) {
  try {
    parse("timestamp,P-TPT,T-TPT,class\n1,1,1,0\n2,1,x,0\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.row(), std::optional<std::size_t>(3));
    EXPECT_EQ(e.column(), std::optional<std::string>("T-TPT"));
    EXPECT_NE(std::string(e.what()).find("T-TPT"), std::string::npos);
  }
}

TEST(Csv, LabelMapTranslatesAndIgnoresCodes) {
  LabelMap map{{0, ClassLabel::normal}, {8, ClassLabel::hydrate}, {108, std::nullopt}};
  const auto inst = parse("timestamp,P-TPT,class\n1,1,108\n2,1,8\n3,1,8\n", {std::nullopt, map});
  EXPECT_EQ(inst.label(), ClassLabel::hydrate);
  EXPECT_EQ(kind_of("timestamp,P-TPT,class\n1,1,5\n", {std::nullopt, map}), ErrorKind::malformed_csv);
}

TEST(Csv, RoundTripIsBitExact) {
  std::vector<Channel> channels{{"P-TPT", {0.1 + 0.2, kMissing, 1e-300}}, {"T-TPT", {1.0 / 3.0, 2, 3}}};
  TimeSeriesInstance inst("x", ClassLabel::rapid_loss, {0, 1'000'000, 2'000'000},
                          TimestampFormat::epoch_seconds, channels);
  std::ostringstream out;
  write_instance_csv(out, inst);
  const auto back = parse(out.str());
  EXPECT_EQ(back.label(), ClassLabel::rapid_loss);
  EXPECT_EQ(back.timestamps(), inst.timestamps());
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t t = 0; t < 3; ++t) {
      const double a = inst.channels()[c].values[t], b = back.channels()[c].values[t];
      if (is_missing(a)) {
        EXPECT_TRUE(is_missing(b));
      } else {
        EXPECT_EQ(a, b);
      }
    }
  }
}

TEST(Iso8601, RoundTrip) {
  const Timestamp ts = parse_iso8601("2017-02-01T10:00:00Z");
  EXPECT_EQ(ts, 1485943200LL * 1'000'000);
  EXPECT_EQ(format_iso8601(ts), "2017-02-01 10:00:00");
  EXPECT_EQ(parse_iso8601("2017-02-01 10:00:00"), ts);
  EXPECT_THROW(parse_iso8601("2017-13-01T00:00:00Z"), Error);
}

TEST(Instance, RejectsInvalidShapes) {
  EXPECT_THROW(TimeSeriesInstance("a", ClassLabel::normal, {}, TimestampFormat::epoch_seconds,
                                  {{"P-TPT", {}}}),
               Error);
  EXPECT_THROW(TimeSeriesInstance("a", ClassLabel::normal, {1, 2}, TimestampFormat::epoch_seconds,
                                  {{"P-TPT", {1}}}),
               Error);
  EXPECT_THROW(TimeSeriesInstance("a", ClassLabel::normal, {2, 1}, TimestampFormat::epoch_seconds,
                                  {{"P-TPT", {1, 2}}}),
               Error);
}

TEST(Flatten, RowsColumnsAndMissingVariable) {
  std::vector<TimeSeriesInstance> v;
  v.emplace_back("a", ClassLabel::normal, std::vector<Timestamp>{0, 1}, TimestampFormat::epoch_seconds,
                 std::vector<Channel>{{"X", {1, 2}}, {"Y", {3, 4}}});
  v.emplace_back("b", ClassLabel::hydrate, std::vector<Timestamp>{0}, TimestampFormat::epoch_seconds,
                 std::vector<Channel>{{"Y", {5}}, {"X", {6}}});
  const std::vector<std::string> vars{"Y", "X"};
  const auto m = flatten(v, vars);
  ASSERT_EQ(m.rows(), 3u);
  EXPECT_EQ(m.at(0, 0), 3);
  EXPECT_EQ(m.at(2, 1), 6);
  EXPECT_EQ(m.labels()[2], ClassLabel::hydrate);
  EXPECT_EQ(m.origins()[1], (RowOrigin{0, 1}));
  const std::vector<std::string> bad{"Z"};
  try {
    flatten(v, bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::missing_variable);
  }
}

TEST(Manifest, LayoutCountsAndWarnings) {
  const auto root = fresh_dir("manifest");
  auto instances = synth_generate([] {
    auto c = SynthConfig::defaults();
    c.classes[0].count = 3;
    c.classes[1].count = 2;
    c.classes[2].count = 1;
    c.classes[0].length = c.classes[1].length = c.classes[2].length = 5;
    return c;
  }());
  write_corpus(root, instances);
  fs::create_directories(root / "9_unknown");
  std::ofstream(root / "0_normal" / "notes.txt") << "x";

  const auto m = build_manifest(root);
  EXPECT_EQ(m.instances.size(), 6u);
  EXPECT_EQ(m.class_counts[class_index(ClassLabel::normal)], 3u);
  EXPECT_EQ(m.class_counts[class_index(ClassLabel::hydrate)], 1u);
  EXPECT_EQ(m.warnings.size(), 2u);
  EXPECT_NE(manifest_to_json(m).find("\"class_counts\""), std::string::npos);

  const auto loaded = load_corpus(m);
  ASSERT_EQ(loaded.size(), 6u);
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    EXPECT_EQ(loaded[i].id(), instances[i].id());
    EXPECT_EQ(loaded[i].channels()[0].values, instances[i].channels()[0].values);
  }
}

TEST(Split, RowModeStratifiedCountsAndDeterminism) {
  auto c = SynthConfig::defaults();
  c.classes[0].count = 20;
  c.classes[1].count = 10;
  c.classes[2].count = 4;
  const auto inst = synth_generate(c);
  const auto m = flatten(inst, c.variables);
  const auto a = split(m, {});
  const auto b = split(m, {});
  EXPECT_EQ(a.test.origins(), b.test.origins());
  EXPECT_EQ(a.train.rows() + a.test.rows(), m.rows());
  std::array<std::size_t, 3> per{};
  for (auto l : a.test.labels()) ++per[class_index(l)];
  EXPECT_EQ(per[0], 250u);  // round(1000 * 0.25)
  EXPECT_EQ(per[1], 125u);
  EXPECT_EQ(per[2], 50u);

  SplitSpec other;
  other.seed = 7;
  EXPECT_NE(split(m, other).test.origins(), a.test.origins());
}

TEST(Split, InstanceModeKeepsInstancesTogether) {
  auto c = SynthConfig::defaults();
  c.classes[0].count = 8;
  c.classes[1].count = 8;
  c.classes[2].count = 4;
  const auto inst = synth_generate(c);
  const auto m = flatten(inst, c.variables);
  SplitSpec s;
  s.mode = SplitMode::instance;
  const auto parts = split(m, s);
  std::set<std::size_t> train_ids, test_ids;
  for (const auto& o : parts.train.origins()) train_ids.insert(o.instance);
  for (const auto& o : parts.test.origins()) test_ids.insert(o.instance);
  for (auto id : test_ids) EXPECT_EQ(train_ids.count(id), 0u);
  EXPECT_EQ(test_ids.size(), 2u + 2u + 1u);
}

TEST(Split, DegenerateInputs) {
  FeatureMatrix one({"X"}, {1.0}, {ClassLabel::normal}, {{0, 0}}, {"a"});
  EXPECT_THROW(split(one, {}), Error);
  SplitSpec bad;
  bad.test_fraction = 1.0;
  EXPECT_THROW(split(one, bad), Error);
}

TEST(Synth, DefaultsShapeAndDeterminism) {
  const auto c = SynthConfig::defaults();
  EXPECT_EQ(c.classes[0].count, 597u);
  EXPECT_EQ(c.classes[1].count, 344u);
  EXPECT_EQ(c.classes[2].count, 84u);
  const auto a = synth_generate(c);
  const auto b = synth_generate(c);
  ASSERT_EQ(a.size(), 1025u);
  std::size_t rows = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    rows += a[i].length();
    EXPECT_EQ(a[i].channels()[1].values, b[i].channels()[1].values);
  }
  EXPECT_GE(rows, 50'000u);
  auto other = c;
  other.seed = 43;
  EXPECT_NE(synth_generate(other)[0].channels()[0].values, a[0].channels()[0].values);
}

TEST(Synth, HydrateTemperaturesStayInBand) {
  const auto inst = synth_generate(SynthConfig::defaults());
  for (const auto& i : inst) {
    if (i.label() != ClassLabel::hydrate) continue;
    for (const auto& ch : i.channels()) {
      if (!is_temperature(ch.name)) continue;
      for (double v : ch.values) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 50.0);
      }
    }
  }
}

TEST(Synth, InjectedMissingCountIsExact) {
  auto c = SynthConfig::defaults();
  c.missing_fraction = 0.2418;
  c.frozen_fraction = 0.0994;
  const auto inst = synth_generate(c);
  const auto m = flatten(inst, c.variables);
  EXPECT_EQ(m.missing_count(), static_cast<std::size_t>(std::llround(0.2418 * 51250 * 4)));
}

TEST(Synth, RejectsBadConfig) {
  auto c = SynthConfig::defaults();
  c.missing_fraction = 1.5;
  EXPECT_THROW(synth_generate(c), Error);
  c = SynthConfig::defaults();
  c.outlier_fractions = {0.1};
  EXPECT_THROW(synth_generate(c), Error);
}
