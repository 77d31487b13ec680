#include <gtest/gtest.h>

#include "hydrate/evaluation.hpp"

using namespace hydrate;

namespace {

constexpr auto N = ClassLabel::normal;
constexpr auto R = ClassLabel::rapid_loss;
constexpr auto H = ClassLabel::hydrate;

const std::vector<ClassLabel> kPublishedOrder{H, R, N};

}  // namespace

TEST(Confusion, CountsAndMargins) {
  const std::vector<ClassLabel> truth{N, N, R, H, H, H};
  const std::vector<ClassLabel> pred{N, R, R, H, N, H};
  const auto m = confusion(truth, pred);
  EXPECT_EQ(m.at(0, 0), 1u);
  EXPECT_EQ(m.at(0, 1), 1u);
  EXPECT_EQ(m.at(2, 0), 1u);
  EXPECT_EQ(m.at(2, 2), 2u);
  EXPECT_EQ(m.total(), 6u);
  EXPECT_EQ(m.row_sum(2), 3u);
  EXPECT_EQ(m.column_sum(0), 2u);
  EXPECT_DOUBLE_EQ(accuracy(m), 4.0 / 6.0);
}

TEST(Confusion, RespectsRequestedClassOrder) {
  const std::vector<ClassLabel> truth{N, H};
  const std::vector<ClassLabel> pred{N, N};
  const auto m = confusion(truth, pred, kPublishedOrder);
  EXPECT_EQ(m.classes, kPublishedOrder);
  EXPECT_EQ(m.at(0, 2), 1u);  // hydrate predicted as normal
}

TEST(Confusion, Errors) {
  const std::vector<ClassLabel> a{N}, b{N, R};
  EXPECT_THROW(confusion(a, b), Error);
  const std::vector<ClassLabel> empty;
  EXPECT_THROW(confusion(empty, empty), Error);
  const std::vector<ClassLabel> only_n{N};
  const std::vector<ClassLabel> h{H};
  EXPECT_THROW(confusion(h, h, only_n), Error);
}

TEST(F1, ZeroDenominatorsGiveZero) {
  const auto m = ConfusionMatrix::from_counts({N, R, H}, {{5, 0, 0}, {0, 0, 0}, {3, 0, 0}});
  const auto f = f1_per_class(m);
  EXPECT_DOUBLE_EQ(f[1].precision, 0.0);
  EXPECT_DOUBLE_EQ(f[1].recall, 0.0);
  EXPECT_DOUBLE_EQ(f[1].f1, 0.0);
  EXPECT_DOUBLE_EQ(f[2].f1, 0.0);
  EXPECT_DOUBLE_EQ(f[0].precision, 5.0 / 8.0);
  EXPECT_DOUBLE_EQ(f[0].recall, 1.0);
}

TEST(F1, HarmonicMean) {
  const auto m = ConfusionMatrix::from_counts({N, H}, {{8, 2}, {4, 6}});
  const auto f = f1_per_class(m);
  const double p = 8.0 / 12.0, r = 0.8;
  EXPECT_DOUBLE_EQ(f[0].f1, 2 * p * r / (p + r));
}

TEST(Report, PublishedNaiveBayesMatrix) {
  const auto m = ConfusionMatrix::from_counts(
      kPublishedOrder, {{1244, 32462, 34220}, {0, 298632, 0}, {329, 396402, 503}});
  const auto r = make_report("nb", m);
  EXPECT_NEAR(r.accuracy, 0.39327, 5e-6);
  EXPECT_NEAR(r.per_class[0].f1, 0.04, 0.005);
  EXPECT_NEAR(r.per_class[1].f1, 0.58, 0.005);
  EXPECT_NEAR(r.per_class[2].f1, 0.00, 0.005);
}

TEST(Report, JsonAndCsvRoundTrip) {
  const auto m = ConfusionMatrix::from_counts({N, R, H}, {{5, 1, 0}, {2, 7, 0}, {0, 0, 3}});
  const auto r = make_report("dt", m);
  const auto back = EvalReport::from_json(r.to_json());
  EXPECT_EQ(back.model, "dt");
  EXPECT_EQ(back.matrix.counts, m.counts);
  EXPECT_DOUBLE_EQ(back.macro_f1, r.macro_f1);
  EXPECT_EQ(r.confusion_csv(),
            "true\\predicted,NormalCondition,RapidProductivityLoss,Hydrate\n"
            "NormalCondition,5,1,0\nRapidProductivityLoss,2,7,0\nHydrate,0,0,3\n");
  EXPECT_EQ(r.f1_scores().size(), 3u);
}

TEST(Evaluate, UsesModelPredictions) {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<ClassLabel> y{N, N, H, H};
  const auto t = DecisionTree::fit({x, 1}, y);
  FeatureMatrix test({"X"}, {1.5, 3.5, 0.0}, {N, H, H}, {{0, 0}, {0, 1}, {0, 2}}, {"a"});
  const auto r = evaluate(t, test);
  EXPECT_EQ(r.model, "dt");
  EXPECT_DOUBLE_EQ(r.accuracy, 2.0 / 3.0);
}
