#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lge/error.hpp"
#include "lge/metrics.hpp"
#include "lge/phantom.hpp"
#include "oracles.hpp"

using namespace lge;

namespace {

std::vector<std::uint8_t> bits(std::initializer_list<int> v) {
  return std::vector<std::uint8_t>(v.begin(), v.end());
}

Contingency table_from(std::uint64_t tp, std::uint64_t fp, std::uint64_t fn, std::uint64_t tn) {
  std::vector<char> pred, truth;
  auto add = [&](std::uint64_t n, bool p, bool t) {
    for (std::uint64_t i = 0; i < n; ++i) {
      pred.push_back(p);
      truth.push_back(t);
    }
  };
  add(tp, true, true);
  add(fp, true, false);
  add(fn, false, true);
  add(tn, false, false);
  std::unique_ptr<bool[]> p(new bool[pred.size()]), t(new bool[pred.size()]);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    p[i] = pred[i];
    t[i] = truth[i];
  }
  return contingency({p.get(), pred.size()}, {t.get(), pred.size()});
}

}  // namespace

TEST(Dice, Examples) {
  EXPECT_EQ(dice(bits({0, 0, 0}), bits({0, 0, 0})), 1.0);
  EXPECT_EQ(dice(bits({1, 1, 0}), bits({1, 1, 0})), 1.0);
  // |P|=4, |G|=6, |P∩G|=3
  EXPECT_DOUBLE_EQ(dice(bits({1, 1, 1, 1, 0, 0, 0}), bits({1, 1, 1, 0, 1, 1, 1})), 0.6);
  EXPECT_THROW(dice(bits({1}), bits({1, 0})), ValidationError);
}

TEST(Avd, Examples) {
  const Spacing s{2.2, 1.6, 8, 2};
  EXPECT_EQ(avd(50, 50, s), 0.0);
  EXPECT_NEAR(avd(100, 80, s), 0.704, 1e-12);
  EXPECT_EQ(avd(100, 80, s), avd(80, 100, s));
}

TEST(Avdr, Examples) {
  EXPECT_EQ(avdr(0.0, 100.0), 0.0);
  EXPECT_NEAR(avdr(4.97, 123.0), 0.0404, 5e-5);
  EXPECT_NEAR(avdr(4.97, 123.0) * 123.0, 4.97, 1e-12 * 4.97);
  EXPECT_THROW(avdr(1.0, 0.0), ValidationError);
}

TEST(InfarctFraction, Examples) {
  PhantomSpec spec;
  EXPECT_EQ(infarct_fraction(make_phantom(spec).volume), 0.0);
  spec.scar = {{0.0, 2 * std::numbers::pi}, {0, 8}};
  EXPECT_DOUBLE_EQ(infarct_fraction(make_phantom(spec).volume), 100.0);
  spec.scar = {{0.0, std::numbers::pi / 3}, {0, 8}};
  const MaskVolume v = make_phantom(spec).volume;
  const double expected = 100.0 * count_voxels(v, kInfarct) / count_voxels(v, kMyocardium);
  EXPECT_DOUBLE_EQ(infarct_fraction(v), expected);
  EXPECT_NEAR(infarct_fraction(v), 100.0 / 6.0, 2.0);
}

TEST(PatientDetection, Examples) {
  MaskVolume v = MaskVolume::zeros({3, 3, 1}, {1, 1, 1, 1});
  EXPECT_FALSE(patient_detection(v, ClassSet{ClassId::mvo}));
  v.labels[4] = code_of(ClassId::scar);
  EXPECT_FALSE(patient_detection(v, ClassSet{ClassId::mvo}));
  v.labels[2] = code_of(ClassId::mvo);
  EXPECT_TRUE(patient_detection(v, ClassSet{ClassId::mvo}));
}

TEST(Contingency, TableReconstruction) {
  EXPECT_EQ(table_from(15, 4, 8, 125), (Contingency{15, 4, 8, 125}));
  EXPECT_EQ(table_from(5, 0, 0, 0), (Contingency{5, 0, 0, 0}));
  const Contingency human{152, 0, 0, 0};
  EXPECT_EQ(table_from(152, 0, 0, 0), human);
  EXPECT_FALSE(human.specificity().has_value());
  EXPECT_DOUBLE_EQ(*human.sensitivity(), 1.0);
}

TEST(ClopperPearson, KnownIntervals) {
  struct Case {
    std::uint64_t k, n;
    double est, lo, hi;
  };
  for (const Case& c : {Case{150, 152, 98.7, 95.3, 99.8}, Case{15, 23, 65.2, 42.7, 83.6},
                        Case{152, 152, 100.0, 97.6, 100.0}}) {
    const ProportionCI ci = clopper_pearson(c.k, c.n);
    EXPECT_NEAR(std::round(ci.estimate * 1000) / 10, c.est, 1e-9);
    EXPECT_NEAR(std::round(ci.lower * 1000) / 10, c.lo, 1e-9);
    EXPECT_NEAR(std::round(ci.upper * 1000) / 10, c.hi, 1e-9);
  }
  const ProportionCI zero = clopper_pearson(0, 10);
  EXPECT_EQ(zero.estimate, 0.0);
  EXPECT_EQ(zero.lower, 0.0);
  EXPECT_EQ(clopper_pearson(10, 10).upper, 1.0);
  EXPECT_THROW(clopper_pearson(3, 2), ValidationError);
  EXPECT_THROW(clopper_pearson(0, 0), ValidationError);
}

TEST(ClopperPearson, MatchesBisectionOracle) {
  for (std::uint64_t n : {1u, 2u, 7u, 23u, 50u, 129u}) {
    for (std::uint64_t k = 0; k <= n; ++k) {
      const ProportionCI ci = clopper_pearson(k, n);
      const auto [lo, hi] = oracle::clopper_pearson(k, n, 0.95);
      ASSERT_NEAR(ci.lower, lo, 1e-9) << k << "/" << n;
      ASSERT_NEAR(ci.upper, hi, 1e-9) << k << "/" << n;
    }
  }
}

TEST(SensSpec, FormattingAndUndefined) {
  const DiagnosticPerformance p = sens_spec_ci({150, 0, 2, 0});
  EXPECT_EQ(format_percent_ci(p.sensitivity), "98.7% [95.3, 99.8]");
  EXPECT_FALSE(p.specificity.has_value());
  EXPECT_EQ(format_percent_ci(p.specificity), "-");
}

TEST(EvaluatePair, IdenticalVolumesAndNaNRatios) {
  PhantomSpec spec;
  spec.scar = {{0.0, 1.0}, {0, 8}};
  spec.mvo = MvoCore{{0.2, 0.6}, 11, 14, {2, 6}};
  const MaskVolume v = make_phantom(spec).volume;
  const auto rows = evaluate_pair(v, v, default_eval_classes());
  ASSERT_EQ(rows.size(), 4u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.dice, 1.0);
    EXPECT_EQ(r.avd_ml, 0.0);
    EXPECT_EQ(r.infarct_pct_pred, r.infarct_pct_gt);
  }
  EXPECT_EQ(rows[0].class_name, "myocardium");
  EXPECT_EQ(rows[3].class_name, "infarct");

  const MaskVolume empty = MaskVolume::zeros(v.dims, v.spacing);
  const auto undefined = evaluate_pair(empty, empty, default_eval_classes());
  EXPECT_TRUE(std::isnan(undefined[1].avdr));
  EXPECT_TRUE(std::isnan(undefined[1].infarct_pct_gt));
  EXPECT_EQ(undefined[1].dice, 1.0);
}
