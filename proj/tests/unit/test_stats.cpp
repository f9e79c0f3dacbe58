#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lge/error.hpp"
#include "lge/stats.hpp"
#include "oracles.hpp"

using namespace lge;

namespace {

void expect_rel(double got, double want, double rel) {
  EXPECT_LE(std::abs(got - want), rel * std::abs(want) + 1e-15) << got << " vs " << want;
}

}  // namespace

TEST(LinCcc, Examples) {
  EXPECT_DOUBLE_EQ(lin_ccc({{1, 2, 3, 5}, {1, 2, 3, 5}}).rho_c, 1.0);
  EXPECT_DOUBLE_EQ(lin_ccc({{-1, 0, 1}, {1, 0, -1}}).rho_c, -1.0);
  EXPECT_NEAR(lin_ccc({{1, 2, 3}, {2, 4, 6}}).rho_c, 8.0 / 22.0, 1e-15);
  EXPECT_THROW(lin_ccc({{1, 2}, {1}}), ValidationError);
  EXPECT_THROW(lin_ccc({{3, 3}, {3, 3}}), ValidationError);
}

TEST(LinCcc, ConfidenceIntervalBracketsEstimate) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> d(0, 1);
  PairedSeries s;
  for (int i = 0; i < 40; ++i) {
    const double x = d(rng);
    s.x.push_back(x);
    s.y.push_back(x + 0.3 * d(rng) + 0.1);
  }
  const auto r = lin_ccc(s);
  ASSERT_TRUE(r.ci_lower && r.ci_upper);
  EXPECT_LT(*r.ci_lower, r.rho_c);
  EXPECT_GT(*r.ci_upper, r.rho_c);
  EXPECT_LE(*r.ci_upper, 1.0);
}

TEST(BlandAltman, Examples) {
  auto r = bland_altman({{1, 2, 3}, {1, 2, 3}});
  EXPECT_EQ(r.bias, 0.0);
  EXPECT_EQ(r.loa_low, 0.0);
  EXPECT_EQ(r.loa_high, 0.0);
  r = bland_altman({{1, 2, 3}, {2, 3, 4}});
  EXPECT_DOUBLE_EQ(r.bias, 1.0);
  EXPECT_DOUBLE_EQ(r.loa_low, 1.0);
  r = bland_altman({{0, 0}, {0, 2}});
  EXPECT_DOUBLE_EQ(r.bias, 1.0);
  EXPECT_DOUBLE_EQ(r.sd_diff, std::sqrt(2.0));
  EXPECT_NEAR(r.loa_low, -1.772, 1e-3);
  EXPECT_NEAR(r.loa_high, 3.772, 1e-3);
}

TEST(BlandAltman, ShiftProperties) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-10, 10);
  PairedSeries s;
  for (int i = 0; i < 15; ++i) s.x.push_back(u(rng)), s.y.push_back(u(rng));
  PairedSeries shifted = s;
  for (auto& v : shifted.x) v += 7.5;
  for (auto& v : shifted.y) v += 7.5;
  EXPECT_NEAR(bland_altman(s).sd_diff, bland_altman(shifted).sd_diff, 1e-12);
  PairedSeries plus_c{s.x, s.x};
  for (auto& v : plus_c.y) v += 2.25;
  EXPECT_NEAR(bland_altman(plus_c).bias, 2.25, 1e-12);
}

TEST(Wilcoxon, Examples) {
  auto r = wilcoxon_signed_rank({{1, 2, 3}, {1, 2, 3}});
  EXPECT_EQ(r.p_value, 1.0);
  EXPECT_EQ(r.n_used, 0u);
  r = wilcoxon_signed_rank({{0, 0, 0}, {1, 2, 3}}, WilcoxonMode::exact);
  EXPECT_EQ(r.p_value, 0.25);
  EXPECT_EQ(r.w_plus, 6.0);
}

TEST(Wilcoxon, ExactMatchesEnumerationBitForBit) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + trial % 10;
    std::uniform_int_distribution<int> v(-4, 4);  // forces ties and zeros
    PairedSeries s;
    std::vector<double> d;
    for (int i = 0; i < n; ++i) {
      s.x.push_back(0.0);
      s.y.push_back(v(rng) * 0.5);
      d.push_back(s.y.back());
    }
    const auto r = wilcoxon_signed_rank(s, WilcoxonMode::exact);
    ASSERT_EQ(r.p_value, oracle::wilcoxon_enumeration(d)) << "trial " << trial;
  }
}

TEST(Wilcoxon, InvariantUnderIncreasingAffineMap) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.1, 5);
  PairedSeries s;
  for (int i = 0; i < 9; ++i) s.x.push_back(u(rng)), s.y.push_back(u(rng));
  PairedSeries a = s;
  for (auto* v : {&a.x, &a.y})
    for (auto& e : *v) e = 3.0 * e + 11.0;
  const auto r = wilcoxon_signed_rank(s, WilcoxonMode::exact);
  const auto ra = wilcoxon_signed_rank(a, WilcoxonMode::exact);
  EXPECT_EQ(r.w_plus, ra.w_plus);
  EXPECT_EQ(r.p_value, ra.p_value);
}

TEST(Wilcoxon, NormalApproximationAndAutoSwitch) {
  PairedSeries s;
  for (int i = 0; i < 30; ++i) {
    s.x.push_back(i);
    s.y.push_back(i + (i % 3 == 0 ? -1.0 : 1.0) * (1 + i % 7));
  }
  const auto autom = wilcoxon_signed_rank(s);
  EXPECT_FALSE(autom.exact);
  const auto exact = wilcoxon_signed_rank(s, WilcoxonMode::exact);
  EXPECT_NEAR(autom.p_value, exact.p_value, 0.02);
  PairedSeries small{{0, 0, 0, 0}, {1, -2, 3, 4}};
  EXPECT_TRUE(wilcoxon_signed_rank(small).exact);
}

TEST(Wilcoxon, PrattKeepsZerosInRanking) {
  PairedSeries s{{0, 0, 0, 0}, {0, 1, 2, 3}};
  const auto classic = wilcoxon_signed_rank(s, WilcoxonMode::exact, ZeroHandling::wilcoxon);
  const auto pratt = wilcoxon_signed_rank(s, WilcoxonMode::exact, ZeroHandling::pratt);
  EXPECT_EQ(classic.w_plus, 6.0);
  EXPECT_EQ(pratt.w_plus, 9.0);  // ranks 2,3,4
  EXPECT_EQ(pratt.n_used, 3u);
}

TEST(ChiSquare, Examples) {
  const std::vector<std::uint64_t> even{10, 10};
  auto r = chi_square_uniform(even);
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_EQ(r.p_value, 1.0);
  const std::vector<std::uint64_t> skew{100, 50};
  r = chi_square_uniform(skew);
  EXPECT_NEAR(r.statistic, 50.0 / 3.0, 1e-12);
  EXPECT_EQ(r.df, 1);
  EXPECT_NEAR(r.p_value, 4.4557e-5, 1e-8);
  const std::vector<std::uint64_t> flat{7, 7, 7, 7};
  EXPECT_EQ(chi_square_uniform(flat).p_value, 1.0);
  const std::vector<std::uint64_t> pref{335, 251};
  EXPECT_LT(chi_square_uniform(pref).p_value, 1e-3);
  const std::vector<std::uint64_t> one{5};
  EXPECT_THROW(chi_square_uniform(one), ValidationError);
}

TEST(ChiSquare, MatchesGammaOracle) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<std::uint64_t> c(0, 60);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::uint64_t> counts(2 + trial % 5);
    for (auto& v : counts) v = c(rng);
    counts[0] += 1;
    const auto r = chi_square_uniform(counts);
    expect_rel(r.statistic, oracle::chi_square_statistic(counts), 1e-10);
    expect_rel(r.p_value, oracle::chi_square_p(r.statistic, r.df), 1e-10);
  }
}

TEST(Kappa, Examples) {
  EXPECT_EQ(cohen_kappa(ConfusionMatrix({"a", "b"}, {5, 0, 0, 7})), 1.0);
  EXPECT_NEAR(cohen_kappa(ConfusionMatrix({"a", "b"}, {25, 25, 25, 25})), 0.0, 1e-15);
  EXPECT_NEAR(cohen_kappa(ConfusionMatrix({"a", "b"}, {20, 5, 10, 15})), 0.4, 1e-15);
  EXPECT_THROW(cohen_kappa(ConfusionMatrix({"a", "b"})), ValidationError);
  EXPECT_THROW(ConfusionMatrix({"a"}), ValidationError);
}

TEST(Kappa, MatchesExpandedOracle) {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<std::uint64_t> c(0, 6);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t k = 2 + trial % 4;
    std::vector<std::uint64_t> counts(k * k);
    for (auto& v : counts) v = c(rng);
    std::vector<std::string> cats(k, "c");
    ConfusionMatrix m(cats, counts);
    if (m.total() == 0) continue;
    for (bool linear : {false, true}) {
      const double want = oracle::kappa_expanded(counts, k, linear);
      if (!std::isfinite(want)) continue;
      expect_rel(cohen_kappa(m, linear ? KappaWeighting::linear : KappaWeighting::none), want,
                 1e-10);
      ++checked;
    }
  }
  EXPECT_GT(checked, 400);
}

TEST(Ccc, MatchesPairwiseOracle) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-50, 50);
  for (int trial = 0; trial < 300; ++trial) {
    PairedSeries s;
    const int n = 3 + trial % 12;
    for (int i = 0; i < n; ++i) {
      const double x = u(rng);
      s.x.push_back(x);
      s.y.push_back(trial % 2 ? x * 0.8 + u(rng) * 0.2 : u(rng));
    }
    expect_rel(lin_ccc(s).rho_c, oracle::ccc_pairwise(s.x, s.y), 1e-10);
    std::vector<double> d(s.x.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = s.y[i] - s.x[i];
    expect_rel(bland_altman(s).sd_diff, oracle::sd_pairwise(d), 1e-10);
  }
}
