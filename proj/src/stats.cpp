#include "lge/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "lge/error.hpp"

namespace lge {

namespace {

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Mid-ranks of |values| (1-based), ties share the average rank.
std::vector<double> mid_ranks(const std::vector<double>& magnitudes) {
  const std::size_t n = magnitudes.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return magnitudes[a] < magnitudes[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && magnitudes[order[j + 1]] == magnitudes[order[i]]) ++j;
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

void PairedSeries::validate(std::size_t min_length) const {
  if (x.size() != y.size()) throw ValidationError("paired series lengths differ");
  if (x.size() < min_length) {
    throw ValidationError("paired series needs at least " + std::to_string(min_length) +
                          " pairs");
  }
}

ConcordanceResult lin_ccc(const PairedSeries& series, double level) {
  series.validate(2);
  const double n = static_cast<double>(series.x.size());
  const double mx = mean_of(series.x);
  const double my = mean_of(series.y);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < series.x.size(); ++i) {
    const double dx = series.x[i] - mx;
    const double dy = series.y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  const double vx = sxx / n;
  const double vy = syy / n;
  const double cov = sxy / n;
  const double denom = vx + vy + (mx - my) * (mx - my);
  if (denom == 0.0) throw ValidationError("concordance undefined for identical constant series");

  ConcordanceResult out;
  out.rho_c = 2.0 * cov / denom;
  out.pearson_r = (vx > 0.0 && vy > 0.0) ? cov / std::sqrt(vx * vy) : 0.0;

  const double rc = out.rho_c;
  const double r = out.pearson_r;
  if (series.x.size() > 2 && std::abs(rc) < 1.0 && r != 0.0) {
    const double u2 = (mx - my) * (mx - my) / std::sqrt(vx * vy);
    const double one_minus = 1.0 - rc * rc;
    const double var_z = ((1.0 - r * r) * rc * rc / (one_minus * r * r) +
                          2.0 * rc * rc * rc * (1.0 - rc) * u2 / (r * one_minus * one_minus) -
                          rc * rc * rc * rc * u2 * u2 / (2.0 * r * r * one_minus * one_minus)) /
                         (n - 2.0);
    if (var_z > 0.0) {
      const double crit =
          boost::math::quantile(boost::math::normal_distribution<double>(), 0.5 + level / 2.0);
      const double z = std::atanh(rc);
      out.ci_lower = std::tanh(z - crit * std::sqrt(var_z));
      out.ci_upper = std::tanh(z + crit * std::sqrt(var_z));
    }
  }
  return out;
}

BlandAltmanResult bland_altman(const PairedSeries& series, double multiplier) {
  series.validate(2);
  std::vector<double> d(series.x.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = series.y[i] - series.x[i];
  BlandAltmanResult out;
  out.bias = mean_of(d);
  double ss = 0.0;
  for (double v : d) ss += (v - out.bias) * (v - out.bias);
  out.sd_diff = std::sqrt(ss / static_cast<double>(d.size() - 1));
  out.loa_low = out.bias - multiplier * out.sd_diff;
  out.loa_high = out.bias + multiplier * out.sd_diff;
  return out;
}

WilcoxonResult wilcoxon_signed_rank(const PairedSeries& series, WilcoxonMode mode,
                                    ZeroHandling zeros) {
  series.validate(1);
  std::vector<double> diffs;
  for (std::size_t i = 0; i < series.x.size(); ++i) {
    const double d = series.y[i] - series.x[i];
    if (d != 0.0 || zeros == ZeroHandling::pratt) diffs.push_back(d);
  }
  std::vector<double> magnitudes(diffs.size());
  std::transform(diffs.begin(), diffs.end(), magnitudes.begin(),
                 [](double d) { return std::abs(d); });
  const std::vector<double> all_ranks = mid_ranks(magnitudes);

  // Pratt ranks zeros with the rest, then leaves them out of the statistic.
  std::vector<double> ranks;
  std::vector<bool> positive;
  for (std::size_t i = 0; i < diffs.size(); ++i) {
    if (diffs[i] == 0.0) continue;
    ranks.push_back(all_ranks[i]);
    positive.push_back(diffs[i] > 0.0);
  }

  WilcoxonResult out;
  out.n_used = ranks.size();
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    if (positive[i]) out.w_plus += ranks[i];
  }
  if (ranks.empty()) {
    out.p_value = 1.0;
    out.exact = mode != WilcoxonMode::normal;
    return out;
  }

  const bool exact = mode == WilcoxonMode::exact ||
                     (mode == WilcoxonMode::automatic && ranks.size() <= kWilcoxonExactLimit);
  out.exact = exact;

  if (exact) {
    if (ranks.size() > 62) throw ValidationError("exact Wilcoxon supports at most 62 pairs");
    // Mid-ranks are multiples of 1/2, so doubled ranks are integers.
    std::vector<long long> doubled(ranks.size());
    std::transform(ranks.begin(), ranks.end(), doubled.begin(),
                   [](double r) { return std::llround(2.0 * r); });
    const long long total = std::accumulate(doubled.begin(), doubled.end(), 0LL);
    std::vector<std::uint64_t> ways(static_cast<std::size_t>(total) + 1, 0);
    ways[0] = 1;
    long long reach = 0;
    for (long long r : doubled) {
      for (long long s = reach; s >= 0; --s) {
        if (ways[s] != 0) ways[s + r] += ways[s];
      }
      reach += r;
    }
    const long long observed = std::llround(2.0 * out.w_plus);
    const long long observed_dev = std::llabs(2 * observed - total);
    std::uint64_t extreme = 0;
    for (long long s = 0; s <= total; ++s) {
      if (std::llabs(2 * s - total) >= observed_dev) extreme += ways[s];
    }
    out.p_value = static_cast<double>(extreme) / std::ldexp(1.0, static_cast<int>(ranks.size()));
    return out;
  }

  double sum_r = 0.0, sum_r2 = 0.0;
  for (double r : ranks) {
    sum_r += r;
    sum_r2 += r * r;
  }
  const double expected = sum_r / 2.0;
  const double sd = std::sqrt(sum_r2 / 4.0);
  const double z = (std::abs(out.w_plus - expected) - 0.5) / sd;
  out.p_value = z <= 0.0 ? 1.0 : std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  return out;
}

double chi_square_sf(double statistic, double df) {
  if (statistic <= 0.0) return 1.0;
  return boost::math::gamma_q(df / 2.0, statistic / 2.0);
}

ChiSquareResult chi_square_uniform(std::span<const std::uint64_t> counts) {
  if (counts.size() < 2) throw ValidationError("chi-square needs at least two categories");
  const std::uint64_t total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
  if (total == 0) throw ValidationError("chi-square needs a positive total count");
  const double expected = static_cast<double>(total) / static_cast<double>(counts.size());
  ChiSquareResult out;
  for (std::uint64_t c : counts) {
    const double d = static_cast<double>(c) - expected;
    out.statistic += d * d / expected;
  }
  out.df = static_cast<int>(counts.size()) - 1;
  out.p_value = chi_square_sf(out.statistic, out.df);
  return out;
}

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> categories)
    : categories_(std::move(categories)), counts_(categories_.size() * categories_.size(), 0) {
  if (categories_.size() < 2) throw ValidationError("confusion matrix needs k >= 2");
}

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> categories,
                                 std::vector<std::uint64_t> counts)
    : categories_(std::move(categories)), counts_(std::move(counts)) {
  if (categories_.size() < 2) throw ValidationError("confusion matrix needs k >= 2");
  if (counts_.size() != categories_.size() * categories_.size()) {
    throw ValidationError("confusion matrix counts must be k*k");
  }
}

std::uint64_t ConfusionMatrix::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

ConfusionMatrix ConfusionMatrix::transposed() const {
  ConfusionMatrix t(categories_);
  for (std::size_t i = 0; i < k(); ++i)
    for (std::size_t j = 0; j < k(); ++j) t.add(j, i, (*this)(i, j));
  return t;
}

double cohen_kappa(const ConfusionMatrix& m, KappaWeighting weighting) {
  const std::uint64_t total = m.total();
  if (total == 0) throw ValidationError("kappa undefined for an empty matrix");
  const std::size_t k = m.k();
  const double n = static_cast<double>(total);
  std::vector<double> rows(k, 0.0), cols(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      rows[i] += static_cast<double>(m(i, j));
      cols[j] += static_cast<double>(m(i, j));
    }
  }

  // Disagreement weight 1 - w_ij; the linear scale factor 1/(k-1) cancels.
  auto disagreement = [&](std::size_t i, std::size_t j) -> double {
    if (weighting == KappaWeighting::none) return i == j ? 0.0 : 1.0;
    return static_cast<double>(i > j ? i - j : j - i);
  };
  double observed = 0.0, expected = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double w = disagreement(i, j);
      observed += w * static_cast<double>(m(i, j)) / n;
      expected += w * rows[i] * cols[j] / (n * n);
    }
  }
  if (expected == 0.0) return 1.0;
  return 1.0 - observed / expected;
}

}  // namespace lge
