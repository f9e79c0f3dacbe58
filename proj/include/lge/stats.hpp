#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lge {

// Paired measurements of two methods, matched by index.
struct PairedSeries {
  std::vector<double> x;
  std::vector<double> y;

  void validate(std::size_t min_length = 1) const;
};

struct ConcordanceResult {
  double rho_c = 0.0;
  double pearson_r = 0.0;
  // Fisher-z interval; absent when the variance is not defined
  // (n <= 2, |rho_c| == 1, or r == 0).
  std::optional<double> ci_lower;
  std::optional<double> ci_upper;
};

// Lin's concordance correlation with population moments. Throws when both
// series are constant with equal means (0/0).
ConcordanceResult lin_ccc(const PairedSeries& series, double level = 0.95);

struct BlandAltmanResult {
  double bias = 0.0;     // mean of y - x
  double sd_diff = 0.0;  // sample SD (n - 1)
  double loa_low = 0.0;
  double loa_high = 0.0;
};

BlandAltmanResult bland_altman(const PairedSeries& series, double multiplier = 1.96);

enum class WilcoxonMode { automatic, exact, normal };
enum class ZeroHandling { wilcoxon, pratt };

struct WilcoxonResult {
  double w_plus = 0.0;     // sum of ranks of positive differences
  double p_value = 1.0;    // two-sided
  std::size_t n_used = 0;  // differences entering the sign statistic
  bool exact = false;
};

inline constexpr std::size_t kWilcoxonExactLimit = 20;

// Paired signed-rank test on d = y - x. Mid-ranks for ties. Exact mode
// counts all 2^m sign assignments with |W - E[W]| >= observed; normal mode
// uses the tie-corrected variance and a 0.5 continuity correction.
WilcoxonResult wilcoxon_signed_rank(const PairedSeries& series,
                                    WilcoxonMode mode = WilcoxonMode::automatic,
                                    ZeroHandling zeros = ZeroHandling::wilcoxon);

struct ChiSquareResult {
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
};

// One-way goodness of fit against equal expected counts.
ChiSquareResult chi_square_uniform(std::span<const std::uint64_t> counts);

// Upper tail of the chi-square distribution.
double chi_square_sf(double statistic, double df);

class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::vector<std::string> categories);
  ConfusionMatrix(std::vector<std::string> categories, std::vector<std::uint64_t> counts);

  std::size_t k() const { return categories_.size(); }
  const std::vector<std::string>& categories() const { return categories_; }
  std::uint64_t operator()(std::size_t row, std::size_t col) const { return counts_[row * k() + col]; }
  void add(std::size_t row, std::size_t col, std::uint64_t n = 1) { counts_[row * k() + col] += n; }
  std::uint64_t total() const;
  ConfusionMatrix transposed() const;
  const std::vector<std::uint64_t>& counts() const { return counts_; }

 private:
  std::vector<std::string> categories_;
  std::vector<std::uint64_t> counts_;  // row-major
};

enum class KappaWeighting { none, linear };

// Cohen's kappa. Linear weights w_ij = 1 - |i-j|/(k-1). Returns 1 when the
// expected disagreement is zero and no disagreement is observed.
double cohen_kappa(const ConfusionMatrix& matrix, KappaWeighting weighting = KappaWeighting::none);

}  // namespace lge
