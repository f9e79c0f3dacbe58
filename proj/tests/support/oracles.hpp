#pragma once

// Brute-force reference implementations used only by tests. They follow the
// textbook definitions directly and share no code with the library.

#include <cstdint>
#include <filesystem>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using Pixel = std::pair<int, int>;  // (x, y)
using Region = std::set<Pixel>;

// Connected regions of nonzero pixels by breadth-first flood fill, ordered by
// the scan position (y, then x) of their first pixel.
std::vector<Region> flood_fill(const std::vector<std::uint8_t>& mask, int width, int height,
                               bool eight);

// Smallest v in values with #{x <= v} >= p/100 * n.
double nearest_rank(const std::vector<double>& values, double p);

// Two-sided exact p by enumerating all 2^n sign patterns of the nonzero
// differences, mid-ranks for ties.
double wilcoxon_enumeration(const std::vector<double>& differences);

// Regularized upper incomplete gamma by series / continued fraction.
double gamma_q(double a, double x);
double chi_square_p(double statistic, double df);

double binomial_cdf(std::uint64_t k, std::uint64_t n, double p);
// Clopper-Pearson bounds by bisection on the binomial tail.
std::pair<double, double> clopper_pearson(std::uint64_t k, std::uint64_t n, double level);

// 1 - mean paired squared difference / mean all-pairs squared difference.
double ccc_pairwise(const std::vector<double>& x, const std::vector<double>& y);

// Sample SD via the all-pairs identity var = sum_{i<j} (d_i - d_j)^2 / (n(n-1)).
double sd_pairwise(const std::vector<double>& d);

// Kappa from the expanded list of rated items; weights are agreement
// weights (identity or 1 - |i-j|/(k-1)).
double kappa_expanded(const std::vector<std::uint64_t>& counts, std::size_t k, bool linear);

double chi_square_statistic(const std::vector<std::uint64_t>& counts);

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& path);

}  // namespace oracle
