#pragma once

// Estimators and classical tests used by the diagnostics.

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace rwre {

struct Estimate {
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  std::int64_t n = 0;

  double half_width() const { return 0.5 * (hi - lo); }
};

double normal_cdf(double x);
double normal_quantile(double p);

// Wilson score interval for a binomial proportion.
Estimate wilson(std::int64_t successes, std::int64_t n, double confidence = 0.95);

// Percentile bootstrap over n items. `statistic` receives a resampled index
// multiset and returns one value per tracked quantity; the result holds a
// (lo, hi) pair per quantity.
std::vector<std::pair<double, double>> bootstrap_percentile(
    std::size_t n, int resamples, std::uint64_t seed,
    const std::function<std::vector<double>(const std::vector<std::size_t>&)>& statistic,
    double confidence = 0.95);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double se = 0.0;
  std::size_t n = 0;
};

// Least-squares slope of log y on log x; needs >= 3 points, all positive.
SlopeFit loglog_slope(const std::vector<std::pair<double, double>>& points);

struct TestReport {
  double statistic = 0.0;
  double p_value = 1.0;
  std::int64_t n = 0;
  std::string method;
  std::string null_description;
  bool inconclusive = false;
};

// Pearson chi-squared independence test on {{a, b}, {c, d}}. When an
// expected count is below 5 the p-value comes from the exact permutation
// (fixed-margin) distribution of the statistic instead of chi^2_1. A
// tie_uniform in [0, 1) splits the mass of tied tables, which makes the
// permutation p-value exactly uniform under the null; otherwise ties count
// in full (conservative).
TestReport chi2_independence_2x2(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d,
                                 double tie_uniform = -1.0);

// P(D_n >= d) for the one-sample Kolmogorov-Smirnov statistic.
double ks_pvalue(std::int64_t n, double d);
// One-sample KS test of `samples` against the continuous CDF `cdf`.
TestReport ks_test(std::vector<double> samples, const std::function<double(double)>& cdf);

// Whitens with the Cholesky factor of `covariance`, runs a KS test per
// coordinate against N(0,1) and combines with Bonferroni.
TestReport ks_gaussian(const std::vector<Eigen::VectorXd>& samples, const Eigen::VectorXd& mean,
                       const Eigen::MatrixXd& covariance);

// Total variation distance between two pmfs on {0, 1, ...}.
double tv_distance(const std::vector<double>& p, const std::vector<double>& q);
// Empirical pmf of non-negative integer samples.
std::vector<double> empirical_pmf(const std::vector<std::int64_t>& samples);

double mean_of(const std::vector<double>& v);
double variance_of(const std::vector<double>& v);  // unbiased
double pearson_correlation(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace rwre
