#include "rwre/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include "rwre/errors.hpp"
#include "rwre/rng.hpp"

namespace rwre {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw UsageError("normal_quantile: p must lie in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

Estimate wilson(std::int64_t successes, std::int64_t n, double confidence) {
  if (n <= 0) throw UsageError("wilson: n must be positive");
  if (successes < 0 || successes > n) throw UsageError("wilson: successes out of range");
  const double z = normal_quantile(0.5 + 0.5 * confidence);
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double denom = 1.0 + z * z / nn;
  const double center = (p + z * z / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z * z / (4.0 * nn * nn)) / denom;
  Estimate e;
  e.value = p;
  e.lo = successes == 0 ? 0.0 : std::max(0.0, center - half);
  e.hi = successes == n ? 1.0 : std::min(1.0, center + half);
  e.n = n;
  return e;
}

std::vector<std::pair<double, double>> bootstrap_percentile(
    std::size_t n, int resamples, std::uint64_t seed,
    const std::function<std::vector<double>(const std::vector<std::size_t>&)>& statistic,
    double confidence) {
  if (n == 0) throw UsageError("bootstrap: no data");
  if (resamples < 2) throw UsageError("bootstrap: need at least 2 resamples");
  std::vector<std::vector<double>> draws;
  draws.reserve(static_cast<std::size_t>(resamples));
  std::vector<std::size_t> idx(n);
  for (int b = 0; b < resamples; ++b) {
    CounterRng rng(seed, static_cast<std::uint64_t>(b));
    for (auto& i : idx) i = static_cast<std::size_t>(rng.below(n));
    draws.push_back(statistic(idx));
  }
  const std::size_t k = draws.front().size();
  std::vector<std::pair<double, double>> out(k);
  std::vector<double> col(draws.size());
  const double alpha = 0.5 * (1.0 - confidence);
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t b = 0; b < draws.size(); ++b) col[b] = draws[b].at(j);
    std::sort(col.begin(), col.end());
    auto q = [&](double p) {
      const double pos = p * static_cast<double>(col.size() - 1);
      const auto lo = static_cast<std::size_t>(std::floor(pos));
      const auto hi = std::min(lo + 1, col.size() - 1);
      return col[lo] + (pos - static_cast<double>(lo)) * (col[hi] - col[lo]);
    };
    out[j] = {q(alpha), q(1.0 - alpha)};
  }
  return out;
}

SlopeFit loglog_slope(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw UsageError("loglog_slope: need at least 3 points");
  std::vector<double> lx, ly;
  for (const auto& [x, y] : points) {
    if (!(x > 0.0) || !(y > 0.0)) throw UsageError("loglog_slope: values must be positive");
    lx.push_back(std::log(x));
    ly.push_back(std::log(y));
  }
  const double n = static_cast<double>(points.size());
  const double mx = mean_of(lx);
  const double my = mean_of(ly);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw UsageError("loglog_slope: x values must not all coincide");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - fit.intercept - fit.slope * lx[i];
    rss += r * r;
  }
  fit.se = std::sqrt(rss / (n - 2.0) / sxx);
  fit.n = points.size();
  return fit;
}

TestReport chi2_independence_2x2(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d,
                                 double tie_uniform) {
  if (a < 0 || b < 0 || c < 0 || d < 0) throw UsageError("chi2: counts must be non-negative");
  TestReport rep;
  rep.n = a + b + c + d;
  rep.null_description = "row and column indicators independent";
  const double r1 = static_cast<double>(a + b), r2 = static_cast<double>(c + d);
  const double c1 = static_cast<double>(a + c), c2 = static_cast<double>(b + d);
  const double n = static_cast<double>(rep.n);
  if (r1 == 0 || r2 == 0 || c1 == 0 || c2 == 0) {
    rep.method = "chi-squared 2x2";
    rep.inconclusive = true;
    rep.p_value = 1.0;
    return rep;
  }
  auto stat = [&](double aa) {
    const double bb = r1 - aa, cc = c1 - aa, dd = r2 - cc;
    const double det = aa * dd - bb * cc;
    return n * det * det / (r1 * r2 * c1 * c2);
  };
  rep.statistic = stat(static_cast<double>(a));
  const double min_expected = std::min({r1 * c1, r1 * c2, r2 * c1, r2 * c2}) / n;
  if (min_expected >= 5.0) {
    rep.method = "chi-squared 2x2, asymptotic";
    rep.p_value = boost::math::cdf(boost::math::complement(boost::math::chi_squared_distribution<double>(1.0), rep.statistic));
    return rep;
  }
  rep.method = "chi-squared 2x2, exact permutation";
  const auto lo = static_cast<std::int64_t>(std::max(0.0, r1 - c2));
  const auto hi = static_cast<std::int64_t>(std::min(r1, c1));
  auto log_choose = [](double nn, double k) {
    return std::lgamma(nn + 1.0) - std::lgamma(k + 1.0) - std::lgamma(nn - k + 1.0);
  };
  const double log_total = log_choose(n, r1);
  const double tol = 1e-9 * std::max(1.0, rep.statistic);
  double above = 0.0, tied = 0.0;
  for (std::int64_t x = lo; x <= hi; ++x) {
    const double xd = static_cast<double>(x);
    const double s = stat(xd);
    const double mass = std::exp(log_choose(c1, xd) + log_choose(c2, r1 - xd) - log_total);
    if (s > rep.statistic + tol) {
      above += mass;
    } else if (s >= rep.statistic - tol) {
      tied += mass;
    }
  }
  const bool randomized = tie_uniform >= 0.0 && tie_uniform < 1.0;
  if (randomized) rep.method += ", randomized ties";
  rep.p_value = std::clamp(above + (randomized ? tie_uniform : 1.0) * tied, 0.0, 1.0);
  return rep;
}

namespace {

// Marsaglia, Tsang and Wang (2003): P(D_n < d).
double kolmogorov_cdf_exact(std::int64_t n, double d) {
  const double nd = static_cast<double>(n) * d;
  const int k = static_cast<int>(nd) + 1;
  const int m = 2 * k - 1;
  const double h = k - nd;
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) H(i, j) = i - j + 1 >= 0 ? 1.0 : 0.0;
  }
  for (int i = 0; i < m; ++i) {
    H(i, 0) -= std::pow(h, i + 1);
    H(m - 1, i) -= std::pow(h, m - i);
  }
  H(m - 1, 0) += 2.0 * h - 1.0 > 0.0 ? std::pow(2.0 * h - 1.0, m) : 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      for (int g = 1; g <= i - j + 1; ++g) H(i, j) /= g;
    }
  }
  // Q = H^n with a running power-of-ten exponent.
  Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(m, m);
  Eigen::MatrixXd base = H;
  int eQ = 0, eB = 0;
  std::int64_t e = n;
  while (e > 0) {
    if (e & 1) {
      Q = Q * base;
      eQ += eB;
      if (Q(k - 1, k - 1) > 1e140) {
        Q *= 1e-140;
        eQ += 140;
      }
    }
    e >>= 1;
    if (e > 0) {
      base = base * base;
      eB *= 2;
      if (base(k - 1, k - 1) > 1e140) {
        base *= 1e-140;
        eB += 140;
      }
    }
  }
  double s = Q(k - 1, k - 1);
  for (std::int64_t i = 1; i <= n; ++i) {
    s = s * static_cast<double>(i) / static_cast<double>(n);
    if (s < 1e-140) {
      s *= 1e140;
      eQ -= 140;
    }
  }
  return s * std::pow(10.0, eQ);
}

double kolmogorov_tail_asymptotic(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 == 1 ? 1.0 : -1.0) * term;
    if (term < 1e-300) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace

double ks_pvalue(std::int64_t n, double d) {
  if (n <= 0) throw UsageError("ks_pvalue: n must be positive");
  if (d <= 0.0) return 1.0;
  if (d >= 1.0) return 0.0;
  const double nn = static_cast<double>(n);
  if (nn * d * d > 18.0) return 2.0 * std::exp(-(2.000071 + 0.331 / std::sqrt(nn) + 1.409 / nn) * nn * d * d);
  if (2.0 * (nn * d + 1.0) <= 200.0) return std::clamp(1.0 - kolmogorov_cdf_exact(n, d), 0.0, 1.0);
  const double sq = std::sqrt(nn);
  return kolmogorov_tail_asymptotic((sq + 0.12 + 0.11 / sq) * d);
}

TestReport ks_test(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw UsageError("ks_test: no samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double dmax = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    dmax = std::max({dmax, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  TestReport rep;
  rep.statistic = dmax;
  rep.n = static_cast<std::int64_t>(samples.size());
  rep.p_value = ks_pvalue(rep.n, dmax);
  rep.method = "one-sample Kolmogorov-Smirnov";
  rep.null_description = "samples drawn from the reference CDF";
  return rep;
}

TestReport ks_gaussian(const std::vector<Eigen::VectorXd>& samples, const Eigen::VectorXd& mean,
                       const Eigen::MatrixXd& covariance) {
  if (samples.empty()) throw UsageError("ks_gaussian: no samples");
  const auto d = mean.size();
  if (covariance.rows() != d || covariance.cols() != d) throw UsageError("ks_gaussian: covariance shape mismatch");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(covariance);
  if (eig.eigenvalues().minCoeff() <= 1e-12 * std::max(1.0, eig.eigenvalues().maxCoeff())) {
    throw UsageError("ks_gaussian: covariance is singular");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(covariance);
  if (llt.info() != Eigen::Success) throw UsageError("ks_gaussian: covariance is singular");
  std::vector<std::vector<double>> white(static_cast<std::size_t>(d));
  for (const auto& x : samples) {
    if (x.size() != d) throw UsageError("ks_gaussian: sample dimension mismatch");
    const Eigen::VectorXd w = llt.matrixL().solve(x - mean);
    for (Eigen::Index i = 0; i < d; ++i) white[static_cast<std::size_t>(i)].push_back(w(i));
  }
  TestReport rep;
  rep.n = static_cast<std::int64_t>(samples.size());
  rep.method = "whitened per-coordinate Kolmogorov-Smirnov, Bonferroni";
  rep.null_description = "samples drawn from N(mean, covariance)";
  double pmin = 1.0;
  for (auto& col : white) {
    const TestReport r = ks_test(std::move(col), normal_cdf);
    rep.statistic = std::max(rep.statistic, r.statistic);
    pmin = std::min(pmin, r.p_value);
  }
  rep.p_value = std::min(1.0, pmin * static_cast<double>(d));
  return rep;
}

double tv_distance(const std::vector<double>& p, const std::vector<double>& q) {
  const std::size_t n = std::max(p.size(), q.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double a = k < p.size() ? p[k] : 0.0;
    const double b = k < q.size() ? q[k] : 0.0;
    acc += std::abs(a - b);
  }
  return 0.5 * acc;
}

std::vector<double> empirical_pmf(const std::vector<std::int64_t>& samples) {
  if (samples.empty()) throw UsageError("empirical_pmf: no samples");
  std::vector<double> pmf;
  for (std::int64_t s : samples) {
    if (s < 0) throw UsageError("empirical_pmf: samples must be non-negative");
    if (static_cast<std::size_t>(s) >= pmf.size()) pmf.resize(static_cast<std::size_t>(s) + 1, 0.0);
    pmf[static_cast<std::size_t>(s)] += 1.0;
  }
  for (double& p : pmf) p /= static_cast<double>(samples.size());
  return pmf;
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) throw UsageError("mean_of: empty sample");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double variance_of(const std::vector<double>& v) {
  if (v.size() < 2) throw UsageError("variance_of: need at least 2 samples");
  const double m = mean_of(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return acc / static_cast<double>(v.size() - 1);
}

double pearson_correlation(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) throw UsageError("pearson_correlation: need paired samples");
  const double ma = mean_of(a), mb = mean_of(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace rwre
