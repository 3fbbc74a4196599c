#pragma once

// Statistical primitives used across the lab: special functions needed for
// beta/chi-square laws, distribution-distance statistics, and small helpers
// for reporting Monte Carlo results.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace occlab {

double normal_pdf(double x);
double normal_cdf(double x);

// log Beta(a, b)
double log_beta(double a, double b);

// Regularized incomplete beta I_x(a, b), absolute accuracy ~1e-12 on (0,1).
double beta_cdf(double a, double b, double x);

// Regularized incomplete gamma P(a, x) and Q(a, x) = 1 - P(a, x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Upper tail of the chi-square distribution with df degrees of freedom.
double chi_square_sf(double x, double df);

// Quantile of the chi-square distribution (bisection on the sf).
double chi_square_quantile(double p, double df);

// One-sample Kolmogorov-Smirnov statistic; samples need not be sorted.
double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf);

// Two-sample Kolmogorov-Smirnov statistic.
double ks_distance_two_sample(std::vector<double> a, std::vector<double> b);

// Asymptotic p-value for the one-sample statistic at sample size n.
double ks_pvalue(double d, std::size_t n);

// Critical value for the two-sample statistic at significance alpha.
double ks_two_sample_critical(double alpha, std::size_t n, std::size_t m);

struct ChiSquareResult {
  double statistic = 0.0;
  double df = 0.0;
  double p_value = 1.0;
};

// Pearson test of observed counts against expected probabilities.
ChiSquareResult chi_square_goodness(const std::vector<std::uint64_t>& observed,
                                    const std::vector<double>& expected_probs);

// Two-sample homogeneity test on shared cells; zero-zero cells are skipped.
ChiSquareResult chi_square_two_sample(const std::vector<std::uint64_t>& a,
                                      const std::vector<std::uint64_t>& b);

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

// Wilson score interval for a binomial proportion.
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = 1.96);

// Compensated accumulator for long sums.
class KahanSum {
 public:
  void add(double x) {
    const double y = x - carry_;
    const double t = sum_ + y;
    carry_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

struct SummaryStats {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double std_error = 0.0;
};

SummaryStats summarize(const std::vector<double>& xs);

// Equal-width bins on [0,1] accumulating a response variable per bin.
class BinnedCurve {
 public:
  explicit BinnedCurve(std::size_t n_bins);

  void add(double x, double y);
  void merge(const BinnedCurve& other);

  std::size_t n_bins() const { return count_.size(); }
  double bin_center(std::size_t i) const;
  std::uint64_t count(std::size_t i) const { return count_[i]; }
  double mean(std::size_t i) const;
  double std_error(std::size_t i) const;

 private:
  std::vector<std::uint64_t> count_;
  std::vector<double> sum_;
  std::vector<double> sum_sq_;
};

// Outcome of a single named check. `passed` is always `statistic <= threshold`;
// checks whose natural reading is "large is good" store a transformed
// statistic so the convention holds uniformly.
struct TestVerdict {
  std::string name;
  double statistic = 0.0;
  double threshold = 0.0;
  std::uint64_t n_samples = 0;
  bool passed = false;
};

inline TestVerdict make_verdict(std::string name, double statistic, double threshold,
                                std::uint64_t n_samples) {
  TestVerdict v;
  v.name = std::move(name);
  v.statistic = statistic;
  v.threshold = threshold;
  v.n_samples = n_samples;
  v.passed = statistic <= threshold;
  return v;
}

// Least-squares slope of y against x.
double regression_slope(const std::vector<double>& x, const std::vector<double>& y);

// Spearman rank correlation (average ranks on ties).
double spearman_rho(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace occlab
