#include "ctmc4/gof.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ctmc4/chain.hpp"

namespace ctmc4 {

Eigen::Matrix4d expected_table(const RateVector& theta,
                               const TransitionCountTable& table) {
  const TransitionMatrix p =
      transition_matrix(theta, static_cast<double>(table.delta_t));
  Eigen::Matrix4d e = Eigen::Matrix4d::Zero();
  for (int i = 0; i < 2; ++i) {
    const double ni = static_cast<double>(table.row_total(i));
    e.row(i) = ni * p.p.row(i);
  }
  return e;
}

std::pair<double, int> chi_square_interval(const TransitionCountTable& observed,
                                           const Eigen::Matrix4d& expected) {
  double chi = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 4; ++j) {
      const double o = static_cast<double>(observed.counts(i, j));
      const double e = expected(i, j);
      if (e < 1e-12) {
        if (o == 0.0) continue;
        throw input_error("cell (" + std::to_string(i + 1) + "," +
                          std::to_string(j + 1) + ") of delta_t=" +
                          std::to_string(observed.delta_t) +
                          " has zero expectation but observed " +
                          std::to_string(static_cast<long long>(o)));
      }
      chi += (o - e) * (o - e) / e;
    }
  }
  return {chi, 9};
}

GofReport goodness_of_fit(const RateVector& theta, const PanelDataset& dataset,
                          double significance) {
  if (dataset.tables.empty()) throw input_error("empty dataset");
  if (significance <= 0.0 || significance >= 1.0)
    throw config_error("significance must be in (0, 1)");
  GofReport report;
  report.significance = significance;
  for (const auto& table : dataset.tables) {
    IntervalGof g;
    g.delta_t = table.delta_t;
    g.expected = expected_table(theta, table);
    std::tie(g.chi_sq, g.df) = chi_square_interval(table, g.expected);
    report.pooled_chi_sq += g.chi_sq;
    report.pooled_df += g.df;
    report.per_interval.push_back(std::move(g));
  }
  report.critical_value =
      chi_square_quantile(1.0 - significance, report.pooled_df);
  report.reject_null = report.pooled_chi_sq > report.critical_value;
  return report;
}

// --- chi-square quantile via the regularized incomplete gamma ------------

double regularized_gamma_p(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw config_error("bad incomplete-gamma argument");
  if (x == 0.0) return 0.0;
  const double lg = std::lgamma(a);
  if (x < a + 1.0) {
    // Series: P(a,x) = x^a e^-x / Gamma(a) * sum x^n / (a (a+1) ... (a+n)).
    double ap = a, sum = 1.0 / a, del = sum;
    for (int n = 0; n < 500; ++n) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-15)
        return sum * std::exp(-x + a * std::log(x) - lg);
    }
    return sum * std::exp(-x + a * std::log(x) - lg);
  }
  // Lentz continued fraction for Q(a,x); P = 1 - Q.
  const double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return 1.0 - std::exp(-x + a * std::log(x) - lg) * h;
}

double chi_square_quantile(double p, int df) {
  if (df < 1) throw config_error("chi-square df must be >= 1");
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return std::numeric_limits<double>::infinity();
  const double a = df / 2.0;
  // Bisection on the CDF; bracket grows until it encloses the quantile.
  double lo = 0.0, hi = df + 10.0;
  while (regularized_gamma_p(a, hi / 2.0) < p) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (regularized_gamma_p(a, mid / 2.0) < p)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-12 * (1.0 + hi)) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace ctmc4
