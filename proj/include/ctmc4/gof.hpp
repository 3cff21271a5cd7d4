#ifndef CTMC4_GOF_HPP
#define CTMC4_GOF_HPP

#include <Eigen/Dense>

#include <utility>
#include <vector>

#include "ctmc4/panel.hpp"
#include "ctmc4/rates.hpp"

namespace ctmc4 {

// E_ij = n_i+ P_ij(delta_t) for the two transient rows; rows 3-4 zero.
Eigen::Matrix4d expected_table(const RateVector& theta,
                               const TransitionCountTable& table);

// Pearson statistic over the 8 observable cells; cells with expected
// < 1e-12 and observed 0 are skipped, expected ~ 0 with observed > 0 is an
// error. df is the contingency-table convention (4-1)(4-1) = 9.
std::pair<double, int> chi_square_interval(const TransitionCountTable& observed,
                                           const Eigen::Matrix4d& expected);

struct IntervalGof {
  int delta_t = 0;
  Eigen::Matrix4d expected = Eigen::Matrix4d::Zero();
  double chi_sq = 0.0;
  int df = 0;
};

struct GofReport {
  std::vector<IntervalGof> per_interval;
  double pooled_chi_sq = 0.0;
  int pooled_df = 0;
  double significance = 0.05;
  double critical_value = 0.0;
  bool reject_null = false;
  // The df convention counts 9 per interval; it ignores that only 8 cells
  // per interval are informative and that 5 parameters were estimated.
  const char* df_note =
      "df uses the (4-1)(4-1)-per-interval contingency-table convention; "
      "an accounting that subtracts estimated parameters and empty cells "
      "would give fewer degrees of freedom";
};

GofReport goodness_of_fit(const RateVector& theta, const PanelDataset& dataset,
                          double significance = 0.05);

// Quantile of the chi-square distribution: smallest x with CDF(x) >= p.
double chi_square_quantile(double p, int df);

// Regularized lower incomplete gamma P(a, x) (series / continued fraction).
double regularized_gamma_p(double a, double x);

}  // namespace ctmc4

#endif
