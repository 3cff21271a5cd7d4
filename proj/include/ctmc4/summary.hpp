#ifndef CTMC4_SUMMARY_HPP
#define CTMC4_SUMMARY_HPP

#include <Eigen/Dense>

#include <utility>

#include "ctmc4/chain.hpp"
#include "ctmc4/rates.hpp"

namespace ctmc4 {

struct SojournSummary {
  double s1 = 0.0, s2 = 0.0;        // mean holding times, years
  double var_s1 = 0.0, var_s2 = 0.0;  // delta-method variances, years^2
};

// s_i = -1/q_ii: 1/gamma1 and 1/gamma2.
std::pair<double, double> sojourn_means(const RateVector& theta);

// Delta-method variance gamma_i^-4 * d' var(theta) d. The reference
// computation uses d = -(1,1,1,1,1) for both states; strict_gradient
// restricts d to the parameters each q_ii actually depends on
// ((1,1,0,0,0) resp. (0,0,1,1,1), negated).
std::pair<double, double> sojourn_variances(const RateVector& theta,
                                            const Matrix5& var_theta,
                                            bool strict_gradient = false);

struct OccupancyVector {
  Eigen::Vector4d pi = Eigen::Vector4d::Zero();
  double t = 0.0;
};

// pi(t) = pi(0) P(t).
OccupancyVector occupancy_at(const OccupancyVector& pi0,
                             const RateVector& theta, double t);

struct CohortVector {
  Eigen::Vector4d u = Eigen::Vector4d::Zero();
  double t = 0.0;
};

// Expected patient counts u(t) = u(0) P(t); totals are conserved.
CohortVector expected_counts(const CohortVector& u0, const RateVector& theta,
                             double t);

// t -> infinity occupancy, evaluated analytically from the closed form
// (all mass ends on the absorbing states). Components 1-2 are zero.
Eigen::Vector4d limiting_distribution(const OccupancyVector& pi0,
                                      const RateVector& theta);

// Moore-Penrose pseudoinverse via SVD.
Eigen::Matrix4d svd_pseudoinverse(const Eigen::Matrix4d& m);

// Delta-method covariance of the limiting distribution:
//   C = cvec * (1,1,1,1,1)  (4x5),  A = -[Q']^+ C,  var = A var(theta) A'.
// cvec is caller-supplied; passing the computed limiting distribution
// gives the self-consistent result.
Eigen::Matrix4d limiting_covariance(const Eigen::Vector4d& pi_limit_cvec,
                                    const RateVector& theta,
                                    const Matrix5& var_theta);

struct LimitingDistributionResult {
  Eigen::Vector4d pi_inf = Eigen::Vector4d::Zero();
  Eigen::Matrix4d covariance = Eigen::Matrix4d::Zero();
};

}  // namespace ctmc4

#endif
