#include "ctmc4/summary.hpp"

#include <cmath>
#include <string>

namespace ctmc4 {

std::pair<double, double> sojourn_means(const RateVector& theta) {
  theta.require_nonnegative();
  const double g1 = theta.gamma1(), g2 = theta.gamma2();
  if (g1 <= 0.0 || g2 <= 0.0)
    throw degeneracy_error("zero exit rate: sojourn time is infinite");
  return {1.0 / g1, 1.0 / g2};
}

std::pair<double, double> sojourn_variances(const RateVector& theta,
                                            const Matrix5& var_theta,
                                            bool strict_gradient) {
  const auto [s1, s2] = sojourn_means(theta);
  Vector5 d1 = -Vector5::Ones();
  Vector5 d2 = -Vector5::Ones();
  if (strict_gradient) {
    // q11 = -(lambda12 + lambda14), q22 = -(mu21 + lambda23 + lambda24).
    d1 << -1, -1, 0, 0, 0;
    d2 << 0, 0, -1, -1, -1;
  }
  const double q1 = d1.dot(var_theta * d1);
  const double q2 = d2.dot(var_theta * d2);
  return {s1 * s1 * s1 * s1 * q1, s2 * s2 * s2 * s2 * q2};
}

OccupancyVector occupancy_at(const OccupancyVector& pi0,
                             const RateVector& theta, double t) {
  const TransitionMatrix p = transition_matrix(theta, t);
  return {(pi0.pi.transpose() * p.p).transpose(), t};
}

CohortVector expected_counts(const CohortVector& u0, const RateVector& theta,
                             double t) {
  for (int i = 0; i < 4; ++i)
    if (u0.u[i] < 0.0) throw input_error("negative cohort count");
  if (u0.u[2] != 0.0 || u0.u[3] != 0.0)
    throw input_error("cohort must start with empty absorbing states");
  const TransitionMatrix p = transition_matrix(theta, t);
  return {(u0.u.transpose() * p.p).transpose(), t};
}

Eigen::Vector4d limiting_distribution(const OccupancyVector& pi0,
                                      const RateVector& theta) {
  const double det_b =
      theta.gamma1() * theta.gamma2() - theta.mu21 * theta.lambda12;
  if (det_b <= 0.0)
    throw degeneracy_error("singular transient block (gamma1 gamma2 <= "
                           "mu21 lambda12); no limiting distribution");
  const auto c = closed_form_coefficients(theta);
  // e^{w t} -> 0, so the absorbed-mass entries tend to minus the constant
  // parts of the closed form.
  const double p13 = -(c.a5 + c.a6);
  const double p14 = -(c.a7 + c.a8);
  const double p23 = -(c.a12 + c.a13);
  const double p24 = -(c.a14 + c.a15);
  Eigen::Vector4d out;
  out << 0.0, 0.0,
      pi0.pi[0] * p13 + pi0.pi[1] * p23 + pi0.pi[2],
      pi0.pi[0] * p14 + pi0.pi[1] * p24 + pi0.pi[3];
  return out;
}

Eigen::Matrix4d svd_pseudoinverse(const Eigen::Matrix4d& m) {
  Eigen::JacobiSVD<Eigen::Matrix4d> svd(m, Eigen::ComputeFullU |
                                               Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  Eigen::Vector4d inv = Eigen::Vector4d::Zero();
  const double cutoff = 4.0 * Eigen::NumTraits<double>::epsilon() * sv[0];
  for (int k = 0; k < 4; ++k)
    if (sv[k] > cutoff) inv[k] = 1.0 / sv[k];
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Eigen::Matrix4d limiting_covariance(const Eigen::Vector4d& pi_limit_cvec,
                                    const RateVector& theta,
                                    const Matrix5& var_theta) {
  const GeneratorMatrix q = build_generator(theta);
  const Eigen::Matrix4d qt_pinv = svd_pseudoinverse(q.q.transpose());
  // C = cvec 1' collapses all five parameter derivatives of Q' into one
  // all-ones row; A = -[Q']^+ C then has constant rows.
  const Eigen::Matrix<double, 4, 5> c =
      pi_limit_cvec * Eigen::Matrix<double, 1, 5>::Ones();
  const Eigen::Matrix<double, 4, 5> a = -qt_pinv * c;
  return a * var_theta * a.transpose();
}

}  // namespace ctmc4
