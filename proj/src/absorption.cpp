#include "ctmc4/absorption.hpp"

#include <string>

namespace ctmc4 {

std::pair<Eigen::Matrix2d, Eigen::Matrix2d> partition_generator(
    const RateVector& theta) {
  theta.require_nonnegative();
  Eigen::Matrix2d b, a;
  b << -theta.gamma1(), theta.lambda12, theta.mu21, -theta.gamma2();
  a << 0.0, theta.lambda14, theta.lambda23, theta.lambda24;
  return {b, a};
}

namespace {

Eigen::Matrix2d transient_inverse(const RateVector& theta) {
  const auto [b, a] = partition_generator(theta);
  const double det = theta.gamma1() * theta.gamma2() -
                     theta.mu21 * theta.lambda12;  // = det(B)
  if (det <= 0.0)
    throw degeneracy_error("transient block is singular (det " +
                           std::to_string(det) + ")");
  Eigen::Matrix2d inv;
  inv << b(1, 1), -b(0, 1), -b(1, 0), b(0, 0);
  return inv / det;
}

}  // namespace

Eigen::Matrix2d z_matrix(const RateVector& theta) {
  const auto [b, a] = partition_generator(theta);
  return transient_inverse(theta) * a;
}

Eigen::Matrix2d expected_absorption_times(const RateVector& theta) {
  return transient_inverse(theta) * z_matrix(theta);
}

Eigen::Matrix2d closed_form_etau(const RateVector& theta) {
  theta.require_nonnegative();
  const double l12 = theta.lambda12, l14 = theta.lambda14, m21 = theta.mu21;
  const double l23 = theta.lambda23, l24 = theta.lambda24;
  const double g1 = theta.gamma1(), g2 = theta.gamma2();
  const double det = g1 * g2 - m21 * l12;
  if (det <= 0.0)
    throw degeneracy_error("transient block is singular (det " +
                           std::to_string(det) + ")");
  if (g1 <= 0.0) throw degeneracy_error("gamma1 = 0");

  Eigen::Matrix2d e;
  e(0, 0) = l12 * l23 * (g1 + g2) / (det * det);
  e(0, 1) = l12 * (m21 * l14 + l24 * g1) * (g1 + g2) / (g1 * det * det) +
            l14 * g2 / (g1 * det);
  e(1, 0) = l23 * (m21 * l12 + g1 * g1) / (det * det);
  e(1, 1) = (m21 * l14 + l24 * g1) * (m21 * l12 + g1 * g1) /
                (g1 * det * det) +
            m21 * l14 / (g1 * det);
  return e;
}

AbsorptionSummary absorption_summary(const RateVector& theta) {
  AbsorptionSummary s;
  std::tie(s.b, s.a_block) = partition_generator(theta);
  s.z = z_matrix(theta);
  s.etau = transient_inverse(theta) * s.z;
  return s;
}

}  // namespace ctmc4
