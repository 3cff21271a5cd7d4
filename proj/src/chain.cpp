#include "ctmc4/chain.hpp"

#include <cmath>
#include <string>

namespace ctmc4 {

GeneratorMatrix build_generator(const RateVector& theta) {
  theta.require_nonnegative();
  Eigen::Matrix4d q = Eigen::Matrix4d::Zero();
  q(0, 0) = -theta.gamma1();
  q(0, 1) = theta.lambda12;
  q(0, 3) = theta.lambda14;
  q(1, 0) = theta.mu21;
  q(1, 1) = -theta.gamma2();
  q(1, 2) = theta.lambda23;
  q(1, 3) = theta.lambda24;
  return {q};
}

CharacteristicRoots characteristic_roots(const RateVector& theta) {
  theta.require_nonnegative();
  const double g1 = theta.gamma1();
  const double g2 = theta.gamma2();
  const double d =
      (g1 + g2) * (g1 + g2) - 4.0 * g1 * g2 + 4.0 * theta.lambda12 * theta.mu21;
  if (d <= kDegeneracyTol)
    throw degeneracy_error(
        "characteristic roots coincide (discriminant " + std::to_string(d) +
        "); use matrix_exponential_series for this rate vector");
  const double sd = std::sqrt(d);
  return {(-(g1 + g2) - sd) / 2.0, (-(g1 + g2) + sd) / 2.0, d};
}

ClosedFormCoefficients closed_form_coefficients(const RateVector& theta) {
  const auto roots = characteristic_roots(theta);
  const double w1 = roots.w1, w2 = roots.w2;
  if (theta.mu21 <= 0.0)
    throw degeneracy_error(
        "mu21 = 0: closed-form coefficients undefined; "
        "use matrix_exponential_series");
  if (w1 == 0.0 || w2 == 0.0)
    throw degeneracy_error(
        "zero characteristic root; use matrix_exponential_series");

  const double g1 = theta.gamma1();
  ClosedFormCoefficients c{};
  c.w1 = w1;
  c.w2 = w2;
  c.a1 = (w2 + g1) / (w2 - w1);
  c.a2 = (w1 + g1) / (w1 - w2);
  c.a3 = c.a1 * (w1 + g1) / theta.mu21;
  c.a4 = c.a2 * (w2 + g1) / theta.mu21;
  c.a5 = theta.lambda23 * c.a3 / w1;
  c.a6 = theta.lambda23 * c.a4 / w2;
  c.g1 = theta.lambda14 * c.a1 + theta.lambda24 * c.a3;
  c.g2 = theta.lambda14 * c.a2 + theta.lambda24 * c.a4;
  c.a7 = c.g1 / w1;
  c.a8 = c.g2 / w2;
  c.a9 = theta.mu21 / (w1 - w2);
  c.a10 = (w1 + g1) / (w1 - w2);
  c.a11 = (w2 + g1) / (w2 - w1);
  c.a12 = theta.lambda23 * c.a10 / w1;
  c.a13 = theta.lambda23 * c.a11 / w2;
  c.g3 = theta.lambda14 * c.a9 + theta.lambda24 * c.a10;
  c.g4 = theta.lambda24 * c.a11 - theta.lambda14 * c.a9;
  c.a14 = c.g3 / w1;
  c.a15 = c.g4 / w2;
  return c;
}

namespace {

// Rounding policy for assembled probabilities: values in [-1e-9, 0) and
// (1, 1+1e-9] are cancellation noise and get clamped, then the row is
// renormalized; anything further out indicates a bug upstream.
void finalize_rows(Eigen::Matrix4d& p) {
  constexpr double slack = 1e-9;
  for (int i = 0; i < 2; ++i) {
    bool clamped = false;
    for (int j = 0; j < 4; ++j) {
      double& x = p(i, j);
      if (x < 0.0) {
        if (x < -slack)
          throw error("transition probability out of range: P(" +
                      std::to_string(i + 1) + "," + std::to_string(j + 1) +
                      ") = " + std::to_string(x));
        x = 0.0;
        clamped = true;
      } else if (x > 1.0) {
        if (x > 1.0 + slack)
          throw error("transition probability out of range: P(" +
                      std::to_string(i + 1) + "," + std::to_string(j + 1) +
                      ") = " + std::to_string(x));
        x = 1.0;
        clamped = true;
      }
    }
    if (clamped) {
      const double s = p.row(i).sum();
      if (s > 0.0) p.row(i) /= s;
    }
  }
}

}  // namespace

TransitionMatrix transition_matrix_closed_form(const RateVector& theta,
                                               double t) {
  if (t < 0.0)
    throw input_error("negative time t = " + std::to_string(t));
  const auto c = closed_form_coefficients(theta);
  const double e1 = std::exp(c.w1 * t);
  const double e2 = std::exp(c.w2 * t);

  Eigen::Matrix4d p = Eigen::Matrix4d::Identity();
  p(0, 0) = c.a1 * e1 + c.a2 * e2;
  p(0, 1) = c.a3 * e1 + c.a4 * e2;
  p(0, 2) = c.a5 * (e1 - 1.0) + c.a6 * (e2 - 1.0);
  p(0, 3) = c.a7 * (e1 - 1.0) + c.a8 * (e2 - 1.0);
  p(1, 0) = c.a9 * (e1 - e2);
  p(1, 1) = c.a10 * e1 + c.a11 * e2;
  p(1, 2) = c.a12 * (e1 - 1.0) + c.a13 * (e2 - 1.0);
  p(1, 3) = c.a14 * (e1 - 1.0) + c.a15 * (e2 - 1.0);
  finalize_rows(p);
  return {p, t};
}

TransitionMatrix transition_matrix(const RateVector& theta, double t) {
  try {
    return transition_matrix_closed_form(theta, t);
  } catch (const degeneracy_error&) {
    return matrix_exponential_series(build_generator(theta), t);
  }
}

TransitionMatrix matrix_exponential_series(const GeneratorMatrix& q,
                                           double t) {
  if (t < 0.0)
    throw input_error("negative time t = " + std::to_string(t));

  // Scale so the 1-norm of Qt/2^s is at most 0.5, run the Taylor series to
  // order 18, then square s times. Rows of absorbing states stay exactly
  // (0,0,1,0) and (0,0,0,1) throughout.
  Eigen::Matrix4d b = q.q * t;
  const double norm1 = b.cwiseAbs().colwise().sum().maxCoeff();
  int s = 0;
  if (norm1 > 0.5) s = static_cast<int>(std::ceil(std::log2(norm1 / 0.5)));
  b /= std::pow(2.0, s);

  Eigen::Matrix4d sum = Eigen::Matrix4d::Identity();
  Eigen::Matrix4d term = Eigen::Matrix4d::Identity();
  for (int j = 1; j <= 18; ++j) {
    term = (term * b / static_cast<double>(j)).eval();
    sum += term;
  }
  for (int j = 0; j < s; ++j) sum = (sum * sum).eval();

  finalize_rows(sum);
  return {sum, t};
}

}  // namespace ctmc4
