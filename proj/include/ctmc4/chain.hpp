#ifndef CTMC4_CHAIN_HPP
#define CTMC4_CHAIN_HPP

#include <Eigen/Dense>

#include "ctmc4/rates.hpp"

namespace ctmc4 {

// Generator of the 4-state chain: states 1-2 transient, 3-4 absorbing,
// no direct 1->3 transition. Rows sum to zero; rows 3 and 4 are zero.
struct GeneratorMatrix {
  Eigen::Matrix4d q;
};

GeneratorMatrix build_generator(const RateVector& theta);

// Roots of w^2 + (g1+g2) w + g1 g2 - lambda12 mu21 = 0, the nonzero
// eigenvalues of the generator. w1 <= w2 < 0 when both exit rates are
// positive (w1 carries the minus-radical branch).
struct CharacteristicRoots {
  double w1;
  double w2;
  double discriminant;
};

CharacteristicRoots characteristic_roots(const RateVector& theta);

// Coefficients of the closed-form solution of the forward equations:
//   P11 = a1 e^{w1 t} + a2 e^{w2 t}          P12 = a3 e^{w1 t} + a4 e^{w2 t}
//   P13 = a5 (e^{w1 t}-1) + a6 (e^{w2 t}-1)  P14 = a7 (e^{w1 t}-1) + a8 (e^{w2 t}-1)
//   P21 = a9 (e^{w1 t} - e^{w2 t})           P22 = a10 e^{w1 t} + a11 e^{w2 t}
//   P23 = a12 (e^{w1 t}-1) + a13 (e^{w2 t}-1)
//   P24 = a14 (e^{w1 t}-1) + a15 (e^{w2 t}-1)
// Initial conditions force a1 + a2 = 1, a3 + a4 = 0, a10 + a11 = 1.
struct ClosedFormCoefficients {
  double w1, w2;
  double a1, a2, a3, a4, a5, a6, a7, a8;
  double a9, a10, a11, a12, a13, a14, a15;
  double g1, g2, g3, g4;
};

ClosedFormCoefficients closed_form_coefficients(const RateVector& theta);

// Row-stochastic transition probability matrix over an interval of t years.
struct TransitionMatrix {
  Eigen::Matrix4d p;
  double t = 0.0;
};

TransitionMatrix transition_matrix_closed_form(const RateVector& theta,
                                               double t);

// Independent oracle: scaling-and-squaring truncated Taylor exponential of
// Q t. Degenerate rate vectors (repeated roots, mu21 = 0) that the closed
// form rejects are handled fine here.
TransitionMatrix matrix_exponential_series(const GeneratorMatrix& q, double t);

// Closed form when defined, series oracle on degenerate rate vectors.
// Downstream consumers (occupancy, cohort counts, expected tables) use
// this; the closed-form entry point itself never switches silently.
TransitionMatrix transition_matrix(const RateVector& theta, double t);

// Tolerance below which the root discriminant counts as a repeated root.
inline constexpr double kDegeneracyTol = 1e-12;

}  // namespace ctmc4

#endif
