#ifndef CTMC4_ABSORPTION_HPP
#define CTMC4_ABSORPTION_HPP

#include <Eigen/Dense>

#include <utility>

#include "ctmc4/rates.hpp"

namespace ctmc4 {

// Block partition of the generator: Q = [[B, A], [0, 0]] with B the 2x2
// transient block and A the transient-to-absorbing block (columns are
// states 3, 4). Z = B^-1 A has rows summing to -1; -Z holds the absorption
// probabilities; E(tau) = B^-1 Z holds the expected absorption times.
struct AbsorptionSummary {
  Eigen::Matrix2d b = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d a_block = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d z = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d etau = Eigen::Matrix2d::Zero();

  Eigen::Matrix2d absorption_probabilities() const { return -z; }
};

std::pair<Eigen::Matrix2d, Eigen::Matrix2d> partition_generator(
    const RateVector& theta);

Eigen::Matrix2d z_matrix(const RateVector& theta);

// E(tau_ik) = B^-1 Z, rows = start state 1, 2; columns = absorbing state 3, 4.
Eigen::Matrix2d expected_absorption_times(const RateVector& theta);

// The same four expectations evaluated from their explicit rational forms
// in the intensities; an independent algebraic route for cross-checking.
Eigen::Matrix2d closed_form_etau(const RateVector& theta);

AbsorptionSummary absorption_summary(const RateVector& theta);

}  // namespace ctmc4

#endif
