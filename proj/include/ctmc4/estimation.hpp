#ifndef CTMC4_ESTIMATION_HPP
#define CTMC4_ESTIMATION_HPP

#include <map>
#include <vector>

#include "ctmc4/chain.hpp"
#include "ctmc4/panel.hpp"
#include "ctmc4/rates.hpp"

namespace ctmc4 {

// Derivative of P_ij with respect to each parameter, reduced to the
// eigenvalue form: v_h = t e^{w1 t} dw1/dtheta_h + t e^{w2 t} dw2/dtheta_h.
// Components 4 and 5 are always equal (their derivative formulas coincide).
struct ScoreVector {
  Vector5 v = Vector5::Zero();
  bool scaled = false;
};

// Crude transition ratios n_ij / n_i+ of a table (the quasi-Newton start).
RateVector crude_rates(const TransitionCountTable& table);

// Initialization rule: the crude ratios of the one-year table.
RateVector initial_rates(const TransitionCountTable& table_dt1);

// Unscaled score at interval length delta_t.
ScoreVector score_components(const RateVector& theta, double delta_t);

// Score scaled by (4 n1+ + 4 n2+), one factor of n_i+ per observable cell.
ScoreVector scaled_score(const RateVector& theta,
                         const TransitionCountTable& table);

// What to do when one of the 8 observable cells is zero (the Hessian scale
// factor divides by each cell count).
enum class ZeroCellPolicy {
  kError,       // throw input_error naming the cell
  kHaldane,     // add 1/2 to the zero cell for the factor, flag the table
};

// Outer product of the scaled score with itself, times the
// sum-over-cells n_i+^2 / n_ij scale factor. Rank 1 by construction.
struct HessianApprox {
  Matrix5 m = Matrix5::Zero();
  double scale_factor = 0.0;
  bool smoothed = false;  // a zero cell was Haldane-corrected
};

HessianApprox hessian_approx(const ScoreVector& scaled,
                             const TransitionCountTable& table,
                             ZeroCellPolicy policy = ZeroCellPolicy::kError);

// [[O^-1, 0], [0, 0]] with O the upper-left 3x3 block. O is inverted by
// SVD with singular values below 1e-10 * sigma_max dropped, which reduces
// to the plain inverse whenever O is numerically full-rank.
Matrix5 block_pseudoinverse(const HessianApprox& m);

struct IterationStep {
  int iteration = 0;
  Vector5 theta = Vector5::Zero();
  double step_norm = 0.0;
  bool clamped = false;  // a negative component was clamped to zero
};

struct IntervalFit {
  RateVector theta;
  int iterations = 0;
  double delta_norm = 0.0;
  bool stalled = false;  // stopped on step stagnation rather than tolerance
  bool smoothed = false;
  std::vector<IterationStep> trace;
};

// Quasi-Newton iteration theta_{k+1} = theta_k + M(theta_k)^+ S(theta_k).
// Stops when the step infinity-norm drops below tol, or when two
// consecutive steps agree within 0.1% (the scheme's step does not vanish
// at its fixed point, it settles into a constant microscopic drift).
// Exhausting max_iter without either throws non_convergence_error.
IntervalFit estimate_interval(const TransitionCountTable& table,
                              const RateVector& theta0, double tol = 1e-6,
                              int max_iter = 50,
                              ZeroCellPolicy policy = ZeroCellPolicy::kError);

// Transition-count-share weighted average of per-interval estimates.
RateVector pool_estimates(const std::map<int, RateVector>& per_interval,
                          const PanelDataset& dataset);

// Weighted sum of the per-interval inverted scaled Hessians, same weights.
// Rows/columns 4-5 are identically zero (block-pseudoinverse structure).
Matrix5 pooled_covariance(const std::map<int, Matrix5>& per_interval_inverses,
                          const PanelDataset& dataset);

enum class InitRounding {
  kTwoSigFig,  // round the delta_t = 1 initial vector to 2 significant
                    // figures; the estimator is a fixed point of its start,
                    // so this choice pins every downstream statistic
  kExact,
};

struct EstimationOptions {
  double tol = 1e-6;
  int max_iter = 50;
  InitRounding rounding = InitRounding::kTwoSigFig;
  ZeroCellPolicy zero_cells = ZeroCellPolicy::kHaldane;
};

struct EstimationResult {
  std::map<int, IntervalFit> per_interval;
  RateVector pooled_theta;
  Matrix5 pooled_covariance = Matrix5::Zero();
  std::map<int, double> weights;
};

// Full pipeline: per-interval initialization (delta_t = 1 table required),
// quasi-Newton per table, pooling of estimates and covariances.
EstimationResult estimate_dataset(const PanelDataset& dataset,
                                  const EstimationOptions& options = {});

// Round-half-away-from-zero at the given number of significant figures.
double round_sig_figs(double x, int figures);

}  // namespace ctmc4

#endif
