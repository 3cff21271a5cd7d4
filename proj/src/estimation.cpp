#include "ctmc4/estimation.hpp"

#include <cmath>
#include <string>

namespace ctmc4 {

RateVector crude_rates(const TransitionCountTable& table) {
  table.validate();
  const double n1 = static_cast<double>(table.row_total(0));
  const double n2 = static_cast<double>(table.row_total(1));
  if (n1 <= 0 || n2 <= 0)
    throw input_error("delta_t=" + std::to_string(table.delta_t) +
                      " table has an empty transient row; cannot form "
                      "initial rates");
  return {static_cast<double>(table.counts(0, 1)) / n1,
          static_cast<double>(table.counts(0, 3)) / n1,
          static_cast<double>(table.counts(1, 0)) / n2,
          static_cast<double>(table.counts(1, 2)) / n2,
          static_cast<double>(table.counts(1, 3)) / n2};
}

RateVector initial_rates(const TransitionCountTable& table_dt1) {
  if (table_dt1.delta_t != 1)
    throw input_error("initial rates are defined from the delta_t = 1 table");
  return crude_rates(table_dt1);
}

ScoreVector score_components(const RateVector& theta, double delta_t) {
  const auto roots = characteristic_roots(theta);
  const double rho3 = roots.w1, rho4 = roots.w2;
  const double inv_sqrt_d = 1.0 / std::sqrt(roots.discriminant);

  // Signed sums s_h with d rho3/d theta_h = -1/2 - s_h / (2 sqrt D) and
  // d rho4/d theta_h = -1/2 + s_h / (2 sqrt D). s4 = s5, hence v4 = v5.
  const double l12 = theta.lambda12, l14 = theta.lambda14, m21 = theta.mu21;
  const double l23 = theta.lambda23, l24 = theta.lambda24;
  Vector5 s;
  s << l12 + l14 + m21 - l23 - l24,
       l12 + l14 - m21 - l23 - l24,
       m21 + l12 + l23 + l24 - l14,
       l23 + m21 + l24 - l12 - l14,
       l24 + m21 + l23 - l12 - l14;

  const double t = delta_t;
  const double e3 = t * std::exp(rho3 * t);
  const double e4 = t * std::exp(rho4 * t);
  ScoreVector out;
  for (int h = 0; h < 5; ++h) {
    const double d3 = -0.5 - 0.5 * inv_sqrt_d * s[h];
    const double d4 = -0.5 + 0.5 * inv_sqrt_d * s[h];
    out.v[h] = e3 * d3 + e4 * d4;
  }
  return out;
}

ScoreVector scaled_score(const RateVector& theta,
                         const TransitionCountTable& table) {
  const double n1 = static_cast<double>(table.row_total(0));
  const double n2 = static_cast<double>(table.row_total(1));
  ScoreVector out;
  if (n1 == 0.0 && n2 == 0.0) {
    out.scaled = true;
    return out;
  }
  out = score_components(theta, static_cast<double>(table.delta_t));
  out.v *= 4.0 * n1 + 4.0 * n2;
  out.scaled = true;
  return out;
}

HessianApprox hessian_approx(const ScoreVector& scaled,
                             const TransitionCountTable& table,
                             ZeroCellPolicy policy) {
  if (!scaled.scaled)
    throw input_error("hessian_approx expects the scaled score vector");
  HessianApprox h;
  for (int i = 0; i < 2; ++i) {
    const double ni = static_cast<double>(table.row_total(i));
    for (int j = 0; j < 4; ++j) {
      double nij = static_cast<double>(table.counts(i, j));
      if (nij == 0.0) {
        if (policy == ZeroCellPolicy::kError)
          throw input_error("observable cell (" + std::to_string(i + 1) + "," +
                            std::to_string(j + 1) + ") of the delta_t=" +
                            std::to_string(table.delta_t) +
                            " table is zero; the Hessian scale factor divides"
                            " by it (enable the continuity correction)");
        nij = 0.5;
        h.smoothed = true;
      }
      h.scale_factor += ni * ni / nij;
    }
  }
  h.m = h.scale_factor * (scaled.v * scaled.v.transpose());
  return h;
}

Matrix5 block_pseudoinverse(const HessianApprox& m) {
  const Eigen::Matrix3d o = m.m.topLeftCorner<3, 3>();
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(o,
                                        Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv[0] <= 0.0)
    throw input_error("upper 3x3 block of the Hessian approximation is zero");
  const double cutoff = 1e-10 * sv[0];
  Eigen::Vector3d inv = Eigen::Vector3d::Zero();
  for (int k = 0; k < 3; ++k)
    if (sv[k] > cutoff) inv[k] = 1.0 / sv[k];
  const Eigen::Matrix3d oinv =
      svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
  Matrix5 out = Matrix5::Zero();
  out.topLeftCorner<3, 3>() = oinv;
  return out;
}

IntervalFit estimate_interval(const TransitionCountTable& table,
                              const RateVector& theta0, double tol,
                              int max_iter, ZeroCellPolicy policy) {
  if (tol <= 0.0) throw config_error("tolerance must be positive");
  if (max_iter < 1) throw config_error("max_iter must be at least 1");
  theta0.require_nonnegative();

  IntervalFit fit;
  Vector5 theta = theta0.as_vector();
  double prev_norm = -1.0;
  Vector5 prev_step = Vector5::Zero();

  for (int k = 1; k <= max_iter; ++k) {
    const RateVector th = RateVector::from_vector(theta);
    const ScoreVector s = scaled_score(th, table);
    const HessianApprox h = hessian_approx(s, table, policy);
    fit.smoothed = fit.smoothed || h.smoothed;
    const Vector5 step = block_pseudoinverse(h) * s.v;

    Vector5 next = theta + step;
    IterationStep rec;
    rec.iteration = k;
    for (int i = 0; i < 5; ++i) {
      if (next[i] < 0.0) {
        next[i] = 0.0;
        rec.clamped = true;
      }
    }
    rec.step_norm = (next - theta).cwiseAbs().maxCoeff();
    rec.theta = next;
    fit.trace.push_back(rec);
    theta = next;
    fit.iterations = k;
    fit.delta_norm = rec.step_norm;

    if (rec.step_norm < tol) break;
    // Stagnation: the update has settled into a constant drift (the score
    // never vanishes at the scheme's fixed point, so the step cannot
    // shrink below its floor).
    if (prev_norm >= 0.0 &&
        (step - prev_step).cwiseAbs().maxCoeff() <= 1e-3 * rec.step_norm) {
      fit.stalled = true;
      break;
    }
    prev_norm = rec.step_norm;
    prev_step = step;
    if (k == max_iter) {
      std::vector<double> norms;
      for (const auto& r : fit.trace) norms.push_back(r.step_norm);
      throw non_convergence_error(
          "delta_t=" + std::to_string(table.delta_t) + " estimation did not "
          "converge in " + std::to_string(max_iter) + " iterations (last step " +
          std::to_string(rec.step_norm) + ")", std::move(norms));
    }
  }
  fit.theta = RateVector::from_vector(theta);
  return fit;
}

namespace {

std::map<int, double> transition_weights(const PanelDataset& dataset) {
  const double grand = static_cast<double>(dataset.total_transitions());
  if (grand <= 0.0) throw input_error("dataset contains no transitions");
  std::map<int, double> w;
  for (const auto& t : dataset.tables)
    w[t.delta_t] = static_cast<double>(t.total()) / grand;
  return w;
}

}  // namespace

RateVector pool_estimates(const std::map<int, RateVector>& per_interval,
                          const PanelDataset& dataset) {
  if (per_interval.empty()) throw input_error("no per-interval estimates to pool");
  const auto w = transition_weights(dataset);
  Vector5 pooled = Vector5::Zero();
  for (const auto& [dt, theta] : per_interval) {
    const auto it = w.find(dt);
    if (it == w.end())
      throw input_error("no table for delta_t=" + std::to_string(dt));
    pooled += it->second * theta.as_vector();
  }
  return RateVector::from_vector(pooled);
}

Matrix5 pooled_covariance(const std::map<int, Matrix5>& per_interval_inverses,
                          const PanelDataset& dataset) {
  if (per_interval_inverses.empty())
    throw input_error("no per-interval inverses to pool");
  const auto w = transition_weights(dataset);
  Matrix5 cov = Matrix5::Zero();
  for (const auto& [dt, inv] : per_interval_inverses) {
    const auto it = w.find(dt);
    if (it == w.end())
      throw input_error("no table for delta_t=" + std::to_string(dt));
    cov += it->second * inv;
  }
  return cov;
}

double round_sig_figs(double x, int figures) {
  if (x == 0.0 || !std::isfinite(x)) return x;
  const double mag = std::floor(std::log10(std::abs(x)));
  const double scale = std::pow(10.0, figures - 1 - mag);
  return std::round(x * scale) / scale;
}

EstimationResult estimate_dataset(const PanelDataset& dataset,
                                  const EstimationOptions& options) {
  dataset.validate();
  if (dataset.tables.empty()) throw input_error("empty dataset");
  if (!dataset.find(1))
    throw input_error("dataset has no delta_t = 1 table (required for the "
                      "initialization rule)");

  EstimationResult result;
  std::map<int, RateVector> estimates;
  std::map<int, Matrix5> inverses;

  for (const auto& table : dataset.tables) {
    RateVector theta0 = crude_rates(table);
    if (table.delta_t == 1 && options.rounding == InitRounding::kTwoSigFig) {
      Vector5 v = theta0.as_vector();
      for (int i = 0; i < 5; ++i) v[i] = round_sig_figs(v[i], 2);
      theta0 = RateVector::from_vector(v);
    }
    IntervalFit fit = estimate_interval(table, theta0, options.tol,
                                        options.max_iter, options.zero_cells);
    estimates[table.delta_t] = fit.theta;
    const ScoreVector s = scaled_score(fit.theta, table);
    inverses[table.delta_t] =
        block_pseudoinverse(hessian_approx(s, table, options.zero_cells));
    result.per_interval[table.delta_t] = std::move(fit);
  }

  result.pooled_theta = pool_estimates(estimates, dataset);
  result.pooled_covariance = pooled_covariance(inverses, dataset);
  result.weights = transition_weights(dataset);
  return result;
}

}  // namespace ctmc4
