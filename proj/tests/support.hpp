#ifndef CTMC4_TESTS_SUPPORT_HPP
#define CTMC4_TESTS_SUPPORT_HPP

#include <random>

#include "ctmc4/chain.hpp"
#include "ctmc4/panel.hpp"
#include "ctmc4/rates.hpp"

namespace ctmc4::testing {

// The worked NAFLD fixture: observed transition counts for interval
// lengths 1, 2 and 3 years, the pooled rate estimate, and its covariance.

inline TransitionCountTable table_dt1() {
  TransitionCountTable t;
  t.delta_t = 1;
  t.counts << 330, 163, 45, 12,
                5, 185, 45, 15,
                0,   0,  0,  0,
                0,   0,  0,  0;
  return t;
}

inline TransitionCountTable table_dt2() {
  TransitionCountTable t;
  t.delta_t = 2;
  t.counts << 70, 30, 10, 1,
               2, 20, 13, 4,
               0,  0,  0, 0,
               0,  0,  0, 0;
  return t;
}

inline TransitionCountTable table_dt3() {
  TransitionCountTable t;
  t.delta_t = 3;
  t.counts << 21, 8, 7, 3,
               1, 6, 3, 1,
               0, 0, 0, 0,
               0, 0, 0, 0;
  return t;
}

inline PanelDataset reference_panel() {
  PanelDataset ds;
  ds.tables = {table_dt1(), table_dt2(), table_dt3()};
  return ds;
}

// Pooled rate estimate of the fixture.
inline RateVector reference_theta() {
  return {.2908, .02285, .02805, .2076, .068};
}

// Rounded initial rates of the delta_t = 1 table.
inline RateVector reference_theta0() { return {.3, .022, .02, .18, .06}; }

// Published covariance of the pooled estimate (input fixture; the pooling
// algorithm itself cannot regenerate it, see pooled_covariance tests).
inline Matrix5 reference_var_theta() {
  Matrix5 v = Matrix5::Zero();
  v.topLeftCorner<3, 3>() << .061475, -.04645, -.01585,
                             -.04645, .037836, -.00613,
                             -.01585, -.00613, .123658;
  return v;
}

// Random rate vectors safe for the closed form (well-separated roots,
// mu21 bounded away from zero).
class ThetaSampler {
 public:
  explicit ThetaSampler(std::uint64_t seed) : rng_(seed) {}

  RateVector draw(double lo = 0.01, double hi = 5.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    for (;;) {
      RateVector th{u(rng_), u(rng_), u(rng_), u(rng_), u(rng_)};
      const double g1 = th.gamma1(), g2 = th.gamma2();
      const double d = (g1 + g2) * (g1 + g2) - 4.0 * g1 * g2 +
                       4.0 * th.lambda12 * th.mu21;
      if (d > 1e-4 && th.mu21 > 1e-2) return th;
    }
  }

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace ctmc4::testing

#endif
