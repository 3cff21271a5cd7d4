#ifndef CTMC4_RATES_HPP
#define CTMC4_RATES_HPP

#include <Eigen/Dense>

#include <array>
#include <string>

#include "ctmc4/errors.hpp"

namespace ctmc4 {

using Vector5 = Eigen::Matrix<double, 5, 1>;
using Matrix5 = Eigen::Matrix<double, 5, 5>;

// The five free transition intensities of the 4-state chain, per year.
// Parameter order everywhere in this library is
//   (lambda12, lambda14, mu21, lambda23, lambda24),
// i.e. progression 1->2, death 1->4, regression 2->1, death 2->3, death 2->4.
struct RateVector {
  double lambda12 = 0.0;
  double lambda14 = 0.0;
  double mu21 = 0.0;
  double lambda23 = 0.0;
  double lambda24 = 0.0;

  // Total exit rates of the two transient states.
  double gamma1() const { return lambda12 + lambda14; }
  double gamma2() const { return mu21 + lambda23 + lambda24; }

  std::array<double, 5> as_array() const {
    return {lambda12, lambda14, mu21, lambda23, lambda24};
  }
  Vector5 as_vector() const {
    Vector5 v;
    v << lambda12, lambda14, mu21, lambda23, lambda24;
    return v;
  }
  static RateVector from_vector(const Vector5& v) {
    return {v[0], v[1], v[2], v[3], v[4]};
  }

  // Component by parameter index h = 0..4.
  double component(int h) const { return as_array()[static_cast<size_t>(h)]; }

  static const char* component_name(int h) {
    static const char* names[5] = {"lambda12", "lambda14", "mu21", "lambda23",
                                   "lambda24"};
    return names[h];
  }

  // Throws input_error naming the first negative component.
  void require_nonnegative() const {
    const auto a = as_array();
    for (int h = 0; h < 5; ++h)
      if (a[static_cast<size_t>(h)] < 0.0)
        throw input_error(std::string("negative intensity ") +
                          component_name(h) + " = " +
                          std::to_string(a[static_cast<size_t>(h)]));
  }
};

}  // namespace ctmc4

#endif
