#ifndef CTMC4_ERRORS_HPP
#define CTMC4_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace ctmc4 {

// Error taxonomy, aligned with the CLI exit-code contract:
//   parse_error -> 1, non_convergence_error -> 2,
//   degeneracy_error / input_error -> 3, config_error -> 4.

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input file (count tables or observation records).
struct parse_error : error {
  using error::error;
};

// Structurally degenerate model: repeated characteristic roots, mu21 = 0,
// zero exit rate, singular transient block. Callers that only need P(t)
// can fall back to matrix_exponential_series.
struct degeneracy_error : error {
  using error::error;
};

// Degenerate estimation input: zero row totals, zero observable cells
// (when smoothing is disabled), missing delta_t = 1 table, empty dataset.
struct input_error : error {
  using error::error;
};

// Quasi-Newton iteration exhausted max_iter without meeting the tolerance
// or stalling. Carries the per-iteration step norms for diagnosis.
struct non_convergence_error : error {
  non_convergence_error(const std::string& what, std::vector<double> step_norms)
      : error(what), trace(std::move(step_norms)) {}
  std::vector<double> trace;
};

// Invalid analysis configuration (CLI or config file).
struct config_error : error {
  using error::error;
};

}  // namespace ctmc4

#endif
