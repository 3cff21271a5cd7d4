#ifndef CTMC4_SIMULATE_HPP
#define CTMC4_SIMULATE_HPP

#include <cstdint>
#include <set>
#include <vector>

#include "ctmc4/panel.hpp"
#include "ctmc4/rates.hpp"

namespace ctmc4 {

// One exact continuous-time path: the state entered at each jump time.
// First entry is (0, start state); no jumps leave states 3 or 4.
struct Trajectory {
  std::vector<std::pair<double, int>> jumps;
  double horizon = 0.0;
  std::uint64_t stream = 0;

  int state_at(double t) const;
};

// Exact (Gillespie) simulation: exponential holding times with rate
// -q_ii, next state proportional to q_ij. Deterministic given
// (seed, subject): each subject gets an independent stream, so results do
// not depend on simulation order.
Trajectory sample_path(const RateVector& theta, int start_state,
                       double horizon, std::uint64_t seed,
                       std::uint64_t subject = 0);

struct ObservationSchedule {
  std::vector<double> times;  // strictly increasing, starting at 0

  void validate() const;
};

// Interval-censors trajectories at their schedule's visit times and counts
// (state at t_{r-1} -> state at t_r) pairs into per-delta_t tables. Pairs
// beginning in an absorbing state are dropped. schedules must either have
// one entry per trajectory or a single shared entry.
PanelDataset panelize(const std::vector<Trajectory>& trajectories,
                      const std::vector<ObservationSchedule>& schedules);

// Annual visits 0..base_years with the given per-subject visit indices
// removed. The baseline visit (index 0) cannot be skipped.
std::vector<ObservationSchedule> irregular_schedule(
    int base_years, const std::vector<std::set<int>>& skipped);

// Random skip sets whose consecutive-gap distribution is categorical over
// {1, 2, 3} with P(2) = p2, P(3) = p3, so panelized pair mass lands on
// delta_t = 1/2/3 in roughly those proportions.
std::vector<std::set<int>> sample_skip_sets(std::size_t subjects,
                                            int base_years, double p2,
                                            double p3, std::uint64_t seed);

struct CohortOptions {
  std::size_t subjects = 1000;
  int base_years = 8;
  double start_state2_fraction = 0.0;  // fraction entering in state 2
  double skip2 = 0.0;                  // P(gap = 2)
  double skip3 = 0.0;                  // P(gap = 3)
  std::uint64_t seed = 1;
};

// Simulate a cohort and panelize it in one step (the CLI entry point).
PanelDataset simulate_cohort(const RateVector& theta,
                             const CohortOptions& options);

// SplitMix64 mix of (seed, subject) used to derive per-subject streams.
std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t subject);

}  // namespace ctmc4

#endif
