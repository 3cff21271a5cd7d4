#include "ctmc4/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "ctmc4/chain.hpp"

namespace ctmc4 {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Uniform in [0, 1) from the top 53 bits; explicit so draws are identical
// across standard libraries.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double exponential(std::mt19937_64& rng, double rate) {
  return -std::log1p(-uniform01(rng)) / rate;
}

}  // namespace

std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t subject) {
  std::uint64_t s = seed;
  (void)splitmix64(s);
  s ^= 0x2545f4914f6cdd1dULL * (subject + 1);
  return splitmix64(s);
}

int Trajectory::state_at(double t) const {
  int state = jumps.empty() ? 1 : jumps.front().second;
  for (const auto& [time, s] : jumps) {
    if (time > t) break;
    state = s;
  }
  return state;
}

Trajectory sample_path(const RateVector& theta, int start_state,
                       double horizon, std::uint64_t seed,
                       std::uint64_t subject) {
  theta.require_nonnegative();
  if (start_state < 1 || start_state > 4)
    throw input_error("start state must be 1..4");
  if (horizon <= 0.0) throw input_error("horizon must be positive");

  const GeneratorMatrix gen = build_generator(theta);
  Trajectory traj;
  traj.horizon = horizon;
  traj.stream = derive_stream(seed, subject);
  std::mt19937_64 rng(traj.stream);

  double t = 0.0;
  int state = start_state;
  traj.jumps.emplace_back(0.0, state);
  while (state == 1 || state == 2) {
    const double exit_rate = -gen.q(state - 1, state - 1);
    if (exit_rate <= 0.0) break;  // no outgoing flow: stays put
    t += exponential(rng, exit_rate);
    if (t >= horizon) break;
    // Embedded jump: next state with probability q_ij / exit rate.
    const double u = uniform01(rng) * exit_rate;
    double acc = 0.0;
    int next = state;
    for (int j = 0; j < 4; ++j) {
      if (j == state - 1) continue;
      acc += gen.q(state - 1, j);
      if (u < acc) {
        next = j + 1;
        break;
      }
    }
    state = next;
    traj.jumps.emplace_back(t, state);
  }
  return traj;
}

void ObservationSchedule::validate() const {
  if (times.empty() || times.front() != 0.0)
    throw input_error("observation schedule must start at 0");
  for (size_t k = 1; k < times.size(); ++k)
    if (times[k] <= times[k - 1])
      throw input_error("observation times must be strictly increasing");
}

PanelDataset panelize(const std::vector<Trajectory>& trajectories,
                      const std::vector<ObservationSchedule>& schedules) {
  if (schedules.size() != trajectories.size() && schedules.size() != 1)
    throw input_error("need one schedule per trajectory or a single shared one");
  for (const auto& s : schedules) s.validate();

  PanelDataset ds;
  for (size_t n = 0; n < trajectories.size(); ++n) {
    const auto& traj = trajectories[n];
    const auto& sched = schedules[schedules.size() == 1 ? 0 : n];
    for (size_t k = 1; k < sched.times.size(); ++k) {
      const double t0 = sched.times[k - 1], t1 = sched.times[k];
      if (t1 > traj.horizon + 1e-9)
        throw input_error("schedule extends past the trajectory horizon");
      const int s0 = traj.state_at(t0);
      if (s0 == 3 || s0 == 4) break;  // absorbed subjects contribute no pairs
      const int s1 = traj.state_at(t1);
      const double gap = t1 - t0;
      const int dt = static_cast<int>(std::llround(gap));
      if (dt < 1 || std::abs(gap - dt) > 1e-9)
        throw input_error("observation gap " + std::to_string(gap) +
                          " is not a whole number of years >= 1");
      TransitionCountTable inc;
      inc.delta_t = dt;
      inc.counts(s0 - 1, s1 - 1) = 1;
      ds.add(inc);
    }
  }
  ds.validate();
  return ds;
}

std::vector<ObservationSchedule> irregular_schedule(
    int base_years, const std::vector<std::set<int>>& skipped) {
  if (base_years < 1) throw input_error("schedule needs at least one year");
  std::vector<ObservationSchedule> out;
  out.reserve(skipped.size());
  for (const auto& skips : skipped) {
    if (skips.count(0))
      throw input_error("the baseline observation cannot be skipped");
    ObservationSchedule s;
    for (int v = 0; v <= base_years; ++v)
      if (!skips.count(v)) s.times.push_back(static_cast<double>(v));
    s.validate();
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<std::set<int>> sample_skip_sets(std::size_t subjects,
                                            int base_years, double p2,
                                            double p3, std::uint64_t seed) {
  if (p2 < 0.0 || p3 < 0.0 || p2 + p3 > 1.0)
    throw config_error("gap probabilities must be nonnegative with p2+p3 <= 1");
  std::vector<std::set<int>> out(subjects);
  for (std::size_t n = 0; n < subjects; ++n) {
    std::mt19937_64 rng(derive_stream(seed ^ 0x5c5c5c5c5c5c5c5cULL, n));
    int visit = 0;
    while (visit < base_years) {
      const double u = uniform01(rng);
      int gap = 1;
      if (u < p3)
        gap = 3;
      else if (u < p3 + p2)
        gap = 2;
      for (int skip = visit + 1; skip < visit + gap && skip <= base_years; ++skip)
        out[n].insert(skip);
      visit += gap;
    }
    out[n].erase(base_years);  // keep the final visit observed
  }
  return out;
}

PanelDataset simulate_cohort(const RateVector& theta,
                             const CohortOptions& options) {
  if (options.subjects == 0) throw config_error("need at least one subject");
  if (options.start_state2_fraction < 0.0 ||
      options.start_state2_fraction > 1.0)
    throw config_error("state-2 start fraction must be in [0, 1]");

  std::vector<Trajectory> trajectories;
  trajectories.reserve(options.subjects);
  const double horizon = static_cast<double>(options.base_years);
  for (std::size_t n = 0; n < options.subjects; ++n) {
    int start = 1;
    if (options.start_state2_fraction > 0.0) {
      std::mt19937_64 rng(derive_stream(options.seed ^ 0xa3a3a3a3a3a3a3a3ULL, n));
      if (uniform01(rng) < options.start_state2_fraction) start = 2;
    }
    trajectories.push_back(
        sample_path(theta, start, horizon, options.seed, n));
  }
  const auto skips = sample_skip_sets(options.subjects, options.base_years,
                                      options.skip2, options.skip3,
                                      options.seed);
  return panelize(trajectories, irregular_schedule(options.base_years, skips));
}

}  // namespace ctmc4
