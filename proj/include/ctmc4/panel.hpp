#ifndef CTMC4_PANEL_HPP
#define CTMC4_PANEL_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ctmc4/errors.hpp"

namespace ctmc4 {

using CountMatrix = Eigen::Matrix<std::int64_t, 4, 4>;

// Observed transition counts n_ij over one interval length: subjects in
// state i at the start of an interval of delta_t years and state j at its
// end. Rows 3 and 4 are zero (nothing leaves an absorbing state).
struct TransitionCountTable {
  int delta_t = 1;
  CountMatrix counts = CountMatrix::Zero();

  std::int64_t row_total(int i) const { return counts.row(i).sum(); }
  std::int64_t total() const { return counts.sum(); }

  void validate() const;
};

// One count table per distinct interval length, ordered by delta_t.
struct PanelDataset {
  std::vector<TransitionCountTable> tables;

  std::int64_t total_transitions() const;
  const TransitionCountTable* find(int delta_t) const;
  // Checks distinct sorted delta_t >= 1 and per-table invariants.
  void validate() const;

  void add(const TransitionCountTable& table);  // merges equal delta_t
};

// --- file formats ------------------------------------------------------
//
// Count tables: blocks of
//     delta_t=<k>
//     n11,n12,n13,n14
//     n21,n22,n23,n24
//     0,0,0,0
//     0,0,0,0
// Blank lines and lines starting with '#' are ignored.
//
// Observation records: one visit per line, "subject,time,state" with time
// in years and state in 1..4; an optional "subject,time,state" header line
// is skipped. Records are panelized into count tables on load.

PanelDataset parse_count_tables(std::istream& in);
void write_count_tables(std::ostream& out, const PanelDataset& dataset);

struct ObservationRecord {
  std::string subject;
  double time = 0.0;
  int state = 1;
};

std::vector<ObservationRecord> parse_observation_records(std::istream& in);
PanelDataset panelize_records(const std::vector<ObservationRecord>& records);

// Auto-detects the format from the first significant line.
PanelDataset load_panel(const std::string& path);

}  // namespace ctmc4

#endif
