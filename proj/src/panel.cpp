#include "ctmc4/panel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace ctmc4 {

void TransitionCountTable::validate() const {
  if (delta_t < 1)
    throw input_error("delta_t must be a whole number of years >= 1, got " +
                      std::to_string(delta_t));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (counts(i, j) < 0)
        throw input_error("negative count n(" + std::to_string(i + 1) + "," +
                          std::to_string(j + 1) + ") in delta_t=" +
                          std::to_string(delta_t) + " table");
  for (int i = 2; i < 4; ++i)
    if (counts.row(i).sum() != 0)
      throw input_error("absorbing-state row " + std::to_string(i + 1) +
                        " must be zero in delta_t=" + std::to_string(delta_t) +
                        " table");
}

std::int64_t PanelDataset::total_transitions() const {
  std::int64_t n = 0;
  for (const auto& t : tables) n += t.total();
  return n;
}

const TransitionCountTable* PanelDataset::find(int delta_t) const {
  for (const auto& t : tables)
    if (t.delta_t == delta_t) return &t;
  return nullptr;
}

void PanelDataset::validate() const {
  int prev = 0;
  for (const auto& t : tables) {
    t.validate();
    if (t.delta_t <= prev)
      throw input_error("tables must have distinct increasing delta_t");
    prev = t.delta_t;
  }
}

void PanelDataset::add(const TransitionCountTable& table) {
  for (auto& t : tables) {
    if (t.delta_t == table.delta_t) {
      t.counts += table.counts;
      return;
    }
  }
  tables.push_back(table);
  std::sort(tables.begin(), tables.end(),
            [](const auto& a, const auto& b) { return a.delta_t < b.delta_t; });
}

namespace {

bool significant(const std::string& line) {
  for (char c : line)
    if (!std::isspace(static_cast<unsigned char>(c))) return c != '#';
  return false;
}

std::string strip(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(strip(field));
  return out;
}

std::int64_t parse_count(const std::string& s, int lineno) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || v < 0)
    throw parse_error("line " + std::to_string(lineno) +
                      ": expected nonnegative integer count, got '" + s + "'");
  return v;
}

double parse_double(const std::string& s, int lineno) {
  // strtod is locale-dependent; from_chars keeps parsing dot-decimal only.
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw parse_error("line " + std::to_string(lineno) +
                      ": expected a number, got '" + s + "'");
  return v;
}

}  // namespace

PanelDataset parse_count_tables(std::istream& in) {
  PanelDataset ds;
  std::string line;
  int lineno = 0;
  bool in_block = false;
  TransitionCountTable table;
  int row = 0;

  auto flush = [&] {
    if (!in_block) return;
    if (row != 4)
      throw parse_error("delta_t=" + std::to_string(table.delta_t) +
                        " block has " + std::to_string(row) +
                        " rows, expected 4");
    table.validate();
    if (ds.find(table.delta_t))
      throw parse_error("duplicate delta_t=" + std::to_string(table.delta_t) +
                        " block");
    ds.add(table);
    in_block = false;
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (!significant(line)) continue;
    const std::string s = strip(line);
    if (s.rfind("delta_t=", 0) == 0) {
      flush();
      table = TransitionCountTable{};
      const std::string value = s.substr(8);
      int dt = 0;
      auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), dt);
      if (ec != std::errc() || p != value.data() + value.size() || dt < 1)
        throw parse_error("line " + std::to_string(lineno) +
                          ": bad interval header '" + s + "'");
      table.delta_t = dt;
      row = 0;
      in_block = true;
      continue;
    }
    if (!in_block)
      throw parse_error("line " + std::to_string(lineno) +
                        ": expected 'delta_t=<k>' header before counts");
    if (row >= 4)
      throw parse_error("line " + std::to_string(lineno) +
                        ": more than 4 rows in delta_t=" +
                        std::to_string(table.delta_t) + " block");
    const auto fields = split_csv(s);
    if (fields.size() != 4)
      throw parse_error("line " + std::to_string(lineno) + ": expected 4 comma-separated counts");
    for (int j = 0; j < 4; ++j)
      table.counts(row, j) = parse_count(fields[static_cast<size_t>(j)], lineno);
    ++row;
  }
  flush();
  if (ds.tables.empty()) throw parse_error("no count tables found in input");
  ds.validate();
  return ds;
}

void write_count_tables(std::ostream& out, const PanelDataset& dataset) {
  for (const auto& t : dataset.tables) {
    out << "delta_t=" << t.delta_t << "\n";
    for (int i = 0; i < 4; ++i) {
      out << t.counts(i, 0) << "," << t.counts(i, 1) << "," << t.counts(i, 2)
          << "," << t.counts(i, 3) << "\n";
    }
  }
}

std::vector<ObservationRecord> parse_observation_records(std::istream& in) {
  std::vector<ObservationRecord> records;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!significant(line)) continue;
    const auto fields = split_csv(strip(line));
    if (fields.size() != 3)
      throw parse_error("line " + std::to_string(lineno) +
                        ": expected 'subject,time,state'");
    if (fields[0] == "subject" && fields[1] == "time" && fields[2] == "state")
      continue;  // header
    ObservationRecord r;
    r.subject = fields[0];
    r.time = parse_double(fields[1], lineno);
    const double st = parse_double(fields[2], lineno);
    r.state = static_cast<int>(st);
    if (r.state < 1 || r.state > 4 || st != r.state)
      throw parse_error("line " + std::to_string(lineno) +
                        ": state must be 1..4, got '" + fields[2] + "'");
    if (r.time < 0.0)
      throw parse_error("line " + std::to_string(lineno) + ": negative time");
    records.push_back(std::move(r));
  }
  if (records.empty()) throw parse_error("no observation records found in input");
  return records;
}

PanelDataset panelize_records(const std::vector<ObservationRecord>& records) {
  std::map<std::string, std::vector<std::pair<double, int>>> by_subject;
  for (const auto& r : records)
    by_subject[r.subject].emplace_back(r.time, r.state);

  PanelDataset ds;
  for (auto& [subject, visits] : by_subject) {
    std::sort(visits.begin(), visits.end());
    for (size_t k = 1; k < visits.size(); ++k) {
      const auto& [t0, s0] = visits[k - 1];
      const auto& [t1, s1] = visits[k];
      if (s0 == 3 || s0 == 4) continue;  // absorbed: no further pairs
      const double gap = t1 - t0;
      const int dt = static_cast<int>(std::llround(gap));
      if (dt < 1 || std::abs(gap - dt) > 1e-9)
        throw input_error("subject '" + subject +
                          "': observation gap " + std::to_string(gap) +
                          " is not a whole number of years >= 1");
      TransitionCountTable inc;
      inc.delta_t = dt;
      inc.counts(s0 - 1, s1 - 1) = 1;
      ds.add(inc);
    }
  }
  if (ds.tables.empty())
    throw input_error("observation records contain no usable transition pairs");
  ds.validate();
  return ds;
}

PanelDataset load_panel(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open input file '" + path + "'");
  std::string line;
  std::streampos start = in.tellg();
  std::string first;
  while (std::getline(in, line)) {
    if (significant(line)) {
      first = strip(line);
      break;
    }
  }
  in.clear();
  in.seekg(start);
  if (first.rfind("delta_t=", 0) == 0) return parse_count_tables(in);
  return panelize_records(parse_observation_records(in));
}

}  // namespace ctmc4
