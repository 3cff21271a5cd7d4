// ctmc4: fit a 4-state progression chain to interval-censored count data
// and report transition probabilities, sojourn times, occupancy, limiting
// behavior, absorption times and goodness of fit.

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ctmc4/absorption.hpp"
#include "ctmc4/chain.hpp"
#include "ctmc4/estimation.hpp"
#include "ctmc4/gof.hpp"
#include "ctmc4/panel.hpp"
#include "ctmc4/rates.hpp"
#include "ctmc4/simulate.hpp"
#include "ctmc4/summary.hpp"

using json = nlohmann::ordered_json;
using namespace ctmc4;

namespace {

// ----------------------------------------------------------------- config

struct AnalysisConfig {
  double tolerance = 1e-6;
  int max_iter = 50;
  double significance = 0.05;
  Eigen::Vector4d pi0{1.0, 0.0, 0.0, 0.0};
  std::optional<Eigen::Vector4d> u0;
  std::vector<double> horizons{1.0};
  bool strict_gradient = false;
  std::optional<Eigen::Vector4d> cvec;
  bool exact_init = false;

  void validate() const {
    if (tolerance <= 0.0) throw config_error("tolerance must be positive");
    if (max_iter < 1) throw config_error("max-iter must be at least 1");
    if (significance <= 0.0 || significance >= 1.0)
      throw config_error("alpha must be in (0, 1)");
    if (std::abs(pi0.sum() - 1.0) > 1e-9)
      throw config_error("pi0 must sum to 1");
    if (pi0.minCoeff() < 0.0) throw config_error("pi0 must be nonnegative");
    for (double h : horizons)
      if (h < 0.0) throw config_error("horizons must be nonnegative");
  }

  EstimationOptions estimation_options() const {
    EstimationOptions o;
    o.tol = tolerance;
    o.max_iter = max_iter;
    o.rounding =
        exact_init ? InitRounding::kExact : InitRounding::kTwoSigFig;
    return o;
  }
};

std::vector<double> parse_number_list(const std::string& text,
                                      const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string field;
  while (std::getline(ss, field, ',')) {
    double v = 0.0;  // from_chars keeps parsing locale-independent
    auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || p != field.data() + field.size())
      throw config_error(std::string("cannot parse ") + what + " entry '" +
                         field + "'");
    out.push_back(v);
  }
  return out;
}

Eigen::Vector4d parse_vec4(const std::string& text, const char* what) {
  const auto v = parse_number_list(text, what);
  if (v.size() != 4)
    throw config_error(std::string(what) + " needs 4 comma-separated values");
  return Eigen::Vector4d(v[0], v[1], v[2], v[3]);
}

RateVector parse_theta(const std::string& text) {
  const auto v = parse_number_list(text, "theta");
  if (v.size() != 5)
    throw config_error("theta needs 5 comma-separated values "
                       "(lambda12,lambda14,mu21,lambda23,lambda24)");
  return {v[0], v[1], v[2], v[3], v[4]};
}

void apply_config_file(AnalysisConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw config_error("config file '" + path + "': " + e.what());
  }
  try {
    if (j.contains("tolerance")) cfg.tolerance = j["tolerance"].get<double>();
    if (j.contains("max_iter")) cfg.max_iter = j["max_iter"].get<int>();
    if (j.contains("significance"))
      cfg.significance = j["significance"].get<double>();
    if (j.contains("strict_gradient"))
      cfg.strict_gradient = j["strict_gradient"].get<bool>();
    if (j.contains("exact_init")) cfg.exact_init = j["exact_init"].get<bool>();
    if (j.contains("horizons"))
      cfg.horizons = j["horizons"].get<std::vector<double>>();
    auto read_vec4 = [&](const char* key) -> std::optional<Eigen::Vector4d> {
      if (!j.contains(key)) return std::nullopt;
      const auto v = j[key].get<std::vector<double>>();
      if (v.size() != 4)
        throw config_error(std::string("config ") + key + " needs 4 entries");
      return Eigen::Vector4d(v[0], v[1], v[2], v[3]);
    };
    if (auto v = read_vec4("pi0")) cfg.pi0 = *v;
    if (auto v = read_vec4("u0")) cfg.u0 = *v;
    if (auto v = read_vec4("cvec")) cfg.cvec = *v;
  } catch (const json::exception& e) {
    throw config_error("config file '" + path + "': " + e.what());
  }
}

Matrix5 load_var_theta(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open covariance file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw config_error("covariance file '" + path + "': " + e.what());
  }
  if (j.is_object() && j.contains("covariance")) j = j["covariance"];
  Matrix5 m;
  try {
    const auto rows = j.get<std::vector<std::vector<double>>>();
    if (rows.size() != 5) throw config_error("covariance must be 5x5");
    for (int i = 0; i < 5; ++i) {
      if (rows[static_cast<size_t>(i)].size() != 5)
        throw config_error("covariance must be 5x5");
      for (int k = 0; k < 5; ++k)
        m(i, k) = rows[static_cast<size_t>(i)][static_cast<size_t>(k)];
    }
  } catch (const json::exception& e) {
    throw config_error("covariance file '" + path + "': " + e.what());
  }
  return m;
}

// ----------------------------------------------------------------- output

std::string g6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

std::string g6(const json& x) { return g6(x.get<double>()); }

std::string years_months(double years) {
  int whole = static_cast<int>(std::floor(years));
  int months = static_cast<int>(std::lround((years - whole) * 12.0));
  if (months == 12) {
    ++whole;
    months = 0;
  }
  return std::to_string(whole) + " years and " + std::to_string(months) +
         " months";
}

template <typename Derived>
json json_matrix(const Eigen::MatrixBase<Derived>& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

template <typename Derived>
json json_vector(const Eigen::MatrixBase<Derived>& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json json_theta(const RateVector& th) {
  return {{"lambda12", th.lambda12}, {"lambda14", th.lambda14},
          {"mu21", th.mu21},         {"lambda23", th.lambda23},
          {"lambda24", th.lambda24}};
}

template <typename Derived>
void print_matrix(std::ostream& os, const std::string& label,
                  const Eigen::MatrixBase<Derived>& m) {
  os << label << "\n";
  for (int i = 0; i < m.rows(); ++i) {
    os << " ";
    for (int k = 0; k < m.cols(); ++k) os << " " << g6(m(i, k));
    os << "\n";
  }
}

void print_theta(std::ostream& os, const std::string& label,
                 const RateVector& th) {
  os << label << ": lambda12=" << g6(th.lambda12)
     << " lambda14=" << g6(th.lambda14) << " mu21=" << g6(th.mu21)
     << " lambda23=" << g6(th.lambda23) << " lambda24=" << g6(th.lambda24)
     << "\n";
}

void write_output(const json& doc, const std::string& path) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw config_error("cannot open output file '" + path + "'");
  out << doc.dump(2) << "\n";
}

// ----------------------------------------------------------- report parts

json estimation_json(const EstimationResult& r) {
  json per = json::object();
  for (const auto& [dt, fit] : r.per_interval) {
    per[std::to_string(dt)] = {{"theta", json_theta(fit.theta)},
                               {"iterations", fit.iterations},
                               {"delta_norm", fit.delta_norm},
                               {"stalled", fit.stalled},
                               {"zero_cells_corrected", fit.smoothed}};
  }
  json weights = json::object();
  for (const auto& [dt, w] : r.weights) weights[std::to_string(dt)] = w;
  return {{"per_interval", std::move(per)},
          {"pooled_theta", json_theta(r.pooled_theta)},
          {"weights", std::move(weights)},
          {"q_matrix", json_matrix(build_generator(r.pooled_theta).q)},
          {"pooled_covariance", json_matrix(r.pooled_covariance)}};
}

void print_estimation(std::ostream& os, const EstimationResult& r) {
  os << "Per-interval estimates:\n";
  for (const auto& [dt, fit] : r.per_interval) {
    os << "  delta_t=" << dt << "  ";
    print_theta(os, "theta", fit.theta);
    os << "    iterations=" << fit.iterations
       << " last_step=" << g6(fit.delta_norm)
       << (fit.stalled ? " (stalled)" : "")
       << (fit.smoothed ? " (zero cells corrected)" : "") << "\n";
  }
  os << "Weights:";
  for (const auto& [dt, w] : r.weights) os << " delta_t=" << dt << ":" << g6(w);
  os << "\n";
  print_theta(os, "Pooled theta", r.pooled_theta);
  print_matrix(os, "Q matrix:", build_generator(r.pooled_theta).q);
  print_matrix(os, "Pooled covariance (weighted block pseudoinverses):",
               r.pooled_covariance);
}

struct ModelSource {
  RateVector theta;
  std::optional<Matrix5> var_theta;
  std::optional<EstimationResult> estimation;
  std::optional<PanelDataset> panel;
};

// Model from --theta, or estimated from --input.
ModelSource resolve_model(const std::string& theta_arg,
                          const std::string& input,
                          const std::string& var_path,
                          const AnalysisConfig& cfg) {
  ModelSource src;
  if (!theta_arg.empty()) {
    src.theta = parse_theta(theta_arg);
    src.theta.require_nonnegative();
    if (!input.empty()) src.panel = load_panel(input);
  } else if (!input.empty()) {
    src.panel = load_panel(input);
    src.estimation = estimate_dataset(*src.panel, cfg.estimation_options());
    src.theta = src.estimation->pooled_theta;
    src.var_theta = src.estimation->pooled_covariance;
  } else {
    throw config_error("provide --theta or --input");
  }
  if (!var_path.empty()) src.var_theta = load_var_theta(var_path);
  return src;
}

json sojourn_json(const RateVector& theta, const Matrix5& var_theta,
                  bool strict) {
  const auto [s1, s2] = sojourn_means(theta);
  const auto [v1, v2] = sojourn_variances(theta, var_theta, strict);
  return {{"s1", s1},
          {"s2", s2},
          {"s1_readable", years_months(s1)},
          {"s2_readable", years_months(s2)},
          {"var_s1", v1},
          {"var_s2", v2},
          {"strict_gradient", strict}};
}

json summarize_json(const ModelSource& src, const AnalysisConfig& cfg) {
  const RateVector& th = src.theta;
  const Matrix5 var = src.var_theta.value_or(Matrix5::Zero());

  json doc;
  doc["theta"] = json_theta(th);
  if (!src.var_theta)
    doc["note"] = "no parameter covariance supplied; variance-based "
                  "quantities are reported as zero";
  doc["sojourn"] = sojourn_json(th, var, cfg.strict_gradient);

  json occ = json::array();
  json coh = json::array();
  for (double t : cfg.horizons) {
    const auto pi = occupancy_at({cfg.pi0, 0.0}, th, t);
    occ.push_back({{"t", t}, {"pi", json_vector(pi.pi)}});
    if (cfg.u0) {
      const auto u = expected_counts({*cfg.u0, 0.0}, th, t);
      coh.push_back({{"t", t}, {"u", json_vector(u.u)}});
    }
  }
  doc["occupancy"] = std::move(occ);
  if (cfg.u0) doc["cohort"] = std::move(coh);

  const Eigen::Vector4d pi_inf = limiting_distribution({cfg.pi0, 0.0}, th);
  const Eigen::Vector4d cvec = cfg.cvec.value_or(pi_inf);
  doc["limiting"] = {
      {"pi", json_vector(pi_inf)},
      {"cvec", json_vector(cvec)},
      {"covariance", json_matrix(limiting_covariance(cvec, th, var))}};
  return doc;
}

void print_summarize(std::ostream& os, const json& doc,
                     const AnalysisConfig& cfg) {
  const auto& s = doc["sojourn"];
  os << "Sojourn means: s1=" << g6(s["s1"]) << " ("
     << s["s1_readable"].get<std::string>() << "), s2=" << g6(s["s2"]) << " ("
     << s["s2_readable"].get<std::string>() << ")\n";
  os << "Sojourn variances: var(s1)=" << g6(s["var_s1"])
     << " var(s2)=" << g6(s["var_s2"])
     << (cfg.strict_gradient ? " [strict gradient]" : "") << "\n";
  for (const auto& o : doc["occupancy"]) {
    os << "pi(t=" << g6(o["t"]) << "):";
    for (const auto& x : o["pi"]) os << " " << g6(x);
    os << "\n";
  }
  if (doc.contains("cohort")) {
    for (const auto& o : doc["cohort"]) {
      os << "u(t=" << g6(o["t"]) << "):";
      for (const auto& x : o["u"]) os << " " << g6(x);
      os << "\n";
    }
  }
  os << "Limiting distribution:";
  for (const auto& x : doc["limiting"]["pi"]) os << " " << g6(x);
  os << "\n";
  os << "Limiting covariance (cvec:";
  for (const auto& x : doc["limiting"]["cvec"]) os << " " << g6(x);
  os << "):\n";
  for (const auto& row : doc["limiting"]["covariance"]) {
    os << " ";
    for (const auto& x : row) os << " " << g6(x);
    os << "\n";
  }
}

json absorb_json(const RateVector& theta) {
  const auto s = absorption_summary(theta);
  json doc;
  doc["theta"] = json_theta(theta);
  doc["b"] = json_matrix(s.b);
  doc["a_block"] = json_matrix(s.a_block);
  doc["z"] = json_matrix(s.z);
  doc["absorption_probabilities"] = json_matrix(s.absorption_probabilities());
  doc["expected_absorption_times"] = json_matrix(s.etau);
  json unreachable = json::array();
  if (theta.lambda23 == 0.0) unreachable.push_back(3);
  if (theta.lambda14 == 0.0 && theta.lambda24 == 0.0) unreachable.push_back(4);
  doc["unreachable_states"] = std::move(unreachable);
  return doc;
}

void print_absorb(std::ostream& os, const json& doc) {
  auto mat = [&](const char* key) {
    Eigen::Matrix2d m;
    for (int i = 0; i < 2; ++i)
      for (int k = 0; k < 2; ++k) m(i, k) = doc[key][i][k].get<double>();
    return m;
  };
  print_matrix(os, "Transient block B:", mat("b"));
  print_matrix(os, "Z = B^-1 A:", mat("z"));
  print_matrix(os, "Absorption probabilities (-Z):",
               mat("absorption_probabilities"));
  print_matrix(os,
               "Expected absorption times E(tau) [rows: start 1,2; cols: "
               "state 3,4]:",
               mat("expected_absorption_times"));
  if (!doc["unreachable_states"].empty()) {
    os << "Note: absorbing state(s)";
    for (const auto& s : doc["unreachable_states"]) os << " " << s;
    os << " unreachable; their columns are zero.\n";
  }
}

json gof_json(const GofReport& report) {
  json per = json::array();
  for (const auto& g : report.per_interval) {
    per.push_back({{"delta_t", g.delta_t},
                   {"chi_sq", g.chi_sq},
                   {"df", g.df},
                   {"expected", json_matrix(g.expected)}});
  }
  return {{"per_interval", std::move(per)},
          {"pooled_chi_sq", report.pooled_chi_sq},
          {"pooled_df", report.pooled_df},
          {"significance", report.significance},
          {"critical_value", report.critical_value},
          {"reject_null", report.reject_null},
          {"df_note", report.df_note}};
}

void print_gof(std::ostream& os, const GofReport& report) {
  for (const auto& g : report.per_interval) {
    os << "delta_t=" << g.delta_t << ": chi_sq=" << g6(g.chi_sq)
       << " df=" << g.df << "\n";
  }
  os << "Pooled: chi_sq=" << g6(report.pooled_chi_sq)
     << " df=" << report.pooled_df
     << " critical(alpha=" << g6(report.significance)
     << ")=" << g6(report.critical_value)
     << " reject_null=" << (report.reject_null ? "true" : "false") << "\n";
  os << "Note: " << report.df_note << "\n";
}

// ------------------------------------------------------------- subcommands

int cmd_estimate(const std::string& input, const std::string& output,
                 const AnalysisConfig& cfg) {
  const auto panel = load_panel(input);
  const auto result = estimate_dataset(panel, cfg.estimation_options());
  print_estimation(std::cout, result);
  write_output(estimation_json(result), output);
  return 0;
}

int cmd_summarize(const ModelSource& src, const std::string& output,
                  const AnalysisConfig& cfg) {
  json doc = summarize_json(src, cfg);
  if (src.estimation) doc["estimation"] = estimation_json(*src.estimation);
  print_summarize(std::cout, doc, cfg);
  write_output(doc, output);
  return 0;
}

int cmd_absorb(const ModelSource& src, const std::string& output) {
  const json doc = absorb_json(src.theta);
  print_absorb(std::cout, doc);
  write_output(doc, output);
  return 0;
}

int cmd_gof(const ModelSource& src, const std::string& input,
            const std::string& output, const AnalysisConfig& cfg) {
  const PanelDataset panel = src.panel ? *src.panel : load_panel(input);
  const auto report = goodness_of_fit(src.theta, panel, cfg.significance);
  print_gof(std::cout, report);
  write_output(gof_json(report), output);
  return 0;
}

int cmd_simulate(const RateVector& theta, const CohortOptions& opt,
                 const std::string& output) {
  const auto panel = simulate_cohort(theta, opt);
  if (output.empty()) {
    write_count_tables(std::cout, panel);
  } else {
    std::ofstream out(output);
    if (!out) throw config_error("cannot open output file '" + output + "'");
    write_count_tables(out, panel);
    std::cout << "wrote " << panel.total_transitions() << " transitions over "
              << panel.tables.size() << " interval length(s) to " << output
              << "\n";
  }
  return 0;
}

int cmd_report_all(const std::string& input, const std::string& output,
                   const std::string& var_path, const AnalysisConfig& cfg) {
  ModelSource src = resolve_model("", input, var_path, cfg);

  json doc;
  doc["estimation"] = estimation_json(*src.estimation);
  json pmats = json::array();
  for (const auto& table : src.panel->tables) {
    const auto p =
        transition_matrix(src.theta, static_cast<double>(table.delta_t));
    pmats.push_back({{"t", table.delta_t}, {"matrix", json_matrix(p.p)}});
  }
  doc["transition_probabilities"] = std::move(pmats);
  const json summary = summarize_json(src, cfg);
  doc["sojourn"] = summary["sojourn"];
  doc["occupancy"] = summary["occupancy"];
  if (summary.contains("cohort")) doc["cohort"] = summary["cohort"];
  doc["limiting"] = summary["limiting"];
  doc["absorption"] = absorb_json(src.theta);
  const auto gof = goodness_of_fit(src.theta, *src.panel, cfg.significance);
  doc["gof"] = gof_json(gof);

  print_estimation(std::cout, *src.estimation);
  for (const auto& table : src.panel->tables) {
    const auto p =
        transition_matrix(src.theta, static_cast<double>(table.delta_t));
    print_matrix(std::cout, "P(t=" + std::to_string(table.delta_t) + "):",
                 p.p);
  }
  print_summarize(std::cout, summary, cfg);
  print_absorb(std::cout, doc["absorption"]);
  print_gof(std::cout, gof);
  write_output(doc, output);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"4-state progression-chain analysis of interval-censored "
               "transition counts"};
  app.require_subcommand(1);

  std::string input, output, config_path, theta_arg, var_path;
  std::string pi0_arg, u0_arg, cvec_arg, horizons_arg, miss_arg;
  AnalysisConfig cfg;

  auto add_common = [&](CLI::App* sub, bool with_model) {
    sub->add_option("--output,-o", output, "write the structured report here");
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--tol", cfg.tolerance, "quasi-Newton step tolerance");
    sub->add_option("--max-iter", cfg.max_iter, "iteration cap");
    sub->add_option("--alpha", cfg.significance, "significance level");
    sub->add_flag("--exact-init", cfg.exact_init,
                  "use exact crude ratios for the delta_t=1 start (default "
                  "rounds them to 2 significant figures)");
    if (with_model) {
      sub->add_option("--theta", theta_arg,
                      "rates lambda12,lambda14,mu21,lambda23,lambda24");
      sub->add_option("--var-theta", var_path,
                      "JSON file with a 5x5 covariance of theta");
    }
  };

  auto* est = app.add_subcommand("estimate", "fit the rates to count tables");
  est->add_option("--input,-i", input, "count tables or observation records")
      ->required();
  add_common(est, false);

  auto* sum =
      app.add_subcommand("summarize", "sojourn, occupancy, cohort and limit");
  sum->add_option("--input,-i", input, "count tables (fitted first)");
  add_common(sum, true);
  sum->add_option("--pi0", pi0_arg, "initial distribution, 4 values");
  sum->add_option("--u0", u0_arg, "initial cohort counts, 4 values");
  sum->add_option("--horizons", horizons_arg, "report times, years");
  sum->add_flag("--strict-gradient", cfg.strict_gradient,
                "restrict each sojourn-variance gradient to its own "
                "parameters");
  sum->add_option("--cvec", cvec_arg,
                  "limiting-covariance weight vector override, 4 values");

  auto* abs = app.add_subcommand(
      "absorb", "absorption probabilities and expected absorption times");
  abs->add_option("--input,-i", input, "count tables (fitted first)");
  add_common(abs, true);

  auto* gof = app.add_subcommand("gof", "chi-square goodness of fit");
  gof->add_option("--input,-i", input, "count tables")->required();
  add_common(gof, true);

  auto* sim = app.add_subcommand("simulate", "generate a synthetic cohort");
  CohortOptions sim_opt;
  std::string sim_theta;
  double start2 = 0.0;
  sim->add_option("--theta", sim_theta, "true rates")->required();
  sim->add_option("--subjects", sim_opt.subjects, "cohort size");
  sim->add_option("--years", sim_opt.base_years, "annual visits 0..years");
  sim->add_option("--seed", sim_opt.seed, "random seed");
  sim->add_option("--miss", miss_arg,
                  "gap probabilities p2,p3 for skipped visits");
  sim->add_option("--start2-frac", start2,
                  "fraction of subjects entering in state 2");
  sim->add_option("--output,-o", output, "write count tables here");

  auto* all = app.add_subcommand("report-all", "full fit-and-report pipeline");
  all->add_option("--input,-i", input, "count tables or observation records")
      ->required();
  add_common(all, true);
  all->add_option("--pi0", pi0_arg, "initial distribution, 4 values");
  all->add_option("--u0", u0_arg, "initial cohort counts, 4 values");
  all->add_option("--horizons", horizons_arg, "report times, years");
  all->add_flag("--strict-gradient", cfg.strict_gradient, "see summarize");
  all->add_option("--cvec", cvec_arg, "see summarize");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 4;  // help/version exit 0, bad flags exit 4
  }

  try {
    if (!config_path.empty()) {
      // Values from the file, except where a flag was given explicitly.
      AnalysisConfig merged = cfg;
      apply_config_file(merged, config_path);
      for (CLI::App* sub : {est, sum, abs, gof, all}) {
        if (!sub->parsed()) continue;
        auto overridden = [&](const std::string& name) {
          const CLI::Option* o = sub->get_option_no_throw(name);
          return o != nullptr && o->count() > 0;
        };
        if (overridden("--tol")) merged.tolerance = cfg.tolerance;
        if (overridden("--max-iter")) merged.max_iter = cfg.max_iter;
        if (overridden("--alpha")) merged.significance = cfg.significance;
        if (overridden("--exact-init")) merged.exact_init = cfg.exact_init;
        if (overridden("--strict-gradient"))
          merged.strict_gradient = cfg.strict_gradient;
      }
      cfg = merged;
    }
    if (!pi0_arg.empty()) cfg.pi0 = parse_vec4(pi0_arg, "pi0");
    if (!u0_arg.empty()) cfg.u0 = parse_vec4(u0_arg, "u0");
    if (!cvec_arg.empty()) cfg.cvec = parse_vec4(cvec_arg, "cvec");
    if (!horizons_arg.empty())
      cfg.horizons = parse_number_list(horizons_arg, "horizons");
    cfg.validate();

    if (est->parsed()) return cmd_estimate(input, output, cfg);
    if (sum->parsed())
      return cmd_summarize(resolve_model(theta_arg, input, var_path, cfg),
                           output, cfg);
    if (abs->parsed())
      return cmd_absorb(resolve_model(theta_arg, input, var_path, cfg),
                        output);
    if (gof->parsed())
      return cmd_gof(resolve_model(theta_arg, input, var_path, cfg), input,
                     output, cfg);
    if (sim->parsed()) {
      if (!miss_arg.empty()) {
        const auto m = parse_number_list(miss_arg, "miss");
        if (m.size() != 2) throw config_error("--miss needs p2,p3");
        sim_opt.skip2 = m[0];
        sim_opt.skip3 = m[1];
      }
      sim_opt.start_state2_fraction = start2;
      return cmd_simulate(parse_theta(sim_theta), sim_opt, output);
    }
    if (all->parsed()) return cmd_report_all(input, output, var_path, cfg);
    return 4;
  } catch (const parse_error& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 1;
  } catch (const non_convergence_error& e) {
    std::cerr << "estimation did not converge: " << e.what() << "\n";
    return 2;
  } catch (const degeneracy_error& e) {
    std::cerr << "degenerate model: " << e.what() << "\n";
    return 3;
  } catch (const input_error& e) {
    std::cerr << "degenerate input: " << e.what() << "\n";
    return 3;
  } catch (const config_error& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
