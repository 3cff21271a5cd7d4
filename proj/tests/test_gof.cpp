#include <doctest.h>

#include <cmath>

#include "ctmc4/gof.hpp"
#include "support.hpp"

using namespace ctmc4;
using ctmc4::testing::ThetaSampler;

TEST_CASE("expected counts for the one-year table") {
  const auto e = expected_table(testing::reference_theta(), testing::table_dt1());
  const double row1[4] = {403.59, 117.645, 13.585, 15.235};
  const double row2[4] = {5.15, 185.275, 44.825, 14.75};
  for (int j = 0; j < 4; ++j) {
    CHECK(std::abs(e(0, j) - row1[j]) < 0.5);
    CHECK(std::abs(e(1, j) - row2[j]) < 0.5);
  }
  CHECK(e.bottomRows<2>().isZero(0.0));
}

TEST_CASE("expected counts for the two-year table") {
  const auto e = expected_table(testing::reference_theta(), testing::table_dt2());
  const double row1[4] = {60.2508, 35.0094, 9.0021, 6.7377};
  for (int j = 0; j < 4; ++j) CHECK(std::abs(e(0, j) - row1[j]) < 0.2);
}

TEST_CASE("expected rows preserve the observed margins") {
  ThetaSampler sampler(101);
  for (int i = 0; i < 100; ++i) {
    const auto th = sampler.draw();
    for (const auto& table : testing::reference_panel().tables) {
      const auto e = expected_table(th, table);
      CHECK(std::abs(e.row(0).sum() - static_cast<double>(table.row_total(0)))
            < 1e-6);
      CHECK(std::abs(e.row(1).sum() - static_cast<double>(table.row_total(1)))
            < 1e-6);
    }
  }
}

TEST_CASE("zero row totals give zero expected rows") {
  TransitionCountTable t;
  t.delta_t = 1;
  t.counts << 0, 0, 0, 0,
              5, 10, 3, 2,
              0, 0, 0, 0,
              0, 0, 0, 0;
  const auto e = expected_table(testing::reference_theta(), t);
  CHECK(e.row(0).isZero(0.0));
  CHECK(e.row(1).sum() == doctest::Approx(20.0).epsilon(1e-9));
}

TEST_CASE("per-interval statistics of the reference fixture") {
  const auto th = testing::reference_theta();
  const auto [c1, df1] = chi_square_interval(
      testing::table_dt1(), expected_table(th, testing::table_dt1()));
  const auto [c2, df2] = chi_square_interval(
      testing::table_dt2(), expected_table(th, testing::table_dt2()));
  const auto [c3, df3] = chi_square_interval(
      testing::table_dt3(), expected_table(th, testing::table_dt3()));
  CHECK(std::abs(c1 - 104.247) < 0.5);
  CHECK(std::abs(c2 - 8.022) < 0.1);
  CHECK(std::abs(c3 - 6.588) < 0.1);
  CHECK(df1 == 9);
  CHECK(df2 == 9);
  CHECK(df3 == 9);
}

TEST_CASE("observed equal to expected scores zero") {
  TransitionCountTable t = testing::table_dt1();
  Eigen::Matrix4d e = Eigen::Matrix4d::Zero();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 4; ++j)
      e(i, j) = static_cast<double>(t.counts(i, j));
  const auto [chi, df] = chi_square_interval(t, e);
  CHECK(chi == 0.0);
}

TEST_CASE("a zero-expectation cell with observations is ill-defined") {
  TransitionCountTable t = testing::table_dt1();
  Eigen::Matrix4d e = Eigen::Matrix4d::Zero();
  e.row(0) << 330, 163, 45, 12;
  // Row 2 all zero expectation but observed counts present.
  CHECK_THROWS_AS(chi_square_interval(t, e), input_error);
}

TEST_CASE("pooled report over the reference fixture") {
  const auto report = goodness_of_fit(testing::reference_theta(),
                                      testing::reference_panel(), 0.05);
  CHECK(report.per_interval.size() == 3);
  CHECK(std::abs(report.pooled_chi_sq - 118.857) < 0.6);
  CHECK(report.pooled_df == 27);
  CHECK(std::abs(report.critical_value - 40.113272069413625) < 1e-6);
  CHECK(report.reject_null);
  CHECK(report.df_note != nullptr);

  double sum = 0.0;
  for (const auto& g : report.per_interval) sum += g.chi_sq;
  CHECK(report.pooled_chi_sq == doctest::Approx(sum).epsilon(1e-12));
}

TEST_CASE("single interval pools to itself") {
  PanelDataset ds;
  ds.tables = {testing::table_dt1()};
  const auto report = goodness_of_fit(testing::reference_theta(), ds, 0.05);
  CHECK(report.pooled_chi_sq ==
        doctest::Approx(report.per_interval[0].chi_sq).epsilon(1e-15));
  CHECK(report.pooled_df == 9);
}

TEST_CASE("statistics are nonnegative and vanish only at equality") {
  ThetaSampler sampler(103);
  for (int i = 0; i < 100; ++i) {
    const auto th = sampler.draw();
    const auto e = expected_table(th, testing::table_dt1());
    const auto [chi, df] = chi_square_interval(testing::table_dt1(), e);
    CHECK(chi >= 0.0);
  }
}

TEST_CASE("chi-square quantiles against reference values") {
  CHECK(std::abs(chi_square_quantile(0.95, 27) - 40.113272069413625) < 1e-8);
  CHECK(std::abs(chi_square_quantile(0.95, 9) - 16.918977604620448) < 1e-8);
  CHECK(std::abs(chi_square_quantile(0.99, 5) - 15.08627246938899) < 1e-8);
  CHECK(chi_square_quantile(0.0, 5) == 0.0);
}

TEST_CASE("quantile inverts the incomplete-gamma CDF") {
  for (int df : {1, 3, 9, 27, 60}) {
    for (double p : {0.05, 0.5, 0.9, 0.95, 0.99}) {
      const double x = chi_square_quantile(p, df);
      CHECK(std::abs(regularized_gamma_p(df / 2.0, x / 2.0) - p) < 1e-9);
    }
  }
}

TEST_CASE("observed tables rounded from expectations score near zero") {
  const auto th = testing::reference_theta();
  TransitionCountTable synthetic;
  synthetic.delta_t = 1;
  TransitionCountTable base;
  base.delta_t = 1;
  base.counts << 600, 0, 0, 0,
                 300, 0, 0, 0,
                 0, 0, 0, 0,
                 0, 0, 0, 0;
  const auto e = expected_table(th, base);
  double min_e = 1e300;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 4; ++j) {
      synthetic.counts(i, j) = std::llround(e(i, j));
      min_e = std::min(min_e, e(i, j));
    }
  // Same margins up to rounding; statistic bounded by the rounding error.
  const auto e2 = expected_table(th, synthetic);
  const auto [chi, df] = chi_square_interval(synthetic, e2);
  CHECK(chi < 8.0 * 0.5 * 0.5 / min_e + 0.1);
}
