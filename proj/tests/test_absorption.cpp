#include <doctest.h>

#include <cmath>

#include "ctmc4/absorption.hpp"
#include "ctmc4/simulate.hpp"
#include "support.hpp"

using namespace ctmc4;
using ctmc4::testing::ThetaSampler;

TEST_CASE("generator partition of the reference fit") {
  const auto [b, a] = partition_generator(testing::reference_theta());
  Eigen::Matrix2d eb, ea;
  eb << -.31365, .2908, .02805, -.30365;
  ea << 0, .02285, .2076, .068;
  CHECK((b - eb).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((a - ea).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("zero rates partition to zero blocks") {
  const auto [b, a] = partition_generator(RateVector{});
  CHECK(b.isZero(0.0));
  CHECK(a.isZero(0.0));
}

TEST_CASE("partition rows cancel (generator row sums)") {
  ThetaSampler sampler(79);
  for (int i = 0; i < 200; ++i) {
    const auto [b, a] = partition_generator(sampler.draw());
    const Eigen::Vector2d sums = b.rowwise().sum() + a.rowwise().sum();
    CHECK(sums.cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("Z matrix of the reference fit") {
  const auto z = z_matrix(testing::reference_theta());
  Eigen::Matrix2d expected;
  expected << -.69325, -.30675, -.74772, -.25228;
  CHECK((z - expected).cwiseAbs().maxCoeff() < 5e-4);
}

TEST_CASE("single absorbing destination concentrates Z") {
  const RateVector th{0.4, 0.0, 0.1, 0.3, 0.0};
  const auto z = z_matrix(th);
  CHECK(std::abs(z(0, 0) + 1.0) < 1e-12);
  CHECK(std::abs(z(1, 0) + 1.0) < 1e-12);
  CHECK(std::abs(z(0, 1)) < 1e-12);
  CHECK(std::abs(z(1, 1)) < 1e-12);
}

TEST_CASE("Z rows sum to minus one") {
  ThetaSampler sampler(83);
  for (int i = 0; i < 300; ++i) {
    const auto z = z_matrix(sampler.draw());
    CHECK(std::abs(z.row(0).sum() + 1.0) < 1e-10);
    CHECK(std::abs(z.row(1).sum() + 1.0) < 1e-10);
  }
}

TEST_CASE("minus Z matches simulated absorption frequencies") {
  const auto th = testing::reference_theta();
  const Eigen::Matrix2d probs = -z_matrix(th);
  const int n = 100000;
  for (int start = 1; start <= 2; ++start) {
    int hit3 = 0, hit4 = 0;
    for (int i = 0; i < n; ++i) {
      const auto traj =
          sample_path(th, start, 2000.0, 123, static_cast<std::uint64_t>(i));
      const int last = traj.jumps.back().second;
      if (last == 3) ++hit3;
      if (last == 4) ++hit4;
    }
    CHECK(hit3 + hit4 == n);  // horizon far beyond every absorption time
    const double f3 = static_cast<double>(hit3) / n;
    const double p3 = probs(start - 1, 0);
    const double band = 3.0 * std::sqrt(p3 * (1.0 - p3) / n);
    CHECK(std::abs(f3 - p3) < band);
  }
}

TEST_CASE("expected absorption times of the reference fit") {
  const auto e = expected_absorption_times(testing::reference_theta());
  Eigen::Matrix2d expected;
  expected << 4.9142, 1.9121, 2.9164, 1.0074;
  CHECK((e - expected).cwiseAbs().maxCoeff() < 5e-3);
}

TEST_CASE("transient-block inverse behind the absorption times") {
  const auto s = absorption_summary(testing::reference_theta());
  const Eigen::Matrix2d binv = s.b.inverse();
  // (2,1) is -mu21/det(B); the other entries match the worked fixture.
  CHECK(std::abs(binv(0, 0) + 3.48691) < 5e-4);
  CHECK(std::abs(binv(0, 1) + 3.33935) < 5e-4);
  CHECK(std::abs(binv(1, 0) + 0.32211) < 5e-4);
  CHECK(std::abs(binv(1, 1) + 3.60174) < 5e-4);
  CHECK((binv * s.z - s.etau).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("closed forms agree with the matrix route") {
  const auto th = testing::reference_theta();
  CHECK((closed_form_etau(th) - expected_absorption_times(th))
            .cwiseAbs().maxCoeff() < 1e-8);
  CHECK(std::abs(closed_form_etau(th)(0, 0) - 4.914) < 1e-3);

  ThetaSampler sampler(89);
  for (int i = 0; i < 300; ++i) {
    const auto draw = sampler.draw();
    const auto a = expected_absorption_times(draw);
    const auto b = closed_form_etau(draw);
    CHECK((a - b).cwiseAbs().maxCoeff() <=
          1e-8 * std::max(1.0, a.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("symmetric toy rates validate the closed forms") {
  const RateVector th{1.0, 1.0, 0.0, 1.0, 1.0};
  const auto e = expected_absorption_times(th);
  const double g1 = th.gamma1(), g2 = th.gamma2();
  const double det = g1 * g2 - th.mu21 * th.lambda12;
  CHECK(std::abs(e(0, 0) - th.lambda12 * th.lambda23 * (g1 + g2) / (det * det))
        < 1e-12);
  CHECK((e - closed_form_etau(th)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("unreachable absorbing state zeroes its column") {
  const RateVector th{0.4, 0.1, 0.1, 0.0, 0.3};  // lambda23 = 0
  const auto e = closed_form_etau(th);
  CHECK(e(0, 0) == 0.0);
  CHECK(e(1, 0) == 0.0);
  CHECK(e(0, 1) > 0.0);
}

TEST_CASE("absorption times are positive when both exits are reachable") {
  ThetaSampler sampler(97);
  for (int i = 0; i < 300; ++i) {
    const auto th = sampler.draw();
    const auto e = expected_absorption_times(th);
    CHECK(e.minCoeff() > 0.0);
  }
}

TEST_CASE("degenerate transient block is rejected") {
  // mu21 * lambda12 = gamma1 * gamma2 when nothing flows to states 3-4.
  const RateVector th{1.0, 0.0, 1.0, 0.0, 0.0};
  CHECK_THROWS_AS(z_matrix(th), degeneracy_error);
  CHECK_THROWS_AS(expected_absorption_times(th), degeneracy_error);
  CHECK_THROWS_AS(closed_form_etau(th), degeneracy_error);
}

TEST_CASE("summary bundles consistent blocks") {
  const auto s = absorption_summary(testing::reference_theta());
  CHECK((s.b.inverse() * s.a_block - s.z).cwiseAbs().maxCoeff() < 1e-12);
  const Eigen::Matrix2d probs = s.absorption_probabilities();
  CHECK(std::abs(probs.row(0).sum() - 1.0) < 1e-9);
  CHECK(std::abs(probs.row(1).sum() - 1.0) < 1e-9);
  CHECK(probs.minCoeff() >= 0.0);
}
