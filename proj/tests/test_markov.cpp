#include <doctest.h>

#include <ctbn/errors.hpp>
#include <ctbn/markov.hpp>

#include "test_util.hpp"

#include <cmath>
#include <random>

using namespace ctbn;
using namespace ctbn::testutil;

namespace {

StateIndexer pressure_states() {
  return StateIndexer{{VariableSpec{"Pressure", {"falling", "steady", "rising"}}}};
}

IntensityMatrix barometric() {
  Matrix q(3, 3);
  q << -0.21, 0.2, 0.01,
        0.05, -0.1, 0.05,
        0.01, 0.2, -0.21;
  return validate_intensity(q, pressure_states());
}

} // namespace

TEST_CASE("validate_intensity rejects malformed entries") {
  StateIndexer two{{VariableSpec{"X", {"x1", "x2"}}}};
  Matrix neg(2, 2);
  neg << -1, -1, 2, -2;
  CHECK_THROWS_AS(validate_intensity(neg, two), ValidationError);
  Matrix bad_sum(2, 2);
  bad_sum << -1, 2, 2, -2;
  CHECK_THROWS_AS(validate_intensity(bad_sum, two), ValidationError);
  Matrix pos_diag(2, 2);
  pos_diag << 1, -1, 2, -2;
  CHECK_THROWS_AS(validate_intensity(pos_diag, two), ValidationError);
}

TEST_CASE("transient_distribution matches the two-state closed form") {
  StateIndexer two{{VariableSpec{"X", {"x1", "x2"}}}};
  Matrix m(2, 2);
  m << -2, 2, 3, -3;
  auto q = validate_intensity(m, two);
  RowVector p0(2);
  p0 << 1, 0;
  for (double t : {0.1, 1.0, 10.0}) {
    RowVector p = transient_distribution(p0, q, t);
    const double decay = std::exp(-5.0 * t);
    CHECK(p(0) == doctest::Approx((3 + 2 * decay) / 5).epsilon(1e-12));
    CHECK(p(1) == doctest::Approx((2 - 2 * decay) / 5).epsilon(1e-12));
  }
}

TEST_CASE("joint_two_time is consistent with both marginals") {
  auto q = barometric();
  RowVector p0(3);
  p0 << 0.2, 0.3, 0.5;
  Matrix joint = joint_two_time(p0, q, 0.5, 2.0);
  RowVector at_s = transient_distribution(p0, q, 0.5);
  RowVector at_t = transient_distribution(p0, q, 2.0);
  for (int i = 0; i < 3; ++i)
    CHECK(joint.row(i).sum() == doctest::Approx(at_s(i)).epsilon(1e-10));
  for (int j = 0; j < 3; ++j)
    CHECK(joint.col(j).sum() == doctest::Approx(at_t(j)).epsilon(1e-10));
  CHECK_THROWS_AS(joint_two_time(p0, q, 2.0, 0.5), ValidationError);
}

TEST_CASE("embedded decomposition of the barometric process") {
  auto q = barometric();
  auto dec = embedded_decomposition(q);
  CHECK(dec.holding(0, 0) == doctest::Approx(0.21).epsilon(1e-12));
  CHECK(dec.holding(1, 1) == doctest::Approx(0.10).epsilon(1e-12));
  CHECK(dec.holding(2, 2) == doctest::Approx(0.21).epsilon(1e-12));
  // jump rows are q_ij / q_i with zero diagonal
  CHECK(dec.jumps(0, 1) == doctest::Approx(20.0 / 21.0).epsilon(1e-12));
  CHECK(dec.jumps(0, 2) == doctest::Approx(1.0 / 21.0).epsilon(1e-12));
  CHECK(dec.jumps(1, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(dec.jumps(1, 2) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(dec.jumps(2, 0) == doctest::Approx(1.0 / 21.0).epsilon(1e-12));
  CHECK(dec.jumps(2, 1) == doctest::Approx(20.0 / 21.0).epsilon(1e-12));
  for (int i = 0; i < 3; ++i) {
    CHECK(dec.jumps(i, i) == 0.0);
    CHECK(dec.jumps.row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
  }
  // reconstruction Q = M (P_E - I)
  Matrix rebuilt = dec.holding * (dec.jumps - Matrix::Identity(3, 3));
  CHECK((rebuilt - q.q).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("embedded decomposition rejects absorbing states") {
  StateIndexer two{{VariableSpec{"X", {"x1", "x2"}}}};
  Matrix m(2, 2);
  m << -1, 1, 0, 0;
  auto q = validate_intensity(m, two);
  CHECK_THROWS_AS(embedded_decomposition(q), ValidationError);
}

TEST_CASE("subsystem extraction for steady-or-rising pressure") {
  auto q = barometric();
  auto sub = extract_subsystem(q, {1, 2});
  Matrix want(2, 2);
  want << -0.1, 0.05, 0.2, -0.21;
  CHECK((sub.u - want).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("phase distribution and expected holding time") {
  auto q = barometric();
  auto sub = extract_subsystem(q, {1, 2});
  RowVector entrance(2);
  entrance << 0.5, 0.5;
  CHECK(phase_cdf(entrance, sub, 0.0) == doctest::Approx(0.0).epsilon(1e-12));
  double prev = 0.0;
  for (double t = 1.0; t <= 200.0; t += 1.0) {
    double f = phase_cdf(entrance, sub, t);
    CHECK(f >= prev - 1e-12);
    CHECK(f <= 1.0);
    prev = f;
  }
  CHECK(prev > 0.99);
  // P0 (-U)^-1 e by hand: det(-U) = .021 - .01 = .011
  CHECK(expected_holding_time(entrance, sub) ==
        doctest::Approx(0.5 * (0.26 + 0.30) / 0.011).epsilon(1e-10));
}

TEST_CASE("exit distribution of the z1 block of a two-variable chain") {
  StateIndexer zy{{VariableSpec{"Z", {"z1", "z2"}}, VariableSpec{"Y", {"y1", "y2"}}}};
  Matrix m(4, 4);
  m << -4, 1, 3, 0,
        2, -7, 0, 5,
       15, 0, -16, 1,
        0, 4, 2, -6;
  auto q = validate_intensity(m, zy);
  RowVector entrance(2);
  entrance << 0.5, 0.5;
  RowVector exit = exit_distribution(entrance, q, {0, 1});
  // hand solve: (-U)^-1 = [[7,1],[2,4]]/26, R = diag(3,5)
  CHECK(exit(0) == doctest::Approx(13.5 / 26.0).epsilon(1e-10));
  CHECK(exit(1) == doctest::Approx(12.5 / 26.0).epsilon(1e-10));
  CHECK(exit.sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("complement_states preserves parent order") {
  auto comp = complement_states(pressure_states(), {1});
  CHECK(comp == std::vector<std::size_t>{0, 2});
}
