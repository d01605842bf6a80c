#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ising/gibbs.hpp"
#include "ising/rng.hpp"

using namespace ising;
using Catch::Approx;

TEST_CASE("two-state box oracle") {
  Box b(1);
  // plus boundary: H(+) = -4, H(-) = +4
  for (double beta : {0.0, 0.5, 1.3}) {
    GibbsTable t(b, make_plus_boundary(b), beta);
    CHECK(t.num_states() == 2);
    CHECK(t.probability(1) == Approx(std::exp(4 * beta) /
                                     (std::exp(4 * beta) + std::exp(-4 * beta))));
    CHECK(t.probability(0) + t.probability(1) == Approx(1.0).margin(1e-12));
    CHECK(t.center_spin_expectation() == Approx(std::tanh(4 * beta)));
    CHECK(center_sign(t) == +1);
  }
  // free boundary: exact tie resolves to +1
  GibbsTable tf(b, make_free_boundary(b), 1.0);
  CHECK(tf.center_spin_expectation() == Approx(0.0).margin(1e-15));
  CHECK(center_sign(tf) == +1);
  GibbsTable tm(b, make_minus_boundary(b), 0.7);
  CHECK(center_sign(tm) == -1);
}

TEST_CASE("infinite-temperature table is uniform") {
  for (int l : {1, 2, 3}) {
    Box b(l);
    GibbsTable t(b, make_iid_boundary(b, 0.2, 3), 0.0);
    CHECK(t.log_partition() == Approx(l * l * std::log(2.0)));
    CHECK(t.probability(0) == Approx(std::pow(2.0, -l * l)));
    int c = b.index_of(Site{0, 0});
    double p = t.event_probability(
        [c](std::uint64_t s) { return ((s >> c) & 1u) != 0; });
    CHECK(p == Approx(0.5).margin(1e-12));
  }
}

TEST_CASE("probabilities normalize and match direct energies") {
  Philox gen(31, 0);
  for (int l : {2, 3}) {
    Box b(l);
    std::vector<double> vals(4 * l);
    for (double& v : vals) v = gen.uniform(-1.0, 1.0);
    BoundaryCondition omega(b, vals);
    double beta = 1.2;
    GibbsTable t(b, omega, beta);
    double total = 0.0;
    for (std::uint64_t s = 0; s < t.num_states(); ++s) {
      total += t.probability(s);
      Configuration sigma(b, s);
      CHECK(t.log_weight(s) == Approx(-beta * energy(sigma, omega)).margin(1e-10));
    }
    CHECK(total == Approx(1.0).margin(1e-10));
  }
}

TEST_CASE("free-boundary measure is globally flip symmetric") {
  Box b(2);
  GibbsTable t(b, make_free_boundary(b), 0.9);
  for (std::uint64_t s = 0; s < 16; ++s)
    CHECK(t.probability(s) == Approx(t.probability(~s & 0xFu)).margin(1e-14));
}

TEST_CASE("flipping spins and boundary together preserves the measure") {
  Philox gen(8, 0);
  Box b(3);
  std::vector<double> vals(12);
  for (double& v : vals) v = gen.uniform(-1.0, 1.0);
  BoundaryCondition omega(b, vals);
  GibbsTable t1(b, omega, 1.4);
  GibbsTable t2(b, omega.negated(), 1.4);
  std::uint64_t mask = (1u << 9) - 1;
  for (std::uint64_t s = 0; s < t1.num_states(); ++s)
    CHECK(t1.probability(s) == Approx(t2.probability(~s & mask)).margin(1e-12));
  CHECK(t1.log_partition() == Approx(t2.log_partition()).margin(1e-10));
}

TEST_CASE("log-partition derivative equals minus the mean energy") {
  Philox gen(12, 0);
  for (int l : {2, 3}) {
    Box b(l);
    std::vector<double> vals(4 * l);
    for (double& v : vals) v = gen.uniform(-1.0, 1.0);
    BoundaryCondition omega(b, vals);
    double beta = 0.8, h = 1e-4;
    GibbsTable lo(b, omega, beta - h), mid(b, omega, beta), hi2(b, omega, beta + h);
    double fd = (hi2.log_partition() - lo.log_partition()) / (2 * h);
    CHECK(fd == Approx(-mid.energy_expectation()).margin(1e-5));
  }
}

TEST_CASE("large couplings stay finite in the log domain") {
  Box b(3);
  GibbsTable t(b, make_plus_boundary(b), 5.0);
  CHECK(std::isfinite(t.log_partition()));
  // the aligned state dominates: H = -(12 + 12), weight exp(120)
  CHECK(t.log_weight((1u << 9) - 1) == Approx(120.0));
  CHECK(t.probability((1u << 9) - 1) == Approx(1.0).margin(1e-6));
  for (std::uint64_t s = 0; s < t.num_states(); ++s) {
    CHECK(std::isfinite(t.log_weight(s)));
    CHECK(t.probability(s) >= 0.0);
    CHECK(t.probability(s) <= 1.0);
  }
}

TEST_CASE("enumeration guard") {
  CHECK_THROWS_AS(GibbsTable(Box(6), make_free_boundary(Box(6)), 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(GibbsTable(Box(2), make_free_boundary(Box(2)), -0.5),
                  std::invalid_argument);
}
