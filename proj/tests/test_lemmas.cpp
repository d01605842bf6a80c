#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <vector>

#include "ising/lemma_checks.hpp"

using namespace ising;

TEST_CASE("interval energy rate frozen values") {
  // c1 = delta(1-delta)/2, rate = c1/(c1+8)
  REQUIRE_THAT(interval_energy_rate(0.5),
               Catch::Matchers::WithinAbs(0.125 / 8.125, 1e-15));
  REQUIRE_THAT(interval_energy_rate(0.9),
               Catch::Matchers::WithinAbs(0.045 / 8.045, 1e-15));
  REQUIRE(interval_energy_rate(0.0) == 0.0);
  // maximized at delta = 1/2
  REQUIRE(interval_energy_rate(0.5) > interval_energy_rate(0.3));
  REQUIRE(interval_energy_rate(0.5) > interval_energy_rate(0.7));
}

TEST_CASE("covering interval") {
  REQUIRE(covering_interval(12, {}).length == 0);
  BoundaryInterval one = covering_interval(12, {3});
  REQUIRE(one.start == 3);
  REQUIRE(one.length == 1);
  BoundaryInterval wrap = covering_interval(12, {10, 11, 0, 1});
  REQUIRE(wrap.start == 10);
  REQUIRE(wrap.length == 4);
  BoundaryInterval tie = covering_interval(12, {0, 6});
  REQUIRE(tie.start == 6);
  REQUIRE(tie.length == 7);
  BoundaryInterval run = covering_interval(16, {2, 3, 4, 7});
  REQUIRE(run.start == 2);
  REQUIRE(run.length == 6);
}

TEST_CASE("single side bound on a planted edge cell") {
  Box box(5);
  Site cell{2, 0};  // middle of the right edge
  std::uint64_t bits = std::uint64_t{1} << box.index_of(cell);
  Configuration sigma(box, bits);
  BoundaryCondition omega = make_plus_boundary(box);
  Contour gamma = contour_from_theta(box, std::set<Site>{cell});
  REQUIRE(sides_touched(box, gamma) == std::set<BoxSide>{BoxSide::right});

  InequalityReport rep = check_single_side(sigma, omega, +1, gamma);
  REQUIRE(rep.hypotheses);
  REQUIRE(rep.holds);
  REQUIRE(rep.lhs == 4.0);  // 2*3 interior bonds - 2*omega at the one ring site
  REQUIRE(rep.rhs == 2.0);  // two horizontal dual bonds

  // wrong spin sign: not a contour at sigma for eps = -1... the minus
  // cluster is everything else, so this gamma is not among its contours
  REQUIRE(!check_single_side(sigma, omega, -1, gamma).hypotheses);
  // two-side contour fails the hypothesis
  Site corner{2, 2};
  Configuration sigma2(box, std::uint64_t{1} << box.index_of(corner));
  Contour g2 = contour_from_theta(box, std::set<Site>{corner});
  REQUIRE(!check_single_side(sigma2, omega, +1, g2).hypotheses);
}

TEST_CASE("origin contour bound on a planted center cell") {
  Box box(5);
  Configuration sigma(box, std::uint64_t{1} << box.index_of(Site{0, 0}));
  BoundaryCondition omega = make_minus_boundary(box);
  Contour gamma = contour_from_theta(box, std::set<Site>{Site{0, 0}});
  InequalityReport rep = check_origin_contour(sigma, omega, +1, gamma);
  REQUIRE(rep.hypotheses);
  REQUIRE(rep.holds);
  REQUIRE(rep.lhs == 8.0);
  REQUIRE_THAT(rep.rhs, Catch::Matchers::WithinAbs(8.0 / 9.0, 1e-12));
}

TEST_CASE("noncrossing energy bounds on sampled contours") {
  Philox rng(2024, 0);
  int tested = 0;
  for (int l : {3, 4, 5, 6}) {
    Box box(l);
    for (int trial = 0; trial < 150; ++trial) {
      auto inst = sample_noncrossing_instance(box, rng);
      if (!inst) continue;
      NoncrossingEnergyReport rep = check_noncrossing_energy(
          inst->sigma, inst->omega, inst->eps, inst->gamma);
      REQUIRE(rep.hypotheses);
      REQUIRE(rep.interior_share);
      REQUIRE(rep.energy_bound);
      REQUIRE(rep.arc_bound);
      REQUIRE(rep.arc_nonneg);
      ++tested;
    }
  }
  REQUIRE(tested > 300);
}

TEST_CASE("noncrossing checker rejects bad instances") {
  Box box(3);
  Configuration sigma = Configuration::all_plus(box);
  BoundaryCondition omega = make_free_boundary(box);
  // the full-box contour is crossing
  Contour whole = epsilon_contours_at(sigma, +1)[0];
  REQUIRE(!check_noncrossing_energy(sigma, omega, +1, whole).hypotheses);
  // a contour that is not present at sigma
  Contour unit = contour_from_theta(box, std::set<Site>{Site{0, 0}});
  REQUIRE(!check_noncrossing_energy(sigma, omega, +1, unit).hypotheses);
}

TEST_CASE("single side bound on sampled contours") {
  Philox rng(31337, 0);
  int tested = 0;
  for (int l : {3, 4, 5, 6}) {
    Box box(l);
    for (int trial = 0; trial < 150; ++trial) {
      auto inst = sample_single_side_instance(box, rng);
      if (!inst) continue;
      InequalityReport rep =
          check_single_side(inst->sigma, inst->omega, inst->eps, inst->gamma);
      REQUIRE(rep.hypotheses);
      REQUIRE(rep.holds);
      ++tested;
    }
  }
  REQUIRE(tested > 200);
}

TEST_CASE("origin contour bound on sampled blobs") {
  Philox rng(424242, 0);
  int tested = 0;
  for (int l : {4, 5, 6}) {
    Box box(l);
    for (int trial = 0; trial < 200; ++trial) {
      auto inst = sample_origin_instance(box, rng);
      if (!inst) continue;
      InequalityReport rep = check_origin_contour(inst->sigma, inst->omega,
                                                  inst->eps, inst->gamma);
      REQUIRE(rep.hypotheses);
      REQUIRE(rep.holds);
      ++tested;
    }
  }
  REQUIRE(tested > 300);
}

TEST_CASE("scaled perimeter bound on sampled families") {
  Philox rng(5551212, 0);
  int tested = 0, tight = 0;
  for (int l : {3, 4, 5, 6}) {
    Box box(l);
    for (int trial = 0; trial < 150; ++trial) {
      auto inst = sample_scaled_instance(box, rng);
      if (!inst) continue;
      InequalityReport rep = check_scaled_perimeter(
          inst->sigma, inst->omega, inst->eps, inst->gammas, inst->c1,
          inst->c2);
      REQUIRE(rep.hypotheses);
      REQUIRE(rep.holds);
      ++tested;
      double half_dh = 0.5 * delta_H(inst->sigma, inst->omega, inst->gammas);
      if (half_dh <= inst->c1 * l - inst->c2 + 1e-9) ++tight;
    }
  }
  REQUIRE(tested > 300);
  REQUIRE(tight > tested / 3);  // the sampler stresses the tight case
}

TEST_CASE("scaled perimeter checker rejects a violated hypothesis") {
  Box box(4);
  Configuration sigma = Configuration::all_minus(box);
  sigma.flip(box.index_of(Site{0, 0}));
  BoundaryCondition omega = make_free_boundary(box);
  auto gammas = epsilon_contours_at(sigma, +1);
  REQUIRE(gammas.size() == 1);
  // half dH = 4; demanding c1*l - c2 = 100 breaks the precondition
  REQUIRE(!check_scaled_perimeter(sigma, omega, +1, gammas, 25.0, 0.0)
               .hypotheses);
}

TEST_CASE("interval energy bound on sampled families") {
  Philox rng(8675309, 0);
  int tested = 0;
  for (int l : {4, 5, 6}) {
    Box box(l);
    std::vector<BoundaryCondition> boundaries{make_alternating_boundary(box),
                                              make_free_boundary(box)};
    for (int seed = 0; seed < 6; ++seed) {
      BoundaryCondition iid = make_iid_boundary(box, 0.0, 900 + seed);
      if (validate_w2(iid, 0.5).passes) boundaries.push_back(iid);
    }
    for (double delta_w2 : {0.4, 0.5, 0.6}) {
      for (const BoundaryCondition& omega : boundaries) {
        if (!validate_w2(omega, delta_w2).passes) continue;
        for (int trial = 0; trial < 40; ++trial) {
          auto inst = sample_interval_instance(box, rng, delta_w2, omega);
          if (!inst) continue;
          InequalityReport rep = check_interval_energy(
              inst->sigma, inst->omega, inst->eps, inst->gammas,
              inst->delta_w2, inst->interval, inst->c);
          REQUIRE(rep.hypotheses);
          REQUIRE(rep.holds);
          ++tested;
        }
      }
    }
  }
  REQUIRE(tested > 200);
}

TEST_CASE("interval checker rejects an uncovered family") {
  Box box(4);
  // plant a corner cluster; its exterior sites are not inside a short
  // interval on the opposite side
  Site corner{2, 2};
  Configuration sigma(box, std::uint64_t{1} << box.index_of(corner));
  BoundaryCondition omega = make_alternating_boundary(box);
  auto gammas = epsilon_contours_at(sigma, +1);
  REQUIRE(gammas.size() == 1);
  BoundaryInterval far{0, 3};  // starts at the bottom-left exterior corner
  REQUIRE(!check_interval_energy(sigma, omega, +1, gammas, 0.5, far, 0.0)
               .hypotheses);
}
