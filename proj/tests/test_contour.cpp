#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <sstream>
#include <vector>

#include "ising/contour.hpp"
#include "ising/rng.hpp"

using namespace ising;

namespace {

Configuration random_config(const Box& box, Philox& rng) {
  std::uint64_t bits = rng();
  if (box.size() < 64) bits &= (std::uint64_t{1} << box.size()) - 1;
  return Configuration(box, bits);
}

// boundary values that are exact multiples of 1/64
BoundaryCondition random_dyadic_boundary(const Box& box, Philox& rng) {
  std::vector<double> vals;
  for (int i = 0; i < 4 * box.side(); ++i)
    vals.push_back(static_cast<double>(static_cast<int>(rng() % 129) - 64) /
                   64.0);
  return BoundaryCondition(box, std::move(vals));
}

BoundaryCondition random_boundary(const Box& box, Philox& rng) {
  std::vector<double> vals;
  for (int i = 0; i < 4 * box.side(); ++i) vals.push_back(rng.uniform(-1, 1));
  return BoundaryCondition(box, std::move(vals));
}

std::set<Site> cells(std::initializer_list<Site> s) { return std::set<Site>(s); }

// independent census: connected hole-free cell sets whose boundary has
// length m and contains the given dual bond, enumerated by subset growth
bool oracle_hole_free(const std::set<Site>& theta) {
  int xmin = theta.begin()->x, xmax = xmin, ymin = theta.begin()->y, ymax = ymin;
  for (Site s : theta) {
    xmin = std::min(xmin, s.x);
    xmax = std::max(xmax, s.x);
    ymin = std::min(ymin, s.y);
    ymax = std::max(ymax, s.y);
  }
  --xmin, --ymin, ++xmax, ++ymax;
  std::set<Site> seen;
  std::vector<Site> frontier{Site{xmin, ymin}};
  seen.insert(Site{xmin, ymin});
  while (!frontier.empty()) {
    Site c = frontier.back();
    frontier.pop_back();
    for (Site d : kNeighborSteps) {
      Site t{c.x + d.x, c.y + d.y};
      if (t.x < xmin || t.x > xmax || t.y < ymin || t.y > ymax) continue;
      if (theta.count(t) || seen.count(t)) continue;
      seen.insert(t);
      frontier.push_back(t);
    }
  }
  std::size_t bbox = static_cast<std::size_t>(xmax - xmin + 1) *
                     static_cast<std::size_t>(ymax - ymin + 1);
  return seen.size() + theta.size() == bbox;
}

long long census_by_cells(const DualBond& d, int m) {
  Site A = d.bond.a, B = d.bond.b;
  // boundary length m forces bbox half-perimeter <= m/2, so the cell count
  // is at most floor(m/4)*ceil(m/4)
  int nmax = std::max(1, (m / 4) * ((m + 3) / 4));
  std::set<std::set<Site>> seen;
  std::vector<std::set<Site>> frontier;
  for (Site root : {A, B}) {
    std::set<Site> s{root};
    if (seen.insert(s).second) frontier.push_back(s);
  }
  long long count = 0;
  while (!frontier.empty()) {
    std::set<Site> cur = frontier.back();
    frontier.pop_back();
    bool a_in = cur.count(A) > 0, b_in = cur.count(B) > 0;
    if (a_in != b_in && oracle_hole_free(cur) &&
        static_cast<int>(boundary_dual_bonds(cur).size()) == m)
      ++count;
    if (static_cast<int>(cur.size()) < nmax)
      for (Site s : cur)
        for (Site step : kNeighborSteps) {
          Site t{s.x + step.x, s.y + step.y};
          if (cur.count(t) || l1_dist(t, A) > m) continue;
          std::set<Site> nxt = cur;
          nxt.insert(t);
          if (seen.insert(nxt).second) frontier.push_back(nxt);
        }
  }
  return count;
}

// reference trap test built from the site-set primitives
bool in_trap_reference(const TrapEvent& ev, const Configuration& sigma) {
  double threshold = 2.0 * ev.delta_1 * ev.box.side() - 1e-9;
  for (auto& cluster : spin_clusters(sigma, ev.epsilon)) {
    bool edge = false;
    for (Site s : cluster)
      edge |= (s.x == ev.box.lo() || s.x == ev.box.hi() ||
               s.y == ev.box.lo() || s.y == ev.box.hi());
    if (!edge) continue;
    std::set<Site> filled =
        fill_holes(ev.box, std::set<Site>(cluster.begin(), cluster.end()));
    if (static_cast<double>(boundary_dual_bonds(filled).size()) >= threshold)
      return true;
  }
  return false;
}

}  // namespace

TEST_CASE("unit contour around a single cell") {
  Box box(3);
  Contour g = contour_from_theta(box, cells({Site{0, 0}}));
  REQUIRE(g.length() == 4);
  REQUIRE(g.theta == std::vector<Site>{Site{0, 0}});
  std::vector<DualBond> expect{
      DualBond(Site{-1, 0}, Site{0, 0}), DualBond(Site{0, -1}, Site{0, 0}),
      DualBond(Site{0, 0}, Site{0, 1}), DualBond(Site{0, 0}, Site{1, 0})};
  std::sort(expect.begin(), expect.end());
  REQUIRE(g.bonds == expect);
}

TEST_CASE("contour_from_theta validates its cell set") {
  Box box(3);
  REQUIRE_THROWS_AS(contour_from_theta(box, cells({})), std::invalid_argument);
  REQUIRE_THROWS_AS(contour_from_theta(box, cells({Site{-1, -1}, Site{1, 1}})),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(contour_from_theta(box, cells({Site{0, 0}, Site{2, 2}})),
                    std::invalid_argument);
  // ring of eight cells: complement has an island at the center
  std::set<Site> ring;
  for (Site s : box.sites())
    if (!(s == Site{0, 0})) ring.insert(s);
  REQUIRE_THROWS_AS(contour_from_theta(box, ring), std::invalid_argument);
  REQUIRE(fill_holes(box, ring).size() == 9);
  // C-shape: gap on the edge keeps the center connected to the outside
  std::set<Site> cshape = ring;
  cshape.erase(Site{1, 0});
  REQUIRE(fill_holes(box, cshape) == cshape);
  REQUIRE_NOTHROW(contour_from_theta(box, cshape));
}

TEST_CASE("spin clusters partition the matching spins") {
  Box box(3);
  // checkerboard: five isolated plus cells, four isolated minus cells
  std::uint64_t bits = 0;
  for (int i = 0; i < box.size(); ++i) {
    Site s = box.site_at(i);
    if (((s.x + s.y) % 2 + 2) % 2 == 0) bits |= std::uint64_t{1} << i;
  }
  Configuration sigma(box, bits);
  auto plus = spin_clusters(sigma, +1);
  auto minus = spin_clusters(sigma, -1);
  REQUIRE(plus.size() == 5);
  REQUIRE(minus.size() == 4);
  for (auto& c : plus) REQUIRE(c.size() == 1);
  for (auto& c : minus) REQUIRE(c.size() == 1);

  Philox rng(99, 0);
  for (int trial = 0; trial < 50; ++trial) {
    Configuration s = random_config(box, rng);
    for (int eps : {+1, -1}) {
      std::set<Site> covered;
      for (auto& c : spin_clusters(s, eps)) {
        REQUIRE(detail::cells_l1_connected(std::set<Site>(c.begin(), c.end())));
        for (Site x : c) {
          REQUIRE(s.spin_at(x) == eps);
          REQUIRE(!covered.count(x));
          covered.insert(x);
        }
      }
      for (int i = 0; i < box.size(); ++i)
        if (s.spin(i) == eps) REQUIRE(covered.count(box.site_at(i)));
    }
  }
}

TEST_CASE("outer contours fill cluster holes") {
  Box box(3);
  SECTION("uniform configuration") {
    auto plus = epsilon_contours_at(Configuration::all_plus(box), +1);
    REQUIRE(plus.size() == 1);
    REQUIRE(plus[0].length() == 12);
    REQUIRE(plus[0].theta.size() == 9);
    REQUIRE(epsilon_contours_at(Configuration::all_plus(box), -1).empty());
  }
  SECTION("minus island inside a plus ring") {
    Configuration sigma = Configuration::all_plus(box);
    sigma.flip(box.index_of(Site{0, 0}));
    auto plus = epsilon_contours_at(sigma, +1);
    REQUIRE(plus.size() == 1);
    REQUIRE(plus[0].length() == 12);    // outer circuit of the filled ring
    REQUIRE(plus[0].theta.size() == 9);  // hole filled
    auto minus = epsilon_contours_at(sigma, -1);
    REQUIRE(minus.size() == 1);
    REQUIRE(minus[0].length() == 4);
    REQUIRE(minus[0].theta == std::vector<Site>{Site{0, 0}});
    REQUIRE(is_epsilon_contour_at(sigma, -1, minus[0]));
    REQUIRE(!is_epsilon_contour_at(sigma, +1, minus[0]));
  }
}

TEST_CASE("flip map flips exactly the enclosed cells") {
  Box box(4);
  Philox rng(7, 0);
  for (int trial = 0; trial < 30; ++trial) {
    Configuration sigma = random_config(box, rng);
    for (int eps : {+1, -1})
      for (const Contour& g : epsilon_contours_at(sigma, eps)) {
        Configuration t = flip_map(sigma, g);
        std::set<Site> theta(g.theta.begin(), g.theta.end());
        for (int i = 0; i < box.size(); ++i) {
          Site s = box.site_at(i);
          if (theta.count(s))
            REQUIRE(t.spin(i) == -sigma.spin(i));
          else
            REQUIRE(t.spin(i) == sigma.spin(i));
        }
      }
  }
}

TEST_CASE("energy difference identity for a single contour") {
  Philox rng(21, 0);
  for (int l : {3, 4, 5}) {
    Box box(l);
    for (int trial = 0; trial < 60; ++trial) {
      Configuration sigma = random_config(box, rng);
      // dyadic boundary: both sides of the identity are exact dyadics
      BoundaryCondition omega = random_dyadic_boundary(box, rng);
      for (int eps : {+1, -1})
        for (const Contour& g : epsilon_contours_at(sigma, eps)) {
          double lhs = 0.5 * delta_H(sigma, omega, g);
          double field = 0.0;
          for (Site y : v_ex(box, g)) field += omega.at_site(y);
          double rhs =
              static_cast<double>(interior_part(box, g).size()) - eps * field;
          REQUIRE(lhs == rhs);
        }
      // arbitrary boundary: same identity up to rounding
      BoundaryCondition omega2 = random_boundary(box, rng);
      for (int eps : {+1, -1})
        for (const Contour& g : epsilon_contours_at(sigma, eps)) {
          double field = 0.0;
          for (Site y : v_ex(box, g)) field += omega2.at_site(y);
          REQUIRE_THAT(0.5 * delta_H(sigma, omega2, g),
                       Catch::Matchers::WithinAbs(
                           static_cast<double>(interior_part(box, g).size()) -
                               eps * field,
                           1e-9));
        }
    }
  }
}

TEST_CASE("sides touched and crossing classification") {
  Box box(3);
  // full column: meets top and bottom, vertically crossing
  Contour col = contour_from_theta(
      box, cells({Site{0, -1}, Site{0, 0}, Site{0, 1}}));
  REQUIRE(sides_touched(box, col) ==
          std::set<BoxSide>{BoxSide::top, BoxSide::bottom});
  REQUIRE(is_crossing(box, col));
  // full row: horizontally crossing
  Contour row = contour_from_theta(
      box, cells({Site{-1, 0}, Site{0, 0}, Site{1, 0}}));
  REQUIRE(sides_touched(box, row) ==
          std::set<BoxSide>{BoxSide::left, BoxSide::right});
  REQUIRE(is_crossing(box, row));
  // corner cell: two adjacent sides, not crossing
  Contour corner = contour_from_theta(box, cells({Site{1, 1}}));
  REQUIRE(sides_touched(box, corner) ==
          std::set<BoxSide>{BoxSide::right, BoxSide::top});
  REQUIRE(!is_crossing(box, corner));
  // center cell: interior contour
  Contour center = contour_from_theta(box, cells({Site{0, 0}}));
  REQUIRE(sides_touched(box, center).empty());
  REQUIRE(!is_crossing(box, center));
  // whole box is crossing both ways
  REQUIRE(is_crossing(box, epsilon_contours_at(Configuration::all_plus(box),
                                               +1)[0]));

  REQUIRE(v_ex(box, corner) == std::vector<Site>{Site{1, 2}, Site{2, 1}});
  REQUIRE(v_ex(box, center).empty());
}

TEST_CASE("decomposition of a corner contour") {
  Box box(3);
  Contour g = contour_from_theta(box, cells({Site{1, 1}}));
  Decomposition d = decompose_noncrossing(box, g);
  std::vector<DualBond> arc{DualBond(Site{0, 1}, Site{1, 1}),
                            DualBond(Site{1, 0}, Site{1, 1})};
  std::sort(arc.begin(), arc.end());
  REQUIRE(d.underline == arc);
  REQUIRE(d.theta_tilde == std::vector<Site>{Site{1, 1}});
  std::vector<DualBond> ring{DualBond(Site{1, 1}, Site{2, 1}),
                             DualBond(Site{1, 1}, Site{1, 2})};
  std::sort(ring.begin(), ring.end());
  REQUIRE(d.gamma_bar == ring);
  REQUIRE(d.interval == std::vector<Site>{Site{1, 2}, Site{2, 1}});
}

TEST_CASE("decomposition of an interior contour is degenerate") {
  Box box(3);
  Contour g = contour_from_theta(box, cells({Site{0, 0}}));
  Decomposition d = decompose_noncrossing(box, g);
  REQUIRE(d.underline == g.bonds);
  REQUIRE(d.theta_tilde == g.theta);
  REQUIRE(d.gamma_bar.empty());
  REQUIRE(d.interval.empty());
}

TEST_CASE("decomposition of a bottom domino") {
  Box box(3);
  Contour g = contour_from_theta(box, cells({Site{-1, -1}, Site{0, -1}}));
  REQUIRE(!is_crossing(box, g));
  Decomposition d = decompose_noncrossing(box, g);
  REQUIRE(d.underline.size() == 3);
  REQUIRE(d.gamma_bar.size() == 3);
  REQUIRE(d.interval ==
          std::vector<Site>{Site{-2, -1}, Site{-1, -2}, Site{0, -2}});
  REQUIRE(d.theta_tilde == g.theta);
}

TEST_CASE("decomposition of an arch encloses its pocket") {
  // arch over a pocket cell against the bottom wall: the dividing arc cuts
  // off the pocket too, so the ring part of the division is strictly larger
  // than the contour's own ring bonds
  Box box(4);
  Contour g = contour_from_theta(
      box, cells({Site{-1, -1}, Site{-1, 0}, Site{0, 0}, Site{1, 0},
                  Site{1, -1}}));
  REQUIRE(g.length() == 12);
  REQUIRE(ring_part(box, g).size() == 4);
  REQUIRE(!is_crossing(box, g));
  Decomposition d = decompose_noncrossing(box, g);
  REQUIRE(d.underline.size() == 5);
  std::set<Site> tt(d.theta_tilde.begin(), d.theta_tilde.end());
  REQUIRE(tt.size() == 6);
  REQUIRE(tt.count(Site{0, -1}) == 1);  // the pocket joins theta_tilde
  REQUIRE(d.gamma_bar.size() == 5);
  REQUIRE(d.interval == std::vector<Site>{Site{-2, -1}, Site{-2, 0},
                                          Site{-1, -2}, Site{0, -2},
                                          Site{1, -2}});
  // strict inclusion of the contour's ring bonds
  std::set<DualBond> bar(d.gamma_bar.begin(), d.gamma_bar.end());
  for (const DualBond& b : ring_part(box, g)) REQUIRE(bar.count(b) == 1);
  REQUIRE(bar.size() > ring_part(box, g).size());
}

TEST_CASE("decomposition rejects crossing contours") {
  Box box(3);
  Contour row = contour_from_theta(
      box, cells({Site{-1, 0}, Site{0, 0}, Site{1, 0}}));
  REQUIRE_THROWS_AS(decompose_noncrossing(box, row), std::invalid_argument);
  Box unit(1);
  Contour whole = contour_from_theta(unit, cells({Site{0, 0}}));
  REQUIRE_THROWS_AS(decompose_noncrossing(unit, whole), std::invalid_argument);
}

TEST_CASE("decomposition relations on random contours") {
  Philox rng(5150, 0);
  int tested = 0;
  for (int l : {4, 5, 6}) {
    Box box(l);
    for (int trial = 0; trial < 80; ++trial) {
      Configuration sigma = random_config(box, rng);
      for (int eps : {+1, -1})
        for (const Contour& g : epsilon_contours_at(sigma, eps)) {
          if (is_crossing(box, g)) continue;
          ++tested;
          Decomposition d = decompose_noncrossing(box, g);
          std::set<DualBond> gset(g.bonds.begin(), g.bonds.end());
          std::set<DualBond> bar(d.gamma_bar.begin(), d.gamma_bar.end());
          std::set<DualBond> arc(d.underline.begin(), d.underline.end());

          // the division's ring bonds contain the contour's own ring bonds
          for (const DualBond& b : ring_part(box, g))
            REQUIRE(bar.count(b) == 1);
          // exterior sites correspond one-to-one with division ring bonds,
          // and the dividing arc is at least as long
          REQUIRE(d.interval.size() == d.gamma_bar.size());
          REQUIRE(d.gamma_bar.size() <= d.underline.size());
          // extra ring bonds are dominated by the contour part off the ring
          // and off the dividing arc
          int extra = 0;
          for (const DualBond& b : d.gamma_bar) extra += !gset.count(b);
          int off = 0;
          for (const DualBond& b : interior_part(box, g)) off += !arc.count(b);
          REQUIRE(extra <= off);
          // the dividing arc is part of the contour's interior bonds
          for (const DualBond& b : d.underline) {
            REQUIRE(gset.count(b) == 1);
            REQUIRE(!box.is_boundary_bond(b.bond));
          }
          // the enclosed cells sit inside the cut-off half
          std::set<Site> tt(d.theta_tilde.begin(), d.theta_tilde.end());
          for (Site s : g.theta) REQUIRE(tt.count(s) == 1);
          // the exterior sites form one contiguous cyclic run
          if (!d.interval.empty()) {
            std::vector<int> pos;
            for (Site y : d.interval) pos.push_back(box.cycle_index(y));
            std::sort(pos.begin(), pos.end());
            int runs = 0, n = static_cast<int>(pos.size()), cyc = 4 * l;
            for (int i = 0; i < n; ++i)
              if (pos[(i + 1) % n] != (pos[i] + 1) % cyc) ++runs;
            REQUIRE(runs == (n == cyc ? 0 : 1));
          }
        }
    }
  }
  REQUIRE(tested > 200);
}

TEST_CASE("circuit census through a fixed dual bond") {
  DualBond horizontal(Site{0, 0}, Site{0, 1});  // dual segment horizontal
  DualBond vertical(Site{0, 0}, Site{1, 0});
  for (const DualBond& b : {horizontal, vertical}) {
    REQUIRE(count_contours_through(b, 4) == 2);
    REQUIRE(count_contours_through(b, 3) == 0);
    REQUIRE(count_contours_through(b, 5) == 0);
    REQUIRE(count_contours_through(b, 7) == 0);
    REQUIRE(count_contours_through(b, 6) == 6);
    for (int m : {4, 6, 8, 10}) {
      long long walk = count_contours_through(b, m);
      REQUIRE(walk == census_by_cells(b, m));
      double bound = 1.0;
      for (int i = 0; i < m - 1; ++i) bound *= 3.0;
      REQUIRE(static_cast<double>(walk) <= bound);
    }
    REQUIRE(static_cast<double>(count_contours_through(b, 12)) <=
            177147.0);  // 3^11
  }
}

TEST_CASE("box contour enumeration") {
  Box box(2);
  std::vector<Contour> through;
  enumerate_box_contours(box, true,
                         [&](const Contour& g) { through.push_back(g); });
  REQUIRE(through.size() == 7);
  std::vector<Contour> all;
  enumerate_box_contours(box, false,
                         [&](const Contour& g) { all.push_back(g); });
  REQUIRE(all.size() == 13);
  for (const Contour& g : all) {
    std::set<Site> theta(g.theta.begin(), g.theta.end());
    REQUIRE(boundary_dual_bonds(theta) == g.bonds);
    REQUIRE(detail::cells_l1_connected(theta));
    REQUIRE(fill_holes(box, theta) == theta);
  }
  for (const Contour& g : through) {
    std::set<Site> theta(g.theta.begin(), g.theta.end());
    REQUIRE(theta.count(Site{0, 0}) == 1);
  }
  // lengths come in even steps of two cells
  for (const Contour& g : all) REQUIRE(g.length() % 2 == 0);
}

TEST_CASE("trap membership at side two") {
  Box box(2);
  double beta = 1.0;
  SECTION("plus boundary traps any plus spin") {
    GibbsTable t = build_gibbs(box, make_plus_boundary(box), beta);
    TrapEvent ev = make_trap_event(t);
    REQUIRE(ev.epsilon == +1);
    auto member = trap_membership(ev);
    REQUIRE(member.size() == 16);
    int count = 0;
    for (char c : member) count += c;
    REQUIRE(count == 15);
    REQUIRE(member[0] == 0);  // the all-minus state has no plus cluster
  }
  SECTION("minus boundary mirrors the event") {
    GibbsTable t = build_gibbs(box, make_minus_boundary(box), beta);
    TrapEvent ev = make_trap_event(t);
    REQUIRE(ev.epsilon == -1);
    auto member = trap_membership(ev);
    int count = 0;
    for (char c : member) count += c;
    REQUIRE(count == 15);
    REQUIRE(member[15] == 0);  // the all-plus state has no minus cluster
  }
}

TEST_CASE("packed trap test matches the cell-set reference") {
  for (int l : {2, 3}) {
    Box box(l);
    GibbsTable t = build_gibbs(box, make_alternating_boundary(box), 1.0);
    for (double d1 : {0.3, 0.6, 0.9}) {
      TrapEvent ev = make_trap_event(t, d1);
      BoxBits bits(box);
      std::uint64_t n = std::uint64_t{1} << box.size();
      for (std::uint64_t s = 0; s < n; ++s) {
        Configuration sigma(box, s);
        REQUIRE(in_trap(ev, bits, s) == in_trap_reference(ev, sigma));
      }
    }
  }
}

TEST_CASE("trap event parameter validation") {
  Box box(3);
  GibbsTable t = build_gibbs(box, make_plus_boundary(box), 1.0);
  REQUIRE_THROWS_AS(make_trap_event(t, 0.0), std::invalid_argument);
  REQUIRE_THROWS_AS(make_trap_event(t, 1.0), std::invalid_argument);
  TrapEvent ev = make_trap_event(t);
  REQUIRE(ev.delta_1 > 0.5);
  REQUIRE(ev.delta_1 < 1.0);
}

TEST_CASE("packed cell algebra matches the set primitives") {
  Philox rng(1234, 0);
  for (int l : {2, 3, 4}) {
    Box box(l);
    BoxBits bits(box);
    std::uint64_t full = (std::uint64_t{1} << box.size()) - 1;
    for (int trial = 0; trial < 200; ++trial) {
      std::uint64_t m = rng() & full;
      if (m == 0) continue;
      std::set<Site> theta;
      for (int i = 0; i < box.size(); ++i)
        if (m & (std::uint64_t{1} << i)) theta.insert(box.site_at(i));
      REQUIRE(bits.connected(m) == detail::cells_l1_connected(theta));
      std::set<Site> filled = fill_holes(box, theta);
      std::uint64_t fm = bits.fill(m);
      std::set<Site> fset;
      for (int i = 0; i < box.size(); ++i)
        if (fm & (std::uint64_t{1} << i)) fset.insert(box.site_at(i));
      REQUIRE(fset == filled);
      REQUIRE(bits.perimeter(m) ==
              static_cast<int>(boundary_dual_bonds(theta).size()));
    }
  }
}

TEST_CASE("contour text round trip") {
  Philox rng(77, 0);
  Box box(5);
  int done = 0;
  for (int trial = 0; trial < 40 && done < 60; ++trial) {
    Configuration sigma = random_config(box, rng);
    for (int eps : {+1, -1})
      for (const Contour& g : epsilon_contours_at(sigma, eps)) {
        std::string text = contour_to_text(g);
        std::istringstream in(text);
        Contour back = contour_from_text(in);
        REQUIRE(back.bonds == g.bonds);
        REQUIRE(back.theta == g.theta);
        ++done;
      }
  }
  REQUIRE(done >= 60);
}

TEST_CASE("contour text rejects malformed circuits") {
  auto parse = [](const std::string& s) {
    std::istringstream in(s);
    return contour_from_text(in);
  };
  REQUIRE_THROWS_AS(parse(""), std::invalid_argument);
  REQUIRE_THROWS_AS(parse("# only a comment\n"), std::invalid_argument);
  REQUIRE_THROWS_AS(parse("0 0 1 1\n"), std::invalid_argument);  // not a bond
  // duplicate bond line
  REQUIRE_THROWS_AS(parse("0 0 1 0\n0 0 1 0\n"), std::invalid_argument);
  // open path: three sides of a unit square
  REQUIRE_THROWS_AS(parse("-1 0 0 0\n0 -1 0 0\n0 0 1 0\n"),
                    std::invalid_argument);
  // two disjoint unit squares: degree two everywhere but disconnected
  Box big(8);
  std::string two = contour_to_text(contour_from_theta(big, cells({Site{0, 0}})));
  two += contour_to_text(contour_from_theta(big, cells({Site{3, 3}})));
  REQUIRE_THROWS_AS(parse(two), std::invalid_argument);
  // figure eight: two unit squares sharing the corner (1,1)
  std::string eight =
      contour_to_text(contour_from_theta(big, cells({Site{0, 0}})));
  eight += contour_to_text(contour_from_theta(big, cells({Site{1, 1}})));
  REQUIRE_THROWS_AS(parse(eight), std::invalid_argument);
}
