#pragma once
// Dual-lattice contour machinery: spin clusters and their outer contours,
// crossing classification against the four sides of the box's dual square,
// the non-crossing decomposition (interior arc, ring part, exterior
// interval), flip maps and contour energy differences, the boundary-touching
// trap event, and exhaustive contour enumeration.
//
// A contour is the edge boundary of a finite cell set Theta with both Theta
// and its complement l1-connected; equivalently a vertex-self-avoiding closed
// circuit of dual bonds. The outer contour of a spin cluster is the boundary
// of the cluster with its holes filled, so Theta(gamma) always stores the
// filled set. Contours are a function of the spin configuration alone; the
// boundary field never enters their construction, only the energy bookkeeping.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ising/gibbs.hpp"

namespace ising {

struct Contour {
  std::vector<DualBond> bonds;  // sorted
  std::vector<Site> theta;      // sorted enclosed cells, holes filled
  int length() const { return static_cast<int>(bonds.size()); }
  friend bool operator==(const Contour& a, const Contour& b) {
    return a.bonds == b.bonds;
  }
};

// ---- cell-set helpers (site representation) ----

namespace detail {

inline bool cells_l1_connected(const std::set<Site>& cells) {
  if (cells.empty()) return false;
  std::vector<Site> frontier{*cells.begin()};
  std::set<Site> seen{*cells.begin()};
  while (!frontier.empty()) {
    Site s = frontier.back();
    frontier.pop_back();
    for (Site d : kNeighborSteps) {
      Site t{s.x + d.x, s.y + d.y};
      if (cells.count(t) && !seen.count(t)) {
        seen.insert(t);
        frontier.push_back(t);
      }
    }
  }
  return seen.size() == cells.size();
}

}  // namespace detail

// All dual bonds separating a cell in `cells` from one outside it.
inline std::vector<DualBond> boundary_dual_bonds(const std::set<Site>& cells) {
  std::vector<DualBond> out;
  for (Site s : cells)
    for (Site d : kNeighborSteps) {
      Site t{s.x + d.x, s.y + d.y};
      if (!cells.count(t)) out.emplace_back(s, t);
    }
  std::sort(out.begin(), out.end());
  return out;
}

// cells plus every bounded component of the complement ("holes"). `cells`
// must lie inside the box; holes never touch the box edge rows, so the
// search can stay inside the box.
inline std::set<Site> fill_holes(const Box& box, const std::set<Site>& cells) {
  std::set<Site> result = cells;
  std::set<Site> seen;
  for (int i = 0; i < box.size(); ++i) {
    Site s = box.site_at(i);
    if (cells.count(s) || seen.count(s)) continue;
    // flood one complement component, noting whether it reaches the edge
    std::vector<Site> comp{s}, frontier{s};
    seen.insert(s);
    bool edge = false;
    while (!frontier.empty()) {
      Site c = frontier.back();
      frontier.pop_back();
      if (c.x == box.lo() || c.x == box.hi() || c.y == box.lo() ||
          c.y == box.hi())
        edge = true;
      for (Site d : kNeighborSteps) {
        Site t{c.x + d.x, c.y + d.y};
        if (!box.contains(t) || cells.count(t) || seen.count(t)) continue;
        seen.insert(t);
        comp.push_back(t);
        frontier.push_back(t);
      }
    }
    if (!edge) result.insert(comp.begin(), comp.end());
  }
  return result;
}

// Build the contour bounding `theta`; validates that theta is l1-connected
// and hole-free (complement connected) inside the box.
inline Contour contour_from_theta(const Box& box, const std::set<Site>& theta) {
  if (theta.empty()) throw std::invalid_argument("empty cell set");
  for (Site s : theta)
    if (!box.contains(s)) throw std::invalid_argument("cell outside box");
  if (!detail::cells_l1_connected(theta))
    throw std::invalid_argument("cell set is not l1-connected");
  if (fill_holes(box, theta) != theta)
    throw std::invalid_argument("cell set has holes");
  Contour g;
  g.bonds = boundary_dual_bonds(theta);
  g.theta.assign(theta.begin(), theta.end());
  return g;
}

// Maximal l1-connected components of {sigma = eps} inside the box.
inline std::vector<std::vector<Site>> spin_clusters(const Configuration& sigma,
                                                    int eps) {
  const Box& box = sigma.box();
  std::vector<char> used(box.size(), 0);
  std::vector<std::vector<Site>> out;
  for (int i = 0; i < box.size(); ++i) {
    if (used[i] || sigma.spin(i) != eps) continue;
    std::vector<Site> comp;
    std::vector<int> frontier{i};
    used[i] = 1;
    while (!frontier.empty()) {
      int c = frontier.back();
      frontier.pop_back();
      Site s = box.site_at(c);
      comp.push_back(s);
      for (Site d : kNeighborSteps) {
        Site t{s.x + d.x, s.y + d.y};
        if (!box.contains(t)) continue;
        int j = box.index_of(t);
        if (!used[j] && sigma.spin(j) == eps) {
          used[j] = 1;
          frontier.push_back(j);
        }
      }
    }
    out.push_back(std::move(comp));
  }
  return out;
}

// Outer contours of all eps-spin clusters at sigma: the cluster with its
// holes filled, bounded by its outer circuit. Independent of any boundary
// field by construction.
inline std::vector<Contour> epsilon_contours_at(const Configuration& sigma,
                                                int eps) {
  if (eps != 1 && eps != -1) throw std::invalid_argument("eps must be +-1");
  std::vector<Contour> out;
  for (auto& cluster : spin_clusters(sigma, eps)) {
    std::set<Site> cells(cluster.begin(), cluster.end());
    std::set<Site> filled = fill_holes(sigma.box(), cells);
    Contour g;
    g.bonds = boundary_dual_bonds(filled);
    g.theta.assign(filled.begin(), filled.end());
    out.push_back(std::move(g));
  }
  std::sort(out.begin(), out.end(), [](const Contour& a, const Contour& b) {
    return a.bonds < b.bonds;
  });
  return out;
}

inline bool is_epsilon_contour_at(const Configuration& sigma, int eps,
                                  const Contour& gamma) {
  for (const Contour& g : epsilon_contours_at(sigma, eps))
    if (g == gamma) return true;
  return false;
}

// ---- classification against the box ----

inline std::vector<DualBond> ring_part(const Box& box, const Contour& g) {
  std::vector<DualBond> out;
  for (const DualBond& d : g.bonds)
    if (box.is_boundary_bond(d.bond)) out.push_back(d);
  return out;
}
inline std::vector<DualBond> interior_part(const Box& box, const Contour& g) {
  std::vector<DualBond> out;
  for (const DualBond& d : g.bonds)
    if (!box.is_boundary_bond(d.bond)) out.push_back(d);
  return out;
}

// Sides of the dual square the contour meets. For a contour, meeting a side
// as a point set is equivalent to containing a ring dual bond on that side
// (a circuit touching side j must enclose a cell of the corresponding edge
// row, hence contain that cell's outward ring bond).
inline std::set<BoxSide> sides_touched(const Box& box, const Contour& g) {
  std::set<BoxSide> out;
  for (const DualBond& d : ring_part(box, g)) out.insert(box.side_of(d.bond));
  return out;
}

inline bool is_crossing(const Box& box, const Contour& g) {
  auto s = sides_touched(box, g);
  bool h = s.count(BoxSide::right) && s.count(BoxSide::left);
  bool v = s.count(BoxSide::top) && s.count(BoxSide::bottom);
  return h || v;
}

// Exterior endpoints of the contour's ring bonds (the exterior sites the
// contour prices against the boundary field).
inline std::vector<Site> v_ex(const Box& box, const Contour& g) {
  std::vector<Site> out;
  for (const DualBond& d : ring_part(box, g))
    out.push_back(box.exterior_endpoint(d.bond));
  std::sort(out.begin(), out.end());
  return out;
}

// ---- flip maps and energy differences ----

inline Configuration flip_map(const Configuration& sigma, const Contour& g) {
  Configuration out = sigma;
  for (Site s : g.theta) out.flip(sigma.box().index_of(s));
  return out;
}

inline Configuration flip_map(const Configuration& sigma,
                              const std::vector<Contour>& gammas) {
  Configuration out = sigma;
  for (const Contour& g : gammas)
    for (Site s : g.theta) out.flip(sigma.box().index_of(s));
  return out;
}

// H(sigma) - H(composite flip of sigma)
inline double delta_H(const Configuration& sigma, const BoundaryCondition& omega,
                      const std::vector<Contour>& gammas) {
  return energy(sigma, omega) - energy(flip_map(sigma, gammas), omega);
}
inline double delta_H(const Configuration& sigma, const BoundaryCondition& omega,
                      const Contour& gamma) {
  return delta_H(sigma, omega, std::vector<Contour>{gamma});
}

// ---- non-crossing decomposition ----

struct Decomposition {
  std::vector<DualBond> underline;  // the dividing interior arc
  std::vector<DualBond> gamma_bar;  // ring bonds enclosing theta_tilde
  std::vector<Site> interval;       // exterior sites facing gamma_bar
  std::vector<Site> theta_tilde;    // the box cells cut off with Theta(gamma)
};

// For a non-crossing contour, find the unique component of the contour's
// interior part that divides the box into two l1-connected halves, with
// Theta(gamma) inside one half and a full horizontal and vertical side
// bounding the other. Degenerate case: a contour not meeting the ring is its
// own dividing arc and cuts off exactly Theta(gamma), leaving the ring part
// and the exterior interval empty.
inline Decomposition decompose_noncrossing(const Box& box, const Contour& g) {
  if (is_crossing(box, g))
    throw std::invalid_argument("contour is crossing; no decomposition");
  auto interior = interior_part(box, g);
  if (interior.empty())
    throw std::invalid_argument("contour lies on the ring; no interior arc");

  // split the interior part into components joined at shared dual corners
  int n = static_cast<int>(interior.size());
  std::map<Site, std::vector<int>> at_corner;
  for (int i = 0; i < n; ++i)
    for (Site c : interior[i].corners()) at_corner[c].push_back(i);
  std::vector<int> comp(n, -1);
  int n_comp = 0;
  for (int i = 0; i < n; ++i) {
    if (comp[i] >= 0) continue;
    std::vector<int> frontier{i};
    comp[i] = n_comp;
    while (!frontier.empty()) {
      int b = frontier.back();
      frontier.pop_back();
      for (Site c : interior[b].corners())
        for (int j : at_corner[c])
          if (comp[j] < 0) {
            comp[j] = n_comp;
            frontier.push_back(j);
          }
    }
    ++n_comp;
  }

  std::set<Site> theta(g.theta.begin(), g.theta.end());
  std::optional<Decomposition> found;
  for (int k = 0; k < n_comp; ++k) {
    std::set<DualBond> arc;
    for (int i = 0; i < n; ++i)
      if (comp[i] == k) arc.insert(interior[i]);
    // partition the box cells, cutting adjacency across the arc
    std::vector<int> part(box.size(), -1);
    int n_part = 0;
    for (int i = 0; i < box.size(); ++i) {
      if (part[i] >= 0) continue;
      std::vector<int> frontier{i};
      part[i] = n_part;
      while (!frontier.empty()) {
        int c = frontier.back();
        frontier.pop_back();
        Site s = box.site_at(c);
        for (Site d : kNeighborSteps) {
          Site t{s.x + d.x, s.y + d.y};
          if (!box.contains(t)) continue;
          if (arc.count(DualBond(s, t))) continue;
          int j = box.index_of(t);
          if (part[j] < 0) {
            part[j] = n_part;
            frontier.push_back(j);
          }
        }
      }
      ++n_part;
    }
    if (n_part != 2) continue;
    int side_of_theta = part[box.index_of(*theta.begin())];
    bool theta_together = true;
    for (Site s : theta)
      theta_together &= (part[box.index_of(s)] == side_of_theta);
    if (!theta_together) continue;
    // the other half must carry a full vertical and a full horizontal side
    bool row[4] = {true, true, true, true};  // right, left, top, bottom free of theta_tilde
    for (int i = 0; i < box.size(); ++i) {
      if (part[i] != side_of_theta) continue;
      Site s = box.site_at(i);
      if (s.x == box.hi()) row[0] = false;
      if (s.x == box.lo()) row[1] = false;
      if (s.y == box.hi()) row[2] = false;
      if (s.y == box.lo()) row[3] = false;
    }
    if (!((row[0] || row[1]) && (row[2] || row[3]))) continue;

    Decomposition d;
    d.underline.assign(arc.begin(), arc.end());
    for (int i = 0; i < box.size(); ++i)
      if (part[i] == side_of_theta) d.theta_tilde.push_back(box.site_at(i));
    std::set<Site> tt(d.theta_tilde.begin(), d.theta_tilde.end());
    for (const Bond& e : box.boundary_bonds())
      if (tt.count(box.interior_endpoint(e))) {
        d.gamma_bar.emplace_back(e);
        d.interval.push_back(box.exterior_endpoint(e));
      }
    std::sort(d.gamma_bar.begin(), d.gamma_bar.end());
    std::sort(d.interval.begin(), d.interval.end());
    if (found)
      throw std::logic_error("dividing arc is not unique");
    found = std::move(d);
  }
  if (!found) throw std::logic_error("no dividing arc found");
  return *found;
}

// ---- packed-state cell algebra (hot path for traps and enumeration) ----

// Shift-based set operations on cell masks over the box, bit i = canonical
// site i. Valid for side <= 7 (49 bits).
struct BoxBits {
  int l = 0;
  std::uint64_t full = 0, west_col = 0, east_col = 0, south_row = 0,
                north_row = 0, edge = 0;

  explicit BoxBits(const Box& box) : l(box.side()) {
    if (l > 7) throw std::invalid_argument("bit masks support side <= 7");
    full = (l * l == 64) ? ~0ull : (1ull << (l * l)) - 1;
    for (int i = 0; i < l; ++i) {
      west_col |= 1ull << (i * l);
      east_col |= 1ull << (i * l + l - 1);
      south_row |= 1ull << i;
      north_row |= 1ull << ((l - 1) * l + i);
    }
    edge = west_col | east_col | south_row | north_row;
  }

  std::uint64_t neighbors(std::uint64_t m) const {
    return (((m & ~east_col) << 1) | ((m & ~west_col) >> 1) | (m << l) |
            (m >> l)) &
           full;
  }
  bool connected(std::uint64_t m) const {
    if (m == 0) return false;
    std::uint64_t r = m & (~m + 1);  // lowest set bit
    for (;;) {
      std::uint64_t grown = (r | neighbors(r)) & m;
      if (grown == r) break;
      r = grown;
    }
    return r == m;
  }
  std::uint64_t fill(std::uint64_t m) const {
    std::uint64_t comp = full & ~m;
    std::uint64_t r = comp & edge;
    for (;;) {
      std::uint64_t grown = (r | neighbors(r)) & comp;
      if (grown == r) break;
      r = grown;
    }
    return m | (comp & ~r);
  }
  // outer-contour length of a hole-free mask (bonds to outside the box count)
  int perimeter(std::uint64_t m) const {
    std::uint64_t e = ((m >> 1) & ~east_col) & full;
    std::uint64_t w = ((m << 1) & ~west_col) & full;
    std::uint64_t nn = (m >> l) & full;
    std::uint64_t ss = (m << l) & full;
    auto pc = [](std::uint64_t x) { return __builtin_popcountll(x); };
    return pc(m & ~e) + pc(m & ~w) + pc(m & ~nn) + pc(m & ~ss);
  }
};

// ---- the boundary-touching trap event ----

struct TrapEvent {
  Box box;
  int epsilon = +1;   // dominant center sign
  double delta_1 = 0.9;  // fraction of 2l a qualifying contour must reach
};

// Long-window constant derived for an arbitrary boundary: the worst
// short-window ratio (clamped below 1) is run through the reduction chain.
inline double derived_delta_w2(const BoundaryCondition& omega) {
  double worst = validate_w1(omega, 1.0).worst_ratio;
  double d = std::min(worst, 1.0 - 1e-6);
  if (d < 0.0) d = 0.0;
  return reduce_delta_chain(d).delta_w2;
}

inline TrapEvent make_trap_event(const GibbsTable& table,
                                 std::optional<double> delta_1 = std::nullopt) {
  TrapEvent ev{table.box(), center_sign(table), 0.0};
  double d1 = delta_1 ? *delta_1
                      : (derived_delta_w2(table.boundary()) + 1.0) / 2.0;
  if (!(d1 > 0.0 && d1 < 1.0))
    throw std::invalid_argument("trap parameter must lie in (0, 1)");
  ev.delta_1 = d1;
  return ev;
}

// A state is trapped when some eps-cluster touches the box edge and its
// outer contour is long: |gamma| >= 2 * delta_1 * l.
inline bool in_trap(const TrapEvent& ev, const BoxBits& bits,
                    std::uint64_t state) {
  std::uint64_t m = (ev.epsilon == +1) ? state : (~state & bits.full);
  double threshold = 2.0 * ev.delta_1 * ev.box.side() - 1e-9;
  while (m != 0) {
    std::uint64_t seed = m & (~m + 1);
    std::uint64_t r = seed;
    for (;;) {
      std::uint64_t grown = (r | bits.neighbors(r)) & m;
      if (grown == r) break;
      r = grown;
    }
    if ((r & bits.edge) != 0 &&
        bits.perimeter(bits.fill(r)) >= threshold)
      return true;
    m &= ~r;
  }
  return false;
}

inline bool in_trap(const TrapEvent& ev, const Configuration& sigma) {
  return in_trap(ev, BoxBits(ev.box), sigma.bits());
}

// membership flags for all 2^(l*l) states; side <= 4
inline std::vector<char> trap_membership(const TrapEvent& ev) {
  if (ev.box.size() > 16)
    throw std::invalid_argument("trap membership table supports side <= 4");
  BoxBits bits(ev.box);
  std::uint64_t n = 1ull << ev.box.size();
  std::vector<char> out(n, 0);
  for (std::uint64_t s = 0; s < n; ++s) out[s] = in_trap(ev, bits, s);
  return out;
}

// ---- exhaustive enumeration ----

// Number of contours of length m containing the given dual bond, anywhere in
// the plane: vertex-self-avoiding dual circuits, counted by depth-first
// search over simple corner paths with distance and parity pruning.
inline long long count_contours_through(const DualBond& b, int m) {
  if (m < 4 || m % 2 == 1) return 0;
  if (m > 16) throw std::invalid_argument("circuit census supports length <= 16");
  auto [u, v] = std::pair{b.corners()[0], b.corners()[1]};
  std::set<Site> visited{u, v};
  long long count = 0;
  // path from v back to u of m-1 steps, u allowed only as the final corner
  auto dfs = [&](auto&& self, Site cur, int remaining) -> void {
    for (Site d : kNeighborSteps) {
      Site nxt{cur.x + d.x, cur.y + d.y};
      if (nxt == u) {
        if (remaining == 1) ++count;
        continue;
      }
      if (remaining <= 1 || visited.count(nxt)) continue;
      int dist = l1_dist(nxt, u);
      if (dist > remaining - 1 || ((remaining - 1 - dist) % 2) != 0) continue;
      visited.insert(nxt);
      self(self, nxt, remaining - 1);
      visited.erase(nxt);
    }
  };
  dfs(dfs, v, m - 1);
  return count;
}

// Every contour whose cells lie inside the box (optionally restricted to
// those enclosing the origin), reported through the callback. Exhaustive
// over cell subsets; side <= 4 unrestricted, side <= 5 through the origin.
template <class Callback>
inline void enumerate_box_contours(const Box& box, bool through_origin,
                                   Callback&& cb) {
  int n = box.size();
  if (n > (through_origin ? 25 : 16))
    throw std::invalid_argument("contour enumeration guard exceeded");
  BoxBits bits(box);
  std::uint64_t origin_bit = 1ull << box.index_of(Site{0, 0});
  std::uint64_t total = 1ull << n;
  for (std::uint64_t m = 1; m < total; ++m) {
    if (through_origin && !(m & origin_bit)) continue;
    if (!bits.connected(m)) continue;
    if (bits.fill(m) != m) continue;
    std::set<Site> theta;
    for (int i = 0; i < n; ++i)
      if (m & (1ull << i)) theta.insert(box.site_at(i));
    Contour g;
    g.bonds = boundary_dual_bonds(theta);
    g.theta.assign(theta.begin(), theta.end());
    cb(g);
  }
}

// ---- text serialization ----
// one dual bond per line as the regular bond's endpoints "ax ay bx by",
// sorted; '#' lines are comments

inline std::string contour_to_text(const Contour& g) {
  std::ostringstream os;
  os << "# contour, " << g.bonds.size() << " dual bonds\n";
  for (const DualBond& d : g.bonds)
    os << d.bond.a.x << ' ' << d.bond.a.y << ' ' << d.bond.b.x << ' '
       << d.bond.b.y << '\n';
  return os.str();
}

inline Contour contour_from_text(std::istream& in) {
  std::vector<DualBond> bonds;
  std::string line;
  while (std::getline(in, line)) {
    std::size_t pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '#') continue;
    std::istringstream ls(line);
    Site a, b;
    if (!(ls >> a.x >> a.y >> b.x >> b.y))
      throw std::invalid_argument("bad dual bond line: " + line);
    bonds.emplace_back(a, b);
  }
  if (bonds.empty()) throw std::invalid_argument("empty contour text");
  std::sort(bonds.begin(), bonds.end());
  if (std::adjacent_find(bonds.begin(), bonds.end()) != bonds.end())
    throw std::invalid_argument("duplicate dual bond");
  // a contour is a single vertex-self-avoiding circuit: every corner has
  // degree two and the bonds are connected through shared corners
  std::map<Site, std::vector<std::size_t>> at_corner;
  for (std::size_t i = 0; i < bonds.size(); ++i)
    for (Site c : bonds[i].corners()) at_corner[c].push_back(i);
  for (auto& [c, inc] : at_corner)
    if (inc.size() != 2)
      throw std::invalid_argument("corner degree differs from two");
  {
    std::vector<char> seen(bonds.size(), 0);
    std::vector<std::size_t> frontier{0};
    seen[0] = 1;
    std::size_t reached = 1;
    while (!frontier.empty()) {
      std::size_t b = frontier.back();
      frontier.pop_back();
      for (Site c : bonds[b].corners())
        for (std::size_t j : at_corner[c])
          if (!seen[j]) {
            seen[j] = 1;
            ++reached;
            frontier.push_back(j);
          }
    }
    if (reached != bonds.size())
      throw std::invalid_argument("dual bonds form more than one circuit");
  }
  // recover the enclosed cells by parity ray casting, then validate
  int xmin = bonds[0].bond.a.x, xmax = xmin, ymin = bonds[0].bond.a.y, ymax = ymin;
  for (const DualBond& d : bonds)
    for (Site s : {d.bond.a, d.bond.b}) {
      xmin = std::min(xmin, s.x);
      xmax = std::max(xmax, s.x);
      ymin = std::min(ymin, s.y);
      ymax = std::max(ymax, s.y);
    }
  std::set<DualBond> bond_set(bonds.begin(), bonds.end());
  std::set<Site> theta;
  for (int y = ymin; y <= ymax; ++y)
    for (int x = xmin; x <= xmax; ++x) {
      int crossings = 0;  // vertical dual segments to the right of (x, y)
      for (int xr = x; xr <= xmax; ++xr)
        if (bond_set.count(DualBond(Site{xr, y}, Site{xr + 1, y}))) ++crossings;
      if (crossings % 2 == 1) theta.insert(Site{x, y});
    }
  Contour g;
  g.bonds = std::move(bonds);
  g.theta.assign(theta.begin(), theta.end());
  if (boundary_dual_bonds(theta) != g.bonds)
    throw std::invalid_argument("dual bonds do not bound a cell set");
  return g;
}

}  // namespace ising
