#pragma once
// Integer-lattice geometry for a centered square box: sites, bonds, the two
// boundary layers, the cyclic walk along the exterior boundary, and dual bonds.
//
// Conventions used throughout the library:
//  - box(l) = (-l/2, l/2]^2 intersected with Z^2, so (0,0) is always a site
//    and the coordinate range is [l/2 - l + 1, l/2] on each axis.
//  - canonical site order is row-major: index = (y - lo)*l + (x - lo).
//  - bonds are unordered and stored with the lexicographically smaller
//    endpoint first.
//  - a dual bond is the unit segment bisecting a regular bond; it is
//    represented by that regular bond. Dual vertices (cell corners) are
//    encoded as integer pairs: corner (i, j) stands for the point
//    (i - 1/2, j - 1/2), so cell (x, y) has corners (x, y), (x+1, y),
//    (x, y+1), (x+1, y+1).

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace ising {

struct Site {
  int x = 0;
  int y = 0;
  friend bool operator==(const Site&, const Site&) = default;
  friend auto operator<=>(const Site&, const Site&) = default;
};

struct SiteHash {
  std::size_t operator()(const Site& s) const {
    return std::hash<long long>()((static_cast<long long>(s.x) << 32) ^
                                  static_cast<unsigned>(s.y));
  }
};

inline int l1_dist(Site a, Site b) {
  return std::abs(a.x - b.x) + std::abs(a.y - b.y);
}
inline int linf_dist(Site a, Site b) {
  return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y));
}

inline constexpr std::array<Site, 4> kNeighborSteps{
    Site{1, 0}, Site{-1, 0}, Site{0, 1}, Site{0, -1}};

// Unordered nearest-neighbor bond, smaller endpoint first.
struct Bond {
  Site a, b;
  Bond() = default;
  Bond(Site s, Site t) {
    if (t < s) std::swap(s, t);
    a = s;
    b = t;
    if (l1_dist(a, b) != 1)
      throw std::invalid_argument("bond endpoints must be nearest neighbors");
  }
  bool horizontal() const { return a.y == b.y; }
  friend bool operator==(const Bond&, const Bond&) = default;
  friend auto operator<=>(const Bond&, const Bond&) = default;
};

struct BondHash {
  std::size_t operator()(const Bond& e) const {
    SiteHash h;
    return h(e.a) * 1000003u ^ h(e.b);
  }
};

// The dual bond bisecting a regular bond. Orientation is perpendicular to
// the regular bond: the dual of a horizontal bond is vertical and vice versa.
struct DualBond {
  Bond bond;
  DualBond() = default;
  explicit DualBond(Bond e) : bond(e) {}
  DualBond(Site s, Site t) : bond(s, t) {}
  bool horizontal() const { return !bond.horizontal(); }
  // Endpoints as corner codes: corner (i, j) is the point (i - 1/2, j - 1/2).
  std::array<Site, 2> corners() const {
    if (bond.horizontal())  // dual segment is vertical, at x = b.x - 1/2
      return {Site{bond.b.x, bond.b.y}, Site{bond.b.x, bond.b.y + 1}};
    return {Site{bond.b.x, bond.b.y}, Site{bond.b.x + 1, bond.b.y}};
  }
  friend bool operator==(const DualBond&, const DualBond&) = default;
  friend auto operator<=>(const DualBond&, const DualBond&) = default;
};

struct DualBondHash {
  std::size_t operator()(const DualBond& d) const { return BondHash()(d.bond); }
};

// Which side of the box's dual-boundary square a boundary bond sits on,
// named by the outward direction from the box.
enum class BoxSide { right, left, top, bottom };

inline int side_axis(BoxSide s) {
  return (s == BoxSide::right || s == BoxSide::left) ? 1 : 2;
}

class Box {
 public:
  explicit Box(int l) : l_(l) {
    if (l < 1) throw std::invalid_argument("box side must be >= 1");
    hi_ = l / 2;
    lo_ = hi_ - l + 1;
  }

  int side() const { return l_; }
  int lo() const { return lo_; }
  int hi() const { return hi_; }
  int size() const { return l_ * l_; }

  bool contains(Site s) const {
    return s.x >= lo_ && s.x <= hi_ && s.y >= lo_ && s.y <= hi_;
  }

  // Row-major canonical index.
  int index_of(Site s) const {
    if (!contains(s)) throw std::out_of_range("site outside box");
    return (s.y - lo_) * l_ + (s.x - lo_);
  }
  Site site_at(int idx) const {
    if (idx < 0 || idx >= size()) throw std::out_of_range("site index");
    return Site{lo_ + idx % l_, lo_ + idx / l_};
  }

  std::vector<Site> sites() const {
    std::vector<Site> out;
    out.reserve(size());
    for (int i = 0; i < size(); ++i) out.push_back(site_at(i));
    return out;
  }

  // Exterior boundary: sites outside at l1-distance 1 from the box. 4l sites.
  std::vector<Site> exterior_boundary() const { return boundary_cycle(); }

  // Interior boundary: box sites with a neighbor outside. 4l-4 for l >= 2, 1 for l = 1.
  std::vector<Site> interior_boundary() const {
    std::vector<Site> out;
    for (int i = 0; i < size(); ++i) {
      Site s = site_at(i);
      if (s.x == lo_ || s.x == hi_ || s.y == lo_ || s.y == hi_) out.push_back(s);
    }
    return out;
  }

  // The 4l exterior-boundary sites in cyclic order. Consecutive sites (and the
  // wrap-around pair) are adjacent under the l-infinity metric. The walk starts
  // at the lexicographically smallest exterior site adjacent to the smallest
  // box site (the bottom-left corner) and proceeds counterclockwise:
  // bottom row left-to-right, right column bottom-to-top, top row
  // right-to-left, left column top-to-bottom.
  std::vector<Site> boundary_cycle() const {
    std::vector<Site> cyc;
    cyc.reserve(4 * l_);
    cyc.push_back(Site{lo_ - 1, lo_});
    for (int x = lo_; x <= hi_; ++x) cyc.push_back(Site{x, lo_ - 1});
    for (int y = lo_; y <= hi_; ++y) cyc.push_back(Site{hi_ + 1, y});
    for (int x = hi_; x >= lo_; --x) cyc.push_back(Site{x, hi_ + 1});
    for (int y = hi_; y > lo_; --y) cyc.push_back(Site{lo_ - 1, y});
    return cyc;
  }

  // Position of an exterior-boundary site in the cycle.
  int cycle_index(Site s) const {
    auto cyc = boundary_cycle();
    auto it = std::find(cyc.begin(), cyc.end(), s);
    if (it == cyc.end()) throw std::out_of_range("site not on exterior boundary");
    return static_cast<int>(it - cyc.begin());
  }

  // All bonds with both endpoints in the box: 2l(l-1).
  std::vector<Bond> interior_bonds() const {
    std::vector<Bond> out;
    out.reserve(2 * l_ * (l_ - 1));
    for (int i = 0; i < size(); ++i) {
      Site s = site_at(i);
      if (s.x < hi_) out.emplace_back(s, Site{s.x + 1, s.y});
      if (s.y < hi_) out.emplace_back(s, Site{s.x, s.y + 1});
    }
    return out;
  }

  // Bonds joining a box site to an exterior site: 4l, one per exterior site.
  std::vector<Bond> boundary_bonds() const {
    std::vector<Bond> out;
    out.reserve(4 * l_);
    for (int i = 0; i < size(); ++i) {
      Site s = site_at(i);
      for (Site d : kNeighborSteps) {
        Site t{s.x + d.x, s.y + d.y};
        if (!contains(t)) out.emplace_back(s, t);
      }
    }
    return out;
  }

  // For a bond with exactly one endpoint in the box, the exterior endpoint.
  Site exterior_endpoint(const Bond& e) const {
    bool ain = contains(e.a), bin = contains(e.b);
    if (ain == bin) throw std::invalid_argument("not a boundary bond");
    return ain ? e.b : e.a;
  }
  Site interior_endpoint(const Bond& e) const {
    bool ain = contains(e.a), bin = contains(e.b);
    if (ain == bin) throw std::invalid_argument("not a boundary bond");
    return ain ? e.a : e.b;
  }

  bool is_boundary_bond(const Bond& e) const {
    return contains(e.a) != contains(e.b);
  }

  // Side of the dual-boundary square a boundary bond's dual sits on.
  BoxSide side_of(const Bond& e) const {
    Site in = interior_endpoint(e), out = exterior_endpoint(e);
    if (out.x == in.x + 1) return BoxSide::right;
    if (out.x == in.x - 1) return BoxSide::left;
    if (out.y == in.y + 1) return BoxSide::top;
    return BoxSide::bottom;
  }

  friend bool operator==(const Box&, const Box&) = default;

 private:
  int l_;
  int lo_, hi_;
};

// Cyclic contiguous arc of the boundary cycle: positions start, start+1, ...
// start+length-1 (mod 4l).
struct BoundaryInterval {
  int start = 0;
  int length = 0;
};

inline std::vector<Site> interval_sites(const Box& box, const BoundaryInterval& iv) {
  auto cyc = box.boundary_cycle();
  int n = static_cast<int>(cyc.size());
  if (iv.length < 0 || iv.length > n) throw std::invalid_argument("interval length");
  std::vector<Site> out;
  out.reserve(iv.length);
  for (int k = 0; k < iv.length; ++k)
    out.push_back(cyc[((iv.start + k) % n + n) % n]);
  return out;
}

}  // namespace ising
