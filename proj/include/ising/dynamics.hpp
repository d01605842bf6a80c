#pragma once
// Spin configurations on a box, the energy with boundary fields, single-flip
// energy differences, and the single-site flip-rate families.
//
// Energy convention: each unordered interior bond contributes -s_x s_y once,
// each bond from a box site x to an exterior site y contributes -s_x omega_y.
// A single flip at x changes the energy by 2 s_x (sum of interior-neighbor
// spins + sum of adjacent boundary fields), so |dH| <= 8.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ising/boundary.hpp"
#include "ising/lattice.hpp"

namespace ising {

// Spins packed one bit per canonical site index; bit set means +1.
class Configuration {
 public:
  Configuration(const Box& box, std::uint64_t bits)
      : box_(box), bits_(bits) {
    if (box.size() > 64)
      throw std::invalid_argument("packed configurations support side <= 8");
    if (box.size() < 64 && (bits >> box.size()) != 0)
      throw std::invalid_argument("spare bits must be zero");
  }
  static Configuration all_plus(const Box& box) {
    return Configuration(box, box.size() == 64
                                  ? ~std::uint64_t{0}
                                  : (std::uint64_t{1} << box.size()) - 1);
  }
  static Configuration all_minus(const Box& box) { return {box, 0}; }

  const Box& box() const { return box_; }
  std::uint64_t bits() const { return bits_; }
  int spin(int idx) const { return (bits_ >> idx) & 1 ? +1 : -1; }
  int spin_at(Site s) const { return spin(box_.index_of(s)); }
  void flip(int idx) { bits_ ^= std::uint64_t{1} << idx; }
  Configuration flipped(int idx) const {
    return Configuration(box_, bits_ ^ (std::uint64_t{1} << idx));
  }

  friend bool operator==(const Configuration& a, const Configuration& b) {
    return a.box_ == b.box_ && a.bits_ == b.bits_;
  }

 private:
  Box box_;
  std::uint64_t bits_;
};

// Per-site adjacency in canonical index space plus the adjacent boundary-field
// sum, precomputed once per (box, boundary) pair. This is the hot-path view
// used by the energy, the generator and the simulator.
struct NeighborTable {
  Box box;
  std::vector<std::vector<int>> neighbors;  // interior neighbors, canonical idx
  std::vector<double> boundary_field;       // sum of omega over exterior nbrs

  NeighborTable(const Box& b, const BoundaryCondition& omega)
      : box(b), neighbors(b.size()), boundary_field(b.size(), 0.0) {
    if (omega.box() != b)
      throw std::invalid_argument("boundary belongs to a different box");
    for (int i = 0; i < b.size(); ++i) {
      Site s = b.site_at(i);
      for (Site d : kNeighborSteps) {
        Site t{s.x + d.x, s.y + d.y};
        if (b.contains(t))
          neighbors[i].push_back(b.index_of(t));
        else
          boundary_field[i] += omega.at_site(t);
      }
    }
  }

  // local field at site idx: sum of neighbor spins + boundary contribution
  double local_field(const Configuration& sigma, int idx) const {
    double h = boundary_field[idx];
    for (int j : neighbors[idx]) h += sigma.spin(j);
    return h;
  }
};

inline double energy(const Configuration& sigma, const BoundaryCondition& omega) {
  const Box& b = sigma.box();
  if (omega.box() != b)
    throw std::invalid_argument("boundary belongs to a different box");
  double h = 0.0;
  for (const Bond& e : b.interior_bonds())
    h -= sigma.spin_at(e.a) * sigma.spin_at(e.b);
  for (const Bond& e : b.boundary_bonds())
    h -= sigma.spin_at(b.interior_endpoint(e)) *
         omega.at_site(b.exterior_endpoint(e));
  return h;
}

// H(sigma^x) - H(sigma) for a flip at canonical index idx.
inline double energy_delta_flip(const Configuration& sigma,
                                const NeighborTable& nbr, int idx) {
  return 2.0 * sigma.spin(idx) * nbr.local_field(sigma, idx);
}

// ---- rate families ----

enum class RateKind { exponential, metropolis, heat_bath };

inline std::string rate_kind_name(RateKind k) {
  switch (k) {
    case RateKind::exponential: return "exponential";
    case RateKind::metropolis: return "metropolis";
    case RateKind::heat_bath: return "heat-bath";
  }
  throw std::logic_error("unreachable");
}

inline RateKind parse_rate_kind(const std::string& name) {
  if (name == "exponential") return RateKind::exponential;
  if (name == "metropolis") return RateKind::metropolis;
  if (name == "heat-bath" || name == "heat_bath") return RateKind::heat_bath;
  throw std::invalid_argument("unknown rate family: " + name);
}

// A flip-rate family q(dH) at fixed inverse temperature. All three satisfy
// detailed balance q(dH)/q(-dH) = exp(-beta dH) and are bounded away from 0
// and infinity uniformly in the configuration (|dH| <= 8).
struct RateFamily {
  RateKind kind = RateKind::exponential;
  double beta = 0.0;

  RateFamily() = default;
  RateFamily(RateKind k, double b) : kind(k), beta(b) {
    if (!(b >= 0.0)) throw std::invalid_argument("beta must be >= 0");
  }

  double rate(double dH) const {
    switch (kind) {
      case RateKind::exponential: return std::exp(-0.5 * beta * dH);
      case RateKind::metropolis: return std::min(1.0, std::exp(-beta * dH));
      case RateKind::heat_bath: return 1.0 / (1.0 + std::exp(beta * dH));
    }
    throw std::logic_error("unreachable");
  }

  // certified bounds over |dH| <= 8
  double lower_bound() const {
    switch (kind) {
      case RateKind::exponential: return std::exp(-4.0 * beta);
      case RateKind::metropolis: return std::exp(-8.0 * beta);
      case RateKind::heat_bath: return 1.0 / (1.0 + std::exp(8.0 * beta));
    }
    throw std::logic_error("unreachable");
  }
  double upper_bound() const {
    switch (kind) {
      case RateKind::exponential: return std::exp(4.0 * beta);
      case RateKind::metropolis: return 1.0;
      case RateKind::heat_bath: return 1.0 / (1.0 + std::exp(-8.0 * beta));
    }
    throw std::logic_error("unreachable");
  }

  std::string name() const { return rate_kind_name(kind); }
};

inline double flip_rate(const RateFamily& fam, const Configuration& sigma,
                        const NeighborTable& nbr, int idx) {
  return fam.rate(energy_delta_flip(sigma, nbr, idx));
}

}  // namespace ising
