#pragma once
// Boundary fields on the exterior layer of a box, the named generators used
// throughout (uniform, slab, iid, alternating), window-sum mixedness
// validation, and the reduction from the short-window condition to the
// all-long-windows condition.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "ising/lattice.hpp"
#include "ising/rng.hpp"

namespace ising {

// A field value in [-1, 1] per exterior-boundary site, stored in boundary
// cycle order.
class BoundaryCondition {
 public:
  BoundaryCondition(const Box& box, std::vector<double> values_in_cycle_order)
      : box_(box), values_(std::move(values_in_cycle_order)) {
    if (static_cast<int>(values_.size()) != 4 * box.side())
      throw std::invalid_argument("boundary needs one value per exterior site");
    for (double v : values_)
      if (!(v >= -1.0 && v <= 1.0))
        throw std::invalid_argument("boundary values must lie in [-1, 1]");
    auto cyc = box_.boundary_cycle();
    for (std::size_t k = 0; k < cyc.size(); ++k) by_site_[cyc[k]] = values_[k];
  }

  const Box& box() const { return box_; }
  int size() const { return static_cast<int>(values_.size()); }
  double at_cycle(int k) const {
    int n = size();
    return values_[((k % n) + n) % n];
  }
  double at_site(Site s) const {
    auto it = by_site_.find(s);
    if (it == by_site_.end())
      throw std::out_of_range("site not on the exterior boundary");
    return it->second;
  }
  const std::vector<double>& values() const { return values_; }

  BoundaryCondition negated() const {
    std::vector<double> v(values_);
    for (double& x : v) x = -x;
    return BoundaryCondition(box_, std::move(v));
  }

  friend bool operator==(const BoundaryCondition& a, const BoundaryCondition& b) {
    return a.box_ == b.box_ && a.values_ == b.values_;
  }

 private:
  Box box_;
  std::vector<double> values_;
  std::unordered_map<Site, double, SiteHash> by_site_;
};

inline BoundaryCondition make_uniform_boundary(const Box& box, double value) {
  return BoundaryCondition(box, std::vector<double>(4 * box.side(), value));
}
inline BoundaryCondition make_plus_boundary(const Box& box) {
  return make_uniform_boundary(box, 1.0);
}
inline BoundaryCondition make_minus_boundary(const Box& box) {
  return make_uniform_boundary(box, -1.0);
}
inline BoundaryCondition make_free_boundary(const Box& box) {
  return make_uniform_boundary(box, 0.0);
}

// +1 / -1 alternating along the boundary cycle (4l entries, so the
// alternation closes up consistently).
inline BoundaryCondition make_alternating_boundary(const Box& box) {
  std::vector<double> v(4 * box.side());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = (k % 2 == 0) ? 1.0 : -1.0;
  return BoundaryCondition(box, std::move(v));
}

// +1 on the exterior sites of the right column with -delta*l/2 < y <= delta*l/2,
// 0 everywhere else.
inline BoundaryCondition make_slab_boundary(const Box& box, double delta) {
  if (!(delta >= 0.0 && delta <= 1.0))
    throw std::invalid_argument("slab width fraction must be in [0, 1]");
  int l = box.side();
  auto cyc = box.boundary_cycle();
  std::vector<double> v(cyc.size(), 0.0);
  double half = delta * l / 2.0;
  for (std::size_t k = 0; k < cyc.size(); ++k) {
    Site s = cyc[k];
    if (s.x == box.hi() + 1 && s.y > -half && s.y <= half) v[k] = 1.0;
  }
  return BoundaryCondition(box, std::move(v));
}

// iid +1/-1 with mean `m` (P(+1) = (1+m)/2), drawn in cycle order from the
// (seed, stream 0) generator.
inline BoundaryCondition make_iid_boundary(const Box& box, double m,
                                           std::uint64_t seed) {
  if (!(m >= -1.0 && m <= 1.0))
    throw std::invalid_argument("iid mean must be in [-1, 1]");
  Philox gen(seed, 0);
  std::vector<double> v(4 * box.side());
  double p_plus = (1.0 + m) / 2.0;
  for (double& x : v) x = (gen.uniform01() < p_plus) ? 1.0 : -1.0;
  return BoundaryCondition(box, std::move(v));
}

// ---- window-sum mixedness validation ----

struct MixingReport {
  bool passes = false;
  double delta = 0.0;            // threshold the windows were tested against
  int min_interval_length = 0;   // smallest window length examined
  BoundaryInterval worst_interval{};
  double worst_ratio = 0.0;      // max over windows of |sum omega| / |window|
};

// Checks |sum_{y in I} omega_y| <= delta * |I| over every cyclic interval I
// with |I| >= min_len. Reports the worst ratio and where it occurs.
inline MixingReport validate_intervals(const BoundaryCondition& omega,
                                       double delta, int min_len) {
  int n = omega.size();
  if (min_len < 1 || min_len > n)
    throw std::invalid_argument("interval length floor out of range");
  std::vector<double> prefix(2 * n + 1, 0.0);
  for (int i = 0; i < 2 * n; ++i)
    prefix[i + 1] = prefix[i] + omega.at_cycle(i % n);
  MixingReport rep;
  rep.delta = delta;
  rep.min_interval_length = min_len;
  rep.worst_ratio = -1.0;
  for (int len = min_len; len <= n; ++len) {
    for (int start = 0; start < n; ++start) {
      double s = prefix[start + len] - prefix[start];
      double ratio = std::abs(s) / len;
      if (ratio > rep.worst_ratio) {
        rep.worst_ratio = ratio;
        rep.worst_interval = BoundaryInterval{start, len};
      }
    }
  }
  rep.passes = rep.worst_ratio <= delta + 1e-12;
  return rep;
}

// Short-window condition: every window of exactly l sites is delta-balanced.
inline MixingReport validate_w1(const BoundaryCondition& omega, double delta) {
  int l = omega.box().side();
  int n = omega.size();
  std::vector<double> prefix(2 * n + 1, 0.0);
  for (int i = 0; i < 2 * n; ++i)
    prefix[i + 1] = prefix[i] + omega.at_cycle(i % n);
  MixingReport rep;
  rep.delta = delta;
  rep.min_interval_length = l;
  rep.worst_ratio = -1.0;
  for (int start = 0; start < n; ++start) {
    double s = prefix[start + l] - prefix[start];
    double ratio = std::abs(s) / l;
    if (ratio > rep.worst_ratio) {
      rep.worst_ratio = ratio;
      rep.worst_interval = BoundaryInterval{start, l};
    }
  }
  rep.passes = rep.worst_ratio <= delta + 1e-12;
  return rep;
}

// Long-window condition: every window of at least ceil(delta_w2 * l) sites is
// delta_w2-balanced.
inline MixingReport validate_w2(const BoundaryCondition& omega, double delta_w2) {
  int l = omega.box().side();
  int floor_len = static_cast<int>(std::ceil(delta_w2 * l - 1e-12));
  if (floor_len < 1) floor_len = 1;
  return validate_intervals(omega, delta_w2, floor_len);
}

// Intermediate condition used by the reduction: windows of at least l sites,
// tested against delta_w1a.
inline MixingReport validate_w1a(const BoundaryCondition& omega, double delta_w1a) {
  return validate_intervals(omega, delta_w1a, omega.box().side());
}

// ---- reduction chain ----

struct DeltaChain {
  double delta = 0.0;      // the short-window constant the chain started from
  double delta_w1a = 0.0;  // (1 + delta) / 2
  double delta_w2 = 0.0;   // feasible long-window constant, strictly below 1
};

// From a short-window constant delta < 1, derive delta_w1a = (1+delta)/2 and a
// long-window constant delta_t satisfying
//   delta_w1a + (1 + delta_w1a) * (1 - delta_t) / delta_t < delta_t,
// equivalently delta_t^2 + delta_t > 1 + delta_w1a. The smallest feasible
// value is the positive root of t^2 + t - (1 + delta_w1a); the returned
// delta_w2 is the midpoint between that root and 1.
inline DeltaChain reduce_delta_chain(double delta) {
  if (!(delta >= 0.0 && delta < 1.0))
    throw std::invalid_argument("short-window constant must lie in [0, 1)");
  DeltaChain out;
  out.delta = delta;
  out.delta_w1a = (1.0 + delta) / 2.0;
  double root = (-1.0 + std::sqrt(5.0 + 4.0 * out.delta_w1a)) / 2.0;
  out.delta_w2 = (root + 1.0) / 2.0;
  return out;
}

// ---- text serialization ----
// Format: optional '#' comment lines, then one decimal value per line, one
// line per boundary site in cycle order (4l lines for a side-l box).

inline std::string boundary_to_text(const BoundaryCondition& omega) {
  std::ostringstream os;
  os << "# boundary field, side " << omega.box().side()
     << ", one value per exterior site in cycle order\n";
  char buf[32];
  for (double v : omega.values()) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf << '\n';
  }
  return os.str();
}

inline BoundaryCondition boundary_from_text(std::istream& in) {
  std::vector<double> vals;
  std::string line;
  while (std::getline(in, line)) {
    std::size_t pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '#') continue;
    vals.push_back(std::stod(line));
  }
  if (vals.empty() || vals.size() % 4 != 0)
    throw std::invalid_argument("boundary text must hold 4*l values");
  int side = static_cast<int>(vals.size() / 4);
  return BoundaryCondition(Box(side), std::move(vals));
}

inline BoundaryCondition boundary_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open boundary file: " + path);
  return boundary_from_text(in);
}

// ---- descriptor parsing (shared by CLI and plan files) ----
// plus | minus | free | alternating | slab:<delta> | iid:<mean>:<seed> | file:<path>

inline BoundaryCondition make_boundary(const Box& box, const std::string& desc) {
  if (desc == "plus") return make_plus_boundary(box);
  if (desc == "minus") return make_minus_boundary(box);
  if (desc == "free") return make_free_boundary(box);
  if (desc == "alternating") return make_alternating_boundary(box);
  if (desc.rfind("slab:", 0) == 0)
    return make_slab_boundary(box, std::stod(desc.substr(5)));
  if (desc.rfind("iid:", 0) == 0) {
    std::string rest = desc.substr(4);
    std::size_t colon = rest.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("iid descriptor needs iid:<mean>:<seed>");
    double mean = std::stod(rest.substr(0, colon));
    std::uint64_t seed = std::stoull(rest.substr(colon + 1));
    return make_iid_boundary(box, mean, seed);
  }
  if (desc.rfind("file:", 0) == 0) {
    BoundaryCondition bc = boundary_from_file(desc.substr(5));
    if (bc.box().side() != box.side())
      throw std::invalid_argument("boundary file side does not match box");
    return bc;
  }
  throw std::invalid_argument("unknown boundary descriptor: " + desc);
}

}  // namespace ising
