#pragma once
// Checkers for the contour energy estimates. Each checker first verifies
// that an instance satisfies the stated hypotheses, then evaluates the
// claimed inequality from actual energy differences computed by flipping
// cells, never from the algebra that produced the bound. Samplers generate
// random hypothesis-satisfying instances for stress testing.

#include <cmath>
#include <optional>
#include <set>
#include <vector>

#include "ising/contour.hpp"
#include "ising/rng.hpp"

namespace ising {

constexpr double kIneqTol = 1e-9;

struct InequalityReport {
  bool hypotheses = false;
  bool holds = false;
  double lhs = 0.0;  // evaluated energy side
  double rhs = 0.0;  // evaluated bound side
};

// ---- single non-crossing contour: interior share and arc bounds ----

struct NoncrossingEnergyReport {
  bool hypotheses = false;
  bool interior_share = false;  // 2|g\ring| >= |g| + |g\(ring u arc)|
  bool energy_bound = false;    // dH/2 >= |g|/2 + |g\(ring u arc)|/2 - field
  bool arc_bound = false;       // dH/2 >= |arc| - field over the interval
  bool arc_nonneg = false;      // |arc| - field over the interval >= 0
  bool all() const {
    return hypotheses && interior_share && energy_bound && arc_bound &&
           arc_nonneg;
  }
};

inline NoncrossingEnergyReport check_noncrossing_energy(
    const Configuration& sigma, const BoundaryCondition& omega, int eps,
    const Contour& gamma) {
  NoncrossingEnergyReport rep;
  const Box& box = sigma.box();
  rep.hypotheses =
      is_epsilon_contour_at(sigma, eps, gamma) && !is_crossing(box, gamma);
  if (!rep.hypotheses) return rep;
  Decomposition d = decompose_noncrossing(box, gamma);
  std::set<DualBond> arc(d.underline.begin(), d.underline.end());
  int total = gamma.length();
  int off_ring = static_cast<int>(interior_part(box, gamma).size());
  int off_both = 0;
  for (const DualBond& b : interior_part(box, gamma))
    off_both += !arc.count(b);
  double half_dh = 0.5 * delta_H(sigma, omega, gamma);
  double field_gamma = 0.0;
  for (Site y : v_ex(box, gamma)) field_gamma += omega.at_site(y);
  double field_interval = 0.0;
  for (Site y : d.interval) field_interval += omega.at_site(y);

  rep.interior_share = 2 * off_ring >= total + off_both;
  rep.energy_bound = half_dh >= 0.5 * total + 0.5 * off_both -
                                    eps * field_gamma - kIneqTol;
  double arc_rhs = static_cast<double>(d.underline.size()) -
                   eps * field_interval;
  rep.arc_bound = half_dh >= arc_rhs - kIneqTol;
  rep.arc_nonneg = arc_rhs >= -kIneqTol;
  return rep;
}

// ---- perimeter scaling: a linear-in-l bound gives a perimeter bound ----

inline InequalityReport check_scaled_perimeter(
    const Configuration& sigma, const BoundaryCondition& omega, int eps,
    const std::vector<Contour>& gammas, double c1, double c2) {
  InequalityReport rep;
  const Box& box = sigma.box();
  double half_dh = 0.5 * delta_H(sigma, omega, gammas);
  rep.hypotheses = c1 >= 0.0 && c2 >= 0.0 &&
                   half_dh >= c1 * box.side() - c2 - kIneqTol;
  for (const Contour& g : gammas)
    rep.hypotheses = rep.hypotheses && is_epsilon_contour_at(sigma, eps, g);
  if (!rep.hypotheses) return rep;
  double perim = 0.0;
  for (const Contour& g : gammas) perim += g.length();
  rep.lhs = half_dh;
  rep.rhs = c1 / (c1 + 8.0) * perim - c2;
  rep.holds = rep.lhs >= rep.rhs - kIneqTol;
  return rep;
}

// ---- interval-covered contour families ----

// rate constant for the covered-interval bound, from balancing the two
// cases of the derivation at delta_1 = (1 + delta_w2) / 2
inline double interval_energy_rate(double delta_w2) {
  double c1 = 0.5 * delta_w2 * (1.0 - delta_w2);
  return c1 / (c1 + 8.0);
}

inline InequalityReport check_interval_energy(
    const Configuration& sigma, const BoundaryCondition& omega, int eps,
    const std::vector<Contour>& gammas, double delta_w2,
    const BoundaryInterval& interval, double c) {
  InequalityReport rep;
  const Box& box = sigma.box();
  int l = box.side();

  rep.hypotheses = c >= 0.0 && validate_w2(omega, delta_w2).passes;
  double arc_total = 0.0;
  std::set<Site> covered;
  for (Site y : interval_sites(box, interval)) covered.insert(y);
  for (const Contour& g : gammas) {
    if (!is_epsilon_contour_at(sigma, eps, g) || is_crossing(box, g)) {
      rep.hypotheses = false;
      break;
    }
    Decomposition d = decompose_noncrossing(box, g);
    arc_total += static_cast<double>(d.underline.size());
    for (Site y : d.interval)
      rep.hypotheses = rep.hypotheses && covered.count(y) > 0;
  }
  double isize = interval.length;
  rep.hypotheses = rep.hypotheses && delta_w2 * l <= isize + kIneqTol &&
                   isize <= arc_total + c + kIneqTol;
  if (!rep.hypotheses) return rep;

  double perim = 0.0;
  for (const Contour& g : gammas) perim += g.length();
  rep.lhs = 0.5 * delta_H(sigma, omega, gammas);
  rep.rhs = interval_energy_rate(delta_w2) *
                std::max(static_cast<double>(l), perim) -
            c;
  rep.holds = rep.lhs >= rep.rhs - kIneqTol;
  return rep;
}

// ---- contours meeting exactly one side ----

inline InequalityReport check_single_side(const Configuration& sigma,
                                          const BoundaryCondition& omega,
                                          int eps, const Contour& gamma) {
  InequalityReport rep;
  const Box& box = sigma.box();
  auto sides = sides_touched(box, gamma);
  rep.hypotheses =
      is_epsilon_contour_at(sigma, eps, gamma) && sides.size() == 1;
  if (!rep.hypotheses) return rep;
  bool horizontal_side =
      sides.count(BoxSide::right) || sides.count(BoxSide::left);
  int count = 0;
  for (const DualBond& d : gamma.bonds)
    count += (d.horizontal() == horizontal_side);
  rep.lhs = delta_H(sigma, omega, gamma);
  rep.rhs = static_cast<double>(count);
  rep.holds = rep.lhs >= rep.rhs - kIneqTol;
  return rep;
}

// ---- short contours around the origin ----

inline InequalityReport check_origin_contour(const Configuration& sigma,
                                             const BoundaryCondition& omega,
                                             int eps, const Contour& gamma) {
  InequalityReport rep;
  const Box& box = sigma.box();
  bool has_origin =
      std::binary_search(gamma.theta.begin(), gamma.theta.end(), Site{0, 0});
  rep.hypotheses = is_epsilon_contour_at(sigma, eps, gamma) && has_origin &&
                   gamma.length() < 2 * box.side();
  if (!rep.hypotheses) return rep;
  rep.lhs = delta_H(sigma, omega, gamma);
  rep.rhs = 2.0 * gamma.length() / 9.0;
  rep.holds = rep.lhs >= rep.rhs - kIneqTol;
  return rep;
}

// ---- instance samplers ----

inline Configuration random_configuration(const Box& box, Philox& rng) {
  std::uint64_t bits = rng();
  if (box.size() < 64) bits &= (std::uint64_t{1} << box.size()) - 1;
  return Configuration(box, bits);
}

// boundary values drawn as exact multiples of 1/64 in [-1, 1]
inline BoundaryCondition random_dyadic_boundary(const Box& box, Philox& rng) {
  std::vector<double> vals;
  for (int i = 0; i < 4 * box.side(); ++i)
    vals.push_back(static_cast<double>(static_cast<int>(rng() % 129) - 64) /
                   64.0);
  return BoundaryCondition(box, std::move(vals));
}

struct ContourInstance {
  Configuration sigma;
  BoundaryCondition omega;
  int eps;
  Contour gamma;
};

// one random contour at a random configuration, filtered by `keep`
template <class Keep>
inline std::optional<ContourInstance> sample_contour_instance(
    const Box& box, Philox& rng, Keep&& keep) {
  Configuration sigma = random_configuration(box, rng);
  BoundaryCondition omega = random_dyadic_boundary(box, rng);
  int eps = (rng() & 1) ? +1 : -1;
  auto contours = epsilon_contours_at(sigma, eps);
  std::vector<Contour> eligible;
  for (Contour& g : contours)
    if (keep(box, g)) eligible.push_back(std::move(g));
  if (eligible.empty()) return std::nullopt;
  Contour pick = eligible[rng() % eligible.size()];
  return ContourInstance{sigma, omega, eps, std::move(pick)};
}

inline std::optional<ContourInstance> sample_noncrossing_instance(
    const Box& box, Philox& rng) {
  return sample_contour_instance(box, rng, [](const Box& b, const Contour& g) {
    return !is_crossing(b, g);
  });
}

inline std::optional<ContourInstance> sample_single_side_instance(
    const Box& box, Philox& rng) {
  return sample_contour_instance(box, rng, [](const Box& b, const Contour& g) {
    return sides_touched(b, g).size() == 1;
  });
}

// plant a small cluster around the origin so the short-contour hypotheses
// hold by construction
inline std::optional<ContourInstance> sample_origin_instance(const Box& box,
                                                             Philox& rng) {
  int target = 1 + static_cast<int>(rng() % 4);
  std::set<Site> blob{Site{0, 0}};
  while (static_cast<int>(blob.size()) < target) {
    std::vector<Site> candidates;
    for (Site s : blob)
      for (Site d : kNeighborSteps) {
        Site t{s.x + d.x, s.y + d.y};
        if (box.contains(t) && !blob.count(t)) candidates.push_back(t);
      }
    if (candidates.empty()) break;
    blob.insert(candidates[rng() % candidates.size()]);
  }
  blob = fill_holes(box, blob);
  int eps = (rng() & 1) ? +1 : -1;
  std::uint64_t bits = 0;
  for (Site s : blob) bits |= std::uint64_t{1} << box.index_of(s);
  if (eps == -1) {
    std::uint64_t full = (box.size() == 64) ? ~std::uint64_t{0}
                                            : (std::uint64_t{1} << box.size()) - 1;
    bits = ~bits & full;
  }
  Configuration sigma(box, bits);
  BoundaryCondition omega = random_dyadic_boundary(box, rng);
  Contour gamma = contour_from_theta(box, blob);
  if (gamma.length() >= 2 * box.side()) return std::nullopt;
  if (!is_epsilon_contour_at(sigma, eps, gamma)) return std::nullopt;
  return ContourInstance{sigma, omega, eps, std::move(gamma)};
}

struct ScaledInstance {
  Configuration sigma;
  BoundaryCondition omega;
  int eps;
  std::vector<Contour> gammas;
  double c1 = 0.0, c2 = 0.0;
};

// random contour family plus constants chosen to make the linear-in-l
// hypothesis hold, tight for most draws
inline std::optional<ScaledInstance> sample_scaled_instance(const Box& box,
                                                            Philox& rng) {
  Configuration sigma = random_configuration(box, rng);
  BoundaryCondition omega = random_dyadic_boundary(box, rng);
  int eps = (rng() & 1) ? +1 : -1;
  auto contours = epsilon_contours_at(sigma, eps);
  if (contours.empty()) return std::nullopt;
  std::vector<Contour> pick;
  for (Contour& g : contours)
    if (rng() & 1) pick.push_back(std::move(g));
  if (pick.empty()) pick.push_back(contours[0]);
  double half_dh = 0.5 * delta_H(sigma, omega, pick);
  double c2 = rng.uniform(0.0, 8.0);
  if (half_dh + c2 < 0.0) return std::nullopt;
  // half the draws make the linear hypothesis an equality
  double slack = (rng() & 1) ? 1.0 : rng.uniform(0.6, 1.0);
  double c1 = (half_dh + c2) / box.side() * slack;
  return ScaledInstance{sigma, omega, eps, std::move(pick), c1, c2};
}

struct IntervalInstance {
  Configuration sigma;
  BoundaryCondition omega;
  int eps;
  std::vector<Contour> gammas;
  double delta_w2 = 0.0;
  BoundaryInterval interval{};
  double c = 0.0;
};

// smallest cyclic interval covering all given positions, empty input maps
// to a zero-length stub at position zero
inline BoundaryInterval covering_interval(int cycle, std::vector<int> pos) {
  if (pos.empty()) return BoundaryInterval{0, 0};
  std::sort(pos.begin(), pos.end());
  pos.erase(std::unique(pos.begin(), pos.end()), pos.end());
  int n = static_cast<int>(pos.size());
  int best_gap = -1, best_i = 0;
  for (int i = 0; i < n; ++i) {
    int next = pos[(i + 1) % n];
    int gap = ((next - pos[i]) % cycle + cycle) % cycle;
    if (i + 1 == n) gap = pos[0] + cycle - pos[n - 1];
    if (gap > best_gap) {
      best_gap = gap;
      best_i = i;
    }
  }
  int start = pos[(best_i + 1) % n];
  int end = pos[best_i];
  int length = ((end - start) % cycle + cycle) % cycle + 1;
  return BoundaryInterval{start, length};
}

// random non-crossing contour family under a balanced boundary, with the
// covering interval extended to the required minimum length
inline std::optional<IntervalInstance> sample_interval_instance(
    const Box& box, Philox& rng, double delta_w2,
    const BoundaryCondition& omega) {
  if (!validate_w2(omega, delta_w2).passes) return std::nullopt;
  Configuration sigma = random_configuration(box, rng);
  int eps = (rng() & 1) ? +1 : -1;
  auto contours = epsilon_contours_at(sigma, eps);
  std::vector<Contour> pick;
  for (Contour& g : contours)
    if (!is_crossing(box, g) && (rng() & 1)) pick.push_back(std::move(g));
  if (pick.empty()) return std::nullopt;

  int l = box.side(), cycle = 4 * l;
  std::vector<int> pos;
  double arc_total = 0.0;
  for (const Contour& g : pick) {
    Decomposition d = decompose_noncrossing(box, g);
    arc_total += static_cast<double>(d.underline.size());
    for (Site y : d.interval) pos.push_back(box.cycle_index(y));
  }
  BoundaryInterval iv = covering_interval(cycle, pos);
  int min_len = std::max(1, static_cast<int>(std::ceil(delta_w2 * l - 1e-12)));
  if (iv.length < min_len) iv.length = min_len;
  if (iv.length > cycle) iv.length = cycle;
  double c = std::max(0.0, static_cast<double>(iv.length) - arc_total);
  return IntervalInstance{sigma,    omega, eps, std::move(pick),
                          delta_w2, iv,    c};
}

}  // namespace ising
