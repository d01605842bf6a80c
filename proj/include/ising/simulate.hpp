#pragma once
// Event-driven continuous-time simulation of the single-flip dynamics.
// The next event is the winner of the exponential race over all sites (one
// clock per site at its current flip rate); after a flip only the flipped
// site and its neighbors have their rates recomputed, and the cached total
// rate is refreshed from scratch periodically to stop drift. Relaxation
// times come from a log-linear fit to the autocorrelation of a named
// observable, with a bootstrap over trajectory resamples for the error bar.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ising/contour.hpp"
#include "ising/dynamics.hpp"
#include "ising/gibbs.hpp"
#include "ising/rng.hpp"

namespace ising {

struct Trajectory {
  Box box{1};
  std::uint64_t initial_bits = 0;
  double t_end = 0.0;
  std::vector<std::pair<double, int>> events;  // (time, canonical site)
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

// state at time t, reconstructed deterministically from the event log
inline Configuration configuration_at(const Trajectory& traj, double t) {
  Configuration sigma(traj.box, traj.initial_bits);
  for (const auto& [time, site] : traj.events) {
    if (time > t) break;
    sigma.flip(site);
  }
  return sigma;
}

inline Trajectory simulate(const Box& box, const BoundaryCondition& omega,
                           const RateFamily& rates, const Configuration& sigma0,
                           double t_max, std::uint64_t seed,
                           std::uint64_t stream = 0) {
  if (!(t_max > 0.0)) throw std::invalid_argument("t_max must be positive");
  if (sigma0.box() != box)
    throw std::invalid_argument("initial state belongs to a different box");
  NeighborTable nbr(box, omega);
  int n = box.size();
  Configuration sigma = sigma0;
  std::vector<double> rate(n);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    rate[i] = flip_rate(rates, sigma, nbr, i);
    total += rate[i];
  }

  Trajectory traj;
  traj.box = box;
  traj.initial_bits = sigma0.bits();
  traj.t_end = t_max;
  traj.seed = seed;
  traj.stream = stream;

  Philox rng(seed, stream);
  double t = 0.0;
  long long since_refresh = 0;
  while (true) {
    double gap_time = 0.0;
    do {
      gap_time = -std::log1p(-rng.uniform01()) / total;
    } while (!(gap_time > 0.0));
    t += gap_time;
    if (t > t_max) break;

    // pick the winning site in proportion to its rate
    double v = rng.uniform01() * total;
    int site = n - 1;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      acc += rate[i];
      if (v < acc) {
        site = i;
        break;
      }
    }

    sigma.flip(site);
    traj.events.emplace_back(t, site);

    // local rate updates: the flipped site and its interior neighbors
    double delta = flip_rate(rates, sigma, nbr, site) - rate[site];
    rate[site] += delta;
    total += delta;
    for (int j : nbr.neighbors[site]) {
      double fresh = flip_rate(rates, sigma, nbr, j);
      total += fresh - rate[j];
      rate[j] = fresh;
    }
    if (++since_refresh >= 4096) {
      since_refresh = 0;
      total = std::accumulate(rate.begin(), rate.end(), 0.0);
    }
  }
  return traj;
}

inline std::vector<Trajectory> simulate_replicas(
    const Box& box, const BoundaryCondition& omega, const RateFamily& rates,
    const Configuration& sigma0, double t_max, std::uint64_t seed,
    int replicas) {
  if (replicas < 1) throw std::invalid_argument("need at least one replica");
  std::vector<Trajectory> out;
  out.reserve(replicas);
  for (int r = 0; r < replicas; ++r)
    out.push_back(simulate(box, omega, rates, sigma0, t_max, seed, r));
  return out;
}

// ---- observables ----

struct NamedObservable {
  std::string name;
  std::function<double(const Configuration&)> value;
};

inline NamedObservable center_spin_observable(const Box& box) {
  int idx = box.index_of(Site{0, 0});
  return {"center_spin",
          [idx](const Configuration& s) { return double(s.spin(idx)); }};
}

inline NamedObservable total_magnetization_observable(const Box& box) {
  int n = box.size();
  return {"total_magnetization", [n](const Configuration& s) {
            double m = 0.0;
            for (int i = 0; i < n; ++i) m += s.spin(i);
            return m;
          }};
}

inline NamedObservable trap_indicator_observable(const TrapEvent& ev) {
  return {"trap_indicator",
          [ev](const Configuration& s) { return in_trap(ev, s) ? 1.0 : 0.0; }};
}

// ---- relaxation estimation ----

enum class RelaxationStatus { ok, insufficient_data, non_exponential };
inline const char* relaxation_status_name(RelaxationStatus s) {
  switch (s) {
    case RelaxationStatus::ok: return "ok";
    case RelaxationStatus::insufficient_data: return "insufficient_data";
    case RelaxationStatus::non_exponential: return "non_exponential";
  }
  throw std::logic_error("unreachable");
}

struct RelaxationEstimate {
  double tau = 0.0;
  double std_error = 0.0;  // bootstrap over trajectory resamples
  std::string observable;
  RelaxationStatus status = RelaxationStatus::ok;
  double r_squared = 0.0;
  int fit_lags = 0;
  double grid_dt = 0.0;
};

struct RelaxationOptions {
  int grid_points = 20000;    // observable samples per trajectory
  double noise_sigmas = 2.0;  // usable range ends where rho sinks into noise
  double min_r_squared = 0.9;
  int min_fit_lags = 5;
  double sufficiency = 50.0;  // required post-burn-in span in units of tau
  int bootstrap_rounds = 200;
  std::uint64_t bootstrap_seed = 8675309;
};

namespace detail {

// uniform-grid samples of the observable along one trajectory
inline std::vector<double> sample_observable(const Trajectory& traj,
                                             const NamedObservable& obs,
                                             double burn_in, double dt,
                                             int count) {
  std::vector<double> out;
  out.reserve(count);
  Configuration sigma(traj.box, traj.initial_bits);
  std::size_t next_event = 0;
  for (int k = 0; k < count; ++k) {
    double t = burn_in + k * dt;
    while (next_event < traj.events.size() &&
           traj.events[next_event].first <= t) {
      sigma.flip(traj.events[next_event].second);
      ++next_event;
    }
    out.push_back(obs.value(sigma));
  }
  return out;
}

// Per-trajectory lag tables: with cross-product and prefix sums cached, the
// pooled autocorrelation of any multiset of trajectories is a cheap
// combination, which makes the bootstrap rounds nearly free.
struct LagTables {
  std::vector<double> sum, sumsq;          // per trajectory
  std::vector<std::vector<double>> cross;  // [traj][lag-1]: sum x_k x_{k+lag}
  std::vector<std::vector<double>> prefix; // [traj][k]: sum of first k samples
  std::size_t len = 0;                     // common sample count
  int max_lag = 0;
};

inline LagTables build_lag_tables(const std::vector<std::vector<double>>& s,
                                  int max_lag) {
  LagTables t;
  t.len = s.empty() ? 0 : s[0].size();
  t.max_lag = std::min<int>(max_lag, int(t.len) - 1);
  for (const auto& x : s) {
    if (x.size() != t.len)
      throw std::logic_error("trajectories sampled on different grids");
    double sum = 0.0, sumsq = 0.0;
    std::vector<double> pre(x.size() + 1, 0.0);
    for (std::size_t k = 0; k < x.size(); ++k) {
      sum += x[k];
      sumsq += x[k] * x[k];
      pre[k + 1] = pre[k] + x[k];
    }
    std::vector<double> cross(t.max_lag);
    for (int lag = 1; lag <= t.max_lag; ++lag) {
      double c = 0.0;
      for (std::size_t k = 0; k + lag < x.size(); ++k) c += x[k] * x[k + lag];
      cross[lag - 1] = c;
    }
    t.sum.push_back(sum);
    t.sumsq.push_back(sumsq);
    t.prefix.push_back(std::move(pre));
    t.cross.push_back(std::move(cross));
  }
  return t;
}

struct AutocorrFit {
  bool usable = false;
  double tau = 0.0;
  double r_squared = 0.0;
  int lags = 0;
  RelaxationStatus status = RelaxationStatus::ok;
  bool hit_lag_cap = false;  // floor not reached within the table
};

struct WindowFit {
  bool valid = false;
  double slope = 0.0;
  double r_squared = 0.0;
  int lags = 0;
};

// least squares on (t, log rho) over [lo, hi), weighted by rho^2: the log of
// a noisy correlation has variance growing like 1/rho^2, so unweighted fits
// are dragged by the biased tail near the noise floor
inline WindowFit window_fit(const std::vector<double>& lag_time,
                            const std::vector<double>& log_rho, int lo, int hi,
                            const RelaxationOptions& opt) {
  WindowFit out;
  out.lags = hi - lo;
  if (out.lags < opt.min_fit_lags) return out;
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = lo; i < hi; ++i) {
    double w = std::exp(2.0 * log_rho[i]);
    sw += w;
    sx += w * lag_time[i];
    sy += w * log_rho[i];
    sxx += w * lag_time[i] * lag_time[i];
    sxy += w * lag_time[i] * log_rho[i];
  }
  double denom = sw * sxx - sx * sx;
  if (denom <= 0.0) return out;
  double slope = (sw * sxy - sx * sy) / denom;
  double intercept = (sy - slope * sx) / sw;
  double ss_res = 0.0, ss_tot = 0.0, ybar = sy / sw;
  for (int i = lo; i < hi; ++i) {
    double w = std::exp(2.0 * log_rho[i]);
    double e = log_rho[i] - (intercept + slope * lag_time[i]);
    ss_res += w * e * e;
    ss_tot += w * (log_rho[i] - ybar) * (log_rho[i] - ybar);
  }
  out.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;
  if (slope >= 0.0 || out.r_squared < opt.min_r_squared) return out;
  // demand a significantly negative slope so noise cannot fake a slow mode
  double se2 = (out.lags > 2 ? ss_res / (out.lags - 2) : 0.0) * sw / denom;
  if (slope * slope < 4.0 * se2) return out;
  out.slope = slope;
  out.valid = true;
  return out;
}

// Pooled exponential tail fit over the multiset of trajectory indices in
// pick. The autocorrelation is generally a mixture of decay rates, all at
// least the gap; the estimator follows it down into its own sampling noise
// and scans fit windows sharing that endpoint, keeping the slowest decay
// that is still well resolved.
inline AutocorrFit pooled_fit(const LagTables& t, const std::vector<int>& pick,
                              double dt, const RelaxationOptions& opt) {
  AutocorrFit fit;
  double total_n = double(pick.size()) * double(t.len);
  if (total_n == 0.0 || t.len < 2) {
    fit.status = RelaxationStatus::insufficient_data;
    return fit;
  }
  double mean = 0.0;
  for (int j : pick) mean += t.sum[j];
  mean /= total_n;
  double c0 = 0.0;
  for (int j : pick)
    c0 += t.sumsq[j] - 2.0 * mean * t.sum[j] + mean * mean * double(t.len);
  if (c0 <= 0.0) {
    fit.status = RelaxationStatus::non_exponential;  // constant observable
    return fit;
  }

  std::vector<double> lag_time, log_rho;
  double bartlett = 1.0;  // 1 + 2 sum of rho_j^2, Bartlett's variance scale
  bool closed = false;
  for (int lag = 1; lag <= t.max_lag; ++lag) {
    double c = 0.0;
    for (int j : pick) {
      double head = t.prefix[j][t.len - lag];             // sum of x_k
      double tail = t.sum[j] - t.prefix[j][lag];          // sum of x_{k+lag}
      c += t.cross[j][lag - 1] - mean * (head + tail) +
           mean * mean * double(t.len - lag);
    }
    double cnt = double(pick.size()) * double(t.len - lag);
    double rho = (c / cnt) / (c0 / total_n);
    if (rho <= opt.noise_sigmas * std::sqrt(bartlett / total_n)) {
      closed = true;
      break;
    }
    bartlett += 2.0 * rho * rho;
    lag_time.push_back(lag * dt);
    log_rho.push_back(std::log(rho));
    if (int(lag_time.size()) >= 8000) {
      closed = true;  // more than enough points for any window
      break;
    }
  }
  fit.hit_lag_cap = !closed;

  int usable = int(lag_time.size());
  if (usable < opt.min_fit_lags) {
    fit.status = RelaxationStatus::insufficient_data;
    return fit;
  }

  // windows share the noise-floor endpoint and differ in how much of the
  // early fast mixture they exclude; the slowest valid fit wins
  const double fractions[] = {0.0, 0.05, 0.1, 0.2, 0.35, 0.5, 0.7};
  WindowFit best;
  for (double f : fractions) {
    WindowFit w = window_fit(lag_time, log_rho, int(f * usable), usable, opt);
    if (w.valid && (!best.valid || w.slope > best.slope)) best = w;
  }
  if (!best.valid) {
    WindowFit full = window_fit(lag_time, log_rho, 0, usable, opt);
    fit.r_squared = std::max(full.r_squared, 0.0);
    fit.lags = usable;
    fit.status = RelaxationStatus::non_exponential;
    return fit;
  }
  fit.usable = true;
  fit.tau = -1.0 / best.slope;
  fit.r_squared = best.r_squared;
  fit.lags = best.lags;
  return fit;
}

}  // namespace detail

inline RelaxationEstimate estimate_relaxation(
    const std::vector<Trajectory>& trajectories, const NamedObservable& obs,
    double burn_in, const RelaxationOptions& opt = RelaxationOptions{}) {
  if (trajectories.empty())
    throw std::invalid_argument("need at least one trajectory");
  if (burn_in < 0.0) throw std::invalid_argument("burn_in must be >= 0");
  double span = std::numeric_limits<double>::infinity();
  for (const auto& t : trajectories)
    span = std::min(span, t.t_end - burn_in);

  RelaxationEstimate est;
  est.observable = obs.name;
  if (!(span > 0.0)) {
    est.status = RelaxationStatus::insufficient_data;
    return est;
  }
  double dt = span / opt.grid_points;
  est.grid_dt = dt;

  std::vector<std::vector<double>> samples;
  samples.reserve(trajectories.size());
  for (const auto& t : trajectories)
    samples.push_back(
        detail::sample_observable(t, obs, burn_in, dt, opt.grid_points));

  // grow the lag table geometrically until the autocorrelation window closes
  std::vector<int> all(trajectories.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = int(i);
  int lag_cap = 256;
  detail::LagTables tables = detail::build_lag_tables(samples, lag_cap);
  detail::AutocorrFit fit = detail::pooled_fit(tables, all, dt, opt);
  while (fit.hit_lag_cap && lag_cap < opt.grid_points / 2) {
    lag_cap = std::min(lag_cap * 4, opt.grid_points / 2);
    tables = detail::build_lag_tables(samples, lag_cap);
    fit = detail::pooled_fit(tables, all, dt, opt);
  }
  est.r_squared = fit.r_squared;
  est.fit_lags = fit.lags;
  if (!fit.usable) {
    est.status = fit.status;
    return est;
  }
  est.tau = fit.tau;
  if (span < opt.sufficiency * fit.tau) {
    est.status = RelaxationStatus::insufficient_data;
    return est;
  }

  // bootstrap over trajectory resamples
  Philox rng(opt.bootstrap_seed, 0);
  std::vector<double> taus;
  taus.reserve(opt.bootstrap_rounds);
  std::vector<int> pick(trajectories.size());
  for (int b = 0; b < opt.bootstrap_rounds; ++b) {
    for (int& p : pick)
      p = std::min<int>(int(rng.uniform01() * trajectories.size()),
                        int(trajectories.size()) - 1);
    detail::AutocorrFit f = detail::pooled_fit(tables, pick, dt, opt);
    if (f.usable) taus.push_back(f.tau);
  }
  if (taus.size() >= 2) {
    double m = std::accumulate(taus.begin(), taus.end(), 0.0) / taus.size();
    double v = 0.0;
    for (double t : taus) v += (t - m) * (t - m);
    est.std_error = std::sqrt(v / (taus.size() - 1));
  }
  est.status = RelaxationStatus::ok;
  return est;
}

// ---- occupation statistics ----

// dwell-time-weighted distribution over packed states, from burn_in to t_end
inline std::vector<double> occupation_distribution(const Trajectory& traj,
                                                   double burn_in) {
  if (traj.box.size() > 16)
    throw std::invalid_argument("occupation table supports side*side <= 16");
  if (!(burn_in < traj.t_end))
    throw std::invalid_argument("burn_in must precede the end of the run");
  std::vector<double> mass(std::uint64_t{1} << traj.box.size(), 0.0);
  Configuration sigma(traj.box, traj.initial_bits);
  double t_prev = burn_in;
  for (const auto& [time, site] : traj.events) {
    if (time > burn_in) {
      double t_clip = std::min(time, traj.t_end);
      mass[sigma.bits()] += t_clip - t_prev;
      t_prev = t_clip;
    }
    sigma.flip(site);
  }
  if (traj.t_end > t_prev) mass[sigma.bits()] += traj.t_end - t_prev;
  double total = traj.t_end - burn_in;
  for (double& m : mass) m /= total;
  return mass;
}

inline double total_variation(const std::vector<double>& p,
                              const std::vector<double>& q) {
  if (p.size() != q.size())
    throw std::invalid_argument("distribution size mismatch");
  double tv = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) tv += std::abs(p[i] - q[i]);
  return 0.5 * tv;
}

inline std::vector<double> gibbs_distribution(const GibbsTable& g) {
  std::uint64_t n = g.num_states();
  std::vector<double> p(n);
  for (std::uint64_t s = 0; s < n; ++s) p[s] = g.probability(s);
  return p;
}

}  // namespace ising
