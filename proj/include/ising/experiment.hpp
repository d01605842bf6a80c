#pragma once
// Sweep orchestration: declarative grids over box side, inverse temperature,
// boundary descriptor, and rate family; exact gaps below a size threshold and
// relaxation-proxy estimates above it; slab-boundary decay-rate studies.
// All emitted text (CSV, JSON, plan files) is deterministic given the plan
// and its seeds; wall-clock timings stay in memory and are never serialized.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ising/boundary.hpp"
#include "ising/contour.hpp"
#include "ising/dynamics.hpp"
#include "ising/gibbs.hpp"
#include "ising/lattice.hpp"
#include "ising/simulate.hpp"
#include "ising/spectral.hpp"

namespace ising {

// ---- plan ----

enum class MethodPolicy { automatic, exact, simulate };

inline const char* method_policy_name(MethodPolicy p) {
  switch (p) {
    case MethodPolicy::automatic: return "auto";
    case MethodPolicy::exact: return "exact";
    case MethodPolicy::simulate: return "simulate";
  }
  return "auto";
}

inline MethodPolicy parse_method_policy(const std::string& s) {
  if (s == "auto") return MethodPolicy::automatic;
  if (s == "exact") return MethodPolicy::exact;
  if (s == "simulate") return MethodPolicy::simulate;
  throw std::invalid_argument("unknown method policy: " + s);
}

// Exact diagonalization is used at or below this many sites (l*l); larger
// grids fall back to trajectory simulation under the automatic policy.
inline constexpr int exact_site_threshold = 16;

struct ExperimentPlan {
  // grid axes, swept as nested loops in this order (l outermost)
  std::vector<int> l_values;
  std::vector<double> beta_values;
  std::vector<std::string> boundaries;  // descriptors for make_boundary
  std::vector<RateKind> rate_kinds;

  MethodPolicy method = MethodPolicy::automatic;

  // simulation parameters (used only by simulated grid points)
  double t_max = 3000.0;
  double burn_in = 0.0;
  int replicas = 8;
  std::uint64_t seed = 20240901;
  int grid_points = 20000;

  // optional output destinations
  std::string csv_path;
  std::string json_path;

  bool operator==(const ExperimentPlan&) const = default;
};

namespace detail {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// shortest decimal that round-trips, for human-friendly deterministic output
inline std::string format_double_short(double v) {
  for (int prec = 1; prec <= 17; ++prec) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  return format_double(v);
}

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace detail

inline std::string plan_to_text(const ExperimentPlan& plan) {
  std::ostringstream os;
  os << "# ising-gap plan v1\n";
  for (int l : plan.l_values) os << "l = " << l << '\n';
  for (double b : plan.beta_values)
    os << "beta = " << detail::format_double(b) << '\n';
  for (const std::string& d : plan.boundaries) os << "boundary = " << d << '\n';
  for (RateKind k : plan.rate_kinds) os << "rates = " << rate_kind_name(k) << '\n';
  os << "method = " << method_policy_name(plan.method) << '\n';
  os << "t_max = " << detail::format_double(plan.t_max) << '\n';
  os << "burn_in = " << detail::format_double(plan.burn_in) << '\n';
  os << "replicas = " << plan.replicas << '\n';
  os << "seed = " << plan.seed << '\n';
  os << "grid_points = " << plan.grid_points << '\n';
  if (!plan.csv_path.empty()) os << "csv = " << plan.csv_path << '\n';
  if (!plan.json_path.empty()) os << "json = " << plan.json_path << '\n';
  return os.str();
}

// Line-oriented `key = value`; '#' starts a comment; the grid keys l, beta,
// boundary, rates repeat, scalar keys may appear at most once.
inline ExperimentPlan plan_from_text(std::istream& in) {
  ExperimentPlan plan;
  std::vector<std::string> seen_scalars;
  auto scalar_once = [&](const std::string& key) {
    if (std::find(seen_scalars.begin(), seen_scalars.end(), key) !=
        seen_scalars.end())
      throw std::invalid_argument("duplicate plan key: " + key);
    seen_scalars.push_back(key);
  };
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string t = detail::trim(line);
    if (t.empty()) continue;
    std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("plan line " + std::to_string(lineno) +
                                  " is not key = value");
    std::string key = detail::trim(t.substr(0, eq));
    std::string val = detail::trim(t.substr(eq + 1));
    if (key.empty() || val.empty())
      throw std::invalid_argument("plan line " + std::to_string(lineno) +
                                  " has an empty key or value");
    if (key == "l") plan.l_values.push_back(std::stoi(val));
    else if (key == "beta") plan.beta_values.push_back(std::stod(val));
    else if (key == "boundary") plan.boundaries.push_back(val);
    else if (key == "rates") plan.rate_kinds.push_back(parse_rate_kind(val));
    else if (key == "method") { scalar_once(key); plan.method = parse_method_policy(val); }
    else if (key == "t_max") { scalar_once(key); plan.t_max = std::stod(val); }
    else if (key == "burn_in") { scalar_once(key); plan.burn_in = std::stod(val); }
    else if (key == "replicas") { scalar_once(key); plan.replicas = std::stoi(val); }
    else if (key == "seed") { scalar_once(key); plan.seed = std::stoull(val); }
    else if (key == "grid_points") { scalar_once(key); plan.grid_points = std::stoi(val); }
    else if (key == "csv") { scalar_once(key); plan.csv_path = val; }
    else if (key == "json") { scalar_once(key); plan.json_path = val; }
    else throw std::invalid_argument("unknown plan key: " + key);
  }
  return plan;
}

inline ExperimentPlan plan_from_text(const std::string& text) {
  std::istringstream is(text);
  return plan_from_text(is);
}

inline ExperimentPlan plan_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open plan file: " + path);
  return plan_from_text(in);
}

// ---- records ----

struct ExperimentRecord {
  int l = 0;
  double beta = 0.0;
  std::string boundary;
  RateKind rates = RateKind::exponential;
  std::string method;  // dense_eig | iterative_eig | relaxation_proxy
  bool ok = false;
  std::optional<double> gap;        // exact gap, or 1/tau for the proxy
  std::optional<double> std_error;  // delta-method error of 1/tau (proxy only)
  std::optional<double> schonmann_lower;
  std::optional<double> indicator_upper;  // trap-event flip bound, exact only
  std::optional<double> mu_trap;          // exact trap-event probability
  std::optional<int> epsilon;             // dominant center sign, exact only
  std::string error;                      // nonempty when !ok
  double wall_seconds = 0.0;              // in-memory only, never serialized
};

// Trap event when no exact table is available: dominant sign from the mean
// boundary field (ties to +, matching the weak inequality in center_sign).
inline TrapEvent trap_event_from_boundary(const BoundaryCondition& omega) {
  double sum = 0.0;
  for (double v : omega.values()) sum += v;
  TrapEvent ev{omega.box(), sum >= 0.0 ? +1 : -1, 0.0};
  double d1 = (derived_delta_w2(omega) + 1.0) / 2.0;
  if (!(d1 > 0.0 && d1 < 1.0))
    throw std::invalid_argument("trap parameter must lie in (0, 1)");
  ev.delta_1 = d1;
  return ev;
}

namespace detail {

inline void run_exact_point(ExperimentRecord& rec, const Box& box,
                            const BoundaryCondition& omega,
                            const RateFamily& fam) {
  GeneratorOperator gen(box, omega, fam);
  GapResult res = exact_gap(gen);
  rec.method = gap_method_name(res.method);
  rec.gap = res.gap;
  TrapEvent trap = make_trap_event(gen.gibbs());
  std::vector<char> member = trap_membership(trap);
  rec.epsilon = trap.epsilon;
  double mu = gen.gibbs().event_probability(
      [&](std::uint64_t s) { return member[s] != 0; });
  rec.mu_trap = mu;
  if (mu > 0.0 && mu < 1.0)
    rec.indicator_upper = indicator_upper_bound(
        gen, [&](std::uint64_t s) { return member[s] != 0; });
  rec.ok = true;
}

inline void run_simulated_point(ExperimentRecord& rec, const Box& box,
                                const BoundaryCondition& omega,
                                const RateFamily& fam,
                                const ExperimentPlan& plan) {
  TrapEvent trap = trap_event_from_boundary(omega);
  Configuration sigma0 = trap.epsilon > 0 ? Configuration::all_plus(box)
                                          : Configuration::all_minus(box);
  std::vector<Trajectory> trajs = simulate_replicas(
      box, omega, fam, sigma0, plan.t_max, plan.seed, plan.replicas);
  RelaxationOptions opt;
  opt.grid_points = plan.grid_points;
  RelaxationEstimate est = estimate_relaxation(
      trajs, trap_indicator_observable(trap), plan.burn_in, opt);
  rec.method = "relaxation_proxy";
  if (est.status != RelaxationStatus::ok) {
    rec.error = std::string("relaxation estimate: ") +
                relaxation_status_name(est.status);
    return;
  }
  rec.gap = 1.0 / est.tau;
  rec.std_error = est.std_error / (est.tau * est.tau);
  rec.ok = true;
}

}  // namespace detail

// One record per grid point, in plan grid order (l, beta, boundary, rates
// nested loops). Per-point failures are recorded and the sweep continues.
inline std::vector<ExperimentRecord> run_plan(const ExperimentPlan& plan) {
  std::vector<ExperimentRecord> records;
  for (int l : plan.l_values)
    for (double beta : plan.beta_values)
      for (const std::string& desc : plan.boundaries)
        for (RateKind kind : plan.rate_kinds) {
          ExperimentRecord rec;
          rec.l = l;
          rec.beta = beta;
          rec.boundary = desc;
          rec.rates = kind;
          auto t0 = std::chrono::steady_clock::now();
          try {
            Box box(l);
            BoundaryCondition omega = make_boundary(box, desc);
            RateFamily fam(kind, beta);
            rec.schonmann_lower = schonmann_lower_bound(l, beta, fam.lower_bound());
            bool exact = plan.method == MethodPolicy::exact ||
                         (plan.method == MethodPolicy::automatic &&
                          l * l <= exact_site_threshold);
            if (exact)
              detail::run_exact_point(rec, box, omega, fam);
            else
              detail::run_simulated_point(rec, box, omega, fam, plan);
          } catch (const std::exception& e) {
            rec.ok = false;
            rec.error = e.what();
          }
          rec.wall_seconds =
              std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                  .count();
          records.push_back(std::move(rec));
        }
  return records;
}

inline bool any_failed(const std::vector<ExperimentRecord>& records) {
  return std::any_of(records.begin(), records.end(),
                     [](const ExperimentRecord& r) { return !r.ok; });
}

// ---- serialization ----

inline constexpr const char* records_schema = "ising-gap records v1";

namespace detail {

inline std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    out += c;
  }
  out += '"';
  return out;
}

inline std::string opt_cell(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

}  // namespace detail

inline std::string records_to_csv(const std::vector<ExperimentRecord>& records) {
  std::ostringstream os;
  os << "# " << records_schema << '\n';
  os << "l,beta,boundary,rates,method,status,gap,std_error,schonmann_lower,"
        "indicator_upper,mu_trap,epsilon,error\n";
  for (const ExperimentRecord& r : records) {
    os << r.l << ',' << detail::format_double(r.beta) << ',' << r.boundary
       << ',' << rate_kind_name(r.rates) << ',' << r.method << ','
       << (r.ok ? "ok" : "error") << ',' << detail::opt_cell(r.gap) << ','
       << detail::opt_cell(r.std_error) << ','
       << detail::opt_cell(r.schonmann_lower) << ','
       << detail::opt_cell(r.indicator_upper) << ','
       << detail::opt_cell(r.mu_trap) << ','
       << (r.epsilon ? std::to_string(*r.epsilon) : std::string()) << ','
       << (r.error.empty() ? std::string() : detail::csv_quote(r.error))
       << '\n';
  }
  return os.str();
}

inline nlohmann::ordered_json record_to_json(const ExperimentRecord& r) {
  nlohmann::ordered_json j;
  j["l"] = r.l;
  j["beta"] = r.beta;
  j["boundary"] = r.boundary;
  j["rates"] = rate_kind_name(r.rates);
  j["method"] = r.method;
  j["status"] = r.ok ? "ok" : "error";
  if (r.gap) j["gap"] = *r.gap;
  if (r.std_error) j["std_error"] = *r.std_error;
  if (r.schonmann_lower) j["schonmann_lower"] = *r.schonmann_lower;
  if (r.indicator_upper) j["indicator_upper"] = *r.indicator_upper;
  if (r.mu_trap) j["mu_trap"] = *r.mu_trap;
  if (r.epsilon) j["epsilon"] = *r.epsilon;
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

inline std::string records_to_json(const std::vector<ExperimentRecord>& records) {
  nlohmann::ordered_json j;
  j["schema"] = records_schema;
  j["records"] = nlohmann::ordered_json::array();
  for (const ExperimentRecord& r : records)
    j["records"].push_back(record_to_json(r));
  return j.dump(2) + "\n";
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << text;
  if (!out) throw std::runtime_error("failed writing output file: " + path);
}

// ---- slab transition study ----

struct TransitionPoint {
  int l = 0;
  std::optional<double> gap;
  std::string method;
  std::string error;  // nonempty when the point failed
};

struct TransitionSeries {
  double delta = 0.0;
  std::string boundary;
  std::vector<TransitionPoint> points;
  std::optional<double> slope;      // OLS slope of log gap vs l (>= 3 points)
  std::optional<double> intercept;
  int fit_points = 0;
};

struct TransitionReport {
  double beta = 0.0;
  RateKind rates = RateKind::exponential;
  std::vector<TransitionSeries> series;
};

// Exact gap-vs-l decay rates for slab boundaries across mixture fractions.
// Fits need at least three valid points; otherwise the series reports raw
// gaps only. Per-point failures are recorded and excluded from the fit.
inline TransitionReport transition_study(const std::vector<int>& l_values,
                                         double beta,
                                         const std::vector<double>& delta_values,
                                         RateKind kind = RateKind::exponential) {
  TransitionReport report;
  report.beta = beta;
  report.rates = kind;
  for (double delta : delta_values) {
    TransitionSeries series;
    series.delta = delta;
    series.boundary = "slab:" + detail::format_double_short(delta);
    for (int l : l_values) {
      TransitionPoint pt;
      pt.l = l;
      try {
        Box box(l);
        BoundaryCondition omega = make_boundary(box, series.boundary);
        RateFamily fam(kind, beta);
        GeneratorOperator gen(box, omega, fam);
        GapResult res = exact_gap(gen);
        pt.gap = res.gap;
        pt.method = gap_method_name(res.method);
      } catch (const std::exception& e) {
        pt.error = e.what();
      }
      series.points.push_back(std::move(pt));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (const TransitionPoint& pt : series.points)
      if (pt.gap && *pt.gap > 0.0) {
        double x = pt.l, y = std::log(*pt.gap);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++n;
      }
    series.fit_points = n;
    if (n >= 3) {
      double denom = n * sxx - sx * sx;
      if (denom > 0.0) {
        series.slope = (n * sxy - sx * sy) / denom;
        series.intercept = (sy - *series.slope * sx) / n;
      }
    }
    report.series.push_back(std::move(series));
  }
  return report;
}

inline constexpr const char* transition_schema = "ising-gap transition v1";

inline nlohmann::ordered_json transition_to_json(const TransitionReport& rep) {
  nlohmann::ordered_json j;
  j["schema"] = transition_schema;
  j["beta"] = rep.beta;
  j["rates"] = rate_kind_name(rep.rates);
  j["series"] = nlohmann::ordered_json::array();
  for (const TransitionSeries& s : rep.series) {
    nlohmann::ordered_json js;
    js["delta"] = s.delta;
    js["boundary"] = s.boundary;
    js["points"] = nlohmann::ordered_json::array();
    for (const TransitionPoint& p : s.points) {
      nlohmann::ordered_json jp;
      jp["l"] = p.l;
      if (p.gap) jp["gap"] = *p.gap;
      if (!p.method.empty()) jp["method"] = p.method;
      if (!p.error.empty()) jp["error"] = p.error;
      js["points"].push_back(std::move(jp));
    }
    if (s.slope) js["slope"] = *s.slope;
    if (s.intercept) js["intercept"] = *s.intercept;
    js["fit_points"] = s.fit_points;
    j["series"].push_back(std::move(js));
  }
  return j;
}

inline std::string transition_to_text(const TransitionReport& rep) {
  std::ostringstream os;
  os << "# " << transition_schema << "\n";
  os << "beta " << detail::format_double_short(rep.beta) << ", rates "
     << rate_kind_name(rep.rates) << "\n";
  for (const TransitionSeries& s : rep.series) {
    os << "boundary " << s.boundary << ":\n";
    for (const TransitionPoint& p : s.points) {
      os << "  l=" << p.l;
      if (p.gap)
        os << " gap=" << detail::format_double(*p.gap) << " (" << p.method << ")";
      if (!p.error.empty()) os << " error=" << p.error;
      os << "\n";
    }
    if (s.slope)
      os << "  log-gap slope " << detail::format_double(*s.slope)
         << " over " << s.fit_points << " points\n";
    else
      os << "  no fit (" << s.fit_points << " valid points, need 3)\n";
  }
  return os.str();
}

// JSON record for a single gap query, used by the command-line tool.
inline nlohmann::ordered_json gap_record_json(int l, double beta,
                                              const std::string& boundary,
                                              RateKind kind,
                                              const GapResult& res) {
  nlohmann::ordered_json j;
  j["l"] = l;
  j["beta"] = beta;
  j["boundary_descriptor"] = boundary;
  j["rates"] = rate_kind_name(kind);
  j["gap"] = res.gap;
  j["method"] = gap_method_name(res.method);
  j["residual"] = res.residual;
  return j;
}

}  // namespace ising
