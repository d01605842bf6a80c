// ising-gap: spectral gaps, bound sweeps, lemma spot-checks, and trajectory
// sampling for the two-dimensional stochastic Ising model on a finite box
// with arbitrary boundary fields.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ising/experiment.hpp"
#include "ising/lemma_checks.hpp"

namespace {

using namespace ising;

int cmd_run(const std::string& plan_path, const std::string& csv_override,
            const std::string& json_override) {
  ExperimentPlan plan = plan_from_file(plan_path);
  std::vector<ExperimentRecord> records = run_plan(plan);
  std::string csv_path = csv_override.empty() ? plan.csv_path : csv_override;
  std::string json_path = json_override.empty() ? plan.json_path : json_override;
  if (!csv_path.empty()) write_text_file(csv_path, records_to_csv(records));
  if (!json_path.empty()) write_text_file(json_path, records_to_json(records));
  if (csv_path.empty() && json_path.empty())
    std::cout << records_to_csv(records);
  int failed = 0;
  double wall = 0.0;
  for (const ExperimentRecord& r : records) {
    failed += r.ok ? 0 : 1;
    wall += r.wall_seconds;
  }
  std::fprintf(stderr, "%zu grid points, %d failed, %.1f s\n", records.size(),
               failed, wall);
  for (const ExperimentRecord& r : records)
    if (!r.ok)
      std::fprintf(stderr, "  failed l=%d beta=%g %s %s: %s\n", r.l, r.beta,
                   r.boundary.c_str(), rate_kind_name(r.rates).c_str(),
                   r.error.c_str());
  return failed == 0 ? 0 : 1;
}

int cmd_gap(int l, double beta, const std::string& boundary,
            const std::string& rates, std::uint64_t max_dense_dim) {
  Box box(l);
  BoundaryCondition omega = make_boundary(box, boundary);
  RateKind kind = parse_rate_kind(rates);
  GeneratorOperator gen(box, omega, RateFamily(kind, beta));
  GapOptions opt;
  if (max_dense_dim > 0) opt.max_dense_dim = max_dense_dim;
  GapResult res = exact_gap(gen, opt);
  std::cout << gap_record_json(l, beta, boundary, kind, res).dump(2) << "\n";
  return res.method == GapMethod::iterative_eig && !res.converged ? 1 : 0;
}

struct SuiteResult {
  std::string name;
  long long attempted = 0;
  long long checked = 0;
  long long violations = 0;
};

void print_suite(const SuiteResult& s) {
  std::printf("%-28s attempted %6lld, checked %6lld, violations %lld\n",
              s.name.c_str(), s.attempted, s.checked, s.violations);
}

int cmd_verify_lemmas(int l, long long samples, std::uint64_t seed) {
  Box box(l);
  std::vector<SuiteResult> suites;

  {
    SuiteResult s{"energy identity"};
    Philox rng(seed, 1);
    for (long long i = 0; i < samples; ++i) {
      ++s.attempted;
      Configuration sigma = random_configuration(box, rng);
      BoundaryCondition omega = random_dyadic_boundary(box, rng);
      for (int eps : {+1, -1})
        for (const Contour& g : epsilon_contours_at(sigma, eps)) {
          double lhs = 0.5 * delta_H(sigma, omega, g);
          double field = 0.0;
          for (Site y : v_ex(box, g)) field += omega.at_site(y);
          double rhs =
              static_cast<double>(interior_part(box, g).size()) - eps * field;
          ++s.checked;
          if (lhs != rhs) ++s.violations;
        }
    }
    suites.push_back(s);
  }
  {
    SuiteResult s{"noncrossing energy bounds"};
    Philox rng(seed, 2);
    for (long long i = 0; i < samples; ++i) {
      ++s.attempted;
      auto inst = sample_noncrossing_instance(box, rng);
      if (!inst) continue;
      NoncrossingEnergyReport rep = check_noncrossing_energy(
          inst->sigma, inst->omega, inst->eps, inst->gamma);
      if (!rep.hypotheses) continue;
      ++s.checked;
      if (!rep.interior_share || !rep.energy_bound || !rep.arc_bound ||
          !rep.arc_nonneg)
        ++s.violations;
    }
    suites.push_back(s);
  }
  {
    SuiteResult s{"single-side bound"};
    Philox rng(seed, 3);
    for (long long i = 0; i < samples; ++i) {
      ++s.attempted;
      auto inst = sample_single_side_instance(box, rng);
      if (!inst) continue;
      InequalityReport rep =
          check_single_side(inst->sigma, inst->omega, inst->eps, inst->gamma);
      if (!rep.hypotheses) continue;
      ++s.checked;
      if (!rep.holds) ++s.violations;
    }
    suites.push_back(s);
  }
  {
    SuiteResult s{"origin contour bound"};
    Philox rng(seed, 4);
    for (long long i = 0; i < samples; ++i) {
      ++s.attempted;
      auto inst = sample_origin_instance(box, rng);
      if (!inst) continue;
      InequalityReport rep = check_origin_contour(inst->sigma, inst->omega,
                                                  inst->eps, inst->gamma);
      if (!rep.hypotheses) continue;
      ++s.checked;
      if (!rep.holds) ++s.violations;
    }
    suites.push_back(s);
  }
  {
    SuiteResult s{"scaled perimeter bound"};
    Philox rng(seed, 5);
    for (long long i = 0; i < samples; ++i) {
      ++s.attempted;
      auto inst = sample_scaled_instance(box, rng);
      if (!inst) continue;
      InequalityReport rep = check_scaled_perimeter(
          inst->sigma, inst->omega, inst->eps, inst->gammas, inst->c1,
          inst->c2);
      if (!rep.hypotheses) continue;
      ++s.checked;
      if (!rep.holds) ++s.violations;
    }
    suites.push_back(s);
  }
  {
    SuiteResult s{"interval energy bound"};
    Philox rng(seed, 6);
    std::vector<BoundaryCondition> boundaries{make_alternating_boundary(box),
                                              make_free_boundary(box)};
    const double delta_w2 = 0.5;
    long long per_boundary = samples / static_cast<long long>(boundaries.size());
    if (per_boundary < 1) per_boundary = 1;
    for (const BoundaryCondition& omega : boundaries) {
      if (!validate_w2(omega, delta_w2).passes) continue;
      for (long long i = 0; i < per_boundary; ++i) {
        ++s.attempted;
        auto inst = sample_interval_instance(box, rng, delta_w2, omega);
        if (!inst) continue;
        InequalityReport rep = check_interval_energy(
            inst->sigma, inst->omega, inst->eps, inst->gammas, inst->delta_w2,
            inst->interval, inst->c);
        if (!rep.hypotheses) continue;
        ++s.checked;
        if (!rep.holds) ++s.violations;
      }
    }
    suites.push_back(s);
  }

  long long total_checked = 0, total_violations = 0;
  for (const SuiteResult& s : suites) {
    print_suite(s);
    total_checked += s.checked;
    total_violations += s.violations;
  }
  std::printf("total: checked %lld, violations %lld\n", total_checked,
              total_violations);
  return (total_violations == 0 && total_checked > 0) ? 0 : 1;
}

int cmd_transition(double beta, const std::vector<int>& l_values,
                   const std::vector<double>& delta_values,
                   const std::string& rates, const std::string& json_path) {
  TransitionReport rep =
      transition_study(l_values, beta, delta_values, parse_rate_kind(rates));
  std::cout << transition_to_text(rep);
  if (!json_path.empty())
    write_text_file(json_path, transition_to_json(rep).dump(2) + "\n");
  for (const TransitionSeries& s : rep.series)
    for (const TransitionPoint& p : s.points)
      if (!p.error.empty()) return 1;
  return 0;
}

int cmd_simulate(int l, double beta, const std::string& boundary,
                 const std::string& rates, double t_max, double burn_in,
                 int replicas, std::uint64_t seed, int grid_points,
                 const std::string& csv_path) {
  Box box(l);
  BoundaryCondition omega = make_boundary(box, boundary);
  RateFamily fam(parse_rate_kind(rates), beta);
  TrapEvent trap = trap_event_from_boundary(omega);
  Configuration sigma0 = trap.epsilon > 0 ? Configuration::all_plus(box)
                                          : Configuration::all_minus(box);
  if (!(burn_in >= 0.0 && burn_in < t_max))
    throw std::invalid_argument("burn-in must lie in [0, t_max)");
  if (grid_points < 1) throw std::invalid_argument("need grid points >= 1");
  std::vector<Trajectory> trajs =
      simulate_replicas(box, omega, fam, sigma0, t_max, seed, replicas);

  int center = box.index_of(Site{0, 0});
  BoxBits bits(box);
  std::ostringstream os;
  os << "# ising-gap samples v1\n";
  os << "replica,time,center_spin,total_magnetization,trap_indicator\n";
  double span = t_max - burn_in;
  for (std::size_t r = 0; r < trajs.size(); ++r) {
    const Trajectory& traj = trajs[r];
    Configuration state(box, traj.initial_bits);
    std::size_t next_event = 0;
    for (int k = 0; k < grid_points; ++k) {
      double t = burn_in + span * (k + 1) / grid_points;
      while (next_event < traj.events.size() &&
             traj.events[next_event].first <= t) {
        state.flip(traj.events[next_event].second);
        ++next_event;
      }
      double mag = 0.0;
      for (int i = 0; i < box.size(); ++i) mag += state.spin(i);
      os << r << ',' << detail::format_double(t) << ',' << state.spin(center)
         << ',' << detail::format_double(mag) << ','
         << (in_trap(trap, bits, state.bits()) ? 1 : 0) << '\n';
    }
  }
  if (csv_path.empty())
    std::cout << os.str();
  else
    write_text_file(csv_path, os.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Spectral gaps and Glauber dynamics for the 2-D Ising model on a "
      "finite box with arbitrary boundary fields"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "execute a sweep plan file");
  std::string plan_path, run_csv, run_json;
  run->add_option("--plan", plan_path, "plan file (key = value lines)")
      ->required();
  run->add_option("--csv", run_csv, "CSV output path (overrides the plan)");
  run->add_option("--json", run_json, "JSON output path (overrides the plan)");

  // gap
  auto* gap = app.add_subcommand("gap", "exact spectral gap of one instance");
  int gap_l = 3;
  double gap_beta = 1.0;
  std::string gap_boundary = "plus", gap_rates = "exponential";
  std::uint64_t gap_dense = 0;
  gap->add_option("--l", gap_l, "box side")->required();
  gap->add_option("--beta", gap_beta, "inverse temperature")->required();
  gap->add_option("--boundary", gap_boundary,
                  "descriptor: plus|minus|free|alternating|slab:<f>|"
                  "iid:<mean>:<seed>|file:<path>")
      ->required();
  gap->add_option("--rates", gap_rates,
                  "exponential|metropolis|heat_bath")
      ->required();
  gap->add_option("--max-dense-dim", gap_dense,
                  "largest state count solved densely (default 16384)");

  // verify-lemmas
  auto* verify = app.add_subcommand(
      "verify-lemmas", "randomized contour-energy inequality suites");
  int vl_l = 6;
  long long vl_samples = 1000;
  std::uint64_t vl_seed = 2024;
  verify->add_option("--l", vl_l, "box side")->required();
  verify->add_option("--samples", vl_samples, "instances per suite")
      ->required();
  verify->add_option("--seed", vl_seed, "RNG seed")->required();

  // transition
  auto* trans = app.add_subcommand(
      "transition", "slab-boundary gap decay rates across mixture fractions");
  double tr_beta = 2.0;
  std::vector<int> tr_l{2, 3, 4};
  std::vector<double> tr_delta{0.25, 0.5, 0.75, 1.0};
  std::string tr_rates = "exponential", tr_json;
  trans->add_option("--beta", tr_beta, "inverse temperature")->required();
  trans->add_option("--l", tr_l, "comma-separated box sides")
      ->delimiter(',');
  trans->add_option("--delta", tr_delta, "comma-separated slab fractions")
      ->delimiter(',');
  trans->add_option("--rates", tr_rates, "rate family");
  trans->add_option("--json", tr_json, "JSON report path");

  // simulate
  auto* sim = app.add_subcommand(
      "simulate", "stream thinned trajectory samples as CSV");
  int sim_l = 3, sim_replicas = 1, sim_grid = 1000;
  double sim_beta = 1.0, sim_tmax = 100.0, sim_burn = 0.0;
  std::string sim_boundary = "plus", sim_rates = "exponential", sim_csv;
  std::uint64_t sim_seed = 20240901;
  sim->add_option("--l", sim_l, "box side")->required();
  sim->add_option("--beta", sim_beta, "inverse temperature")->required();
  sim->add_option("--boundary", sim_boundary, "boundary descriptor")
      ->required();
  sim->add_option("--rates", sim_rates, "rate family");
  sim->add_option("--t-max", sim_tmax, "trajectory length")->required();
  sim->add_option("--burn-in", sim_burn, "samples start after this time");
  sim->add_option("--replicas", sim_replicas, "independent trajectories");
  sim->add_option("--seed", sim_seed, "RNG seed (stream = replica index)");
  sim->add_option("--grid-points", sim_grid, "samples per trajectory");
  sim->add_option("--csv", sim_csv, "output path (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(plan_path, run_csv, run_json);
    if (*gap) return cmd_gap(gap_l, gap_beta, gap_boundary, gap_rates,
                             gap_dense);
    if (*verify) return cmd_verify_lemmas(vl_l, vl_samples, vl_seed);
    if (*trans)
      return cmd_transition(tr_beta, tr_l, tr_delta, tr_rates, tr_json);
    if (*sim)
      return cmd_simulate(sim_l, sim_beta, sim_boundary, sim_rates, sim_tmax,
                          sim_burn, sim_replicas, sim_seed, sim_grid, sim_csv);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
