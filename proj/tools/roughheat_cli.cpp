// Command-line front end for the experiments.
//
// Exit codes: 0 success, 1 invalid configuration or failed validation,
// 2 divergence of the scheme.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>

#include "roughheat/analysis.hpp"
#include "roughheat/config.hpp"
#include "roughheat/error.hpp"
#include "roughheat/io.hpp"
#include "roughheat/kernels.hpp"
#include "roughheat/partition.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace roughheat;

namespace {

struct CommonFlags {
  std::string config;
  std::string seed_list;
  std::string levels;
  std::string out;
  int quad_offset = -1;
};

void add_common(CLI::App* sub, CommonFlags& f) {
  sub->add_option("--config", f.config, "JSON experiment configuration");
  sub->add_option("--seed-list", f.seed_list, "seeds, e.g. 1,2,3 or 1-8");
  sub->add_option("--levels", f.levels, "level range a..b");
  sub->add_option("--out", f.out, "output directory");
  sub->add_option("--quad-offset", f.quad_offset, "quadrature refinement offset");
}

// Defaults, then the config file, then flags.
ExperimentConfig resolve(const std::string& experiment, const CommonFlags& f) {
  ExperimentConfig cfg;
  if (!f.config.empty()) cfg = load_config(f.config);
  cfg.experiment = experiment;
  if (!f.seed_list.empty()) cfg.seeds = parse_seed_list(f.seed_list);
  if (!f.levels.empty()) std::tie(cfg.n_min, cfg.n_max) = parse_level_range(f.levels);
  if (f.quad_offset >= 0) cfg.quad_offset = f.quad_offset;
  if (!f.out.empty()) cfg.out = f.out;
  cfg.validate();
  return cfg;
}

void write_json(const ExperimentConfig& cfg, const std::string& name, const ordered_json& j) {
  if (cfg.out.empty()) return;
  fs::create_directories(cfg.out);
  std::ofstream os(fs::path(cfg.out) / name);
  os << j.dump(2) << '\n';
}

std::ofstream open_csv(const ExperimentConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.out);
  std::ofstream os(fs::path(cfg.out) / name);
  os << std::setprecision(17);
  return os;
}

ordered_json rate_json(const RateReport& r) {
  ordered_json j;
  j["levels"] = r.levels;
  j["errors"] = r.errors;
  j["beta_hat"] = r.slope;
  j["fit_residual"] = r.residual;
  j["beta_max"] = r.beta_max;
  j["exact"] = r.exact;
  j["seeds"] = r.seeds;
  j["seed_errors"] = r.seed_errors;
  j["seed_slopes"] = r.seed_slopes;
  return j;
}

void print_rate(const RateReport& r, const char* label) {
  std::cout << std::setprecision(6);
  for (std::size_t l = 0; l < r.levels.size(); ++l) {
    std::cout << "n=" << r.levels[l] << "  " << label << "=" << r.errors[l] << '\n';
  }
  if (r.exact) {
    std::cout << "all errors are zero (exact)\n";
  } else {
    std::cout << "fitted slope " << r.slope << " (rms " << r.residual << "), beta_max " << r.beta_max << '\n';
  }
}

int run_solve(const ExperimentConfig& cfg) {
  const Problem prob = build_problem(cfg, cfg.seeds.front());
  const Trajectory traj = solve(prob, cfg.n_max);
  double build = 0.0;
  for (double s : traj.build_seconds) build += s;
  const auto& end = traj.at(traj.steps());
  std::cout << "level " << cfg.n_max << ", " << traj.steps() << " steps, operator build " << build << " s\n";
  std::cout << "||y_1||_{B_gamma',2} = " << prob.basis->sobolev_norm2(cfg.gamma_prime, end) << '\n';
  if (!cfg.out.empty()) {
    fs::create_directories(cfg.out);
    write_trajectory_csv((fs::path(cfg.out) / "trajectory.csv").string(), *prob.basis, traj,
                         {cfg.gamma, cfg.gamma_prime, prob.driver->path().descriptor(), cfg.seeds.front()});
    auto os = open_csv(cfg, "multipliers_first_step.csv");
    const std::int64_t span = std::int64_t{1} << (prob.driver->fine_level() - cfg.n_max);
    write_multipliers_csv(os, *prob.basis, *prob.conv->operators(0, span));
  }
  return 0;
}

int run_convergence(const ExperimentConfig& cfg) {
  const auto rep = convergence_study(cfg);
  print_rate(rep, "E");
  write_json(cfg, "convergence.json", rate_json(rep));
  return 0;
}

int run_residual(const ExperimentConfig& cfg) {
  const auto rep = residual_scaling(cfg);
  print_rate(rep, "max|J|");
  write_json(cfg, "residual.json", rate_json(rep));
  return 0;
}

int run_continuity(const ExperimentConfig& cfg, bool psi_only) {
  const auto rep = continuity_study(cfg, true, !psi_only);
  ordered_json j;
  j["epsilons"] = rep.epsilons;
  j["seeds"] = rep.seeds;
  j["perturb_driver"] = rep.perturb_driver;
  j["ratio"] = rep.ratio;
  j["numerator"] = rep.numerator;
  j["denominator"] = rep.denominator;
  for (std::size_t s = 0; s < rep.seeds.size(); ++s) {
    std::cout << "seed " << rep.seeds[s] << ":";
    for (std::size_t e = 0; e < rep.epsilons.size(); ++e) {
      std::cout << "  R(" << rep.epsilons[e] << ")=" << rep.ratio[s][e];
    }
    std::cout << '\n';
  }
  write_json(cfg, "continuity.json", j);
  return 0;
}

int run_identification(const ExperimentConfig& cfg) {
  const auto rep = regular_identification(cfg);
  ordered_json j;
  j["levels"] = rep.levels;
  j["gaps"] = rep.gaps;
  j["reference_level"] = rep.reference_level;
  j["reference_self_difference"] = rep.reference_self_difference;
  for (std::size_t l = 0; l < rep.levels.size(); ++l) {
    std::cout << "n=" << rep.levels[l] << "  gap=" << rep.gaps[l] << '\n';
  }
  write_json(cfg, "identification.json", j);
  return 0;
}

int run_ito(const ExperimentConfig& cfg) {
  const auto rep = ito_compare(cfg);
  ordered_json j;
  j["levels"] = rep.levels;
  j["mean_square_gap"] = rep.mean_square_gap;
  j["geometric_shift"] = rep.geometric_shift;
  j["seeds"] = rep.seeds;
  j["reference_level"] = rep.reference_level;
  for (std::size_t l = 0; l < rep.levels.size(); ++l) {
    std::cout << "n=" << rep.levels[l] << "  mean-square gap=" << rep.mean_square_gap[l]
              << "  geometric shift=" << rep.geometric_shift[l] << '\n';
  }
  write_json(cfg, "ito_compare.json", j);
  return 0;
}

int run_partition(const ExperimentConfig& cfg, std::int64_t sweep_max) {
  const auto tr = run_removal(cfg.N);
  std::cout << "M=" << tr.M << '\n' << "A =";
  for (int r = 1; r < tr.M; ++r) std::cout << (r > 1 ? ", " : " ") << tr.A[static_cast<std::size_t>(r)];
  std::cout << '\n' << "A_M = " << tr.A.back() << '\n';
  const auto bounds = verify_bounds(cfg.N);
  const auto cross = cross_check(cfg.N);
  for (const auto& v : bounds.violations) std::cout << "bound violation: " << v << '\n';
  for (const auto& v : cross.violations) std::cout << "cross-check: " << v << '\n';
  std::cout << "weighted sum (kappa=0.2, mu=1.1, gamma'=0.75): " << weighted_sum(tr, 0.2, 1.1, 0.75) << '\n';
  if (!cfg.out.empty()) {
    auto os = open_csv(cfg, "trace.csv");
    os << "m,r,k,k_plus,k_minus\n";
    for (std::int64_t m = 1; m < tr.N; ++m) {
      os << m << ',' << tr.step_of(m) << ',' << tr.k(m) << ',' << tr.k_plus(m) << ',' << tr.k_minus(m) << '\n';
    }
    if (sweep_max >= 2) {
      auto bs = open_csv(cfg, "bounds_sweep.csv");
      bs << "N,r,A_r,slack\n";
      auto ws = open_csv(cfg, "weighted_sum_sweep.csv");
      ws << "N,weighted_sum\n";
      for (std::int64_t N = 2; N <= sweep_max; ++N) {
        const auto A = a_sequence(N);
        for (std::size_t r = 0; r < A.size(); ++r) {
          const double slack = static_cast<double>(A[r]) - static_cast<double>(N) * (1.0 - std::ldexp(1.0, -static_cast<int>(r + 1)));
          bs << N << ',' << r + 1 << ',' << A[r] << ',' << slack << '\n';
        }
        if ((N & (N - 1)) == 0) ws << N << ',' << weighted_sum(N, 0.2, 1.1, 0.75) << '\n';
      }
    }
  }
  return bounds.ok && cross.ok ? 0 : 1;
}

int run_validate_driver(const ExperimentConfig& cfg, double hurst, int nseeds, int channels, int level) {
  bool ok = true;
  std::cout << std::setprecision(4);
  for (int s = 1; s <= nseeds; ++s) {
    const auto path = std::make_shared<const DriverPath>(
        sample_fbm(hurst, channels, level, static_cast<std::uint64_t>(s)));
    std::vector<EnhancedDriver> lifts{enhance_geometric(path)};
    if (hurst == 0.5) lifts.push_back(enhance_ito(path));
    double scale = 1.0;
    for (int i = 0; i < channels; ++i) {
      for (double v : path->samples(i)) scale = std::max(scale, 1.0 + v * v);
    }
    std::mt19937_64 rng(static_cast<std::uint64_t>(s));
    std::uniform_int_distribution<std::int64_t> pick(0, path->steps());
    for (const auto& e : lifts) {
      double worst = 0.0;
      for (int trial = 0; trial < 100; ++trial) {
        std::int64_t a = pick(rng), b = pick(rng), c = pick(rng);
        if (a > b) std::swap(a, b);
        if (b > c) std::swap(b, c);
        if (a > b) std::swap(a, b);
        const double h = path->step();
        for (double d : chen_defect(e, h * a, h * b, h * c)) worst = std::max(worst, std::abs(d));
      }
      const auto norms = holder_norms(e, 0.45, std::min(level, 8));
      const bool pass = worst <= 1e-10 * scale;
      ok = ok && pass;
      std::cout << "seed " << s << " " << (e.chronology() == Chronology::ito ? "ito      " : "geometric")
                << "  max Chen defect " << worst << "  ||x||_g " << norms.path << "  ||XX||_2g " << norms.area
                << (pass ? "" : "  FAIL") << '\n';
    }
  }
  (void)cfg;
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rough parabolic equation solver and experiments"};
  app.require_subcommand(1);
  CommonFlags flags;

  auto* solve_cmd = app.add_subcommand("solve", "solve at level n_max and export the trajectory");
  add_common(solve_cmd, flags);
  auto* conv_cmd = app.add_subcommand("convergence", "self-convergence rate in B_{gamma',2}");
  add_common(conv_cmd, flags);
  auto* cont_cmd = app.add_subcommand("continuity", "perturbation ratios for initial data and driver");
  add_common(cont_cmd, flags);
  bool psi_only = false;
  cont_cmd->add_flag("--psi-only", psi_only, "perturb only the initial condition");
  auto* ito_cmd = app.add_subcommand("ito-compare", "scheme with Ito area against exponential Euler");
  add_common(ito_cmd, flags);
  auto* id_cmd = app.add_subcommand("identification", "scheme against the classical solution");
  add_common(id_cmd, flags);
  auto* res_cmd = app.add_subcommand("residual", "scaling of the two-step residual J");
  add_common(res_cmd, flags);

  auto* part_cmd = app.add_subcommand("partition", "point-removal trace and bounds");
  add_common(part_cmd, flags);
  std::int64_t N = -1, sweep_max = 0;
  part_cmd->add_option("--N", N, "number of intervals");
  part_cmd->add_option("--sweep", sweep_max, "also write sweeps for 2..S (needs --out)");

  auto* vd_cmd = app.add_subcommand("validate-driver", "Chen relation and Hoelder norms of sampled fBm");
  add_common(vd_cmd, flags);
  double hurst = 0.5;
  int nseeds = 4, channels = 2, level = 10;
  vd_cmd->add_option("--H", hurst, "Hurst index");
  vd_cmd->add_option("--seeds", nseeds, "number of seeds");
  vd_cmd->add_option("--channels", channels, "driver channels");
  vd_cmd->add_option("--fine-level", level, "dyadic level of the samples");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    const auto* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    ExperimentConfig cfg = resolve(name, flags);
    if (name == "partition") {
      if (N >= 0) cfg.N = N;
      cfg.validate();
      return run_partition(cfg, sweep_max);
    }
    if (name == "validate-driver") {
      if (nseeds < 1 || channels < 1) throw ConfigError("--seeds", "must be >= 1");
      return run_validate_driver(cfg, hurst, nseeds, channels, level);
    }
    std::cout << "kernels: " << kernels::backend_name(kernels::active_backend()) << '\n';
    if (name == "solve") return run_solve(cfg);
    if (name == "convergence") return run_convergence(cfg);
    if (name == "continuity") return run_continuity(cfg, psi_only);
    if (name == "ito-compare") return run_ito(cfg);
    if (name == "identification") return run_identification(cfg);
    if (name == "residual") return run_residual(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
