// Command-line surface: threshold queries, exact/Sinkhorn EMD baselines,
// synthetic data generation, and the benchmark sweep.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "emdq/bench.hpp"
#include "emdq/datagen.hpp"
#include "emdq/io.hpp"
#include "emdq/query.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitImbalance = 3;
constexpr int kExitSolver = 4;

struct SolverFlags {
  std::string solver = "exact";
  double eta = 0.0;
  int max_iter = 10'000;
  double tol = 1e-6;

  void attach(CLI::App* cmd) {
    cmd->add_option("--solver", solver, "Transport solver: exact|sinkhorn")
        ->check(CLI::IsMember({"exact", "sinkhorn"}));
    cmd->add_option("--eta", eta,
                    "Sinkhorn regularization (0 = 2% of the max distance)");
    cmd->add_option("--max-iter", max_iter, "Sinkhorn iteration cap");
    cmd->add_option("--tol", tol, "Sinkhorn marginal tolerance (times W)");
  }

  emdq::SolverConfig config() const {
    emdq::SolverConfig cfg;
    if (solver == "sinkhorn") {
      cfg.kind = emdq::SolverConfig::Kind::sinkhorn;
      cfg.sinkhorn.eta = eta;
      cfg.sinkhorn.max_iter = max_iter;
      cfg.sinkhorn.tolerance = tol;
    }
    return cfg;
  }
};

struct ModeFlags {
  std::string mode = "adaptive";
  int rho = 1;

  void attach(CLI::App* cmd) {
    cmd->add_option("--mode", mode, "Cover construction: adaptive|fixed")
        ->check(CLI::IsMember({"adaptive", "fixed"}));
    cmd->add_option("--rho", rho, "Doubling dimension for --mode fixed")
        ->check(CLI::Range(1, 15));
  }

  emdq::CoverMode config() const {
    return mode == "fixed" ? emdq::CoverMode::fixed(rho)
                           : emdq::CoverMode::adaptive();
  }
};

json outcome_to_json(const emdq::QueryOutcome& outcome, double threshold,
                     double epsilon) {
  json levels = json::array();
  for (const emdq::LevelTrace& t : outcome.levels) {
    levels.push_back({{"level", t.level},
                      {"nodes", t.node_count},
                      {"a_size", t.a_size},
                      {"b_size", t.b_size},
                      {"estimate", t.estimate},
                      {"band", t.band},
                      {"elapsed_s", t.elapsed_seconds}});
  }
  return json{{"verdict", emdq::to_string(outcome.verdict)},
              {"threshold", threshold},
              {"epsilon", epsilon},
              {"spread", outcome.spread},
              {"max_levels", outcome.max_levels},
              {"levels", levels}};
}

void print_outcome(const emdq::QueryOutcome& outcome) {
  std::printf("spread: %.17g\n", outcome.spread);
  std::printf("max_levels: %d\n", outcome.max_levels);
  std::printf("%-6s %-8s %-8s %-8s %-22s %-22s %s\n", "level", "nodes",
              "|A_i|", "|B_i|", "estimate", "band", "time_s");
  for (const emdq::LevelTrace& t : outcome.levels) {
    std::printf("%-6d %-8zu %-8zu %-8zu %-22.15g %-22.15g %.6f\n", t.level,
                t.node_count, t.a_size, t.b_size, t.estimate, t.band,
                t.elapsed_seconds);
  }
  std::printf("verdict: %s\n", emdq::to_string(outcome.verdict).c_str());
}

int run_query(const std::string& a_path, const std::string& b_path,
              double threshold, double epsilon, const SolverFlags& solver,
              const ModeFlags& mode, bool weighted, bool as_json,
              const std::string& dump_levels) {
  const emdq::WeightedPointSet A = emdq::read_point_set(a_path, weighted);
  const emdq::WeightedPointSet B = emdq::read_point_set(b_path, weighted);

  emdq::QueryParams params;
  params.threshold = threshold;
  params.epsilon = epsilon;
  params.solver = solver.config();
  params.mode = mode.config();

  if (params.solver.kind == emdq::SolverConfig::Kind::sinkhorn) {
    std::fprintf(stderr,
                 "warning: with --solver sinkhorn the estimates are upper "
                 "bounds only; verdicts lose their exact-solver guarantee\n");
  }

  if (!dump_levels.empty()) {
    // Rebuild the traversed levels for the dump; the query itself keeps only
    // two levels resident.
    std::ofstream os(dump_levels);
    if (!os) throw emdq::ParseError(dump_levels + ": cannot open for writing");
    const emdq::QueryOutcome outcome = emdq::emd_query(A, B, params);
    std::vector<double> coords(A.coords().begin(), A.coords().end());
    coords.insert(coords.end(), B.coords().begin(), B.coords().end());
    const emdq::PointView P(coords.data(), A.size() + B.size(), A.dim());
    if (outcome.spread > 0.0) {
      emdq::CoverLevel level = emdq::root_level(P, 0);
      for (const emdq::LevelTrace& t : outcome.levels) {
        level = emdq::next_level(P, level, std::ldexp(outcome.spread, 1 - t.level),
                                 params.mode);
        emdq::dump_level_csv(os, level);
      }
    }
    if (as_json) {
      std::cout << outcome_to_json(outcome, threshold, epsilon).dump(2) << '\n';
    } else {
      print_outcome(outcome);
    }
    return kExitOk;
  }

  const emdq::QueryOutcome outcome = emdq::emd_query(A, B, params);
  if (as_json) {
    std::cout << outcome_to_json(outcome, threshold, epsilon).dump(2) << '\n';
  } else {
    print_outcome(outcome);
  }
  return kExitOk;
}

int run_emd(const std::string& a_path, const std::string& b_path,
            const SolverFlags& solver, bool weighted, bool as_json) {
  const emdq::WeightedPointSet A = emdq::read_point_set(a_path, weighted);
  const emdq::WeightedPointSet B = emdq::read_point_set(b_path, weighted);
  emdq::TransportInstance inst(A, B);
  const double W = A.total_weight();

  const auto start = std::chrono::steady_clock::now();
  emdq::TransportPlan plan;
  emdq::SinkhornDiagnostics diag;
  if (solver.config().kind == emdq::SolverConfig::Kind::exact) {
    plan = emdq::solve_exact(inst);
  } else {
    plan = emdq::solve_sinkhorn(inst, solver.config().sinkhorn, &diag);
    if (!diag.converged) {
      std::fprintf(stderr, "warning: sinkhorn stopped at %d iterations with "
                   "marginal violation %.3g\n",
                   diag.iterations, diag.marginal_violation);
    }
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();

  if (as_json) {
    std::cout << json{{"emd", plan.cost / W},
                      {"cost", plan.cost},
                      {"total_weight", W},
                      {"time_s", elapsed}}
                     .dump(2)
              << '\n';
  } else {
    std::printf("emd: %.17g\n", plan.cost / W);
    std::printf("cost: %.17g\n", plan.cost);
    std::printf("time_s: %.6f\n", elapsed);
  }
  return kExitOk;
}

int run_gen(const std::string& out, std::size_t n, std::size_t d,
            std::size_t m, int degree, std::uint64_t seed, double scale,
            const std::string& format) {
  emdq::ManifoldSpec spec;
  spec.ambient_dim = d;
  spec.intrinsic_dim = m;
  spec.degree = degree;
  spec.n_points = n;
  spec.seed = seed;
  spec.coefficient_scale = scale;
  const emdq::WeightedPointSet set = emdq::sample_manifold(spec);

  bool csv = format == "csv";
  if (format == "auto") {
    csv = out.size() >= 4 && out.substr(out.size() - 4) == ".csv";
  }
  if (csv) {
    emdq::write_csv(out, set);
  } else {
    emdq::write_binary(out, set);
  }
  std::printf("wrote %zu points (d=%zu) to %s\n", set.size(), set.dim(),
              out.c_str());
  return kExitOk;
}

int run_bench_cmd(const std::string& a_path, const std::string& b_path,
                  const std::string& theta_range,
                  const std::string& eps_list, int repeats,
                  const std::string& out, const std::string& baselines,
                  const SolverFlags& solver, const ModeFlags& mode,
                  bool weighted) {
  emdq::BenchConfig config;

  const std::size_t dots = theta_range.find("..");
  if (dots == std::string::npos) {
    throw emdq::InputError("--theta-range expects LO..HI, e.g. -6..6");
  }
  try {
    config.theta_lo = std::stoi(theta_range.substr(0, dots));
    config.theta_hi = std::stoi(theta_range.substr(dots + 2));
  } catch (const std::exception&) {
    throw emdq::InputError("--theta-range expects LO..HI, e.g. -6..6");
  }

  config.epsilons.clear();
  std::size_t pos = 0;
  while (pos <= eps_list.size()) {
    const std::size_t comma = eps_list.find(',', pos);
    const std::string cell = eps_list.substr(
        pos, comma == std::string::npos ? std::string::npos : comma - pos);
    try {
      config.epsilons.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw emdq::InputError("--eps expects a comma-separated list of values");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }

  config.repeats = repeats;
  config.baseline_exact = baselines.find("net") != std::string::npos;
  config.baseline_sinkhorn = baselines.find("sin") != std::string::npos;
  config.query_solver = solver.config();
  config.mode = mode.config();

  const emdq::WeightedPointSet A = emdq::read_point_set(a_path, weighted);
  const emdq::WeightedPointSet B = emdq::read_point_set(b_path, weighted);

  const emdq::BenchReport report = emdq::run_bench(A, B, config);

  std::ofstream os(out);
  if (!os) throw emdq::ParseError(out + ": cannot open for writing");
  emdq::write_bench_csv(os, report);

  std::printf("emd_exact: %.17g\n", report.emd_exact);
  std::printf("spread: %.17g\n", report.spread);
  std::printf("time_net_s: %.6f\n", report.time_net_s);
  if (config.baseline_sinkhorn) {
    std::printf("time_sin_s: %.6f\n", report.time_sin_s);
  }
  std::printf("precision: %.4f (%zu rows)\n", report.precision,
              report.rows.size());
  std::printf("wrote %s\n", out.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Earth mover's distance threshold queries via hierarchical "
               "decomposition"};
  app.require_subcommand(1);

  // query
  auto* query = app.add_subcommand("query", "Answer an EMD threshold query");
  std::string q_a, q_b, q_dump;
  double q_threshold = 0.0, q_eps = 0.05;
  bool q_weighted = false, q_json = false;
  SolverFlags q_solver;
  ModeFlags q_mode;
  query->add_option("--a", q_a, "Point set A (CSV or binary)")->required();
  query->add_option("--b", q_b, "Point set B (CSV or binary)")->required();
  query->add_option("--threshold", q_threshold, "Threshold T >= 0")->required();
  query->add_option("--eps", q_eps, "Error parameter in (0,1)");
  q_solver.attach(query);
  q_mode.attach(query);
  query->add_flag("--weighted", q_weighted, "CSV first column is the weight");
  query->add_flag("--json", q_json, "Emit the outcome as one JSON object");
  query->add_option("--dump-levels", q_dump, "Write traversed levels as CSV");

  // emd
  auto* emd = app.add_subcommand("emd", "Compute the EMD of two point sets");
  std::string e_a, e_b;
  bool e_weighted = false, e_json = false;
  SolverFlags e_solver;
  emd->add_option("--a", e_a, "Point set A")->required();
  emd->add_option("--b", e_b, "Point set B")->required();
  e_solver.attach(emd);
  emd->add_flag("--weighted", e_weighted, "CSV first column is the weight");
  emd->add_flag("--json", e_json, "Emit the result as one JSON object");

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a synthetic manifold sample");
  std::string g_out, g_format = "auto";
  std::size_t g_n = 1000, g_d = 500, g_m = 2;
  int g_degree = 1;
  std::uint64_t g_seed = 0;
  double g_scale = 1.0;
  gen->add_option("--out", g_out, "Output file")->required();
  gen->add_option("--n", g_n, "Number of points")->required();
  gen->add_option("--d", g_d, "Ambient dimension");
  gen->add_option("--m", g_m, "Intrinsic dimension (1..5)");
  gen->add_option("--degree", g_degree, "Polynomial degree (1..50)");
  gen->add_option("--seed", g_seed, "RNG seed");
  gen->add_option("--scale", g_scale, "Coefficient scale");
  gen->add_option("--format", g_format, "auto|csv|bin")
      ->check(CLI::IsMember({"auto", "csv", "bin"}));

  // bench
  auto* bench = app.add_subcommand("bench", "Threshold sweep benchmark");
  std::string b_a, b_b, b_theta = "-6..6", b_eps = "0.05", b_out,
              b_baselines = "net,sin";
  int b_repeat = 1;
  bool b_weighted = false;
  SolverFlags b_solver;
  ModeFlags b_mode;
  bench->add_option("--a", b_a, "Point set A")->required();
  bench->add_option("--b", b_b, "Point set B")->required();
  bench->add_option("--theta-range", b_theta, "Inclusive range LO..HI");
  bench->add_option("--eps", b_eps, "Comma-separated epsilon values");
  bench->add_option("--repeat", b_repeat, "Query repetitions per row");
  bench->add_option("--out", b_out, "Output CSV")->required();
  bench->add_option("--baselines", b_baselines,
                    "Baselines to time: net,sin (exact one is mandatory)");
  b_solver.attach(bench);
  b_mode.attach(bench);
  bench->add_flag("--weighted", b_weighted, "CSV first column is the weight");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    app.exit(e);
    return kExitParse;
  }

  try {
    if (*query) {
      return run_query(q_a, q_b, q_threshold, q_eps, q_solver, q_mode,
                       q_weighted, q_json, q_dump);
    }
    if (*emd) {
      return run_emd(e_a, e_b, e_solver, e_weighted, e_json);
    }
    if (*gen) {
      return run_gen(g_out, g_n, g_d, g_m, g_degree, g_seed, g_scale, g_format);
    }
    if (*bench) {
      return run_bench_cmd(b_a, b_b, b_theta, b_eps, b_repeat, b_out,
                           b_baselines, b_solver, b_mode, b_weighted);
    }
  } catch (const emdq::BalanceError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitImbalance;
  } catch (const emdq::SolverError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitSolver;
  } catch (const emdq::InputError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitParse;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitParse;
  }
  return kExitOk;
}
