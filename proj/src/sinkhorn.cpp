#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "emdq/transport.hpp"

namespace emdq {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(sum_j exp(values[j])) with max shift; returns -inf for all -inf input.
double log_sum_exp(std::span<const double> values) {
  double max_val = kNegInf;
  for (const double v : values) max_val = std::max(max_val, v);
  if (!std::isfinite(max_val)) return max_val;
  double acc = 0.0;
  for (const double v : values) acc += std::exp(v - max_val);
  return max_val + std::log(acc);
}

}  // namespace

TransportPlan solve_sinkhorn(const TransportInstance& inst,
                             const SinkhornOptions& opts,
                             SinkhornDiagnostics* diagnostics,
                             const Tolerances& /*tol*/) {
  if (opts.eta < 0.0) throw InputError("solve_sinkhorn: eta must be positive");
  if (opts.max_iter < 1) throw InputError("solve_sinkhorn: max_iter must be >= 1");
  if (!(opts.tolerance > 0.0)) throw InputError("solve_sinkhorn: tolerance must be > 0");

  const WeightedPointSet& A = inst.sources();
  const WeightedPointSet& B = inst.sinks();

  std::vector<std::uint32_t> ia, ib;
  for (std::size_t i = 0; i < A.size(); ++i) {
    if (A.weight(i) > 0.0) ia.push_back(static_cast<std::uint32_t>(i));
  }
  for (std::size_t j = 0; j < B.size(); ++j) {
    if (B.weight(j) > 0.0) ib.push_back(static_cast<std::uint32_t>(j));
  }
  if (ia.empty() && ib.empty()) {
    if (diagnostics) *diagnostics = SinkhornDiagnostics{true, 0, 0.0, opts.eta};
    return TransportPlan{};
  }
  if (ia.empty() || ib.empty()) {
    throw BalanceError("solve_sinkhorn: one side has no positive weight");
  }

  const std::size_t n = ia.size();
  const std::size_t m = ib.size();
  if (n > TransportInstance::kCostMatrixCap / m) {
    throw SolverError("solve_sinkhorn: instance too large to materialize");
  }

  std::vector<double> cost(n * m);
  double max_cost = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = A.point(ia[i]);
    for (std::size_t j = 0; j < m; ++j) {
      const double d = distance(p, B.point(ib[j]));
      if (!std::isfinite(d)) throw InputError("solve_sinkhorn: non-finite distance");
      cost[i * m + j] = d;
      max_cost = std::max(max_cost, d);
    }
  }

  std::vector<double> alpha(n), beta(m);
  NeumaierSum mass;
  for (std::size_t i = 0; i < n; ++i) {
    alpha[i] = A.weight(ia[i]);
    mass.add(alpha[i]);
  }
  for (std::size_t j = 0; j < m; ++j) beta[j] = B.weight(ib[j]);
  const double W = mass.value();

  auto finish = [&](std::vector<double>& plan_matrix, bool converged, int iters,
                    double violation, double eta_used) {
    // Round to exact feasibility: scale rows down to their targets, then
    // columns, then spread the leftover mass as a rank-one correction.
    std::vector<double> row_sum(n, 0.0), col_sum(m, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) row_sum[i] += plan_matrix[i * m + j];
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double s = row_sum[i] > alpha[i] && row_sum[i] > 0.0
                           ? alpha[i] / row_sum[i]
                           : 1.0;
      if (s != 1.0) {
        for (std::size_t j = 0; j < m; ++j) plan_matrix[i * m + j] *= s;
      }
    }
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t i = 0; i < n; ++i) col_sum[j] += plan_matrix[i * m + j];
    }
    for (std::size_t j = 0; j < m; ++j) {
      const double s = col_sum[j] > beta[j] && col_sum[j] > 0.0
                           ? beta[j] / col_sum[j]
                           : 1.0;
      if (s != 1.0) {
        for (std::size_t i = 0; i < n; ++i) plan_matrix[i * m + j] *= s;
      }
    }
    std::vector<double> row_err(n, 0.0), col_err(m, 0.0);
    double total_err = 0.0;
    std::fill(row_sum.begin(), row_sum.end(), 0.0);
    std::fill(col_sum.begin(), col_sum.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        row_sum[i] += plan_matrix[i * m + j];
        col_sum[j] += plan_matrix[i * m + j];
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      row_err[i] = std::max(0.0, alpha[i] - row_sum[i]);
      total_err += row_err[i];
    }
    for (std::size_t j = 0; j < m; ++j) {
      col_err[j] = std::max(0.0, beta[j] - col_sum[j]);
    }
    if (total_err > 0.0) {
      for (std::size_t i = 0; i < n; ++i) {
        if (row_err[i] == 0.0) continue;
        const double scale = row_err[i] / total_err;
        for (std::size_t j = 0; j < m; ++j) {
          plan_matrix[i * m + j] += scale * col_err[j];
        }
      }
    }

    TransportPlan plan;
    NeumaierSum total_cost;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        const double f = plan_matrix[i * m + j];
        if (f > 0.0) {
          plan.flows.push_back(Flow{ia[i], ib[j], f});
          total_cost.add(f * cost[i * m + j]);
        }
      }
    }
    plan.cost = total_cost.value();
    plan.normalized = false;
    if (diagnostics) {
      *diagnostics = SinkhornDiagnostics{converged, iters, violation, eta_used};
    }
    return plan;
  };

  if (max_cost == 0.0) {
    // Every feasible plan costs zero; the product plan is feasible.
    std::vector<double> plan_matrix(n * m);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        plan_matrix[i * m + j] = alpha[i] * beta[j] / W;
      }
    }
    return finish(plan_matrix, true, 0, 0.0, opts.eta);
  }

  const double eta = opts.eta > 0.0 ? opts.eta : 0.02 * max_cost;
  const double inv_eta = 1.0 / eta;

  std::vector<double> log_alpha(n), log_beta(m);
  for (std::size_t i = 0; i < n; ++i) log_alpha[i] = std::log(alpha[i]);
  for (std::size_t j = 0; j < m; ++j) log_beta[j] = std::log(beta[j]);

  // Scaled dual potentials: plan(i,j) = exp(phi_i + psi_j - C_ij / eta).
  std::vector<double> phi(n, 0.0), psi(m, 0.0);
  std::vector<double> lse_row(n), row_scratch(m), col_scratch(n);

  bool converged = false;
  int iterations = 0;
  const double stop_at = opts.tolerance * std::max(W, 1e-300);

  for (int it = 1; it <= opts.max_iter; ++it) {
    // Row logsumexps are needed for the phi update anyway; before applying
    // them they also give the current row marginals, so the stopping test
    // costs no extra pass. Column marginals are exact after every psi update.
    for (std::size_t i = 0; i < n; ++i) {
      const double* ci = cost.data() + i * m;
      for (std::size_t j = 0; j < m; ++j) {
        row_scratch[j] = psi[j] - ci[j] * inv_eta;
      }
      lse_row[i] = log_sum_exp(row_scratch);
    }
    if (it > 1) {
      double row_violation = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        row_violation += std::abs(std::exp(phi[i] + lse_row[i]) - alpha[i]);
      }
      if (row_violation <= stop_at) {
        converged = true;
        break;
      }
    }
    for (std::size_t i = 0; i < n; ++i) phi[i] = log_alpha[i] - lse_row[i];
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t i = 0; i < n; ++i) {
        col_scratch[i] = phi[i] - cost[i * m + j] * inv_eta;
      }
      psi[j] = log_beta[j] - log_sum_exp(col_scratch);
    }
    iterations = it;
  }

  std::vector<double> plan_matrix(n * m);
  double final_violation = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double p = std::exp(phi[i] + psi[j] - cost[i * m + j] * inv_eta);
      plan_matrix[i * m + j] = p;
      row_sum += p;
    }
    final_violation += std::abs(row_sum - alpha[i]);
  }
  return finish(plan_matrix, converged, iterations, final_violation, eta);
}

}  // namespace emdq
