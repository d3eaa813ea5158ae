#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gark/integrate.hpp"

namespace gark {

// ||M^T J M - J||_inf (max row sum) where M = d(q1,p1)/d(q0,p0) is built by
// central differences of one step.
double numerical_symplecticity(const SeparableHamiltonian& sys, const Method& method, const PhaseState& y, double h,
                               double fd_step = 1e-6, const SolverConfig& cfg = {});

// ||rho(phi_h(rho(phi_h(y)))) - y||_inf with rho(q, p) = (q, -p).
double reversibility_roundtrip(const SeparableHamiltonian& sys, const Method& method, const PhaseState& y, double h,
                               const SolverConfig& cfg = {});

struct SlopeFit {
  std::vector<double> h_values;
  std::vector<double> errors;
  double slope = 0.0;
  std::size_t first = 0;  // window [first, first + count)
  std::size_t count = 0;
};

// Least-squares slope of log(error) against log(h) over a window.  NaN when
// an error in the window is not positive.
SlopeFit fit_slope(const std::vector<double>& h, const std::vector<double>& err, std::size_t first,
                   std::size_t count);

// One run of the convergence ladder.
struct ConvergenceRow {
  double h = 0.0;
  std::int64_t steps = 0;
  double err_H = 0.0;
  std::vector<double> err_parts;  // |H_i(y_h(T)) - H_i(y_ref(T))|
  EvalCounts counts;
  std::int64_t wall_ns = 0;
};

// Reference end state used for per-part errors: yoshida4 at a fine step.
PhaseState reference_end_state(const SeparableHamiltonian& sys, const PhaseState& y0, double T_end,
                               double h_ref = 1.0 / 65536.0);

ConvergenceRow convergence_run(const SeparableHamiltonian& sys, const Method& method, const PhaseState& y0, double h,
                               double T_end, const PhaseState& reference, const SolverConfig& cfg = {});

struct ConvergenceResult {
  std::vector<ConvergenceRow> rows;
  SlopeFit total_large, total_small;
  std::vector<SlopeFit> parts_large, parts_small;
};

// Runs every h (concurrently up to `threads`) and fits the largest and
// smallest three step sizes.  A failing run propagates as StepError.
ConvergenceResult hamiltonian_convergence(const SeparableHamiltonian& sys, const Method& method, const PhaseState& y0,
                                          const std::vector<double>& h_list, double T_end,
                                          const SolverConfig& cfg = {}, unsigned threads = 1,
                                          std::optional<PhaseState> reference = std::nullopt);

// Slope of the least-squares line through (t_i, H(t_i) - H_0).
double energy_drift(const SeparableHamiltonian& sys, const Method& method, const PhaseState& y0, double h,
                    std::int64_t n_steps, const SolverConfig& cfg = {});

// Runs fn(i) for i in [0, n) on up to `threads` workers.  The first
// exception thrown is rethrown after all workers finish.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace gark
