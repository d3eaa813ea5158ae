#include "gark/verify.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace gark {

namespace {

Vector flat(const PhaseState& y) {
  Vector v(y.q.size() + y.p.size());
  v << y.q, y.p;
  return v;
}

PhaseState unflat(const Vector& v, double t) {
  const Eigen::Index d = v.size() / 2;
  return {v.head(d), v.tail(d), t};
}

}  // namespace

double numerical_symplecticity(const SeparableHamiltonian& sys, const Method& method, const PhaseState& y, double h,
                               double fd_step, const SolverConfig& cfg) {
  if (!(fd_step > 0)) throw DimensionMismatch("fd_step must be positive");
  const Vector y0 = flat(y);
  const Eigen::Index n = y0.size(), d = n / 2;
  Matrix M(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    Vector yp = y0, ym = y0;
    yp(j) += fd_step;
    ym(j) -= fd_step;
    Vector fp = flat(method.step(sys, unflat(yp, y.t), h, cfg));
    Vector fm = flat(method.step(sys, unflat(ym, y.t), h, cfg));
    M.col(j) = (fp - fm) / (2.0 * fd_step);
  }
  Matrix J = Matrix::Zero(n, n);
  J.topRightCorner(d, d) = Matrix::Identity(d, d);
  J.bottomLeftCorner(d, d) = -Matrix::Identity(d, d);
  Matrix R = M.transpose() * J * M - J;
  return R.cwiseAbs().rowwise().sum().maxCoeff();
}

double reversibility_roundtrip(const SeparableHamiltonian& sys, const Method& method, const PhaseState& y, double h,
                               const SolverConfig& cfg) {
  PhaseState a = method.step(sys, y, h, cfg);
  a.p = -a.p;
  PhaseState b = method.step(sys, a, h, cfg);
  b.p = -b.p;
  double dq = (b.q - y.q).cwiseAbs().maxCoeff();
  double dp = (b.p - y.p).cwiseAbs().maxCoeff();
  return std::max(dq, dp);
}

SlopeFit fit_slope(const std::vector<double>& h, const std::vector<double>& err, std::size_t first,
                   std::size_t count) {
  if (h.size() != err.size()) throw DimensionMismatch("h and error lists differ in length");
  if (count < 2 || first + count > h.size()) throw DimensionMismatch("slope window out of range");
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(h[i] > 0)) throw DimensionMismatch("step sizes must be positive");
    if (i > 0 && !(h[i] < h[i - 1])) throw DimensionMismatch("step sizes must be strictly decreasing");
  }
  SlopeFit fit{h, err, 0.0, first, count};
  double sx = 0, sy = 0;
  for (std::size_t i = first; i < first + count; ++i) {
    if (!(err[i] > 0)) {
      fit.slope = std::numeric_limits<double>::quiet_NaN();
      return fit;
    }
    sx += std::log(h[i]);
    sy += std::log(err[i]);
  }
  const double mx = sx / count, my = sy / count;
  double sxx = 0, sxy = 0;
  for (std::size_t i = first; i < first + count; ++i) {
    double dx = std::log(h[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(err[i]) - my);
  }
  fit.slope = sxy / sxx;
  return fit;
}

PhaseState reference_end_state(const SeparableHamiltonian& sys, const PhaseState& y0, double T_end, double h_ref) {
  auto n = static_cast<std::int64_t>(std::llround(T_end / h_ref));
  PhaseState y = y0;
  for (std::int64_t i = 0; i < n; ++i) y = yoshida4_step(sys, y, h_ref);
  return y;
}

ConvergenceRow convergence_run(const SeparableHamiltonian& sys, const Method& method, const PhaseState& y0, double h,
                               double T_end, const PhaseState& reference, const SolverConfig& cfg) {
  if (!(h > 0)) throw DimensionMismatch("step size must be positive");
  ConvergenceRow row;
  row.h = h;
  row.steps = std::llround(T_end / h);
  auto t0 = std::chrono::steady_clock::now();
  Trajectory tr = integrate(sys, method, y0, h, row.steps, cfg, 0);
  auto t1 = std::chrono::steady_clock::now();
  row.wall_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count();
  row.err_H = std::abs(tr.H.back() - tr.H.front());
  const PhaseState& y = tr.states.back();
  std::vector<double> got = sys.parts(y.q, y.p);
  std::vector<double> want = sys.parts(reference.q, reference.p);
  for (std::size_t i = 0; i < got.size(); ++i) row.err_parts.push_back(std::abs(got[i] - want[i]));
  row.counts = tr.counts;
  return row;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex mu;
  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!err) err = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  unsigned k = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  for (unsigned t = 0; t < k; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

ConvergenceResult hamiltonian_convergence(const SeparableHamiltonian& sys, const Method& method, const PhaseState& y0,
                                          const std::vector<double>& h_list, double T_end, const SolverConfig& cfg,
                                          unsigned threads, std::optional<PhaseState> reference) {
  if (h_list.empty()) throw DimensionMismatch("empty step size list");
  const PhaseState ref = reference ? *reference : reference_end_state(sys, y0, T_end);
  ConvergenceResult res;
  res.rows.resize(h_list.size());
  parallel_for(h_list.size(), threads,
               [&](std::size_t i) { res.rows[i] = convergence_run(sys, method, y0, h_list[i], T_end, ref, cfg); });

  if (h_list.size() >= 3) {
    const std::size_t w = 3, last = h_list.size() - w;
    std::vector<double> eH;
    for (const auto& r : res.rows) eH.push_back(r.err_H);
    res.total_large = fit_slope(h_list, eH, 0, w);
    res.total_small = fit_slope(h_list, eH, last, w);
    const std::size_t np = res.rows.front().err_parts.size();
    for (std::size_t k = 0; k < np; ++k) {
      std::vector<double> e;
      for (const auto& r : res.rows) e.push_back(r.err_parts[k]);
      res.parts_large.push_back(fit_slope(h_list, e, 0, w));
      res.parts_small.push_back(fit_slope(h_list, e, last, w));
    }
  }
  return res;
}

double energy_drift(const SeparableHamiltonian& sys, const Method& method, const PhaseState& y0, double h,
                    std::int64_t n_steps, const SolverConfig& cfg) {
  if (n_steps < 2) throw DimensionMismatch("energy drift needs at least two steps");
  if (h == 0.0) return 0.0;
  Trajectory tr = integrate(sys, method, y0, h, n_steps, cfg, 0);
  const double n = static_cast<double>(tr.H.size());
  const double tmean = h * (n - 1) / 2.0;
  double emean = 0.0;
  for (double v : tr.H) emean += v - tr.H.front();
  emean /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < tr.H.size(); ++i) {
    double dt = h * static_cast<double>(i) - tmean;
    sxx += dt * dt;
    sxy += dt * (tr.H[i] - tr.H.front() - emean);
  }
  return sxy / sxx;
}

}  // namespace gark
