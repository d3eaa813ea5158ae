// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "gark/construct.hpp"
#include "gark/order.hpp"
#include "gark/structure.hpp"
#include "gark/verify.hpp"
#include "properties.hpp"

using namespace gark;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool cond, const std::string& what) {
    if (!cond) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

PhaseState pendulum_start() {
  PhaseState y{Vector::Zero(2), Vector::Zero(2), 0.0};
  y.q(0) = 0.5;
  return y;
}

PhaseState harmonic_start() { return {Vector::Ones(1), Vector::Zero(1), 0.0}; }

bool is_certified_symplectic(const AnyTableau& t) {
  if (const auto* g = std::get_if<GarkTableau>(&t)) return symplecticity_residual(*g).report.verdict;
  return partitioned_symplecticity_residual(std::get<PartitionedGarkTableau>(t)).verdict;
}

void criterion1(Outcome& o) {
  auto pv = verlet_pair(), pl = lobatto3_pair(), mr = make_multirate42();
  auto im = imim_symplectic();
  auto vc = std::get<GarkTableau>(builtin_tableau("verlet-coupled(0.3,-0.1)"));
  struct Row {
    const char* name;
    double sympl;
    double symm;  // negative: not claimed
  };
  std::vector<Row> rows = {
      {"verlet-pair", partitioned_symplecticity_residual(pv).max_abs_residual, symmetry_residual(pv).max_abs_residual},
      {"lobatto3-pair", partitioned_symplecticity_residual(pl).max_abs_residual,
       symmetry_residual(pl).max_abs_residual},
      {"imim-symplectic", symplecticity_residual(im).report.max_abs_residual, -1.0},
      {"verlet-coupled(0.3,-0.1)", symplecticity_residual(vc).report.max_abs_residual,
       symmetry_residual(vc).max_abs_residual},
      {"multirate42", partitioned_symplecticity_residual(mr).max_abs_residual, symmetry_residual(mr).max_abs_residual},
  };
  for (const auto& r : rows) {
    o.detail << " " << r.name << " sympl=" << r.sympl;
    o.require(r.sympl <= 1e-12, std::string(r.name) + " symplectic");
    if (r.symm >= 0) {
      o.detail << " symm=" << r.symm;
      o.require(r.symm <= 1e-12, std::string(r.name) + " symmetric");
    }
  }
}

void criterion2(Outcome& o) {
  auto l = partitioned_order_residuals(lobatto3_pair(), 4, 1e-12);
  double worst = 0.0;
  for (const auto& [p, rep] : l.per_order) worst = std::max(worst, rep.max_abs_residual);
  o.detail << " lobatto3-pair order=" << l.attained_order << " max residual=" << worst;
  o.require(l.attained_order == 4 && worst <= 1e-12, "lobatto3-pair order 4");
  auto v = partitioned_order_residuals(verlet_pair(), 4, 1e-12);
  o.detail << "; verlet-pair order=" << v.attained_order;
  o.require(v.attained_order == 2, "verlet-pair order 2");
  auto m = gark_order_residuals(implicit_midpoint(), 4, 1e-12);
  double r3 = std::nan("");
  for (const auto& e : m.per_order.at(3).entries)
    if (e.id == "3a") r3 = e.residual;
  o.detail << "; midpoint 3a residual=" << r3;
  o.require(std::abs(r3 + 1.0 / 12.0) <= 1e-14, "midpoint order-3 residual -1/12");
}

void criterion3(Outcome& o) {
  MultirateWeights w = solve_multirate_weights();
  const double want[4] = {1.087752930244776, -1.131212304665920, 0.543459374420984, 0.5};
  const double got[4] = {w.b1, w.b2, w.b3, w.bslow};
  const char* names[4] = {"b1", "b2", "b3", "bslow"};
  o.detail.precision(17);
  for (int i = 0; i < 4; ++i) {
    double d = std::abs(got[i] - want[i]);
    o.detail << " " << names[i] << "=" << got[i] << " (|diff|=" << std::setprecision(3) << d << ")"
             << std::setprecision(17);
    o.require(d <= 1e-12, std::string(names[i]) + " within 1e-12 of the published value");
  }
  o.detail << std::setprecision(6) << " condition residual=" << w.residual;
  auto mo = mixed_order_report(make_multirate42(), 1);
  o.detail << "; mixed order fast=" << mo.fast_order << " overall=" << mo.overall_order;
  o.require(mo.fast_order == 4 && mo.overall_order == 2, "mixed order (4, 2)");
}

void criterion4(Outcome& o) {
  auto pen = pendulum_oscillator({});
  std::vector<double> hs;
  for (int j = 0; j < 8; ++j) hs.push_back(1.0 / 32 / std::pow(2.0, j));
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  PhaseState y0 = pendulum_start();
  PhaseState ref = reference_end_state(pen, y0, 10.0);
  auto mr = hamiltonian_convergence(pen, Method::by_name("multirate42"), y0, hs, 10.0, {}, threads, ref);
  auto lf = hamiltonian_convergence(pen, Method::by_name("leapfrog"), y0, hs, 10.0, {}, threads, ref);
  o.detail << " multirate42 slopes " << mr.total_large.slope << " -> " << mr.total_small.slope;
  o.detail << "; leapfrog slopes " << lf.total_large.slope << " -> " << lf.total_small.slope;
  auto in = [](double x, double lo, double hi) { return x >= lo && x <= hi; };
  o.require(in(mr.total_large.slope, 3.5, 4.5), "multirate42 large-h slope in [3.5,4.5]");
  o.require(in(mr.total_small.slope, 1.7, 2.3), "multirate42 small-h slope in [1.7,2.3]");
  o.require(in(lf.total_large.slope, 1.8, 2.2) && in(lf.total_small.slope, 1.8, 2.2), "leapfrog slopes in [1.8,2.2]");
  double worst_ratio = 1e300;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    double ratio = lf.rows[i].err_parts[0] / mr.rows[i].err_parts[0];
    worst_ratio = std::min(worst_ratio, ratio);
  }
  o.detail << "; min H1 error ratio leapfrog/multirate42=" << worst_ratio;
  o.require(worst_ratio >= 5.0, "multirate42 H1 error <= leapfrog H1 error / 5 at every h");
}

void criterion5(Outcome& o) {
  auto pen = pendulum_oscillator({});
  const int n = 25;
  Trajectory a = integrate(pen, Method::by_name("multirate42"), pendulum_start(), 0.05, n, {}, 0);
  Trajectory b = integrate(pen, Method::by_name("yoshida4"), pendulum_start(), 0.05, n, {}, 0);
  o.detail << " slow gradients over " << n << " steps: multirate42=" << a.counts.potential[1]
           << " yoshida4=" << b.counts.potential[1];
  o.require(a.counts.potential[1] == 2 * n, "multirate42 makes 2 slow evaluations per step");
  o.require(b.counts.potential[1] == 3 * n, "yoshida4 makes 3 slow evaluations per step");
}

void criterion6(Outcome& o) {
  auto ho = harmonic_oscillator();
  auto pen = pendulum_oscillator({});
  double worst = 0.0;
  int schemes = 0;
  for (const auto& name : builtin_names()) {
    if (!is_certified_symplectic(builtin_tableau(name))) continue;
    ++schemes;
    Method m = Method::by_name(name);
    for (double h : {0.1, 0.01}) {
      double a = numerical_symplecticity(ho, m, harmonic_start(), h);
      double b = numerical_symplecticity(pen, m, pendulum_start(), h);
      worst = std::max({worst, a, b});
      o.require(a <= 1e-6 && b <= 1e-6, name + " map residual <= 1e-6");
    }
  }
  Method ee = Method::by_name("explicit-euler");
  double c1 = numerical_symplecticity(ho, ee, harmonic_start(), 0.1);
  double c2 = numerical_symplecticity(pen, ee, pendulum_start(), 0.1);
  o.detail << " " << schemes << " certified schemes, worst residual=" << worst << "; explicit Euler " << c1 << ", "
           << c2;
  o.require(schemes >= 5, "at least the five certified built-ins");
  o.require(c1 >= 1e-3 && c2 >= 1e-3, "explicit Euler residual >= 1e-3");
}

void criterion7(Outcome& o) {
  auto pen = pendulum_oscillator({});
  double v = reversibility_roundtrip(pen, Method::by_name("verlet-pair"), pendulum_start(), 0.05);
  double m = reversibility_roundtrip(pen, Method::by_name("multirate42"), pendulum_start(), 0.05);
  double e = reversibility_roundtrip(pen, Method::by_name("explicit-euler"), pendulum_start(), 0.05);
  o.detail << " verlet-pair=" << v << " multirate42=" << m << " explicit Euler=" << e;
  o.require(v <= 1e-10 && m <= 1e-10, "roundtrip <= 1e-10");
  o.require(e >= 1e-4, "explicit Euler roundtrip >= 1e-4");
}

void criterion8(Outcome& o) {
  using namespace properties;
  const double tol = 1e-10;
  const int n = 120;
  std::vector<SuiteResult> suites = {conjugation_involution(n, tol),       self_adjoint_iff_symplectic(n, tol),
                                     composition_symmetric_symplectic(n, tol), explicit_builder(n, tol),
                                     order4_agreement(n, tol),             order2_redundancy(n, tol)};
  for (const auto& s : suites) {
    o.detail << " {" << s.name << ": " << s.samples - s.failures << "/" << s.samples << "}";
    o.require(s.ok(), s.name);
  }
}

void criterion9(Outcome& o) {
  auto ho = harmonic_oscillator();
  double v = energy_drift(ho, Method::by_name("verlet-pair"), harmonic_start(), 0.05, 100000);
  double r = energy_drift(ho, Method::by_name("rk4"), harmonic_start(), 0.05, 100000);
  o.detail << " verlet slope=" << v << " rk4 slope=" << r << " ratio=" << std::abs(r / v);
  o.require(std::abs(v) <= 1e-10, "verlet |drift| <= 1e-10");
  o.require(std::abs(r) >= 100 * std::abs(v), "rk4 drift >= 100x verlet");
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    double budget_s;
    std::function<void(Outcome&)> run;
  };
  const std::vector<Criterion> all = {
      {1, "structural certification", 1.0, criterion1}, {2, "order classification", 1.0, criterion2},
      {3, "multirate weights", 1.0, criterion3},        {4, "convergence slopes", 60.0, criterion4},
      {5, "work per step", 1.0, criterion5},            {6, "map-level symplecticity", 10.0, criterion6},
      {7, "reversibility", 5.0, criterion7},            {8, "theorem property suites", 30.0, criterion8},
      {9, "energy drift", 20.0, criterion9},
  };
  int failed = 0;
  for (const auto& c : all) {
    Outcome o;
    o.detail.precision(4);
    auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.budget_s) {
      o.pass = false;
      o.detail << " [over time budget " << c.budget_s << " s]";
    }
    if (!o.pass) ++failed;
    std::printf("criterion %d (%s): %s  %.3f s |%s\n", c.id, c.title, o.pass ? "PASS" : "FAIL", secs,
                o.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
  return failed == 0 ? 0 : 1;
}
