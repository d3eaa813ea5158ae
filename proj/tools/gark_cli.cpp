// gark: command-line front end for tableau certification, transforms,
// integration and convergence sweeps.
//
// Exit codes: 0 pass, 1 certification failure, 2 input error, 3 solve failure.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "gark/construct.hpp"
#include "gark/order.hpp"
#include "gark/problems.hpp"
#include "gark/structure.hpp"
#include "gark/verify.hpp"
#include "json.hpp"

using namespace gark;
using json = nlohmann::json;

namespace {

enum Exit { kPass = 0, kCertFail = 1, kInputError = 2, kSolveFailure = 3 };

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shortest decimal that reads back to the same binary64.
std::string num(double x) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

// One significant decimal, exponent without padding: 0.0e0, 1.2e-15.
std::string sci(double x) {
  if (!std::isfinite(x)) return num(x);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1e", x);
  std::string s(buf);
  auto e = s.find('e');
  std::string mant = s.substr(0, e);
  int ex = std::atoi(s.c_str() + e + 1);
  return mant + "e" + std::to_string(ex);
}

std::string fixed3(double x) {
  if (!std::isfinite(x)) return num(x);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  return buf;
}

const char* verdict(bool ok) { return ok ? "PASS" : "FAIL"; }

bool is_reference_name(const std::string& n) { return n == "leapfrog" || n == "yoshida4" || n == "rk4"; }

AnyTableau load_tableau(const std::string& name) {
  bool builtin = is_builtin_name(name);
  bool file = std::filesystem::exists(name);
  if (builtin && file) throw InputError("'" + name + "' is both a built-in name and a file");
  if (builtin) return builtin_tableau(name);
  if (is_reference_name(name)) throw InputError("'" + name + "' is a reference integrator, not a tableau");
  if (!file) throw InputError("no built-in tableau or file named '" + name + "'");
  return read_tableau(name);
}

Method load_method(const std::string& name) {
  if (is_reference_name(name)) {
    if (std::filesystem::exists(name)) throw InputError("'" + name + "' is both a built-in name and a file");
    return Method::by_name(name);
  }
  return Method::from_tableau(load_tableau(name), name);
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw InputError("write to '" + path + "' failed");
}

void print_report_line(const std::string& label, const ConditionReport& r) {
  std::cout << label << ": " << verdict(r.verdict) << " (residual " << sci(r.max_abs_residual) << ")\n";
}

// ---------------------------------------------------------------- check

struct CheckOpts {
  std::string tableau;
  std::vector<std::string> require{"symplectic"};
  double tol = kCertTol;
  int max_order = 4;
};

int cmd_check(const CheckOpts& o) {
  AnyTableau t = load_tableau(o.tableau);
  std::map<std::string, bool> got;

  if (const auto* g = std::get_if<GarkTableau>(&t)) {
    auto sy = symplecticity_residual(*g, Restriction::All, o.tol);
    print_report_line("symplectic", sy.report);
    got["symplectic"] = sy.report.verdict;
    auto sm = symmetry_residual(*g, o.tol);
    print_report_line("symmetric", sm);
    got["symmetric"] = sm.verdict;
    auto ic = is_internally_consistent(*g, o.tol);
    print_report_line("internally consistent", ic.report);
    got["consistent"] = ic.consistent;
    auto st = algebraic_stability_check(*g, o.tol);
    std::cout << "algebraically stable: " << verdict(st.verdict) << " (min eigenvalue " << sci(st.lambda_min)
              << ", min weight " << sci(st.min_weight) << ")";
    if (!st.note.empty()) std::cout << " " << st.note;
    std::cout << "\n";
    got["stable"] = st.verdict;
  } else {
    const auto& p = std::get<PartitionedGarkTableau>(t);
    auto sy = partitioned_symplecticity_residual(p, o.tol);
    print_report_line("symplectic", sy);
    got["symplectic"] = sy.verdict;
    auto sm = symmetry_residual(p, o.tol);
    print_report_line("symmetric", sm);
    got["symmetric"] = sm.verdict;
    std::cout << "internally consistent: n/a (partitioned)\n";
    std::cout << "algebraically stable: n/a (partitioned)\n";
  }

  bool expl = Method::from_tableau(t).stepper()->plan().explicit_scheme;
  std::cout << "explicit: " << verdict(expl) << "\n";
  got["explicit"] = expl;

  OrderReport ord = std::visit(
      [&](const auto& tab) -> OrderReport {
        if constexpr (std::is_same_v<std::decay_t<decltype(tab)>, GarkTableau>)
          return gark_order_residuals(tab, o.max_order, o.tol);
        else
          return partitioned_order_residuals(tab, o.max_order, o.tol);
      },
      t);
  std::cout << "order: " << ord.attained_order << "\n";

  bool ok = true;
  for (const auto& r : o.require) {
    auto it = got.find(r);
    if (it == got.end()) throw InputError("certificate '" + r + "' is not available for this tableau");
    ok = ok && it->second;
  }
  return ok ? kPass : kCertFail;
}

// ---------------------------------------------------------------- order

struct OrderOpts {
  std::string tableau;
  int max_order = 4;
  double tol = kCertTol;
  int expect = 0;
  int fast = 0;
};

int cmd_order(const OrderOpts& o) {
  AnyTableau t = load_tableau(o.tableau);
  OrderReport ord = std::visit(
      [&](const auto& tab) -> OrderReport {
        if constexpr (std::is_same_v<std::decay_t<decltype(tab)>, GarkTableau>)
          return gark_order_residuals(tab, o.max_order, o.tol);
        else
          return partitioned_order_residuals(tab, o.max_order, o.tol);
      },
      t);
  for (const auto& [p, rep] : ord.per_order) {
    std::cout << "order " << p << " conditions: " << verdict(rep.verdict) << " (" << rep.entries.size()
              << " checked, max residual " << sci(rep.max_abs_residual) << ")\n";
    for (const auto& e : rep.entries)
      if (std::abs(e.residual) > o.tol) {
        std::cout << "  " << e.id;
        for (int i : e.indices) std::cout << " " << i;
        std::cout << ": " << sci(e.residual) << "\n";
      }
  }
  for (const auto& n : ord.notes) std::cout << "note: " << n << "\n";
  std::cout << "attained order: " << ord.attained_order << "\n";
  if (o.fast > 0) {
    const auto* p = std::get_if<PartitionedGarkTableau>(&t);
    if (!p) throw InputError("--fast needs a partitioned tableau");
    MixedOrder mo = mixed_order_report(*p, o.fast, o.tol);
    std::cout << "fast-partition order: " << mo.fast_order << "\n";
    std::cout << "overall order: " << mo.overall_order << "\n";
  }
  return ord.attained_order >= o.expect ? kPass : kCertFail;
}

// ---------------------------------------------------------- transforms

struct TransformOpts {
  std::string tableau;
  std::string output;
  double tol = kCertTol;
};

int cmd_reverse(const TransformOpts& o) {
  AnyTableau t = load_tableau(o.tableau);
  AnyTableau r = std::visit([](const auto& tab) -> AnyTableau { return time_reverse(tab); }, t);
  emit(serialize_tableau(r), o.output);
  return kPass;
}

int cmd_conjugate(const TransformOpts& o) {
  AnyTableau t = load_tableau(o.tableau);
  const auto* g = std::get_if<GarkTableau>(&t);
  if (!g) throw InputError("conjugate takes a GARK tableau (no hatted blocks)");
  emit(serialize_tableau(conjugate_pair(*g)), o.output);
  return kPass;
}

int cmd_compose(const TransformOpts& o) {
  AnyTableau t = load_tableau(o.tableau);
  AnyTableau r = std::visit([&](const auto& tab) -> AnyTableau { return compose_symmetric_symplectic(tab, o.tol); }, t);
  emit(serialize_tableau(r), o.output);
  return kPass;
}

// ---------------------------------------------------------- experiments

struct Experiment {
  std::string problem = "pendulum";
  std::string scheme = "multirate42";
  double k = 1e-4, g = 9.81, m_pend = 1.0, m_osc = 1.0, ell = 1.0, omega = 1.0;
  std::vector<double> y0;  // empty: problem default
  double h0 = 1.0 / 32;
  int levels = 8;
  double t_end = 10.0;
  std::string output;
  double abs_tol = 1e-13, rel_tol = 1e-13;
  int max_iters = 50;
  // verify
  double h = 0.05;
  double fd_step = 1e-6;
  std::int64_t drift_steps = 100000;
  // integrate
  std::int64_t steps = 0;
  std::int64_t sample_every = 1;
};

// Flags and config-file keys share names; a flag given on the command line
// wins over the file.
class ExperimentOptions {
 public:
  ExperimentOptions(CLI::App* app, Experiment& e) {
    app->set_help_flag("--help", "print this help and exit");  // frees --h for the step size
    app->add_option("--config", config_, "JSON file with the same keys as the flags");
    add(app, "problem", e.problem, "pendulum or harmonic");
    add(app, "scheme", e.scheme, "built-in name, reference integrator or tableau file");
    add(app, "k", e.k, "oscillator spring constant (pendulum)");
    add(app, "g", e.g, "gravity (pendulum)");
    add(app, "m-pend", e.m_pend, "pendulum mass");
    add(app, "m-osc", e.m_osc, "oscillator mass");
    add(app, "ell", e.ell, "pendulum length");
    add(app, "omega", e.omega, "frequency (harmonic)");
    reg("y0", app->add_option("--y0", e.y0, "initial state q..., p...")->delimiter(','));
  }

  template <class T>
  void add(CLI::App* app, const std::string& key, T& v, const std::string& help) {
    reg(key, app->add_option("--" + key, v, help)->capture_default_str());
  }

  void reg(const std::string& key, CLI::Option* opt) { opts_[underscore(key)] = opt; }

  void apply_config() {
    if (config_.empty()) return;
    std::ifstream in(config_);
    if (!in) throw InputError("cannot read config '" + config_ + "'");
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& ex) {
      throw InputError("config '" + config_ + "': " + ex.what());
    }
    if (!j.is_object()) throw InputError("config must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
      auto o = opts_.find(underscore(it.key()));
      if (o == opts_.end()) throw InputError("unknown config key '" + it.key() + "'");
      if (o->second->count() > 0) continue;
      std::vector<std::string> vals;
      auto scalar = [](const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
      if (it.value().is_array()) {
        for (const auto& v : it.value()) vals.push_back(scalar(v));
      } else {
        vals.push_back(scalar(it.value()));
      }
      try {
        o->second->clear();
        o->second->add_result(vals);
        o->second->run_callback();
      } catch (const CLI::Error& ex) {
        throw InputError("config key '" + it.key() + "': " + ex.what());
      }
    }
  }

 private:
  static std::string underscore(std::string s) {
    std::replace(s.begin(), s.end(), '-', '_');
    return s;
  }

  std::string config_;
  std::map<std::string, CLI::Option*> opts_;
};

SeparableHamiltonian make_problem(const Experiment& e) {
  if (e.problem == "pendulum") {
    PendulumOscillatorParams p;
    p.m_pend = e.m_pend;
    p.m_osc = e.m_osc;
    p.ell = e.ell;
    p.k = e.k;
    p.g = e.g;
    return pendulum_oscillator(p);
  }
  if (e.problem == "harmonic") return harmonic_oscillator(e.omega);
  throw InputError("unknown problem '" + e.problem + "' (pendulum, harmonic)");
}

PhaseState initial_state(const Experiment& e, const SeparableHamiltonian& sys) {
  std::vector<double> y = e.y0;
  if (y.empty()) {
    y.assign(2 * sys.d, 0.0);
    y[0] = e.problem == "pendulum" ? 0.5 : 1.0;
  }
  if (static_cast<int>(y.size()) != 2 * sys.d)
    throw InputError("y0 needs " + std::to_string(2 * sys.d) + " values for problem " + e.problem);
  PhaseState s{Vector(sys.d), Vector(sys.d), 0.0};
  for (int i = 0; i < sys.d; ++i) {
    s.q(i) = y[i];
    s.p(i) = y[sys.d + i];
  }
  return s;
}

SolverConfig solver_config(const Experiment& e) {
  SolverConfig c;
  c.abs_tol = e.abs_tol;
  c.rel_tol = e.rel_tol;
  c.max_iters = e.max_iters;
  return c;
}

std::string config_header(const Experiment& e, const PhaseState& y0, const std::vector<std::string>& extra) {
  std::ostringstream os;
  os << "# problem: " << e.problem << "\n";
  if (e.problem == "pendulum") {
    os << "# m_pend: " << num(e.m_pend) << "\n# m_osc: " << num(e.m_osc) << "\n# ell: " << num(e.ell)
       << "\n# k: " << num(e.k) << "\n# g: " << num(e.g) << "\n";
  } else {
    os << "# omega: " << num(e.omega) << "\n";
  }
  os << "# scheme: " << e.scheme << "\n# y0:";
  for (int i = 0; i < y0.q.size(); ++i) os << " " << num(y0.q(i));
  for (int i = 0; i < y0.p.size(); ++i) os << " " << num(y0.p(i));
  os << "\n# T_end: " << num(e.t_end) << "\n";
  for (const auto& l : extra) os << "# " << l << "\n";
  os << "# abs_tol: " << num(e.abs_tol) << "\n# rel_tol: " << num(e.rel_tol) << "\n# max_iters: " << e.max_iters
     << "\n";
  return os.str();
}

unsigned sweep_threads() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("GARK_THREADS")) {
    unsigned cap = 0;
    std::string s(env);
    auto r = std::from_chars(s.data(), s.data() + s.size(), cap);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size() || cap == 0)
      throw InputError("GARK_THREADS must be a positive integer");
    n = std::min(n, cap);
  }
  return n;
}

int cmd_converge(const Experiment& e) {
  if (e.levels < 1) throw InputError("levels must be at least 1");
  if (!(e.h0 > 0)) throw InputError("h0 must be positive");
  if (!(e.t_end > 0)) throw InputError("t_end must be positive");
  SeparableHamiltonian sys = make_problem(e);
  Method m = load_method(e.scheme);
  PhaseState y0 = initial_state(e, sys);
  SolverConfig cfg = solver_config(e);

  std::vector<double> hs;
  for (int j = 0; j < e.levels; ++j) hs.push_back(e.h0 / std::pow(2.0, j));
  unsigned threads = sweep_threads();

  PhaseState ref = reference_end_state(sys, y0, e.t_end);
  std::vector<std::optional<ConvergenceRow>> rows(hs.size());
  std::vector<std::optional<StepError>> fails(hs.size());
  parallel_for(hs.size(), threads, [&](std::size_t i) {
    try {
      rows[i] = convergence_run(sys, m, y0, hs[i], e.t_end, ref, cfg);
    } catch (const StepError& err) {
      fails[i] = err;
    }
  });

  std::ostringstream os;
  os << config_header(e, y0,
                      {"h0: " + num(e.h0), "levels: " + std::to_string(e.levels),
                       "reference: yoshida4 h=" + num(1.0 / 65536)});
  os << "h,steps,err_H,err_H1,err_H2,grad_evals_fast,grad_evals_slow,wall_ns\n";

  auto part = [](const ConvergenceRow& r, std::size_t i) {
    return i < r.err_parts.size() ? num(r.err_parts[i]) : std::string("nan");
  };
  auto count = [](const ConvergenceRow& r, std::size_t i) {
    return i < r.counts.potential.size() ? r.counts.potential[i] : std::int64_t{0};
  };

  for (std::size_t i = 0; i < hs.size(); ++i) {
    if (fails[i]) {
      os << num(hs[i]) << "," << fails[i]->step << ",FAILED,FAILED,FAILED,,,\n";
      emit(os.str(), e.output);
      std::cerr << "gark: h=" << num(hs[i]) << ": " << fails[i]->what() << "\n";
      return fails[i]->is_solve_failure ? kSolveFailure : kInputError;
    }
    const ConvergenceRow& r = *rows[i];
    os << num(r.h) << "," << r.steps << "," << num(r.err_H) << "," << part(r, 0) << "," << part(r, 1) << ","
       << count(r, 0) << "," << count(r, 1) << "," << r.wall_ns << "\n";
  }

  if (hs.size() >= 3) {
    const std::size_t w = 3, last = hs.size() - w;
    auto series = [&](auto get) {
      std::vector<double> v;
      for (const auto& r : rows) v.push_back(get(*r));
      return v;
    };
    auto line = [&](const std::string& label, const std::vector<double>& v) {
      os << "# slope " << label << ": " << fixed3(fit_slope(hs, v, 0, w).slope) << "→"
         << fixed3(fit_slope(hs, v, last, w).slope) << "\n";
    };
    line("err_H", series([](const ConvergenceRow& r) { return r.err_H; }));
    std::size_t np = rows.front()->err_parts.size();
    for (std::size_t k = 0; k < np; ++k)
      line("err_H" + std::to_string(k + 1), series([k](const ConvergenceRow& r) { return r.err_parts[k]; }));
  }
  emit(os.str(), e.output);
  return kPass;
}

int cmd_verify(const Experiment& e) {
  SeparableHamiltonian sys = make_problem(e);
  Method m = load_method(e.scheme);
  PhaseState y0 = initial_state(e, sys);
  SolverConfig cfg = solver_config(e);
  const double sym_thr = 1e-6, rev_thr = 1e-10, drift_thr = 1e-10;

  double sym = numerical_symplecticity(sys, m, y0, e.h, e.fd_step, cfg);
  double rev = reversibility_roundtrip(sys, m, y0, e.h, cfg);
  double drift = energy_drift(sys, m, y0, e.h, e.drift_steps, cfg);

  std::cout << "scheme: " << e.scheme << ", problem: " << e.problem << ", h: " << num(e.h) << "\n";
  std::cout << "symplecticity: " << verdict(sym <= sym_thr) << " (residual " << sci(sym) << ", threshold "
            << sci(sym_thr) << ")\n";
  std::cout << "reversibility: " << verdict(rev <= rev_thr) << " (deviation " << sci(rev) << ", threshold "
            << sci(rev_thr) << ")\n";
  std::cout << "energy drift: " << verdict(std::abs(drift) <= drift_thr) << " (slope " << sci(drift) << " per unit time over "
            << e.drift_steps << " steps, threshold " << sci(drift_thr) << ")\n";
  bool ok = sym <= sym_thr && rev <= rev_thr && std::abs(drift) <= drift_thr;
  return ok ? kPass : kCertFail;
}

int cmd_integrate(Experiment e) {
  if (!(e.h > 0)) throw InputError("h must be positive");
  if (e.sample_every < 1) throw InputError("sample-every must be at least 1");
  SeparableHamiltonian sys = make_problem(e);
  Method m = load_method(e.scheme);
  PhaseState y0 = initial_state(e, sys);
  std::int64_t n = e.steps > 0 ? e.steps : std::llround(e.t_end / e.h);
  e.t_end = static_cast<double>(n) * e.h;

  Trajectory tr;
  std::optional<StepError> fail;
  try {
    tr = integrate(sys, m, y0, e.h, n, solver_config(e), e.sample_every);
  } catch (const StepError& err) {
    fail = err;
  }

  std::ostringstream os;
  os << config_header(e, y0, {"h: " + num(e.h), "steps: " + std::to_string(n),
                              "sample_every: " + std::to_string(e.sample_every)});
  os << "t";
  for (int i = 1; i <= sys.d; ++i) os << ",q" << i;
  for (int i = 1; i <= sys.d; ++i) os << ",p" << i;
  os << ",H";
  std::size_t np = sys.parts(y0.q, y0.p).size();
  for (std::size_t k = 1; k <= np; ++k) os << ",H" << k;
  os << "\n";
  if (fail) {
    os << "FAILED at step " << fail->step << "\n";
    emit(os.str(), e.output);
    std::cerr << "gark: " << fail->what() << "\n";
    return fail->is_solve_failure ? kSolveFailure : kInputError;
  }
  for (const auto& s : tr.states) {
    os << num(s.t);
    for (int i = 0; i < sys.d; ++i) os << "," << num(s.q(i));
    for (int i = 0; i < sys.d; ++i) os << "," << num(s.p(i));
    os << "," << num(sys.H(s.q, s.p));
    for (double v : sys.parts(s.q, s.p)) os << "," << num(v);
    os << "\n";
  }
  os << "# kinetic_evals: " << tr.counts.kinetic << "\n";
  for (std::size_t k = 0; k < tr.counts.potential.size(); ++k)
    os << "# potential" << k + 1 << "_evals: " << tr.counts.potential[k] << "\n";
  emit(os.str(), e.output);
  return kPass;
}

int classify(const gark::Error& err) {
  if (dynamic_cast<const StageSolveFailure*>(&err)) return kSolveFailure;
  if (const auto* se = dynamic_cast<const StepError*>(&err)) return se->is_solve_failure ? kSolveFailure : kInputError;
  if (dynamic_cast<const NotSymplectic*>(&err) || dynamic_cast<const NotSymmetric*>(&err) ||
      dynamic_cast<const NotConjugate*>(&err) || dynamic_cast<const WeightsNotPalindromic*>(&err))
    return kCertFail;
  return kInputError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GARK tableau certification and symplectic integration"};
  app.require_subcommand(1);

  CheckOpts check;
  auto* c = app.add_subcommand("check", "certify a tableau");
  c->add_option("tableau", check.tableau, "built-in name or tableau file")->required();
  c->add_option("--require", check.require, "certificates that decide the exit code")
      ->delimiter(',')
      ->check(CLI::IsMember({"symplectic", "symmetric", "consistent", "stable", "explicit"}));
  c->add_option("--tol", check.tol)->capture_default_str();
  c->add_option("--max", check.max_order, "highest order to check")->check(CLI::Range(1, 4))->capture_default_str();

  OrderOpts order;
  auto* o = app.add_subcommand("order", "order-condition residuals");
  o->add_option("tableau", order.tableau)->required();
  o->add_option("--max", order.max_order)->check(CLI::Range(1, 4))->capture_default_str();
  o->add_option("--tol", order.tol)->capture_default_str();
  o->add_option("--expect", order.expect, "exit 1 if the attained order is lower");
  o->add_option("--fast", order.fast, "also report mixed order with this fast partition");

  TransformOpts rev, conj, comp;
  auto transform = [&](const char* name, const char* help, TransformOpts& t) {
    auto* s = app.add_subcommand(name, help);
    s->add_option("tableau", t.tableau)->required();
    s->add_option("-o,--output", t.output, "output file (default stdout)");
    s->add_option("--tol", t.tol)->capture_default_str();
    return s;
  };
  auto* r = transform("reverse", "time-reversed tableau", rev);
  auto* cj = transform("conjugate", "pair a GARK tableau with its symplectic conjugate", conj);
  auto* cp = transform("compose", "symmetric symplectic composition with the reverse", comp);

  Experiment conv, ver, integ;
  auto* cv = app.add_subcommand("converge", "step-size sweep, CSV of Hamiltonian errors");
  ExperimentOptions conv_opts(cv, conv);
  conv_opts.add(cv, "h0", conv.h0, "largest step size");
  conv_opts.add(cv, "levels", conv.levels, "number of halvings");
  conv_opts.add(cv, "t-end", conv.t_end, "horizon");
  conv_opts.add(cv, "output", conv.output, "CSV path (default stdout)");
  conv_opts.add(cv, "abs-tol", conv.abs_tol, "stage solver absolute tolerance");
  conv_opts.add(cv, "rel-tol", conv.rel_tol, "stage solver relative tolerance");
  conv_opts.add(cv, "max-iters", conv.max_iters, "stage solver iteration cap");

  auto* vf = app.add_subcommand("verify", "map symplecticity, reversibility and energy drift");
  ExperimentOptions ver_opts(vf, ver);
  ver_opts.add(vf, "h", ver.h, "step size");
  ver_opts.add(vf, "fd-step", ver.fd_step, "finite-difference step for the Jacobian");
  ver_opts.add(vf, "drift-steps", ver.drift_steps, "steps for the drift fit");
  ver_opts.add(vf, "abs-tol", ver.abs_tol, "stage solver absolute tolerance");
  ver_opts.add(vf, "rel-tol", ver.rel_tol, "stage solver relative tolerance");
  ver_opts.add(vf, "max-iters", ver.max_iters, "stage solver iteration cap");

  auto* ig = app.add_subcommand("integrate", "trajectory CSV");
  ExperimentOptions integ_opts(ig, integ);
  integ_opts.add(ig, "h", integ.h, "step size");
  integ_opts.add(ig, "steps", integ.steps, "number of steps (default T_end / h)");
  integ_opts.add(ig, "t-end", integ.t_end, "horizon");
  integ_opts.add(ig, "sample-every", integ.sample_every, "write every n-th state");
  integ_opts.add(ig, "output", integ.output, "CSV path (default stdout)");
  integ_opts.add(ig, "abs-tol", integ.abs_tol, "stage solver absolute tolerance");
  integ_opts.add(ig, "rel-tol", integ.rel_tol, "stage solver relative tolerance");
  integ_opts.add(ig, "max-iters", integ.max_iters, "stage solver iteration cap");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kPass : kInputError;
  }

  try {
    if (c->parsed()) return cmd_check(check);
    if (o->parsed()) return cmd_order(order);
    if (r->parsed()) return cmd_reverse(rev);
    if (cj->parsed()) return cmd_conjugate(conj);
    if (cp->parsed()) return cmd_compose(comp);
    if (cv->parsed()) {
      conv_opts.apply_config();
      return cmd_converge(conv);
    }
    if (vf->parsed()) {
      ver_opts.apply_config();
      return cmd_verify(ver);
    }
    if (ig->parsed()) {
      integ_opts.apply_config();
      return cmd_integrate(integ);
    }
  } catch (const InputError& e) {
    std::cerr << "gark: " << e.what() << "\n";
    return kInputError;
  } catch (const gark::Error& e) {
    std::cerr << "gark: " << e.what() << "\n";
    return classify(e);
  } catch (const std::exception& e) {
    std::cerr << "gark: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
