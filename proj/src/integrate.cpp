#include "gark/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "gark/construct.hpp"

namespace gark {

std::string to_string(const StageId& id) {
  const char* k = id.kind == StageKind::Position ? "Q" : id.kind == StageKind::Momentum ? "P" : "Y";
  return std::string(k) + std::to_string(id.partition) + "_" + std::to_string(id.index);
}

void EvalCounts::merge(const EvalCounts& o) {
  kinetic += o.kinetic;
  if (potential.size() < o.potential.size()) potential.resize(o.potential.size(), 0);
  for (std::size_t i = 0; i < o.potential.size(); ++i) potential[i] += o.potential[i];
  if (per_partition.size() < o.per_partition.size()) per_partition.resize(o.per_partition.size(), 0);
  for (std::size_t i = 0; i < o.per_partition.size(); ++i) per_partition[i] += o.per_partition[i];
  solver_iterations += o.solver_iterations;
  newton_switches += o.newton_switches;
}

std::vector<PartitionContent> partition_layout(const SeparableHamiltonian& sys, int N) {
  const int np = sys.num_potentials();
  std::vector<PartitionContent> out(static_cast<std::size_t>(N));
  if (N == 1) {
    out[0].kinetic = true;
    for (int i = 0; i < np; ++i) out[0].potentials.push_back(i);
  } else if (N == np) {
    out[0].kinetic = true;
    for (int i = 0; i < np; ++i) out[static_cast<std::size_t>(i)].potentials.push_back(i);
  } else if (N == np + 1) {
    out[0].kinetic = true;
    for (int i = 0; i < np; ++i) out[static_cast<std::size_t>(i + 1)].potentials.push_back(i);
  } else {
    throw DimensionMismatch("tableau with " + std::to_string(N) + " partitions does not fit a system with " +
                            std::to_string(np) + " potentials");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Stage graph

Stepper::Stepper(const GarkTableau& t) : partitioned_(false), N_(t.N) {
  validate(t);
  std::vector<int> offset(t.N + 1, 0);
  for (int q = 1; q <= t.N; ++q) offset[q] = offset[q - 1] + t.stages(q);
  nodes_.resize(static_cast<std::size_t>(offset[t.N]));
  for (int q = 1; q <= t.N; ++q)
    for (int i = 0; i < t.stages(q); ++i) {
      Node& n = nodes_[static_cast<std::size_t>(offset[q - 1] + i)];
      n.id = {q, i + 1, StageKind::Full};
      for (int m = 1; m <= t.N; ++m) {
        const Matrix& A = t.block(q, m);
        for (int j = 0; j < t.stages(m); ++j)
          if (A(i, j) != 0.0) n.inputs.push_back({offset[m - 1] + j, A(i, j)});
      }
    }
  for (int m = 1; m <= t.N; ++m)
    for (int j = 0; j < t.stages(m); ++j) y_out_.push_back({offset[m - 1] + j, t.weights(m)(j)});
  build_plan();
}

Stepper::Stepper(const PartitionedGarkTableau& t) : partitioned_(true), N_(t.N) {
  validate(t);
  // Momentum stages first, then position stages.
  std::vector<int> moff(t.N + 1, 0), qoff(t.N + 1, 0);
  for (int q = 1; q <= t.N; ++q) moff[q] = moff[q - 1] + t.stages(q);
  qoff[0] = moff[t.N];
  for (int q = 1; q <= t.N; ++q) qoff[q] = qoff[q - 1] + t.stages_hat(q);
  nodes_.resize(static_cast<std::size_t>(qoff[t.N]));
  for (int q = 1; q <= t.N; ++q) {
    for (int i = 0; i < t.stages(q); ++i) {
      Node& n = nodes_[static_cast<std::size_t>(moff[q - 1] + i)];
      n.id = {q, i + 1, StageKind::Momentum};
      for (int m = 1; m <= t.N; ++m) {
        const Matrix& Ah = t.block_hat(q, m);
        for (int j = 0; j < t.stages_hat(m); ++j)
          if (Ah(i, j) != 0.0) n.inputs.push_back({qoff[m - 1] + j, Ah(i, j)});
      }
    }
    for (int i = 0; i < t.stages_hat(q); ++i) {
      Node& n = nodes_[static_cast<std::size_t>(qoff[q - 1] + i)];
      n.id = {q, i + 1, StageKind::Position};
      for (int m = 1; m <= t.N; ++m) {
        const Matrix& A = t.block(q, m);
        for (int j = 0; j < t.stages(m); ++j)
          if (A(i, j) != 0.0) n.inputs.push_back({moff[m - 1] + j, A(i, j)});
      }
    }
  }
  for (int m = 1; m <= t.N; ++m) {
    for (int j = 0; j < t.stages(m); ++j) q_out_.push_back({moff[m - 1] + j, t.weights(m)(j)});
    for (int j = 0; j < t.stages_hat(m); ++j) p_out_.push_back({qoff[m - 1] + j, t.weights_hat(m)(j)});
  }
  build_plan();
}

void Stepper::build_plan() {
  const int n = static_cast<int>(nodes_.size());
  plan_ = StagePlan{};
  for (const auto& node : nodes_) plan_.stages.push_back(node.id);

  // Tarjan; edges point from a stage to the stages it reads, so components
  // come out dependencies first.
  std::vector<int> index(n, -1), low(n, 0), stack;
  std::vector<bool> on_stack(n, false);
  int counter = 0;
  std::vector<std::vector<int>> components;
  std::function<void(int)> connect = [&](int v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (const auto& in : nodes_[v].inputs) {
      int w = in.node;
      if (index[w] < 0) {
        connect(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<int> comp;
      int w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp.push_back(w);
      } while (w != v);
      std::sort(comp.begin(), comp.end());
      components.push_back(comp);
    }
  };
  for (int v = 0; v < n; ++v)
    if (index[v] < 0) connect(v);

  for (const auto& comp : components) {
    bool self_loop = false;
    if (comp.size() == 1)
      for (const auto& in : nodes_[comp[0]].inputs)
        if (in.node == comp[0]) self_loop = true;
    if (comp.size() == 1 && !self_loop) {
      plan_.schedule.push_back({comp[0], -1});
      plan_.order.push_back(nodes_[comp[0]].id);
    } else {
      plan_.explicit_scheme = false;
      int g = static_cast<int>(plan_.group_nodes.size());
      plan_.group_nodes.push_back(comp);
      std::vector<StageId> ids;
      for (int v : comp) ids.push_back(nodes_[v].id);
      plan_.implicit_groups.push_back(ids);
      plan_.schedule.push_back({-1, g});
    }
  }
}

StagePlan plan_stages(const GarkTableau& t) { return Stepper(t).plan(); }
StagePlan plan_stages(const PartitionedGarkTableau& t) { return Stepper(t).plan(); }

namespace {

double inf_norm(const Vector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

PhaseState Stepper::step(const SeparableHamiltonian& sys, const PhaseState& y, double h, const SolverConfig& cfg,
                         EvalCounts* counts) const {
  const int d = sys.d;
  if (y.q.size() != d || y.p.size() != d) throw DimensionMismatch("state dimension does not match the system");
  const std::vector<PartitionContent> layout = partition_layout(sys, N_);
  EvalCounts local;
  EvalCounts& cnt = counts ? *counts : local;
  if (cnt.potential.size() < sys.potentials.size()) cnt.potential.resize(sys.potentials.size(), 0);
  if (cnt.per_partition.size() < static_cast<std::size_t>(N_)) cnt.per_partition.resize(N_, 0);

  const std::size_t n = nodes_.size();
  Vector y0(2 * d);
  y0 << y.q, y.p;
  std::vector<Vector> val(n), slope(n);
  Vector g(d), acc(d);

  auto base = [&](const Node& node) -> Vector {
    switch (node.id.kind) {
      case StageKind::Position: return y.q;
      case StageKind::Momentum: return y.p;
      default: return y0;
    }
  };

  auto eval_slope = [&](std::size_t v) {
    const Node& node = nodes_[v];
    const PartitionContent& pc = layout[static_cast<std::size_t>(node.id.partition - 1)];
    cnt.per_partition[static_cast<std::size_t>(node.id.partition - 1)]++;
    const Vector& x = val[v];
    switch (node.id.kind) {
      case StageKind::Momentum: {
        Vector s = Vector::Zero(d);
        if (pc.kinetic) {
          sys.grad_T(x, s);
          cnt.kinetic++;
        }
        slope[v] = s;
        break;
      }
      case StageKind::Position: {
        Vector s = Vector::Zero(d);
        for (int i : pc.potentials) {
          sys.potentials[static_cast<std::size_t>(i)].grad(x, g);
          s -= g;
          cnt.potential[static_cast<std::size_t>(i)]++;
        }
        slope[v] = s;
        break;
      }
      default: {
        Vector s = Vector::Zero(2 * d);
        if (pc.kinetic) {
          sys.grad_T(x.tail(d), g);
          s.head(d) = g;
          cnt.kinetic++;
        }
        for (int i : pc.potentials) {
          sys.potentials[static_cast<std::size_t>(i)].grad(x.head(d), g);
          s.tail(d) -= g;
          cnt.potential[static_cast<std::size_t>(i)]++;
        }
        slope[v] = s;
      }
    }
  };

  auto stage_value = [&](std::size_t v) -> Vector {
    const Node& node = nodes_[v];
    Vector b = base(node);
    if (node.inputs.empty()) return b;
    Vector sum = Vector::Zero(b.size());
    for (const auto& in : node.inputs) sum += in.coef * slope[static_cast<std::size_t>(in.node)];
    return b + h * sum;
  };

  for (const auto& item : plan_.schedule) {
    if (item.group < 0) {
      auto v = static_cast<std::size_t>(item.stage);
      val[v] = stage_value(v);
      eval_slope(v);
      continue;
    }
    const std::vector<int>& grp = plan_.group_nodes[static_cast<std::size_t>(item.group)];
    for (int v : grp) val[static_cast<std::size_t>(v)] = base(nodes_[static_cast<std::size_t>(v)]);

    auto stacked = [&]() {
      Eigen::Index len = 0;
      for (int v : grp) len += val[static_cast<std::size_t>(v)].size();
      Vector Y(len);
      Eigen::Index o = 0;
      for (int v : grp) {
        const Vector& x = val[static_cast<std::size_t>(v)];
        Y.segment(o, x.size()) = x;
        o += x.size();
      }
      return Y;
    };
    auto unstack = [&](const Vector& Y) {
      Eigen::Index o = 0;
      for (int v : grp) {
        Vector& x = val[static_cast<std::size_t>(v)];
        x = Y.segment(o, x.size());
        o += x.size();
      }
    };
    // Phi(Y): slopes at the current group values, then new group values.
    auto phi = [&](const Vector& Y) {
      unstack(Y);
      for (int v : grp) eval_slope(static_cast<std::size_t>(v));
      std::vector<Vector> next;
      next.reserve(grp.size());
      for (int v : grp) next.push_back(stage_value(static_cast<std::size_t>(v)));
      for (std::size_t k = 0; k < grp.size(); ++k) val[static_cast<std::size_t>(grp[k])] = next[k];
      return stacked();
    };

    Vector Y = stacked();
    bool converged = false;
    double last_delta = 0.0, prev_delta = -1.0;
    int stagnant = 0;
    bool use_newton = false;
    int it = 0;
    for (; it < cfg.max_iters; ++it) {
      Vector Yn = phi(Y);
      cnt.solver_iterations++;
      last_delta = inf_norm(Yn - Y);
      Y = Yn;
      if (!std::isfinite(last_delta)) break;
      if (last_delta <= cfg.abs_tol + cfg.rel_tol * inf_norm(Y)) {
        converged = true;
        break;
      }
      if (prev_delta > 0.0 && last_delta > 0.9 * prev_delta)
        ++stagnant;
      else
        stagnant = 0;
      prev_delta = last_delta;
      if (stagnant >= 5 && cfg.strategy == SolverStrategy::NewtonFallback) {
        use_newton = true;
        break;
      }
    }
    if (use_newton) {
      cnt.newton_switches++;
      auto G = [&](const Vector& Z) -> Vector { return Z - phi(Z); };
      for (int k = 0; k < cfg.max_iters; ++k) {
        Vector r = G(Y);
        const Eigen::Index len = Y.size();
        Matrix J(len, len);
        for (Eigen::Index j = 0; j < len; ++j) {
          double eps = 1e-7 * std::max(1.0, std::abs(Y(j)));
          Vector Z = Y;
          Z(j) += eps;
          J.col(j) = (G(Z) - r) / eps;
        }
        cnt.solver_iterations++;
        Vector dY = J.fullPivLu().solve(-r);
        Y += dY;
        last_delta = inf_norm(dY);
        if (!std::isfinite(last_delta)) break;
        if (last_delta <= cfg.abs_tol + cfg.rel_tol * inf_norm(Y)) {
          converged = true;
          break;
        }
      }
    }
    if (!converged) throw StageSolveFailure(static_cast<std::size_t>(item.group), last_delta);
    unstack(Y);
    for (int v : grp) eval_slope(static_cast<std::size_t>(v));
  }

  PhaseState out;
  out.t = y.t + h;
  if (partitioned_) {
    Vector sq = Vector::Zero(d), sp = Vector::Zero(d);
    for (const auto& o : q_out_) sq += o.weight * slope[static_cast<std::size_t>(o.node)];
    for (const auto& o : p_out_) sp += o.weight * slope[static_cast<std::size_t>(o.node)];
    out.q = y.q + h * sq;
    out.p = y.p + h * sp;
  } else {
    Vector sy = Vector::Zero(2 * d);
    for (const auto& o : y_out_) sy += o.weight * slope[static_cast<std::size_t>(o.node)];
    Vector y1 = y0 + h * sy;
    out.q = y1.head(d);
    out.p = y1.tail(d);
  }
  return out;
}

PhaseState gark_step(const SeparableHamiltonian& sys, const GarkTableau& t, const PhaseState& y, double h,
                     const SolverConfig& cfg, EvalCounts* counts) {
  return Stepper(t).step(sys, y, h, cfg, counts);
}

PhaseState partitioned_step(const SeparableHamiltonian& sys, const PartitionedGarkTableau& t, const PhaseState& y,
                            double h, const SolverConfig& cfg, EvalCounts* counts) {
  return Stepper(t).step(sys, y, h, cfg, counts);
}

// ---------------------------------------------------------------------------
// Reference integrators

namespace {

void force(const SeparableHamiltonian& sys, const Vector& q, Vector& f, EvalCounts* counts) {
  f = Vector::Zero(sys.d);
  Vector g(sys.d);
  for (std::size_t i = 0; i < sys.potentials.size(); ++i) {
    sys.potentials[i].grad(q, g);
    f -= g;
    if (counts) {
      if (counts->potential.size() < sys.potentials.size()) counts->potential.resize(sys.potentials.size(), 0);
      counts->potential[i]++;
    }
  }
}

void velocity(const SeparableHamiltonian& sys, const Vector& p, Vector& v, EvalCounts* counts) {
  sys.grad_T(p, v);
  if (counts) counts->kinetic++;
}

}  // namespace

PhaseState leapfrog_step(const SeparableHamiltonian& sys, const PhaseState& y, double h, EvalCounts* counts) {
  Vector f, v;
  force(sys, y.q, f, counts);
  Vector ph = y.p + (0.5 * h) * f;
  velocity(sys, ph, v, counts);
  PhaseState out;
  out.q = y.q + h * v;
  force(sys, out.q, f, counts);
  out.p = ph + (0.5 * h) * f;
  out.t = y.t + h;
  return out;
}

Yoshida4Coefficients yoshida4_coefficients() {
  const double w1 = 1.0 / (2.0 - std::cbrt(2.0));
  return {1.0 - 2.0 * w1, w1};
}

PhaseState yoshida4_step(const SeparableHamiltonian& sys, const PhaseState& y, double h, EvalCounts* counts) {
  const auto c = yoshida4_coefficients();
  const double w[3] = {c.w1, c.w0, c.w1};
  // Drift-kick-drift with adjacent half drifts merged.
  const double drift[4] = {0.5 * w[0], 0.5 * (w[0] + w[1]), 0.5 * (w[1] + w[2]), 0.5 * w[2]};
  Vector q = y.q, p = y.p, f, v;
  for (int k = 0; k < 3; ++k) {
    velocity(sys, p, v, counts);
    q += (drift[k] * h) * v;
    force(sys, q, f, counts);
    p += (w[k] * h) * f;
  }
  velocity(sys, p, v, counts);
  q += (drift[3] * h) * v;
  return {q, p, y.t + h};
}

PhaseState rk4_step(const SeparableHamiltonian& sys, const PhaseState& y, double h, EvalCounts* counts) {
  auto rhs = [&](const Vector& q, const Vector& p, Vector& dq, Vector& dp) {
    velocity(sys, p, dq, counts);
    force(sys, q, dp, counts);
  };
  Vector k1q, k1p, k2q, k2p, k3q, k3p, k4q, k4p;
  rhs(y.q, y.p, k1q, k1p);
  rhs(y.q + 0.5 * h * k1q, y.p + 0.5 * h * k1p, k2q, k2p);
  rhs(y.q + 0.5 * h * k2q, y.p + 0.5 * h * k2p, k3q, k3p);
  rhs(y.q + h * k3q, y.p + h * k3p, k4q, k4p);
  PhaseState out;
  out.q = y.q + (h / 6.0) * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
  out.p = y.p + (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
  out.t = y.t + h;
  return out;
}

// ---------------------------------------------------------------------------
// Methods and trajectories

Method Method::from_tableau(const AnyTableau& t, std::string name) {
  Method m;
  m.kind_ = Kind::Tableau;
  std::visit(
      [&](const auto& tab) {
        m.stepper_ = std::make_shared<const Stepper>(tab);
        m.name_ = name.empty() ? tab.name : name;
      },
      t);
  return m;
}

Method Method::reference(Kind kind) {
  if (kind == Kind::Tableau) throw DimensionMismatch("reference() needs a reference integrator kind");
  Method m;
  m.kind_ = kind;
  m.name_ = kind == Kind::Leapfrog ? "leapfrog" : kind == Kind::Yoshida4 ? "yoshida4" : "rk4";
  return m;
}

Method Method::by_name(const std::string& name) {
  if (name == "leapfrog") return reference(Kind::Leapfrog);
  if (name == "yoshida4") return reference(Kind::Yoshida4);
  if (name == "rk4") return reference(Kind::Rk4);
  return from_tableau(builtin_tableau(name), name);
}

PhaseState Method::step(const SeparableHamiltonian& sys, const PhaseState& y, double h, const SolverConfig& cfg,
                        EvalCounts* counts) const {
  switch (kind_) {
    case Kind::Tableau: return stepper_->step(sys, y, h, cfg, counts);
    case Kind::Leapfrog: return leapfrog_step(sys, y, h, counts);
    case Kind::Yoshida4: return yoshida4_step(sys, y, h, counts);
    case Kind::Rk4: return rk4_step(sys, y, h, counts);
  }
  return y;
}

Trajectory integrate(const SeparableHamiltonian& sys, const Method& method, const PhaseState& y0, double h,
                     std::int64_t n_steps, const SolverConfig& cfg, std::int64_t sample_every) {
  if (n_steps < 0) throw DimensionMismatch("n_steps must be nonnegative");
  Trajectory tr;
  tr.counts.potential.assign(sys.potentials.size(), 0);
  tr.H.reserve(static_cast<std::size_t>(n_steps + 1));
  tr.H_parts.reserve(static_cast<std::size_t>(n_steps + 1));
  tr.states.push_back(y0);
  tr.H.push_back(sys.H(y0.q, y0.p));
  tr.H_parts.push_back(sys.parts(y0.q, y0.p));
  PhaseState y = y0;
  for (std::int64_t i = 0; i < n_steps; ++i) {
    try {
      y = method.step(sys, y, h, cfg, &tr.counts);
    } catch (const StageSolveFailure& e) {
      throw StepError(static_cast<std::size_t>(i), e.what(), true);
    } catch (const Error& e) {
      throw StepError(static_cast<std::size_t>(i), e.what(), false);
    }
    tr.H.push_back(sys.H(y.q, y.p));
    tr.H_parts.push_back(sys.parts(y.q, y.p));
    bool last = i + 1 == n_steps;
    if (last || (sample_every > 0 && (i + 1) % sample_every == 0)) tr.states.push_back(y);
  }
  return tr;
}

}  // namespace gark
