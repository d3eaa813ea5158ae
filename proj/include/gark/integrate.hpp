#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "gark/problems.hpp"
#include "gark/tableau.hpp"

namespace gark {

struct PhaseState {
  Vector q;
  Vector p;
  double t = 0.0;
};

enum class StageKind { Position, Momentum, Full };

struct StageId {
  int partition = 0;  // 1-based
  int index = 0;      // 1-based
  StageKind kind = StageKind::Full;
  bool operator==(const StageId& o) const {
    return partition == o.partition && index == o.index && kind == o.kind;
  }
};

std::string to_string(const StageId& id);

// One entry of the evaluation schedule: either a stage that can be evaluated
// directly (group < 0) or an implicit group solved simultaneously.
struct ScheduleItem {
  int stage = -1;
  int group = -1;
};

struct StagePlan {
  std::vector<StageId> stages;  // node table
  std::vector<StageId> order;   // directly evaluated stages, in evaluation order
  std::vector<std::vector<StageId>> implicit_groups;
  std::vector<std::vector<int>> group_nodes;
  std::vector<ScheduleItem> schedule;
  bool explicit_scheme = true;
};

StagePlan plan_stages(const GarkTableau& t);
StagePlan plan_stages(const PartitionedGarkTableau& t);

enum class SolverStrategy { FixedPoint, NewtonFallback };

struct SolverConfig {
  double abs_tol = 1e-13;
  double rel_tol = 1e-13;
  int max_iters = 50;
  SolverStrategy strategy = SolverStrategy::NewtonFallback;
};

struct EvalCounts {
  std::int64_t kinetic = 0;
  std::vector<std::int64_t> potential;     // per potential of the system
  std::vector<std::int64_t> per_partition;  // slope evaluations per tableau partition
  std::int64_t solver_iterations = 0;
  std::int64_t newton_switches = 0;

  void merge(const EvalCounts& o);
};

// How the parts of a separable Hamiltonian are distributed over N partitions.
// N = 1: everything in one partition.  N = #potentials: T and V_1 in
// partition 1, V_m in partition m.  N = #potentials + 1: T alone in
// partition 1, V_{m-1} in partition m.
struct PartitionContent {
  bool kinetic = false;
  std::vector<int> potentials;  // 0-based indices into the system
};
std::vector<PartitionContent> partition_layout(const SeparableHamiltonian& sys, int N);

// A tableau compiled into its stage graph.
class Stepper {
 public:
  explicit Stepper(const GarkTableau& t);
  explicit Stepper(const PartitionedGarkTableau& t);

  PhaseState step(const SeparableHamiltonian& sys, const PhaseState& y, double h, const SolverConfig& cfg,
                  EvalCounts* counts = nullptr) const;

  const StagePlan& plan() const { return plan_; }
  bool partitioned() const { return partitioned_; }
  int partitions() const { return N_; }

  struct Input {
    int node;
    double coef;
  };
  struct Node {
    StageId id;
    std::vector<Input> inputs;
  };
  struct Output {
    int node;
    double weight;
  };
  const std::vector<Node>& nodes() const { return nodes_; }

 private:
  void build_plan();

  bool partitioned_ = false;
  int N_ = 0;
  std::vector<Node> nodes_;
  std::vector<Output> q_out_;  // partitioned: position update from momentum stages
  std::vector<Output> p_out_;  // partitioned: momentum update from position stages
  std::vector<Output> y_out_;  // full GARK update
  StagePlan plan_;
};

PhaseState gark_step(const SeparableHamiltonian& sys, const GarkTableau& t, const PhaseState& y, double h,
                     const SolverConfig& cfg = {}, EvalCounts* counts = nullptr);
PhaseState partitioned_step(const SeparableHamiltonian& sys, const PartitionedGarkTableau& t, const PhaseState& y,
                            double h, const SolverConfig& cfg = {}, EvalCounts* counts = nullptr);

// Kick-drift-kick.
PhaseState leapfrog_step(const SeparableHamiltonian& sys, const PhaseState& y, double h,
                         EvalCounts* counts = nullptr);
// Triple jump of drift-kick-drift leapfrog: three force evaluations per step.
PhaseState yoshida4_step(const SeparableHamiltonian& sys, const PhaseState& y, double h,
                         EvalCounts* counts = nullptr);
PhaseState rk4_step(const SeparableHamiltonian& sys, const PhaseState& y, double h, EvalCounts* counts = nullptr);

struct Yoshida4Coefficients {
  double w0;
  double w1;
};
Yoshida4Coefficients yoshida4_coefficients();

// A named one-step method: a compiled tableau or a reference integrator.
class Method {
 public:
  enum class Kind { Tableau, Leapfrog, Yoshida4, Rk4 };

  static Method from_tableau(const AnyTableau& t, std::string name = "");
  static Method reference(Kind kind);
  // Built-in tableau names plus "leapfrog", "yoshida4", "rk4".
  static Method by_name(const std::string& name);

  PhaseState step(const SeparableHamiltonian& sys, const PhaseState& y, double h, const SolverConfig& cfg,
                  EvalCounts* counts = nullptr) const;

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  const Stepper* stepper() const { return stepper_.get(); }

 private:
  Kind kind_ = Kind::Leapfrog;
  std::string name_;
  std::shared_ptr<const Stepper> stepper_;
};

struct Trajectory {
  std::vector<PhaseState> states;  // sampled states, always including first and last
  std::vector<double> H;           // per step, index 0 is the initial state
  std::vector<std::vector<double>> H_parts;
  EvalCounts counts;
};

// sample_every = 0 keeps only the initial and final state.
Trajectory integrate(const SeparableHamiltonian& sys, const Method& method, const PhaseState& y0, double h,
                     std::int64_t n_steps, const SolverConfig& cfg = {}, std::int64_t sample_every = 1);

}  // namespace gark
