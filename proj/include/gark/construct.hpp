#pragma once

#include <string>
#include <vector>

#include "gark/structure.hpp"
#include "gark/tableau.hpp"

namespace gark {

// b_ = P b, A_^{l,m} = 1 b^m^T - P A^{l,m} P.  The partitioned form reverses
// both halves.
GarkTableau time_reverse(const GarkTableau& t);
PartitionedGarkTableau time_reverse(const PartitionedGarkTableau& t);

// Step h/2 with t followed by step h/2 with its reverse, written as one
// tableau: blocks [[A, 0], [1 b^T, A_]] / 2 and weights [b; P b] / 2.
GarkTableau compose_symmetric_symplectic(const GarkTableau& t, double tol = kCertTol);
// Requires b = b_hat (hence s = s_hat), palindromic, and a symplectic pair.
PartitionedGarkTableau compose_symmetric_symplectic(const PartitionedGarkTableau& t, double tol = kCertTol);

// A_hat^{l,m} = 1 b^m^T - (B^l)^{-1} A^{m,l}^T B^m
BlockMap symplectic_conjugate(const BlockMap& A, const WeightMap& b);
// A_hat^{l,m} = 1 b_hat^m^T - (B^l)^{-1} A^{m,l}^T B_hat^m, for unequal weights.
BlockMap symplectic_conjugate(const BlockMap& A, const WeightMap& b, const WeightMap& b_hat);

// Pairs A with its conjugate as a partitioned tableau (b_hat = b).
PartitionedGarkTableau conjugate_pair(const GarkTableau& t);

bool is_self_adjoint(const GarkTableau& t, double tol = kCertTol);

// Stage counts s^l, s_hat^l must be even.  half_weights has length s^l/2,
// half_weights_hat has length s_hat^l/2 (defaults to half_weights when
// empty).  X(l,m) is (s_hat^l/2) x (s^m/2); missing blocks are zero.
struct ExplicitSymmetricSpec {
  int N = 0;
  std::vector<int> s;
  std::vector<int> s_hat;
  WeightMap half_weights;
  WeightMap half_weights_hat;
  BlockMap X;
};
PartitionedGarkTableau build_explicit_symmetric(const ExplicitSymmetricSpec& spec);

struct MultirateWeights {
  double b1 = 0.0;
  double b2 = 0.0;
  double b3 = 0.0;
  double bslow = 0.0;
  int iterations = 0;
  double residual = 0.0;
};
// Residuals of the four weight conditions at x = (b1, b2, b3, bslow).
std::vector<double> multirate_weight_conditions(const std::vector<double>& x);
MultirateWeights solve_multirate_weights();

ExplicitSymmetricSpec multirate42_spec(double b1, double b2, double b3, double bslow);
PartitionedGarkTableau make_multirate42();
PartitionedGarkTableau make_multirate42(double b1, double b2, double b3, double bslow);

// Built-in tableaus.
PartitionedGarkTableau verlet_pair();
PartitionedGarkTableau lobatto3_pair();
GarkTableau lobatto3a();
GarkTableau imim_symplectic();
GarkTableau verlet_coupled(double alpha = 0.0, double beta = 0.0);
GarkTableau implicit_midpoint();
GarkTableau explicit_euler();

bool is_builtin_name(const std::string& name);
std::vector<std::string> builtin_names();
// Accepts the names above plus "verlet-coupled(a,b)".  Throws ParseError.
AnyTableau builtin_tableau(const std::string& name);

}  // namespace gark
