#pragma once

#include <string>

#include "gark/tableau.hpp"

namespace gark {

inline constexpr double kCertTol = 1e-12;

// P^{m,l} = A^{l,m}^T B^l + B^m A^{m,l} - b^m b^l^T.  Only m <= l is computed;
// the lower triangle is the transpose.
struct SymplecticityMatrix {
  BlockMap blocks;
  Matrix assembled;
};

enum class Restriction { All, PotentialSplit };

struct SymplecticityResult {
  ConditionReport report;
  SymplecticityMatrix P;
};

SymplecticityMatrix symplecticity_matrix(const GarkTableau& t);
SymplecticityResult symplecticity_residual(const GarkTableau& t, Restriction r = Restriction::All,
                                           double tol = kCertTol);

// A_hat^{l,m}^T B^l + B_hat^m A^{m,l} - b_hat^m b^l^T, shape s_hat^m x s^l.
ConditionReport partitioned_symplecticity_residual(const PartitionedGarkTableau& t, double tol = kCertTol);

ConditionReport symmetry_residual(const GarkTableau& t, double tol = kCertTol);
ConditionReport symmetry_residual(const PartitionedGarkTableau& t, double tol = kCertTol);

struct StabilityResult {
  bool verdict = false;
  double lambda_min = 0.0;
  double min_weight = 0.0;
  std::string note;
};
// Semidefinite form: b >= -tol componentwise and lambda_min(P) >= -tol.
StabilityResult algebraic_stability_check(const GarkTableau& t, double tol = kCertTol);

// Identities that vanish for symplectic tableaus of sufficient order:
//   "o2"  b^m.c^{m,l} + b^l.c^{l,m} - 1
//   "bs"  b^m.(c^{m,s} x c^{m,l}) + b^l.A^{l,m} c^{m,s} - 1/2
//   "bs2" b^m.(c^{m,t} x A^{m,l} c^{l,s}) + b^l.(c^{l,s} x A^{l,m} c^{m,t}) - 1/4
ConditionReport redundancy_residuals(const GarkTableau& t, double tol = kCertTol);

// b^m_j a^{m,l}_{j,i} - b^l_i a^{l,m}_{s^l+1-i, s^m+1-j}
ConditionReport merge_condition_residual(const GarkTableau& t, double tol = kCertTol);

}  // namespace gark
