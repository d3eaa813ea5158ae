#pragma once

#include <map>
#include <string>
#include <vector>

#include "gark/structure.hpp"
#include "gark/tableau.hpp"

namespace gark {

struct OrderReport {
  std::map<int, ConditionReport> per_order;
  int attained_order = 0;
  bool internally_consistent = false;
  std::vector<std::string> notes;
};

// Conditions "1", "2", "3a", "3b", "4a".."4d" over all partition index tuples;
// the simplified set is used when the tableau is internally consistent at tol.
OrderReport gark_order_residuals(const GarkTableau& t, int max_order = 4, double tol = kCertTol);

// Same enumeration with internal consistency forced on or off.
OrderReport gark_order_residuals(const GarkTableau& t, int max_order, double tol, bool use_intcons);

// Alternating conditions "1a".."4db".  The "a" family is rooted in a
// potential slope (weights b_hat, matrices A then A_hat), the "b" family in a
// kinetic slope (weights b, matrices A_hat then A).  Instances that touch an
// empty stage set are skipped: that partition carries no such slope.
OrderReport partitioned_order_residuals(const PartitionedGarkTableau& t, int max_order = 4,
                                        double tol = kCertTol);

// Restricts every partition index to the given list.
OrderReport partitioned_order_residuals(const PartitionedGarkTableau& t, int max_order, double tol,
                                        const std::vector<int>& partitions);

struct MixedOrder {
  int fast_order = 0;
  int overall_order = 0;
  int fast_order_raw = 0;
  int overall_order_raw = 0;
  std::vector<std::string> notes;
};
// Throws NotSymmetric unless symmetry_residual(t) <= tol.
MixedOrder mixed_order_report(const PartitionedGarkTableau& t, int fast_partition, double tol = kCertTol);

struct Order4Equivalence {
  bool cond_4ba = false;
  bool cond_4bb = false;
  bool agree = false;
  bool order4 = false;
};
// Throws NotConjugate unless A_hat is the symplectic conjugate of A with b = b_hat.
Order4Equivalence verify_order4_iff(const PartitionedGarkTableau& t, double tol = kCertTol);

}  // namespace gark
