#pragma once

#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "gark/errors.hpp"

namespace gark {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Partition indices are 1-based throughout, keys are (q, m).
using BlockKey = std::pair<int, int>;
using BlockMap = std::map<BlockKey, Matrix>;
using WeightMap = std::map<int, Vector>;

struct GarkTableau {
  int N = 0;
  std::vector<int> s;
  BlockMap A;
  WeightMap b;
  std::string name;

  int stages(int q) const { return s.at(q - 1); }
  int total_stages() const;
  const Matrix& block(int q, int m) const;
  const Vector& weights(int m) const;
};

// Position stages (count s_hat) are driven by kinetic slopes through A, which
// is s_hat^q x s^m.  Momentum stages (count s) are driven by potential slopes
// through A_hat, which is s^q x s_hat^m.  b (length s) updates the position,
// b_hat (length s_hat) updates the momentum.
struct PartitionedGarkTableau {
  int N = 0;
  std::vector<int> s;
  std::vector<int> s_hat;
  BlockMap A;
  BlockMap A_hat;
  WeightMap b;
  WeightMap b_hat;
  std::string name;

  int stages(int q) const { return s.at(q - 1); }
  int stages_hat(int q) const { return s_hat.at(q - 1); }
  const Matrix& block(int q, int m) const;
  const Matrix& block_hat(int q, int m) const;
  const Vector& weights(int m) const;
  const Vector& weights_hat(int m) const;
};

using AnyTableau = std::variant<GarkTableau, PartitionedGarkTableau>;

struct ConditionEntry {
  std::string id;
  std::vector<int> indices;
  double residual = 0.0;
};

struct ConditionReport {
  std::vector<ConditionEntry> entries;
  double max_abs_residual = 0.0;
  double tolerance = 0.0;
  bool verdict = true;

  void add(std::string id, std::vector<int> indices, double residual);
  // Recomputes max_abs_residual and verdict for the given tolerance.
  void finalize(double tol);
};

void validate(const GarkTableau& t);
void validate(const PartitionedGarkTableau& t);
void validate(const AnyTableau& t);

// c^{q,m} = A^{q,m} 1
std::map<BlockKey, Vector> coupling_abscissae(const GarkTableau& t);

struct ConsistencyResult {
  bool consistent = false;
  ConditionReport report;
};
ConsistencyResult is_internally_consistent(const GarkTableau& t, double tol);

AnyTableau read_tableau(const std::string& path);
AnyTableau parse_tableau(const std::string& json_text);
void write_tableau(const AnyTableau& t, const std::string& path);
std::string serialize_tableau(const AnyTableau& t);

// Parses "p/q", a decimal literal, or an integer into the nearest binary64.
double parse_real(const std::string& text);

// The GARK tableau seen as a partitioned tableau with A_hat = A, b_hat = b.
PartitionedGarkTableau as_partitioned(const GarkTableau& t);

// Reversal permutation matrix of size n.
Matrix reversal(int n);

}  // namespace gark
