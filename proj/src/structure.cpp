#include "gark/structure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gark {

namespace {

double max_abs(const Matrix& M) { return M.size() == 0 ? 0.0 : M.cwiseAbs().maxCoeff(); }
double max_abs(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

Vector rev(const Vector& v) { return v.reverse(); }

// a_{ij} + a_{r+1-i, c+1-j} - w_j, maximal magnitude over the block.
double block_symmetry(const Matrix& A, const Vector& w) {
  double worst = 0.0;
  const auto r = A.rows(), c = A.cols();
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j)
      worst = std::max(worst, std::abs(A(i, j) + A(r - 1 - i, c - 1 - j) - w(j)));
  return worst;
}

}  // namespace

SymplecticityMatrix symplecticity_matrix(const GarkTableau& t) {
  SymplecticityMatrix out;
  std::vector<int> offset(t.N + 1, 0);
  for (int m = 1; m <= t.N; ++m) offset[m] = offset[m - 1] + t.stages(m);
  out.assembled = Matrix::Zero(offset[t.N], offset[t.N]);
  for (int m = 1; m <= t.N; ++m)
    for (int l = m; l <= t.N; ++l) {
      const Vector& bm = t.weights(m);
      const Vector& bl = t.weights(l);
      Matrix P = t.block(l, m).transpose() * bl.asDiagonal();
      P += bm.asDiagonal() * t.block(m, l);
      P -= bm * bl.transpose();
      if (m == l) {
        Matrix Pt = P.transpose();
        P.triangularView<Eigen::StrictlyLower>() = Pt.triangularView<Eigen::StrictlyLower>();
      }
      out.assembled.block(offset[m - 1], offset[l - 1], P.rows(), P.cols()) = P;
      out.assembled.block(offset[l - 1], offset[m - 1], P.cols(), P.rows()) = P.transpose();
      out.blocks[{m, l}] = P;
      if (m != l) out.blocks[{l, m}] = P.transpose();
    }
  return out;
}

SymplecticityResult symplecticity_residual(const GarkTableau& t, Restriction r, double tol) {
  SymplecticityResult out;
  out.P = symplecticity_matrix(t);
  for (int m = 1; m <= t.N; ++m)
    for (int l = m; l <= t.N; ++l) {
      if (r == Restriction::PotentialSplit && !(m == 1 && l >= 2)) continue;
      out.report.add("P", {m, l}, max_abs(out.P.blocks.at({m, l})));
    }
  out.report.finalize(tol);
  return out;
}

ConditionReport partitioned_symplecticity_residual(const PartitionedGarkTableau& t, double tol) {
  ConditionReport rep;
  for (int m = 1; m <= t.N; ++m)
    for (int l = 1; l <= t.N; ++l) {
      const Vector& bl = t.weights(l);
      const Vector& bhm = t.weights_hat(m);
      Matrix R = t.block_hat(l, m).transpose() * bl.asDiagonal();
      R += bhm.asDiagonal() * t.block(m, l);
      R -= bhm * bl.transpose();
      rep.add("Psep", {m, l}, max_abs(R));
    }
  rep.finalize(tol);
  return rep;
}

ConditionReport symmetry_residual(const GarkTableau& t, double tol) {
  ConditionReport rep;
  for (int m = 1; m <= t.N; ++m) {
    const Vector& b = t.weights(m);
    rep.add("b", {m}, max_abs(Vector(b - rev(b))));
  }
  for (int l = 1; l <= t.N; ++l)
    for (int m = 1; m <= t.N; ++m) rep.add("A", {l, m}, block_symmetry(t.block(l, m), t.weights(m)));
  rep.finalize(tol);
  return rep;
}

ConditionReport symmetry_residual(const PartitionedGarkTableau& t, double tol) {
  ConditionReport rep;
  for (int m = 1; m <= t.N; ++m) {
    const Vector& b = t.weights(m);
    const Vector& bh = t.weights_hat(m);
    rep.add("b", {m}, max_abs(Vector(b - rev(b))));
    rep.add("b_hat", {m}, max_abs(Vector(bh - rev(bh))));
  }
  for (int l = 1; l <= t.N; ++l)
    for (int m = 1; m <= t.N; ++m) {
      rep.add("A", {l, m}, block_symmetry(t.block(l, m), t.weights(m)));
      rep.add("A_hat", {l, m}, block_symmetry(t.block_hat(l, m), t.weights_hat(m)));
    }
  rep.finalize(tol);
  return rep;
}

StabilityResult algebraic_stability_check(const GarkTableau& t, double tol) {
  StabilityResult out;
  SymplecticityMatrix P = symplecticity_matrix(t);
  if (P.assembled.rows() > 0) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(P.assembled, Eigen::EigenvaluesOnly);
    out.lambda_min = eig.eigenvalues().minCoeff();
  }
  out.min_weight = std::numeric_limits<double>::infinity();
  for (int m = 1; m <= t.N; ++m) {
    const Vector& b = t.weights(m);
    if (b.size() > 0) out.min_weight = std::min(out.min_weight, b.minCoeff());
  }
  out.verdict = out.min_weight >= -tol && out.lambda_min >= -tol;
  out.note = "checked as P positive semidefinite with nonnegative weights; a strict definiteness "
             "test would reject every symplectic method, whose P vanishes";
  return out;
}

ConditionReport redundancy_residuals(const GarkTableau& t, double tol) {
  ConditionReport rep;
  const int N = t.N;
  auto c = coupling_abscissae(t);
  auto C = [&](int q, int m) -> const Vector& { return c.at({q, m}); };
  for (int m = 1; m <= N; ++m)
    for (int l = m; l <= N; ++l)
      rep.add("o2", {m, l}, t.weights(m).dot(C(m, l)) + t.weights(l).dot(C(l, m)) - 1.0);
  for (int m = 1; m <= N; ++m)
    for (int l = 1; l <= N; ++l)
      for (int s = 1; s <= N; ++s) {
        double lhs = t.weights(m).dot(C(m, s).cwiseProduct(C(m, l))) +
                     t.weights(l).dot(t.block(l, m) * C(m, s));
        rep.add("bs", {m, l, s}, lhs - 0.5);
      }
  for (int m = 1; m <= N; ++m)
    for (int l = 1; l <= N; ++l)
      for (int tt = 1; tt <= N; ++tt)
        for (int s = 1; s <= N; ++s) {
          Vector x = t.block(m, l) * C(l, s);
          Vector y = t.block(l, m) * C(m, tt);
          double lhs = t.weights(m).dot(C(m, tt).cwiseProduct(x)) + t.weights(l).dot(C(l, s).cwiseProduct(y));
          rep.add("bs2", {m, l, tt, s}, lhs - 0.25);
        }
  rep.finalize(tol);
  return rep;
}

ConditionReport merge_condition_residual(const GarkTableau& t, double tol) {
  for (int m = 1; m <= t.N; ++m) {
    const Vector& b = t.weights(m);
    for (Eigen::Index i = 0; i < b.size(); ++i)
      if (b(i) == 0.0)
        throw ZeroWeight("weight b^" + std::to_string(m) + "_" + std::to_string(i + 1) + " is zero");
  }
  ConditionReport rep;
  for (int m = 1; m <= t.N; ++m)
    for (int l = 1; l <= t.N; ++l) {
      const Matrix& Aml = t.block(m, l);
      const Matrix& Alm = t.block(l, m);
      const Vector& bm = t.weights(m);
      const Vector& bl = t.weights(l);
      const auto sm = bm.size(), sl = bl.size();
      double worst = 0.0;
      for (Eigen::Index j = 0; j < sm; ++j)
        for (Eigen::Index i = 0; i < sl; ++i)
          worst = std::max(worst, std::abs(bm(j) * Aml(j, i) - bl(i) * Alm(sl - 1 - i, sm - 1 - j)));
      rep.add("merge", {m, l}, worst);
    }
  rep.finalize(tol);
  return rep;
}

}  // namespace gark
