#include "gark/construct.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <limits>

namespace gark {

namespace {

Matrix reverse_block(const Matrix& A, const Vector& w) {
  const auto r = A.rows(), c = A.cols();
  Matrix out(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) out(i, j) = w(j) - A(r - 1 - i, c - 1 - j);
  return out;
}

bool palindromic(const Vector& b, double tol) {
  return b.size() == 0 || (b - b.reverse()).cwiseAbs().maxCoeff() <= tol;
}

// [[A, 0], [1 w^T, R]] / 2 where R is the reversed block.
Matrix composed_block(const Matrix& A, const Vector& w) {
  const auto r = A.rows(), c = A.cols();
  Matrix out = Matrix::Zero(2 * r, 2 * c);
  out.topLeftCorner(r, c) = A;
  out.bottomLeftCorner(r, c) = Vector::Ones(r) * w.transpose();
  out.bottomRightCorner(r, c) = reverse_block(A, w);
  return 0.5 * out;
}

Vector composed_weights(const Vector& b) {
  Vector out(2 * b.size());
  out << b, b.reverse();
  return 0.5 * out;
}

void require_nonzero(const WeightMap& b, const char* label) {
  for (const auto& [m, w] : b)
    for (Eigen::Index i = 0; i < w.size(); ++i)
      if (w(i) == 0.0)
        throw ZeroWeight(std::string("weight ") + label + "^" + std::to_string(m) + "_" + std::to_string(i + 1) +
                         " is zero");
}

template <class T>
struct Dual {
  T v{};
  std::array<T, 4> d{};
};

using D4 = Dual<double>;

D4 operator+(const D4& a, const D4& b) {
  D4 r{a.v + b.v, {}};
  for (int k = 0; k < 4; ++k) r.d[k] = a.d[k] + b.d[k];
  return r;
}
D4 operator-(const D4& a, const D4& b) {
  D4 r{a.v - b.v, {}};
  for (int k = 0; k < 4; ++k) r.d[k] = a.d[k] - b.d[k];
  return r;
}
D4 operator*(const D4& a, const D4& b) {
  D4 r{a.v * b.v, {}};
  for (int k = 0; k < 4; ++k) r.d[k] = a.d[k] * b.v + a.v * b.d[k];
  return r;
}
D4 constant(double x) { return D4{x, {}}; }

double cst(double x, double) { return x; }
D4 cst(double x, const D4&) { return constant(x); }

// The four conditions on the 6-stage fast block and the slow weights:
// w.1 = 1, w.(Ah 1)^2 = 1/3, w.Ah Ah 1 = 1/6, 2 bs = 1, where
// w = (b1,b2,b3,b3,b2,b1) and Ah is the momentum-stage matrix of the scheme.
template <class T>
std::array<T, 4> weight_conditions(const std::array<T, 4>& x) {
  const T& b1 = x[0];
  const T& b2 = x[1];
  const T& b3 = x[2];
  const T& bs = x[3];
  T z = cst(0.0, b1);
  std::array<T, 6> w{b1, b2, b3, b3, b2, b1};
  std::array<std::array<T, 6>, 6> Ah{};
  for (auto& row : Ah) row.fill(z);
  // Lower triangle of the palindromic weights, first half with the diagonal
  // removed, second half with it kept.
  const int rows_len[6] = {0, 1, 2, 4, 5, 6};
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < rows_len[i]; ++j) Ah[i][j] = w[j];
  std::array<T, 6> c{};
  for (int i = 0; i < 6; ++i) {
    c[i] = z;
    for (int j = 0; j < 6; ++j) c[i] = c[i] + Ah[i][j];
  }
  std::array<T, 6> Ac{};
  for (int i = 0; i < 6; ++i) {
    Ac[i] = z;
    for (int j = 0; j < 6; ++j) Ac[i] = Ac[i] + Ah[i][j] * c[j];
  }
  T f1 = z, f2 = z, f3 = z;
  for (int i = 0; i < 6; ++i) {
    f1 = f1 + w[i];
    f2 = f2 + w[i] * c[i] * c[i];
    f3 = f3 + w[i] * Ac[i];
  }
  return {f1 - cst(1.0, b1), f2 - cst(1.0 / 3.0, b1), f3 - cst(1.0 / 6.0, b1), cst(2.0, b1) * bs - cst(1.0, b1)};
}

double norm_inf(const std::array<double, 4>& f) {
  double m = 0.0;
  for (double v : f) m = std::max(m, std::abs(v));
  return m;
}

std::array<double, 4> eval_plain(const std::array<double, 4>& x) { return weight_conditions<double>(x); }

// Damped Newton with the exact Jacobian from forward-mode derivatives.
bool newton(std::array<double, 4>& x, int max_iter, int& iters, double& res) {
  std::array<double, 4> f = eval_plain(x);
  res = norm_inf(f);
  for (iters = 0; iters < max_iter; ++iters) {
    if (res <= 1e-15) return true;
    std::array<D4, 4> xd;
    for (int k = 0; k < 4; ++k) {
      xd[k] = constant(x[k]);
      xd[k].d[k] = 1.0;
    }
    auto fd = weight_conditions<D4>(xd);
    Eigen::Matrix4d J;
    Eigen::Vector4d F;
    for (int i = 0; i < 4; ++i) {
      F(i) = fd[i].v;
      for (int k = 0; k < 4; ++k) J(i, k) = fd[i].d[k];
    }
    Eigen::FullPivLU<Eigen::Matrix4d> lu(J);
    if (!lu.isInvertible()) return false;
    Eigen::Vector4d dx = lu.solve(F);
    double lambda = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 30; ++ls) {
      std::array<double, 4> xn;
      for (int k = 0; k < 4; ++k) xn[k] = x[k] - lambda * dx(k);
      auto fn = eval_plain(xn);
      double rn = norm_inf(fn);
      if (std::isfinite(rn) && rn < res) {
        x = xn;
        f = fn;
        res = rn;
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) return res <= 1e-13;
  }
  return res <= 1e-13;
}

}  // namespace

GarkTableau time_reverse(const GarkTableau& t) {
  validate(t);
  GarkTableau out = t;
  for (int l = 1; l <= t.N; ++l)
    for (int m = 1; m <= t.N; ++m) out.A[{l, m}] = reverse_block(t.block(l, m), t.weights(m));
  for (int m = 1; m <= t.N; ++m) out.b[m] = t.weights(m).reverse();
  return out;
}

PartitionedGarkTableau time_reverse(const PartitionedGarkTableau& t) {
  validate(t);
  PartitionedGarkTableau out = t;
  for (int l = 1; l <= t.N; ++l)
    for (int m = 1; m <= t.N; ++m) {
      out.A[{l, m}] = reverse_block(t.block(l, m), t.weights(m));
      out.A_hat[{l, m}] = reverse_block(t.block_hat(l, m), t.weights_hat(m));
    }
  for (int m = 1; m <= t.N; ++m) {
    out.b[m] = t.weights(m).reverse();
    out.b_hat[m] = t.weights_hat(m).reverse();
  }
  return out;
}

GarkTableau compose_symmetric_symplectic(const GarkTableau& t, double tol) {
  validate(t);
  auto sym = symplecticity_residual(t, Restriction::All, tol);
  if (!sym.report.verdict)
    throw NotSymplectic("input is not symplectic (residual " + std::to_string(sym.report.max_abs_residual) + ")");
  for (int m = 1; m <= t.N; ++m)
    if (!palindromic(t.weights(m), tol))
      throw WeightsNotPalindromic("weights b^" + std::to_string(m) + " are not palindromic");
  GarkTableau out;
  out.N = t.N;
  for (int v : t.s) out.s.push_back(2 * v);
  for (int l = 1; l <= t.N; ++l)
    for (int m = 1; m <= t.N; ++m) out.A[{l, m}] = composed_block(t.block(l, m), t.weights(m));
  for (int m = 1; m <= t.N; ++m) out.b[m] = composed_weights(t.weights(m));
  out.name = t.name.empty() ? "" : t.name + "-composed";
  return out;
}

PartitionedGarkTableau compose_symmetric_symplectic(const PartitionedGarkTableau& t, double tol) {
  validate(t);
  auto sym = partitioned_symplecticity_residual(t, tol);
  if (!sym.verdict)
    throw NotSymplectic("input is not symplectic (residual " + std::to_string(sym.max_abs_residual) + ")");
  for (int m = 1; m <= t.N; ++m) {
    const Vector& b = t.weights(m);
    const Vector& bh = t.weights_hat(m);
    if (b.size() != bh.size() || (b.size() > 0 && (b - bh).cwiseAbs().maxCoeff() > tol))
      throw WeightsNotPalindromic("weights b^" + std::to_string(m) + " and b_hat^" + std::to_string(m) +
                                  " differ");
    if (!palindromic(b, tol))
      throw WeightsNotPalindromic("weights b^" + std::to_string(m) + " are not palindromic");
  }
  PartitionedGarkTableau out;
  out.N = t.N;
  for (int v : t.s) out.s.push_back(2 * v);
  for (int v : t.s_hat) out.s_hat.push_back(2 * v);
  for (int l = 1; l <= t.N; ++l)
    for (int m = 1; m <= t.N; ++m) {
      out.A[{l, m}] = composed_block(t.block(l, m), t.weights(m));
      out.A_hat[{l, m}] = composed_block(t.block_hat(l, m), t.weights_hat(m));
    }
  for (int m = 1; m <= t.N; ++m) {
    out.b[m] = composed_weights(t.weights(m));
    out.b_hat[m] = composed_weights(t.weights_hat(m));
  }
  out.name = t.name.empty() ? "" : t.name + "-composed";
  return out;
}

BlockMap symplectic_conjugate(const BlockMap& A, const WeightMap& b) { return symplectic_conjugate(A, b, b); }

BlockMap symplectic_conjugate(const BlockMap& A, const WeightMap& b, const WeightMap& b_hat) {
  require_nonzero(b, "b");
  BlockMap out;
  for (const auto& [key, Aml] : A) {
    int m = key.first, l = key.second;
    const Vector& bl = b.at(l);
    const Vector& bhm = b_hat.at(m);
    if (Aml.rows() != bhm.size() || Aml.cols() != bl.size())
      throw ShapeMismatch("block (" + std::to_string(m) + "," + std::to_string(l) + ") does not match the weights");
    // Row i of the result is scaled by 1/b^l_i.
    Matrix M = Aml.transpose() * bhm.asDiagonal();
    for (Eigen::Index i = 0; i < M.rows(); ++i) M.row(i) /= bl(i);
    out[{l, m}] = Vector::Ones(bl.size()) * bhm.transpose() - M;
  }
  return out;
}

PartitionedGarkTableau conjugate_pair(const GarkTableau& t) {
  validate(t);
  PartitionedGarkTableau out = as_partitioned(t);
  out.A_hat = symplectic_conjugate(t.A, t.b);
  out.name = t.name.empty() ? "" : t.name + "-pair";
  return out;
}

bool is_self_adjoint(const GarkTableau& t, double tol) {
  BlockMap conj = symplectic_conjugate(t.A, t.b);
  for (const auto& [k, M] : conj) {
    if (M.size() == 0) continue;
    if ((M - t.block(k.first, k.second)).cwiseAbs().maxCoeff() > tol) return false;
  }
  return true;
}

PartitionedGarkTableau build_explicit_symmetric(const ExplicitSymmetricSpec& spec) {
  const int N = spec.N;
  if (N < 1) throw ShapeMismatch("N must be at least 1");
  if (static_cast<int>(spec.s.size()) != N || static_cast<int>(spec.s_hat.size()) != N)
    throw ShapeMismatch("stage count lists must have N entries");
  for (int q = 1; q <= N; ++q)
    if (spec.s[q - 1] % 2 != 0 || spec.s_hat[q - 1] % 2 != 0 || spec.s[q - 1] < 0 || spec.s_hat[q - 1] < 0)
      throw OddStageCount("partition " + std::to_string(q) + " has an odd stage count");
  auto half = [&](int q) { return spec.s[q - 1] / 2; };
  auto half_hat = [&](int q) { return spec.s_hat[q - 1] / 2; };

  WeightMap bt, bth;
  for (int q = 1; q <= N; ++q) {
    auto it = spec.half_weights.find(q);
    Vector w = it == spec.half_weights.end() ? Vector(0) : it->second;
    if (w.size() != half(q))
      throw ShapeMismatch("half weights " + std::to_string(q) + " must have length " + std::to_string(half(q)));
    bt[q] = w;
    auto ith = spec.half_weights_hat.find(q);
    Vector wh = ith == spec.half_weights_hat.end() ? w : ith->second;
    if (wh.size() != half_hat(q))
      throw ShapeMismatch("half weights (hat) " + std::to_string(q) + " must have length " +
                          std::to_string(half_hat(q)));
    bth[q] = wh;
  }
  auto X = [&](int l, int m) -> Matrix {
    auto it = spec.X.find({l, m});
    if (it == spec.X.end()) return Matrix::Zero(half_hat(l), half(m));
    if (it->second.rows() != half_hat(l) || it->second.cols() != half(m))
      throw ShapeMismatch("X(" + std::to_string(l) + "," + std::to_string(m) + ") must be " +
                          std::to_string(half_hat(l)) + "x" + std::to_string(half(m)));
    return it->second;
  };
  auto flip = [](const Matrix& M) -> Matrix { return M.reverse(); };

  PartitionedGarkTableau out;
  out.N = N;
  out.s = spec.s;
  out.s_hat = spec.s_hat;
  for (int l = 1; l <= N; ++l)
    for (int m = 1; m <= N; ++m) {
      {
        const int r = half_hat(l), c = half(m);
        Matrix Xlm = X(l, m);
        Matrix Bm = bt[m].asDiagonal();
        Matrix blk = Matrix::Zero(2 * r, 2 * c);
        blk.topLeftCorner(r, c) = (Matrix::Ones(r, c) - Xlm) * Bm;
        blk.bottomLeftCorner(r, c) = Vector::Ones(r) * bt[m].transpose();
        blk.bottomRightCorner(r, c) = flip(Xlm * Bm);
        out.A[{l, m}] = blk;
      }
      {
        const int r = half(l), c = half_hat(m);
        Matrix Xt = X(m, l).transpose();
        Matrix Bm = bth[m].asDiagonal();
        Matrix blk = Matrix::Zero(2 * r, 2 * c);
        blk.topLeftCorner(r, c) = Xt * Bm;
        blk.bottomLeftCorner(r, c) = Vector::Ones(r) * bth[m].transpose();
        blk.bottomRightCorner(r, c) = flip((Matrix::Ones(r, c) - Xt) * Bm);
        out.A_hat[{l, m}] = blk;
      }
    }
  for (int q = 1; q <= N; ++q) {
    Vector b(2 * half(q)), bh(2 * half_hat(q));
    b << bt[q], bt[q].reverse();
    bh << bth[q], bth[q].reverse();
    out.b[q] = b;
    out.b_hat[q] = bh;
  }
  return out;
}

std::vector<double> multirate_weight_conditions(const std::vector<double>& x) {
  if (x.size() != 4) throw DimensionMismatch("expected four weight parameters");
  auto f = eval_plain({x[0], x[1], x[2], x[3]});
  return {f[0], f[1], f[2], f[3]};
}

MultirateWeights solve_multirate_weights() {
  MultirateWeights out;
  std::array<double, 4> x{1.0, -1.0, 0.5, 0.5};
  int iters = 0;
  double res = 0.0;
  bool ok = newton(x, 100, iters, res);
  if (!ok) {
    for (int i = 0; i < 8 && !ok; ++i)
      for (int j = 0; j < 8 && !ok; ++j)
        for (int k = 0; k < 8 && !ok; ++k) {
          x = {-2.0 + 4.0 * i / 7.0, -2.0 + 4.0 * j / 7.0, -2.0 + 4.0 * k / 7.0, 0.5};
          ok = newton(x, 100, iters, res);
        }
  }
  if (!ok || res > 1e-13) throw NoConvergence("multirate weight solve did not converge");
  out.b1 = x[0];
  out.b2 = x[1];
  out.b3 = x[2];
  out.bslow = x[3];
  out.iterations = iters;
  out.residual = res;
  return out;
}

ExplicitSymmetricSpec multirate42_spec(double b1, double b2, double b3, double bslow) {
  ExplicitSymmetricSpec spec;
  spec.N = 2;
  spec.s = {6, 0};
  spec.s_hat = {6, 2};
  Vector fast(3);
  fast << b1, b2, b3;
  Vector slow(1);
  slow << bslow;
  spec.half_weights = {{1, fast}, {2, Vector(0)}};
  spec.half_weights_hat = {{1, fast}, {2, slow}};
  Matrix X11(3, 3);
  X11 << 0, 1, 1, 0, 0, 1, 0, 0, 0;
  Matrix X21(1, 3);
  X21 << 0, 1, 1;
  spec.X[{1, 1}] = X11;
  spec.X[{2, 1}] = X21;
  return spec;
}

PartitionedGarkTableau make_multirate42(double b1, double b2, double b3, double bslow) {
  PartitionedGarkTableau t = build_explicit_symmetric(multirate42_spec(b1, b2, b3, bslow));
  t.name = "multirate42";
  return t;
}

PartitionedGarkTableau make_multirate42() {
  MultirateWeights w = solve_multirate_weights();
  return make_multirate42(w.b1, w.b2, w.b3, w.bslow);
}

PartitionedGarkTableau verlet_pair() {
  PartitionedGarkTableau t;
  t.N = 1;
  t.s = {2};
  t.s_hat = {2};
  Matrix A(2, 2), Ah(2, 2);
  A << 0.0, 0.0, 0.5, 0.5;
  Ah << 0.5, 0.0, 0.5, 0.0;
  t.A[{1, 1}] = A;
  t.A_hat[{1, 1}] = Ah;
  Vector b(2);
  b << 0.5, 0.5;
  t.b[1] = b;
  t.b_hat[1] = b;
  t.name = "verlet-pair";
  return t;
}

GarkTableau lobatto3a() {
  GarkTableau t;
  t.N = 1;
  t.s = {3};
  Matrix A(3, 3);
  A << 0.0, 0.0, 0.0, 5.0 / 24.0, 1.0 / 3.0, -1.0 / 24.0, 1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0;
  t.A[{1, 1}] = A;
  Vector b(3);
  b << 1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0;
  t.b[1] = b;
  t.name = "lobatto3a";
  return t;
}

PartitionedGarkTableau lobatto3_pair() {
  PartitionedGarkTableau t = as_partitioned(lobatto3a());
  Matrix Ah(3, 3);
  Ah << 1.0 / 6.0, -1.0 / 6.0, 0.0, 1.0 / 6.0, 1.0 / 3.0, 0.0, 1.0 / 6.0, 5.0 / 6.0, 0.0;
  t.A_hat[{1, 1}] = Ah;
  t.name = "lobatto3-pair";
  return t;
}

GarkTableau imim_symplectic() {
  GarkTableau t;
  t.N = 2;
  t.s = {2, 2};
  Matrix A11(2, 2), A12(2, 2), A21(2, 2), A22(2, 2);
  A11 << 1.0 / 8.0, 0.0, 1.0 / 4.0, 3.0 / 8.0;
  A12 << 0.0, 0.0, 2.0 / 3.0, 0.0;
  A21 << 1.0 / 4.0, 0.0, 1.0 / 4.0, 3.0 / 4.0;
  A22 << 1.0 / 3.0, 0.0, 2.0 / 3.0, 1.0 / 6.0;
  t.A[{1, 1}] = A11;
  t.A[{1, 2}] = A12;
  t.A[{2, 1}] = A21;
  t.A[{2, 2}] = A22;
  Vector b1(2), b2(2);
  b1 << 1.0 / 4.0, 3.0 / 4.0;
  b2 << 2.0 / 3.0, 1.0 / 3.0;
  t.b[1] = b1;
  t.b[2] = b2;
  t.name = "imim-symplectic";
  return t;
}

GarkTableau verlet_coupled(double alpha, double beta) {
  GarkTableau t;
  t.N = 2;
  t.s = {2, 2};
  Matrix A11(2, 2), A12(2, 2), A21(2, 2), A22(2, 2);
  A11 << 0.25, alpha, 0.5 - alpha, 0.25;
  A12 << 0.0, 0.0, 0.5, 0.5;
  A21 << 0.5, 0.0, 0.5, 0.0;
  A22 << 0.25, beta, 0.5 - beta, 0.25;
  t.A[{1, 1}] = A11;
  t.A[{1, 2}] = A12;
  t.A[{2, 1}] = A21;
  t.A[{2, 2}] = A22;
  Vector b(2);
  b << 0.5, 0.5;
  t.b[1] = b;
  t.b[2] = b;
  t.name = "verlet-coupled";
  return t;
}

GarkTableau implicit_midpoint() {
  GarkTableau t;
  t.N = 1;
  t.s = {1};
  t.A[{1, 1}] = Matrix::Constant(1, 1, 0.5);
  t.b[1] = Vector::Constant(1, 1.0);
  t.name = "implicit-midpoint";
  return t;
}

GarkTableau explicit_euler() {
  GarkTableau t;
  t.N = 1;
  t.s = {1};
  t.A[{1, 1}] = Matrix::Zero(1, 1);
  t.b[1] = Vector::Constant(1, 1.0);
  t.name = "explicit-euler";
  return t;
}

std::vector<std::string> builtin_names() {
  return {"verlet-pair", "lobatto3-pair", "lobatto3a",        "imim-symplectic", "verlet-coupled",
          "multirate42", "implicit-midpoint", "explicit-euler"};
}

bool is_builtin_name(const std::string& name) {
  if (name.rfind("verlet-coupled(", 0) == 0) return true;
  auto names = builtin_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

AnyTableau builtin_tableau(const std::string& name) {
  if (name == "verlet-pair") return verlet_pair();
  if (name == "lobatto3-pair") return lobatto3_pair();
  if (name == "lobatto3a") return lobatto3a();
  if (name == "imim-symplectic") return imim_symplectic();
  if (name == "verlet-coupled") return verlet_coupled();
  if (name == "multirate42") return make_multirate42();
  if (name == "implicit-midpoint") return implicit_midpoint();
  if (name == "explicit-euler") return explicit_euler();
  if (name.rfind("verlet-coupled(", 0) == 0 && name.back() == ')') {
    std::string args = name.substr(15, name.size() - 16);
    auto comma = args.find(',');
    if (comma == std::string::npos) throw ParseError("verlet-coupled expects two parameters");
    double a = parse_real(args.substr(0, comma));
    double b = parse_real(args.substr(comma + 1));
    GarkTableau t = verlet_coupled(a, b);
    t.name = name;
    return t;
  }
  throw ParseError("unknown built-in tableau '" + name + "'");
}

}  // namespace gark
