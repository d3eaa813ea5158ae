#pragma once

// Shared helpers for the test binaries: random tableau generators and
// loop-level oracles that do not go through the library's algebra.

#include <cmath>
#include <random>

#include "gark/tableau.hpp"

namespace testing_support {

using gark::GarkTableau;
using gark::Matrix;
using gark::PartitionedGarkTableau;
using gark::Vector;

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Weights bounded away from zero, random sign, summing to anything.
inline Vector random_weights(std::mt19937_64& rng, int s) {
  Vector b(s);
  for (int i = 0; i < s; ++i) {
    double mag = uniform(rng, 0.2, 1.0);
    b(i) = (rng() & 1u) ? mag : -mag;
  }
  return b;
}

inline Matrix random_matrix(std::mt19937_64& rng, int r, int c, double scale = 1.0) {
  Matrix m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = uniform(rng, -scale, scale);
  return m;
}

inline std::vector<int> random_stages(std::mt19937_64& rng, int N, int lo, int hi) {
  std::vector<int> s;
  for (int m = 0; m < N; ++m) s.push_back(static_cast<int>(lo + rng() % static_cast<unsigned>(hi - lo + 1)));
  return s;
}

inline GarkTableau random_gark(std::mt19937_64& rng, int N, int max_stages) {
  GarkTableau t;
  t.N = N;
  t.s = random_stages(rng, N, 1, max_stages);
  for (int q = 1; q <= N; ++q) {
    t.b[q] = random_weights(rng, t.s[q - 1]);
    for (int m = 1; m <= N; ++m) t.A[{q, m}] = random_matrix(rng, t.s[q - 1], t.s[m - 1]);
  }
  return t;
}

// B^m A^{m,l} = b^m b^l^T / 2 + K^{m,l} with K^{l,m} = -K^{m,l}^T gives P = 0.
// consistent = true draws positive weights summing to one per partition.
inline GarkTableau random_symplectic_gark(std::mt19937_64& rng, int N, int max_stages, bool palindromic = false,
                                          bool consistent = false) {
  GarkTableau t;
  t.N = N;
  t.s = random_stages(rng, N, 1, max_stages);
  for (int q = 1; q <= N; ++q) {
    Vector b = random_weights(rng, t.s[q - 1]);
    if (palindromic) b = 0.5 * (b + b.reverse().eval());
    // A palindromic average can land near zero; push it away.
    for (int i = 0; i < b.size(); ++i)
      if (std::abs(b(i)) < 0.1) b(i) = b(i) < 0 ? -0.3 : 0.3;
    if (palindromic) b = 0.5 * (b + b.reverse().eval());
    if (consistent) {
      b = b.cwiseAbs();
      b /= b.sum();
    }
    t.b[q] = b;
  }
  std::map<gark::BlockKey, Matrix> K;
  for (int m = 1; m <= N; ++m)
    for (int l = m; l <= N; ++l) {
      Matrix k = random_matrix(rng, t.s[m - 1], t.s[l - 1]);
      if (m == l) k = (0.5 * (k - k.transpose())).eval();
      K[{m, l}] = k;
      if (m != l) K[{l, m}] = -k.transpose();
    }
  for (int m = 1; m <= N; ++m)
    for (int l = 1; l <= N; ++l) {
      const Vector& bm = t.b[m];
      Matrix rhs = 0.5 * bm * t.b[l].transpose() + K[{m, l}];
      t.A[{m, l}] = bm.cwiseInverse().asDiagonal() * rhs;
    }
  return t;
}

// P^{m,l} evaluated entry by entry.
inline double symplecticity_oracle(const GarkTableau& t) {
  double worst = 0.0;
  for (int m = 1; m <= t.N; ++m)
    for (int l = 1; l <= t.N; ++l) {
      const Matrix& Alm = t.A.at({l, m});
      const Matrix& Aml = t.A.at({m, l});
      const Vector& bm = t.b.at(m);
      const Vector& bl = t.b.at(l);
      for (int i = 0; i < bm.size(); ++i)
        for (int j = 0; j < bl.size(); ++j) {
          double p = Alm(j, i) * bl(j) + bm(i) * Aml(i, j) - bm(i) * bl(j);
          worst = std::max(worst, std::abs(p));
        }
    }
  return worst;
}

// Loop-level symmetry check: b_i = b_{s-1-i}, a_{ij} + a_{s-1-i,s-1-j} = b_j.
inline double symmetry_oracle(const GarkTableau& t) {
  double worst = 0.0;
  for (int q = 1; q <= t.N; ++q) {
    const Vector& b = t.b.at(q);
    const int s = static_cast<int>(b.size());
    for (int i = 0; i < s; ++i) worst = std::max(worst, std::abs(b(i) - b(s - 1 - i)));
    for (int m = 1; m <= t.N; ++m) {
      const Matrix& A = t.A.at({q, m});
      const Vector& bm = t.b.at(m);
      const int r = static_cast<int>(A.rows()), c = static_cast<int>(A.cols());
      for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j)
          worst = std::max(worst, std::abs(A(i, j) + A(r - 1 - i, c - 1 - j) - bm(j)));
    }
  }
  return worst;
}

// Classical Runge-Kutta order conditions for a single-partition tableau.
struct RkOracle {
  double o1, o2, o3a, o3b, o4a, o4b, o4c, o4d;
};
inline RkOracle rk_order_oracle(const Matrix& A, const Vector& b) {
  const int s = static_cast<int>(b.size());
  std::vector<double> c(s, 0.0), Ac(s, 0.0), Ac2(s, 0.0), AAc(s, 0.0);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) c[i] += A(i, j);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) {
      Ac[i] += A(i, j) * c[j];
      Ac2[i] += A(i, j) * c[j] * c[j];
    }
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) AAc[i] += A(i, j) * Ac[j];
  RkOracle r{};
  r.o1 = -1.0;
  r.o2 = -0.5;
  r.o3a = -1.0 / 3;
  r.o3b = -1.0 / 6;
  r.o4a = -0.25;
  r.o4b = -0.125;
  r.o4c = -1.0 / 12;
  r.o4d = -1.0 / 24;
  for (int i = 0; i < s; ++i) {
    r.o1 += b(i);
    r.o2 += b(i) * c[i];
    r.o3a += b(i) * c[i] * c[i];
    r.o3b += b(i) * Ac[i];
    r.o4a += b(i) * c[i] * c[i] * c[i];
    r.o4b += b(i) * c[i] * Ac[i];
    r.o4c += b(i) * Ac2[i];
    r.o4d += b(i) * AAc[i];
  }
  return r;
}

}  // namespace testing_support
