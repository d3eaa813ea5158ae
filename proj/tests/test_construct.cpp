#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "gark/construct.hpp"
#include "gark/integrate.hpp"
#include "gark/order.hpp"
#include "gark/structure.hpp"
#include "support.hpp"

using namespace gark;
namespace ts = testing_support;

namespace {

double max_diff(const Matrix& a, const Matrix& b) {
  REQUIRE(a.rows() == b.rows());
  REQUIRE(a.cols() == b.cols());
  return a.size() ? (a - b).cwiseAbs().maxCoeff() : 0.0;
}

GarkTableau random_symmetric(std::mt19937_64& rng, int N, int max_stages) {
  GarkTableau t = ts::random_gark(rng, N, max_stages);
  for (auto& [m, b] : t.b) b = (0.5 * (b + b.reverse().eval())).eval();
  GarkTableau r = time_reverse(t);
  for (auto& [key, blk] : t.A) blk = 0.5 * (blk + r.A.at(key));
  return t;
}

}  // namespace

TEST_CASE("time reversal") {
  GarkTableau im = time_reverse(implicit_midpoint());
  CHECK(im.block(1, 1)(0, 0) == 0.5);
  GarkTableau ie = time_reverse(explicit_euler());
  CHECK(ie.block(1, 1)(0, 0) == 1.0);
  CHECK(ie.weights(1)(0) == 1.0);

  std::mt19937_64 rng(1);
  for (int k = 0; k < 50; ++k) {
    GarkTableau t = ts::random_gark(rng, 1 + k % 3, 4);
    GarkTableau tt = time_reverse(time_reverse(t));
    for (const auto& [key, blk] : t.A) CHECK(max_diff(blk, tt.A.at(key)) <= 1e-15);
    for (const auto& [m, b] : t.b) CHECK(max_diff(b, tt.b.at(m)) == 0.0);
  }
}

TEST_CASE("time reversal keeps symplecticity for palindromic weights") {
  std::mt19937_64 rng(12);
  for (int k = 0; k < 50; ++k) {
    GarkTableau t = ts::random_symplectic_gark(rng, 1 + k % 3, 4, true);
    REQUIRE(symplecticity_residual(t).report.max_abs_residual <= 1e-12);
    CHECK(symplecticity_residual(time_reverse(t)).report.max_abs_residual <= 1e-11);
  }
}

TEST_CASE("composition of implicit midpoint") {
  GarkTableau c = compose_symmetric_symplectic(implicit_midpoint());
  Matrix want(2, 2);
  want << 0.25, 0.0, 0.5, 0.25;
  CHECK(max_diff(c.block(1, 1), want) == 0.0);
  CHECK(c.weights(1)(0) == 0.5);
  CHECK(c.weights(1)(1) == 0.5);
  CHECK(symmetry_residual(c).max_abs_residual == 0.0);
  CHECK(symplecticity_residual(c).report.max_abs_residual == 0.0);
  CHECK_THROWS_AS(compose_symmetric_symplectic(explicit_euler()), NotSymplectic);
  CHECK_THROWS_AS(compose_symmetric_symplectic(imim_symplectic()), WeightsNotPalindromic);
}

TEST_CASE("composition of a partitioned pair") {
  PartitionedGarkTableau c = compose_symmetric_symplectic(lobatto3_pair());
  CHECK(symmetry_residual(c).max_abs_residual <= 1e-13);
  CHECK(partitioned_symplecticity_residual(c).max_abs_residual <= 1e-13);
  CHECK(partitioned_order_residuals(c).attained_order == 4);
}

TEST_CASE("symplectic conjugate of the Lobatto IIIA pair") {
  BlockMap A;
  Matrix a(2, 2);
  a << 0.0, 0.0, 0.5, 0.5;
  A[{1, 1}] = a;
  WeightMap b;
  b[1] = Vector::Constant(2, 0.5);
  BlockMap Ah = symplectic_conjugate(A, b);
  Matrix want(2, 2);
  want << 0.5, 0.0, 0.5, 0.0;
  CHECK(max_diff(Ah.at({1, 1}), want) == 0.0);
  CHECK(max_diff(symplectic_conjugate(Ah, b).at({1, 1}), a) == 0.0);

  GarkTableau im = implicit_midpoint();
  CHECK(symplectic_conjugate(im.A, im.b).at({1, 1})(0, 0) == 0.5);
  CHECK(is_self_adjoint(im));
  CHECK_FALSE(is_self_adjoint(explicit_euler()));

  WeightMap z;
  z[1] = Vector::Zero(2);
  CHECK_THROWS_AS(symplectic_conjugate(A, z), ZeroWeight);
}

TEST_CASE("conjugate pairs are partitioned-symplectic") {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 100; ++k) {
    GarkTableau t = ts::random_gark(rng, 1 + k % 3, 4);
    PartitionedGarkTableau p = conjugate_pair(t);
    CHECK(partitioned_symplecticity_residual(p).max_abs_residual <= 1e-13);
  }
}

TEST_CASE("unequal weights conjugate") {
  std::mt19937_64 rng(70);
  for (int k = 0; k < 30; ++k) {
    GarkTableau t = ts::random_gark(rng, 2, 3);
    WeightMap bh;
    for (const auto& [m, b] : t.b) bh[m] = ts::random_weights(rng, static_cast<int>(b.size()));
    BlockMap Ah = symplectic_conjugate(t.A, t.b, bh);
    PartitionedGarkTableau p;
    p.N = t.N;
    p.s = t.s;
    p.s_hat = t.s;
    p.A = t.A;
    p.A_hat = Ah;
    p.b = t.b;
    p.b_hat = bh;
    CHECK(partitioned_symplecticity_residual(p).max_abs_residual <= 1e-12);
  }
}

TEST_CASE("conjugates of symmetric tableaus are symmetric") {
  std::mt19937_64 rng(13);
  for (int k = 0; k < 100; ++k) {
    GarkTableau t = random_symmetric(rng, 1 + k % 2, 4);
    REQUIRE(symmetry_residual(t).max_abs_residual <= 1e-14);
    bool tiny = false;
    for (const auto& [m, b] : t.b) tiny = tiny || b.cwiseAbs().minCoeff() < 1e-3;
    if (tiny) continue;
    CHECK(symmetry_residual(conjugate_pair(t)).max_abs_residual <= 1e-10);
  }
}

TEST_CASE("explicit symmetric builder reproduces the multirate matrices") {
  const double b1 = 0.7, b2 = -0.4, b3 = 0.2, bs = 0.5;
  PartitionedGarkTableau t = build_explicit_symmetric(multirate42_spec(b1, b2, b3, bs));
  Matrix Ah11(6, 6), Ah12(6, 2), A11(6, 6), A21(2, 6);
  Ah11 << 0, 0, 0, 0, 0, 0,  //
      b1, 0, 0, 0, 0, 0,     //
      b1, b2, 0, 0, 0, 0,    //
      b1, b2, b3, b3, 0, 0,  //
      b1, b2, b3, b3, b2, 0, //
      b1, b2, b3, b3, b2, b1;
  Ah12 << 0, 0, bs, 0, bs, 0, bs, 0, bs, 0, bs, bs;
  A11 << b1, 0, 0, 0, 0, 0,  //
      b1, b2, 0, 0, 0, 0,    //
      b1, b2, b3, 0, 0, 0,   //
      b1, b2, b3, 0, 0, 0,   //
      b1, b2, b3, b3, 0, 0,  //
      b1, b2, b3, b3, b2, 0;
  A21 << b1, 0, 0, 0, 0, 0, b1, b2, b3, b3, b2, 0;
  CHECK(max_diff(t.block_hat(1, 1), Ah11) <= 1e-15);
  CHECK(max_diff(t.block_hat(1, 2), Ah12) <= 1e-15);
  CHECK(max_diff(t.block(1, 1), A11) <= 1e-15);
  CHECK(max_diff(t.block(2, 1), A21) <= 1e-15);
  CHECK(t.block(1, 2).cols() == 0);
  CHECK(t.block(2, 2).cols() == 0);
  CHECK(t.block_hat(2, 1).rows() == 0);
}

TEST_CASE("explicit symmetric builder, small cases") {
  ExplicitSymmetricSpec spec;
  spec.N = 1;
  spec.s = {2};
  spec.s_hat = {2};
  spec.half_weights[1] = Vector::Constant(1, 0.5);
  PartitionedGarkTableau t = build_explicit_symmetric(spec);
  CHECK(symmetry_residual(t).max_abs_residual <= 1e-15);
  CHECK(partitioned_symplecticity_residual(t).max_abs_residual <= 1e-15);
  CHECK(plan_stages(t).explicit_scheme);

  spec.s = {6};
  spec.s_hat = {6};
  spec.half_weights[1] = Vector::Constant(3, 1.0 / 6);
  spec.X[{1, 1}] = Matrix::Ones(3, 3);
  PartitionedGarkTableau u = build_explicit_symmetric(spec);
  CHECK(symmetry_residual(u).max_abs_residual <= 1e-15);
  CHECK(partitioned_symplecticity_residual(u).max_abs_residual <= 1e-15);

  spec.s = {3};
  spec.s_hat = {3};
  CHECK_THROWS_AS(build_explicit_symmetric(spec), OddStageCount);
}

TEST_CASE("multirate weights") {
  MultirateWeights w = solve_multirate_weights();
  // High-precision root of the same four conditions (40-digit Newton).
  CHECK(std::abs(w.b1 - 1.0877529282044217) <= 1e-14);
  CHECK(std::abs(w.b2 + 1.131212302433601) <= 1e-14);
  CHECK(std::abs(w.b3 - 0.54345937422917933) <= 1e-14);
  CHECK(w.bslow == 0.5);
  CHECK(std::abs(w.b1 + w.b2 + w.b3 - 0.5) <= 1e-15);
  for (double r : multirate_weight_conditions({w.b1, w.b2, w.b3, w.bslow})) CHECK(std::abs(r) <= 1e-14);
  // The published digits agree with the root to about 2e-9.
  CHECK(std::abs(w.b1 - 1.087752930244776) <= 5e-9);
  CHECK(std::abs(w.b2 + 1.131212304665920) <= 5e-9);
  CHECK(std::abs(w.b3 - 0.543459374420984) <= 5e-9);
}

TEST_CASE("multirate tableau") {
  PartitionedGarkTableau t = make_multirate42();
  MultirateWeights w = solve_multirate_weights();
  const Matrix& Ah12 = t.block_hat(1, 2);
  for (int i = 1; i < 6; ++i) CHECK(Ah12(i, 0) == w.bslow);
  CHECK(Ah12(0, 0) == 0.0);
  CHECK(Ah12(5, 1) == w.bslow);
  for (int i = 0; i < 5; ++i) CHECK(Ah12(i, 1) == 0.0);
  const Matrix& A21 = t.block(2, 1);
  CHECK(A21(0, 0) == w.b1);
  CHECK(A21.row(0).tail(5).isZero(0.0));
  CHECK(A21(1, 4) == w.b2);
  CHECK(A21(1, 5) == 0.0);
  StagePlan plan = plan_stages(t);
  CHECK(plan.explicit_scheme);
  CHECK(plan.order.size() == 14);
}

TEST_CASE("built-in names") {
  for (const auto& n : builtin_names()) {
    CHECK(is_builtin_name(n));
    CHECK_NOTHROW(validate(builtin_tableau(n)));
  }
  auto vc = std::get<GarkTableau>(builtin_tableau("verlet-coupled(0.3,-0.1)"));
  CHECK(vc.block(1, 1)(0, 1) == 0.3);
  CHECK(vc.block(2, 2)(0, 1) == -0.1);
  auto d = std::get<GarkTableau>(builtin_tableau("verlet-coupled"));
  CHECK(d.block(1, 1)(0, 1) == 0.0);
  CHECK_THROWS_AS(builtin_tableau("no-such-scheme"), ParseError);
}
