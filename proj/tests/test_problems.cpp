#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "gark/integrate.hpp"
#include "gark/problems.hpp"

using namespace gark;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) x(i++) = d;
  return x;
}

}  // namespace

TEST_CASE("pendulum energies at rest") {
  PendulumOscillatorParams p;
  p.g = 1.0;
  p.k = 1.0;
  auto sys = pendulum_oscillator(p);
  auto parts = sys.parts(vec({0, 0}), vec({0, 0}));
  CHECK(parts[0] == -1.0);
  CHECK(parts[1] == 0.0);

  auto sp = sys.parts(vec({0, 1}), vec({0, 0}));
  CHECK(sp[1] == 0.5);
  Vector g;
  sys.potentials[1].grad(vec({0, 1}), g);
  CHECK(g(1) == 1.0);
}

TEST_CASE("pendulum gradients match finite differences") {
  auto sys = pendulum_oscillator({});
  CHECK(fd_gradient_check(sys, vec({0.3, -0.2}), vec({0.1, 0.4}), 1e-5) <= 1e-7);
  PendulumOscillatorParams p;
  p.m_pend = 1.7;
  p.m_osc = 0.6;
  p.ell = 0.8;
  p.k = 2.0;
  auto s2 = pendulum_oscillator(p);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int k = 0; k < 20; ++k)
    CHECK(fd_gradient_check(s2, vec({u(rng), u(rng)}), vec({u(rng), u(rng)}), 1e-5) <= 1e-6);
}

TEST_CASE("energy parts add up") {
  auto sys = pendulum_oscillator({});
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int k = 0; k < 50; ++k) {
    Vector q = vec({u(rng), u(rng)}), p = vec({u(rng), u(rng)});
    auto parts = sys.parts(q, p);
    double H = sys.H(q, p);
    CHECK(std::abs(parts[0] + parts[1] - H) <= 1e-15 * std::max(1.0, std::abs(H)) * 4);
  }
}

TEST_CASE("invalid parameters") {
  PendulumOscillatorParams p;
  p.g = 0.0;
  CHECK_THROWS_AS(pendulum_oscillator(p), DimensionMismatch);
  CHECK_THROWS_AS(harmonic_oscillator(-1.0), DimensionMismatch);
  auto sys = harmonic_oscillator(1.0);
  CHECK_THROWS_AS(fd_gradient_check(sys, vec({0}), vec({0}), 0.0), DimensionMismatch);
}

TEST_CASE("harmonic oscillator exact flow") {
  Vector q, p;
  harmonic_exact_flow(1.0, M_PI / 2, vec({1}), vec({0}), q, p);
  CHECK(std::abs(q(0)) <= 1e-15);
  CHECK(p(0) == doctest::Approx(-1.0).epsilon(1e-15));
  auto sys = harmonic_oscillator(2.0);
  double H0 = sys.H(vec({0.3}), vec({-0.7}));
  for (double t : {0.1, 1.0, 10.0}) {
    harmonic_exact_flow(2.0, t, vec({0.3}), vec({-0.7}), q, p);
    CHECK(sys.H(q, p) == doctest::Approx(H0).epsilon(1e-14));
  }
  CHECK(fd_gradient_check(sys, vec({0.4}), vec({0.2}), 1e-5) <= 1e-9);
}

TEST_CASE("pendulum energy along a reference trajectory") {
  auto sys = pendulum_oscillator({});
  PhaseState y{vec({0.5, 0.0}), vec({0.0, 0.0}), 0.0};
  double H0 = sys.H(y.q, y.p);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    y = yoshida4_step(sys, y, 1e-4);
    worst = std::max(worst, std::abs(sys.H(y.q, y.p) - H0));
  }
  CHECK(worst <= 1e-10);
}
