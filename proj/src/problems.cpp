#include "gark/problems.hpp"

#include <algorithm>
#include <cmath>

namespace gark {

double SeparableHamiltonian::H(const Vector& q, const Vector& p) const {
  double h = T(p);
  for (const auto& part : potentials) h += part.V(q);
  return h;
}

std::vector<double> SeparableHamiltonian::parts(const Vector& q, const Vector& p) const {
  std::vector<double> out;
  double t = T(p);
  if (potentials.empty()) return {t};
  out.push_back(t + potentials[0].V(q));
  for (std::size_t i = 1; i < potentials.size(); ++i) out.push_back(potentials[i].V(q));
  return out;
}

SeparableHamiltonian pendulum_oscillator(const PendulumOscillatorParams& P) {
  if (!(P.m_pend > 0 && P.m_osc > 0 && P.ell > 0 && P.k > 0 && P.g > 0))
    throw DimensionMismatch("pendulum parameters must be positive");
  SeparableHamiltonian sys;
  sys.d = 2;
  sys.name = "pendulum";
  sys.T = [P](const Vector& p) {
    double pa = p(0) / P.ell;
    return 0.5 * p(1) * p(1) / P.m_osc + 0.5 * pa * pa / P.m_pend;
  };
  sys.grad_T = [P](const Vector& p, Vector& g) {
    g.resize(2);
    g(0) = p(0) / (P.ell * P.ell * P.m_pend);
    g(1) = p(1) / P.m_osc;
  };
  PotentialPart pend;
  pend.label = "fast";
  pend.V = [P](const Vector& q) { return -P.m_pend * P.g * P.ell * std::cos(q(0)); };
  pend.grad = [P](const Vector& q, Vector& g) {
    g.resize(2);
    g(0) = P.m_pend * P.g * P.ell * std::sin(q(0));
    g(1) = 0.0;
  };
  PotentialPart spring;
  spring.label = "slow";
  spring.V = [P](const Vector& q) {
    double e = q(1) - P.ell * std::sin(q(0));
    return 0.5 * P.k * e * e;
  };
  spring.grad = [P](const Vector& q, Vector& g) {
    double F = P.k * (q(1) - P.ell * std::sin(q(0)));
    g.resize(2);
    g(0) = -F * P.ell * std::cos(q(0));
    g(1) = F;
  };
  sys.potentials = {pend, spring};
  return sys;
}

SeparableHamiltonian harmonic_oscillator(double omega) {
  if (!(omega > 0)) throw DimensionMismatch("omega must be positive");
  SeparableHamiltonian sys;
  sys.d = 1;
  sys.name = "harmonic";
  sys.T = [](const Vector& p) { return 0.5 * p(0) * p(0); };
  sys.grad_T = [](const Vector& p, Vector& g) {
    g.resize(1);
    g(0) = p(0);
  };
  PotentialPart v;
  v.label = "spring";
  double w2 = omega * omega;
  v.V = [w2](const Vector& q) { return 0.5 * w2 * q(0) * q(0); };
  v.grad = [w2](const Vector& q, Vector& g) {
    g.resize(1);
    g(0) = w2 * q(0);
  };
  sys.potentials = {v};
  return sys;
}

void harmonic_exact_flow(double omega, double t, const Vector& q0, const Vector& p0, Vector& q, Vector& p) {
  double c = std::cos(omega * t), s = std::sin(omega * t);
  q = c * q0 + (s / omega) * p0;
  p = -(omega * s) * q0 + c * p0;
}

namespace {

double check_one(const ScalarFn& f, const GradientFn& grad, const Vector& x, double step) {
  Vector g;
  grad(x, g);
  double scale = std::max(1.0, g.size() ? g.cwiseAbs().maxCoeff() : 0.0);
  double worst = 0.0;
  Vector xp = x, xm = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    xp(i) = x(i) + step;
    xm(i) = x(i) - step;
    double fd = (f(xp) - f(xm)) / (2.0 * step);
    worst = std::max(worst, std::abs(fd - g(i)) / scale);
    xp(i) = x(i);
    xm(i) = x(i);
  }
  return worst;
}

}  // namespace

double fd_gradient_check(const SeparableHamiltonian& sys, const Vector& q, const Vector& p, double fd_step) {
  if (!(fd_step > 0)) throw DimensionMismatch("fd_step must be positive");
  if (q.size() != sys.d || p.size() != sys.d) throw DimensionMismatch("state dimension mismatch");
  double worst = check_one(sys.T, sys.grad_T, p, fd_step);
  for (const auto& part : sys.potentials) worst = std::max(worst, check_one(part.V, part.grad, q, fd_step));
  return worst;
}

}  // namespace gark
