#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gark/tableau.hpp"

namespace gark {

using ScalarFn = std::function<double(const Vector&)>;
using GradientFn = std::function<void(const Vector&, Vector&)>;

struct PotentialPart {
  std::string label;
  ScalarFn V;
  GradientFn grad;
};

// H(q, p) = T(p) + sum_i V_i(q).  Energy parts for reporting are
// H_1 = T + V_1 and H_i = V_i for i >= 2.
struct SeparableHamiltonian {
  int d = 0;
  std::string name;
  std::string kinetic_label = "T";
  ScalarFn T;
  GradientFn grad_T;
  std::vector<PotentialPart> potentials;

  double H(const Vector& q, const Vector& p) const;
  std::vector<double> parts(const Vector& q, const Vector& p) const;
  int num_potentials() const { return static_cast<int>(potentials.size()); }
};

struct PendulumOscillatorParams {
  double m_pend = 1.0;
  double m_osc = 1.0;
  double ell = 1.0;
  double k = 1e-4;
  double g = 9.81;
};

// q = (alpha, x), p = (p_alpha, p_x); V_1 is the pendulum (fast, cheap),
// V_2 the soft spring (slow, expensive).
SeparableHamiltonian pendulum_oscillator(const PendulumOscillatorParams& params);

SeparableHamiltonian harmonic_oscillator(double omega = 1.0);

// Exact flow of the harmonic oscillator over time t.
void harmonic_exact_flow(double omega, double t, const Vector& q0, const Vector& p0, Vector& q, Vector& p);

// Largest |FD - analytic| / max(1, |analytic|_inf) over T and every V_i,
// central differences with the given step.
double fd_gradient_check(const SeparableHamiltonian& sys, const Vector& q, const Vector& p, double fd_step);

}  // namespace gark
