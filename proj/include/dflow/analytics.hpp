#pragma once

#include "dflow/generators.hpp"
#include "dflow/linalg.hpp"
#include "dflow/models.hpp"

namespace dflow {

// Closed-form gpc flow of the 2x2 single-mode matrix [[eps + i alpha, mu2], [-mu1, eps - i alpha]].
struct SingleModeAnalytic {
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double A = 0.0;      // (gamma1 + gamma2) / 2
  double B = 0.0;      // -(gamma1 - gamma2) / (gamma1 + gamma2)
  double C = 0.0;      // gamma2 / gamma1
  double sign0 = 0.0;  // sign of alpha(0)

  static SingleModeAnalytic from_rates(double gamma1, double gamma2);
  static SingleModeAnalytic from_spec(const SingleModeSpec& spec) { return from_rates(spec.gamma1, spec.gamma2); }

  double b_prime() const;  // sign0 * asin(B)
};

double alpha_exact(double l, const SingleModeAnalytic& sm);
double mu_exact(double l, const SingleModeAnalytic& sm);  // mu1; mu2 = (gamma2 / gamma1) mu1
double mu2_exact(double l, const SingleModeAnalytic& sm);
double gamma2_zero_exact(double l, double gamma1, const GeneratorScheme& scheme);

struct ObservableExact {
  double omega1 = 0.0;
  double omega2 = 0.0;
  double chi = 0.0;
};

// Co-flow of O(0) = diag(1, 0) written as O = [[omega1, i chi2], [-i chi1, omega2]], chi = chi1.
ObservableExact observable_exact(double l, const SingleModeAnalytic& sm);
ObservableExact observable_limit(const SingleModeAnalytic& sm);

// Right-hand sides written out in terms of the diagonal d and the off-diagonal part v of M.
ComplexMatrix closed_form_rhs_r2(const ComplexMatrix& m);
ComplexMatrix closed_form_rhs_r3(const ComplexMatrix& m, double cutoff = kDefaultDegeneracyCutoff);

}  // namespace dflow
