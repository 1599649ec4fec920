#include "dflow/analytics.hpp"

#include <cmath>
#include <limits>

namespace dflow {

SingleModeAnalytic SingleModeAnalytic::from_rates(double gamma1, double gamma2) {
  if (!(gamma1 >= 0.0) || !(gamma2 >= 0.0)) throw InvalidInput("single-mode rates must be >= 0");
  if (!(gamma1 + gamma2 > 0.0)) throw NotApplicable("single-mode analytic flow needs gamma1 + gamma2 > 0");
  if (gamma1 == gamma2) {
    throw NotApplicable("degenerate start: gamma1 == gamma2 puts alpha(0) = 0 on the unstable fixed point");
  }
  SingleModeAnalytic sm;
  sm.gamma1 = gamma1;
  sm.gamma2 = gamma2;
  sm.A = (gamma1 + gamma2) / 2.0;
  sm.B = -(gamma1 - gamma2) / (gamma1 + gamma2);
  sm.C = gamma1 > 0.0 ? gamma2 / gamma1 : std::numeric_limits<double>::infinity();
  sm.sign0 = gamma2 > gamma1 ? 1.0 : -1.0;
  return sm;
}

double SingleModeAnalytic::b_prime() const { return sign0 * std::asin(B); }

namespace {

double flow_argument(double l, const SingleModeAnalytic& sm) { return 2.0 * sm.A * l + sm.sign0 * std::atanh(sm.B); }

}  // namespace

double alpha_exact(double l, const SingleModeAnalytic& sm) { return sm.sign0 * sm.A * std::tanh(flow_argument(l, sm)); }

double mu_exact(double l, const SingleModeAnalytic& sm) {
  if (!(sm.gamma1 > 0.0 && sm.gamma2 > 0.0)) {
    throw NotApplicable("mu_exact needs gamma1, gamma2 > 0; use gamma2_zero_exact for gamma2 = 0");
  }
  return std::sqrt(sm.gamma1 / sm.gamma2) * sm.A / std::cosh(flow_argument(l, sm));
}

double mu2_exact(double l, const SingleModeAnalytic& sm) { return sm.gamma2 / sm.gamma1 * mu_exact(l, sm); }

double gamma2_zero_exact(double l, double gamma1, const GeneratorScheme& scheme) {
  if (!(gamma1 > 0.0)) throw InvalidInput("gamma2_zero_exact: gamma1 must be > 0");
  switch (scheme.kind) {
    case SchemeKind::gpc: return gamma1 * std::exp(-gamma1 * l);
    case SchemeKind::r1: return gamma1 / std::sqrt(3.0 * std::exp(2.0 * gamma1 * gamma1 * l) - 2.0);
    case SchemeKind::r2: return gamma1 * std::exp(-gamma1 * gamma1 * l);
    case SchemeKind::r3: return gamma1 * std::exp(-l);
    default: break;
  }
  throw NotApplicable("gamma2_zero_exact: no closed form for scheme " + scheme.name());
}

ObservableExact observable_exact(double l, const SingleModeAnalytic& sm) {
  if (!(sm.gamma1 > 0.0 && sm.gamma2 > 0.0)) throw NotApplicable("observable_exact needs gamma1, gamma2 > 0");
  const double u = std::atan(std::tanh(sm.A * l + sm.sign0 * 0.5 * std::atanh(sm.B)));
  ObservableExact o;
  o.chi = sm.sign0 * std::sin(2.0 * u - sm.b_prime()) / (2.0 * std::sqrt(sm.C));
  o.omega1 = 0.5 + std::sqrt(std::max(0.0, 0.25 - sm.C * o.chi * o.chi));
  o.omega2 = 1.0 - o.omega1;
  return o;
}

ObservableExact observable_limit(const SingleModeAnalytic& sm) {
  ObservableExact o;
  o.omega1 = 0.5 * (1.0 + std::abs(sm.gamma1 - sm.gamma2) / (sm.gamma1 + sm.gamma2));
  o.omega2 = 1.0 - o.omega1;
  o.chi = sm.sign0 * std::cos(sm.b_prime()) / (2.0 * std::sqrt(sm.C));
  return o;
}

ComplexMatrix closed_form_rhs_r2(const ComplexMatrix& m) {
  require_square(m, "closed_form_rhs_r2");
  const Eigen::Index d = m.rows();
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  auto v = [&m](Eigen::Index a, Eigen::Index b) { return a == b ? Complex(0.0) : m(a, b); };
  for (Eigen::Index k = 0; k < d; ++k) {
    const Complex dk = m(k, k);
    for (Eigen::Index q = 0; q < d; ++q) {
      const Complex dq = m(q, q);
      Complex acc = 0.0;
      if (k == q) {
        for (Eigen::Index s = 0; s < d; ++s) {
          if (s != k) acc += 2.0 * v(k, s) * v(s, k) * (std::conj(dk) - std::conj(m(s, s)));
        }
      } else {
        acc = -v(k, q) * std::norm(dq - dk);
        for (Eigen::Index s = 0; s < d; ++s) {
          if (s == k || s == q) continue;
          acc += v(k, s) * v(s, q) * (std::conj(dk) + std::conj(dq) - 2.0 * std::conj(m(s, s)));
        }
      }
      out(k, q) = acc;
    }
  }
  return out;
}

ComplexMatrix closed_form_rhs_r3(const ComplexMatrix& m, double cutoff) {
  require_square(m, "closed_form_rhs_r3");
  const Eigen::Index d = m.rows();
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  auto v = [&m](Eigen::Index a, Eigen::Index b) { return a == b ? Complex(0.0) : m(a, b); };
  auto live = [cutoff](Complex gap) { return std::abs(gap) >= cutoff; };
  for (Eigen::Index k = 0; k < d; ++k) {
    const Complex dk = m(k, k);
    for (Eigen::Index q = 0; q < d; ++q) {
      const Complex dq = m(q, q);
      Complex acc = 0.0;
      if (k == q) {
        for (Eigen::Index s = 0; s < d; ++s) {
          if (s != k && live(dk - m(s, s))) acc += 2.0 * v(k, s) * v(s, k) / (dk - m(s, s));
        }
      } else {
        if (live(dk - dq)) acc = -v(k, q);
        for (Eigen::Index s = 0; s < d; ++s) {
          if (s == k || s == q) continue;
          const Complex a = dk - m(s, s);
          const Complex b = dq - m(s, s);
          Complex weight;
          if (live(a) && live(b)) {
            weight = (dk + dq - 2.0 * m(s, s)) / (a * b);
          } else {
            weight = (live(a) ? 1.0 / a : Complex(0.0)) + (live(b) ? 1.0 / b : Complex(0.0));
          }
          acc += v(k, s) * v(s, q) * weight;
        }
      }
      out(k, q) = acc;
    }
  }
  return out;
}

}  // namespace dflow
