#include "dflow/reference.hpp"

#include <cmath>

namespace dflow::reference {

ComplexMatrix multiply(const ComplexMatrix& x, const ComplexMatrix& y) {
  const Eigen::Index d = x.rows();
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index k = 0; k < d; ++k) {
      const Complex xik = x(i, k);
      for (Eigen::Index j = 0; j < d; ++j) out(i, j) += xik * y(k, j);
    }
  }
  return out;
}

ComplexMatrix commutator(const ComplexMatrix& x, const ComplexMatrix& y) {
  return multiply(x, y) - multiply(y, x);
}

namespace {

double sign(double x) { return (x > 0.0) - (x < 0.0); }

ComplexMatrix adjoint(const ComplexMatrix& m) {
  const Eigen::Index d = m.rows();
  ComplexMatrix out(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) out(i, j) = std::conj(m(j, i));
  }
  return out;
}

}  // namespace

ComplexMatrix generator(const ComplexMatrix& m, const GeneratorScheme& s) {
  const Eigen::Index d = m.rows();
  ComplexMatrix eta = ComplexMatrix::Zero(d, d);
  if (s.kind == SchemeKind::r1) {
    ComplexMatrix v = m;
    for (Eigen::Index i = 0; i < d; ++i) v(i, i) = 0.0;
    return commutator(adjoint(m), v);
  }
  if (s.kind == SchemeKind::hpc) {
    ComplexMatrix h = multiply(adjoint(m), m);
    for (Eigen::Index n = 0; n < d; ++n) {
      for (Eigen::Index j = 0; j < d; ++j) eta(n, j) = sign(static_cast<double>(n - j)) * h(n, j);
    }
    return eta;
  }
  const Complex i_unit(0.0, 1.0);
  for (Eigen::Index n = 0; n < d; ++n) {
    for (Eigen::Index j = 0; j < d; ++j) {
      if (n == j) continue;
      const Complex mnj = m(n, j);
      const Complex delta = m(n, n) - m(j, j);
      const double sgn_index = sign(static_cast<double>(n - j));
      Complex value = 0.0;
      switch (s.kind) {
        case SchemeKind::pc: value = sgn_index * mnj; break;
        case SchemeKind::pc_sorted: value = sign(m(n, n).real() - m(j, j).real()) * mnj; break;
        case SchemeKind::ipc:
          if (s.ipc_ordering == Ordering::index) {
            value = i_unit * sgn_index * mnj;
          } else {
            value = sign((i_unit * m(n, n) - i_unit * m(j, j)).real()) * i_unit * mnj;
          }
          break;
        case SchemeKind::ppc: value = sgn_index * std::exp(i_unit * s.theta) * mnj; break;
        case SchemeKind::gpc:
          if (std::abs(delta) >= s.cutoff) value = (std::conj(m(n, n)) - std::conj(m(j, j))) / std::abs(delta) * mnj;
          break;
        case SchemeKind::r2: value = (std::conj(m(n, n)) - std::conj(m(j, j))) * mnj; break;
        case SchemeKind::r3:
          if (std::abs(delta) >= s.cutoff) value = mnj / delta;
          break;
        case SchemeKind::powerlaw:
          if (std::abs(delta) >= s.cutoff) {
            const Complex phase = std::exp(-i_unit * std::arg(delta));
            value = phase * std::pow(std::abs(delta), s.r) * mnj;
          }
          break;
        default: break;
      }
      eta(n, j) = value;
    }
  }
  return eta;
}

ComplexMatrix flow_rhs(const ComplexMatrix& m, const GeneratorScheme& scheme,
                       const std::optional<BandMask>& truncation) {
  ComplexMatrix out = commutator(generator(m, scheme), m);
  if (truncation) {
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      for (Eigen::Index j = 0; j < out.cols(); ++j) {
        if (!truncation->keeps(static_cast<std::size_t>(i), static_cast<std::size_t>(j))) out(i, j) = 0.0;
      }
    }
  }
  return out;
}

}  // namespace dflow::reference
