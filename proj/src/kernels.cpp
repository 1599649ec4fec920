#include "dflow/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace dflow::kernels {

namespace {

constexpr Eigen::Index kParallelThreshold = 48;

bool is_dense(std::size_t band, Eigen::Index dim) { return band + 1 >= static_cast<std::size_t>(dim); }

Eigen::Index lo(Eigen::Index i, std::size_t band) {
  return std::max<Eigen::Index>(0, i - static_cast<Eigen::Index>(std::min<std::size_t>(band, i)));
}

Eigen::Index hi(Eigen::Index i, std::size_t band, Eigen::Index dim) {
  const auto b = static_cast<Eigen::Index>(std::min<std::size_t>(band, static_cast<std::size_t>(dim)));
  return std::min<Eigen::Index>(dim - 1, i + b);
}

double sgn(double x) { return (x > 0.0) - (x < 0.0); }

void ensure_shape(ComplexMatrix& out, Eigen::Index d) {
  if (out.rows() != d || out.cols() != d) out.resize(d, d);
}

}  // namespace

std::size_t generator_band(const GeneratorScheme& scheme, std::size_t m_band, std::size_t dim) {
  const std::size_t cap = dim == 0 ? 0 : dim - 1;
  if (scheme.is_entrywise()) return std::min(m_band, cap);
  return std::min(2 * std::min(m_band, cap), cap);
}

Complex entrywise_factor(const GeneratorScheme& s, std::size_t n, std::size_t j, Complex m_nn, Complex m_jj) {
  const double index_sign = n > j ? 1.0 : (n < j ? -1.0 : 0.0);
  const Complex delta = m_nn - m_jj;
  switch (s.kind) {
    case SchemeKind::pc:
      return index_sign;
    case SchemeKind::pc_sorted:
      return sgn(m_nn.real() - m_jj.real());
    case SchemeKind::ipc:
      if (s.ipc_ordering == Ordering::index) return Complex(0.0, index_sign);
      return Complex(0.0, sgn(m_jj.imag() - m_nn.imag()));
    case SchemeKind::ppc:
      return index_sign * std::polar(1.0, s.theta);
    case SchemeKind::gpc: {
      const double a = std::abs(delta);
      return a < s.cutoff ? Complex(0.0) : std::conj(delta) / a;
    }
    case SchemeKind::r2:
      return std::conj(delta);
    case SchemeKind::r3:
      return std::abs(delta) < s.cutoff ? Complex(0.0) : 1.0 / delta;
    case SchemeKind::powerlaw: {
      const double a = std::abs(delta);
      return a < s.cutoff ? Complex(0.0) : std::conj(delta) * std::pow(a, s.r - 1.0);
    }
    case SchemeKind::r1:
    case SchemeKind::hpc:
      break;
  }
  throw InvalidInput("entrywise_factor: scheme " + s.name() + " is not entrywise");
}

void product(const ComplexMatrix& x, std::size_t bx, const ComplexMatrix& y, std::size_t by, std::size_t bo,
             ComplexMatrix& out) {
  const Eigen::Index d = x.rows();
  ensure_shape(out, d);
  if (is_dense(bx, d) && is_dense(by, d)) {
    out.noalias() = x * y;
    if (!is_dense(bo, d)) {
      for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
          if (static_cast<std::size_t>(std::abs(i - j)) > bo) out(i, j) = 0.0;
        }
      }
    }
    return;
  }
#pragma omp parallel for schedule(static) if (d >= kParallelThreshold)
  for (Eigen::Index i = 0; i < d; ++i) {
    out.row(i).setZero();
    for (Eigen::Index j = lo(i, bo); j <= hi(i, bo, d); ++j) {
      const Eigen::Index k0 = std::max(lo(i, bx), lo(j, by));
      const Eigen::Index k1 = std::min(hi(i, bx, d), hi(j, by, d));
      Complex acc = 0.0;
      for (Eigen::Index k = k0; k <= k1; ++k) acc += x(i, k) * y(k, j);
      out(i, j) = acc;
    }
  }
}

void commutator(const ComplexMatrix& x, std::size_t bx, const ComplexMatrix& y, std::size_t by, std::size_t bo,
                ComplexMatrix& out) {
  const Eigen::Index d = x.rows();
  ensure_shape(out, d);
  const std::size_t inner = std::min<std::size_t>(bx, d) + std::min<std::size_t>(by, d) + 1;
  if (4 * inner >= static_cast<std::size_t>(d)) {
    out.noalias() = x * y;
    out.noalias() -= y * x;
    if (!is_dense(bo, d)) {
      for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
          if (static_cast<std::size_t>(std::abs(i - j)) > bo) out(i, j) = 0.0;
        }
      }
    }
    return;
  }
#pragma omp parallel for schedule(static) if (d >= kParallelThreshold)
  for (Eigen::Index i = 0; i < d; ++i) {
    out.row(i).setZero();
    for (Eigen::Index j = lo(i, bo); j <= hi(i, bo, d); ++j) {
      Complex acc = 0.0;
      {
        const Eigen::Index k0 = std::max(lo(i, bx), lo(j, by));
        const Eigen::Index k1 = std::min(hi(i, bx, d), hi(j, by, d));
        for (Eigen::Index k = k0; k <= k1; ++k) acc += x(i, k) * y(k, j);
      }
      {
        const Eigen::Index k0 = std::max(lo(i, by), lo(j, bx));
        const Eigen::Index k1 = std::min(hi(i, by, d), hi(j, bx, d));
        for (Eigen::Index k = k0; k <= k1; ++k) acc -= y(i, k) * x(k, j);
      }
      out(i, j) = acc;
    }
  }
}

void generator(const ComplexMatrix& m, const GeneratorScheme& scheme, std::size_t m_band, ComplexMatrix& eta) {
  const Eigen::Index d = m.rows();
  ensure_shape(eta, d);
  const std::size_t cap = d == 0 ? 0 : static_cast<std::size_t>(d - 1);
  const std::size_t b = std::min(m_band, cap);

  if (scheme.is_entrywise()) {
#pragma omp parallel for schedule(static) if (d >= kParallelThreshold)
    for (Eigen::Index n = 0; n < d; ++n) {
      eta.row(n).setZero();
      const Complex m_nn = m(n, n);
      for (Eigen::Index j = lo(n, b); j <= hi(n, b, d); ++j) {
        if (j == n) continue;
        eta(n, j) = entrywise_factor(scheme, static_cast<std::size_t>(n), static_cast<std::size_t>(j), m_nn, m(j, j)) *
                    m(n, j);
      }
    }
    return;
  }

  const ComplexMatrix adj = m.adjoint();
  const std::size_t out_band = generator_band(scheme, b, static_cast<std::size_t>(d));
  if (scheme.kind == SchemeKind::r1) {
    ComplexMatrix v = m;
    v.diagonal().setZero();
    commutator(adj, b, v, b, out_band, eta);
    return;
  }
  // hpc: pc sign pattern applied to M^dagger M
  ComplexMatrix h;
  product(adj, b, m, b, out_band, h);
#pragma omp parallel for schedule(static) if (d >= kParallelThreshold)
  for (Eigen::Index n = 0; n < d; ++n) {
    for (Eigen::Index j = 0; j < d; ++j) {
      eta(n, j) = n > j ? h(n, j) : (n < j ? -h(n, j) : Complex(0.0));
    }
  }
}

}  // namespace dflow::kernels
