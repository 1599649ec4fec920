#include "dflow/lindblad.hpp"

#include <cmath>

#include "dflow/rng.hpp"

namespace dflow {

HilbertSchmidtBasis su_n_basis(std::size_t N) {
  if (N < 2) throw InvalidInput("su_n_basis: N must be >= 2");
  const auto n = static_cast<Eigen::Index>(N);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  HilbertSchmidtBasis basis;
  basis.N = N;
  basis.elements.reserve(N * N - 1);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = j + 1; k < n; ++k) {
      ComplexMatrix s = ComplexMatrix::Zero(n, n);
      s(j, k) = inv_sqrt2;
      s(k, j) = inv_sqrt2;
      basis.elements.push_back(std::move(s));
    }
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = j + 1; k < n; ++k) {
      ComplexMatrix a = ComplexMatrix::Zero(n, n);
      a(j, k) = Complex(0.0, -inv_sqrt2);
      a(k, j) = Complex(0.0, inv_sqrt2);
      basis.elements.push_back(std::move(a));
    }
  }
  for (Eigen::Index l = 1; l < n; ++l) {
    ComplexMatrix d = ComplexMatrix::Zero(n, n);
    const double norm = 1.0 / std::sqrt(static_cast<double>(l * (l + 1)));
    for (Eigen::Index m = 0; m < l; ++m) d(m, m) = norm;
    d(l, l) = -static_cast<double>(l) * norm;
    basis.elements.push_back(std::move(d));
  }
  return basis;
}

namespace {

ComplexMatrix ginibre(std::size_t dim, const CounterRng& rng) {
  const auto d = static_cast<Eigen::Index>(dim);
  ComplexMatrix g(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) g(i, j) = rng.complex_normal(static_cast<std::uint64_t>(i * d + j));
  }
  return g;
}

}  // namespace

ComplexMatrix sample_kossakowski(std::size_t N, std::uint64_t seed) {
  if (N < 2) throw InvalidInput("sample_kossakowski: N must be >= 2");
  const ComplexMatrix g = ginibre(N * N - 1, CounterRng(seed, stream::ginibre));
  ComplexMatrix k = g * g.adjoint();
  k = 0.5 * (k + k.adjoint()).eval();
  const double tr = k.trace().real();
  k *= static_cast<double>(N) / tr;
  return k;
}

ComplexMatrix sample_hamiltonian(std::size_t N, std::uint64_t seed) {
  if (N < 2) throw InvalidInput("sample_hamiltonian: N must be >= 2");
  const ComplexMatrix x = ginibre(N, CounterRng(seed, stream::hamiltonian));
  return (x + x.adjoint()) / (2.0 * std::sqrt(static_cast<double>(N)));
}

ComplexMatrix apply_dissipator(const ComplexMatrix& K, const HilbertSchmidtBasis& basis, const ComplexMatrix& rho) {
  const std::size_t count = basis.elements.size();
  if (static_cast<std::size_t>(K.rows()) != count || static_cast<std::size_t>(K.cols()) != count) {
    throw DimensionMismatch("apply_dissipator: K must be (N^2-1) x (N^2-1)");
  }
  const auto n = static_cast<Eigen::Index>(basis.N);
  if (rho.rows() != n || rho.cols() != n) throw DimensionMismatch("apply_dissipator: rho must be N x N");
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  for (std::size_t a = 0; a < count; ++a) {
    for (std::size_t b = 0; b < count; ++b) {
      const Complex kab = K(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
      if (kab == Complex(0.0)) continue;
      const ComplexMatrix& fn = basis.elements[b];
      const ComplexMatrix fm_adj = basis.elements[a].adjoint();
      const ComplexMatrix prod = fm_adj * fn;
      out += kab * (fn * rho * fm_adj - 0.5 * (prod * rho + rho * prod));
    }
  }
  return Complex(0.0, 1.0) * out;
}

ComplexMatrix assemble_superoperator(const ComplexMatrix& K, const HilbertSchmidtBasis& basis,
                                     const std::optional<ComplexMatrix>& hamiltonian) {
  const std::size_t count = basis.elements.size();
  const std::size_t N = basis.N;
  if (count != N * N - 1) throw InvalidInput("assemble_superoperator: basis must have N^2 - 1 elements");
  if (static_cast<std::size_t>(K.rows()) != count || static_cast<std::size_t>(K.cols()) != count) {
    throw DimensionMismatch("assemble_superoperator: K must be (N^2-1) x (N^2-1)");
  }
  const auto n = static_cast<Eigen::Index>(N);
  const auto nn = n * n;
  const auto c = static_cast<Eigen::Index>(count);

  // With B_n = sum_m K_mn F_m^dagger and Q = sum_n B_n F_n the dissipator reads
  // i [sum_n F_n rho B_n - (Q rho + rho Q) / 2]; applied to the elementary matrix E_ab its (i, j)
  // entry is i [sum_n F_n(i, a) B_n(b, j) - (Q_ia delta_bj + delta_ia Q_bj) / 2].
  Eigen::MatrixXcd fdag(c, nn);   // row m = entries of F_m^dagger, flattened row-major
  Eigen::MatrixXcd fcols(nn, c);  // row (i, a) = F_n(i, a) over n
  for (Eigen::Index m = 0; m < c; ++m) {
    const ComplexMatrix& f = basis.elements[static_cast<std::size_t>(m)];
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index a = 0; a < n; ++a) {
        fdag(m, i * n + a) = std::conj(f(a, i));
        fcols(i * n + a, m) = f(i, a);
      }
    }
  }
  const Eigen::MatrixXcd bflat = Eigen::MatrixXcd(K).transpose() * fdag;  // row n = B_n flattened
  ComplexMatrix q = ComplexMatrix::Zero(n, n);
  for (Eigen::Index k = 0; k < c; ++k) {
    ComplexMatrix b(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) b(i, j) = bflat(k, i * n + j);
    }
    q.noalias() += b * basis.elements[static_cast<std::size_t>(k)];
  }
  const Eigen::MatrixXcd p = fcols * bflat;  // p((i, a), (b, j))

  const Complex iu(0.0, 1.0);
  ComplexMatrix s(nn, nn);
#pragma omp parallel for schedule(static) if (nn >= 256)
  for (Eigen::Index b = 0; b < n; ++b) {
    for (Eigen::Index a = 0; a < n; ++a) {
      const Eigen::Index col = a + b * n;
      for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
          Complex v = p(i * n + a, b * n + j);
          if (b == j) v -= 0.5 * q(i, a);
          if (i == a) v -= 0.5 * q(b, j);
          s(i + j * n, col) = iu * v;
        }
      }
    }
  }
  if (hamiltonian) {
    const ComplexMatrix& h = *hamiltonian;
    if (h.rows() != n || h.cols() != n) throw DimensionMismatch("assemble_superoperator: H must be N x N");
    // [H, E_ab] has entries H(i, a) delta_bj - delta_ia H(b, j)
    for (Eigen::Index b = 0; b < n; ++b) {
      for (Eigen::Index a = 0; a < n; ++a) {
        const Eigen::Index col = a + b * n;
        for (Eigen::Index i = 0; i < n; ++i) s(i + b * n, col) += h(i, a);
        for (Eigen::Index j = 0; j < n; ++j) s(a + j * n, col) -= h(b, j);
      }
    }
  }
  return s;
}

ComplexMatrix build_superoperator(const LindbladSpec& spec) {
  if (spec.N < 2) throw InvalidInput("LindbladSpec: N must be >= 2");
  const auto basis = su_n_basis(spec.N);
  const ComplexMatrix k = sample_kossakowski(spec.N, spec.seed);
  std::optional<ComplexMatrix> h;
  if (spec.include_hamiltonian) h = sample_hamiltonian(spec.N, spec.seed);
  return assemble_superoperator(k, basis, h);
}

ComplexMatrix unvec(const Eigen::Ref<const Eigen::VectorXcd>& v, std::size_t N) {
  const auto n = static_cast<Eigen::Index>(N);
  if (v.size() != n * n) throw DimensionMismatch("unvec: vector length must be N^2");
  ComplexMatrix rho(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) rho(i, j) = v(i + j * n);
  }
  return rho;
}

Eigen::VectorXcd vec(const ComplexMatrix& rho) {
  const Eigen::Index n = rho.rows();
  Eigen::VectorXcd v(n * n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) v(i + j * n) = rho(i, j);
  }
  return v;
}

}  // namespace dflow
