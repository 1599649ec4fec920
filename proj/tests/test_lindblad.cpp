#include <doctest.h>

#include <cmath>

#include "dflow/errors.hpp"
#include "dflow/lindblad.hpp"
#include "dflow/models.hpp"
#include "test_util.hpp"

using namespace dflow;
using dflow::testing::max_abs;
using dflow::testing::max_abs_diff;

namespace {
const Complex I(0.0, 1.0);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Column-stacked superoperator from vec(A rho B) = (B^T kron A) vec(rho).
ComplexMatrix kronecker_superoperator(const ComplexMatrix& K, const HilbertSchmidtBasis& basis) {
  const auto N = static_cast<Eigen::Index>(basis.N);
  const ComplexMatrix id = ComplexMatrix::Identity(N, N);
  ComplexMatrix L = ComplexMatrix::Zero(N * N, N * N);
  for (std::size_t m = 0; m < basis.elements.size(); ++m) {
    for (std::size_t n = 0; n < basis.elements.size(); ++n) {
      const ComplexMatrix& fm = basis.elements[m];
      const ComplexMatrix& fn = basis.elements[n];
      const ComplexMatrix fmd_fn = fm.adjoint() * fn;
      const ComplexMatrix term = kron(fm.conjugate(), fn) - 0.5 * kron(id, fmd_fn) - 0.5 * kron(fmd_fn.transpose(), id);
      L += K(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)) * term;
    }
  }
  return I * L;
}

}  // namespace

TEST_CASE("su(N) basis") {
  for (std::size_t N = 2; N <= 6; ++N) {
    const auto basis = su_n_basis(N);
    REQUIRE(basis.elements.size() == N * N - 1);
    for (std::size_t a = 0; a < basis.elements.size(); ++a) {
      const ComplexMatrix& fa = basis.elements[a];
      CHECK(std::abs(fa.trace()) < 1e-15);
      CHECK(max_abs_diff(fa, fa.adjoint()) == 0.0);
      for (std::size_t b = 0; b < basis.elements.size(); ++b) {
        const Complex ip = (fa * basis.elements[b].adjoint()).trace();
        REQUIRE(std::abs(ip - (a == b ? 1.0 : 0.0)) <= 1e-12);
      }
    }
  }
  // N = 2: normalized Pauli matrices sx, sy, sz in that order
  const auto p = su_n_basis(2);
  const double s = 1.0 / std::sqrt(2.0);
  ComplexMatrix sx(2, 2), sy(2, 2), sz(2, 2);
  sx << 0.0, s, s, 0.0;
  sy << 0.0, -I * s, I * s, 0.0;
  sz << s, 0.0, 0.0, -s;
  CHECK(max_abs_diff(p.elements[0], sx) < 1e-15);
  CHECK(std::min(max_abs_diff(p.elements[1], sy), max_abs_diff(p.elements[1], -sy)) < 1e-15);
  CHECK(max_abs_diff(p.elements[2], sz) < 1e-15);
  CHECK(su_n_basis(3).elements.size() == 8);
  CHECK_THROWS_AS(su_n_basis(1), InvalidInput);
}

TEST_CASE("Kossakowski matrix") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const ComplexMatrix K = sample_kossakowski(4, seed);
    REQUIRE(K.rows() == 15);
    CHECK(max_abs_diff(K, K.adjoint()) <= 1e-13);
    CHECK(std::abs(K.trace() - 4.0) < 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es{Eigen::MatrixXcd(K)};
    CHECK(es.eigenvalues().minCoeff() >= -1e-10);
    CHECK(max_abs_diff(K, sample_kossakowski(4, seed)) == 0.0);
  }
  CHECK(max_abs_diff(sample_kossakowski(3, 1), sample_kossakowski(3, 2)) > 0.0);
  const ComplexMatrix h = sample_hamiltonian(5, 3);
  CHECK(max_abs_diff(h, h.adjoint()) == 0.0);
}

TEST_CASE("vec is column stacking") {
  const ComplexMatrix rho = dflow::testing::random_matrix(3, 1);
  const Eigen::VectorXcd v = vec(rho);
  for (Eigen::Index i = 0; i < 3; ++i)
    for (Eigen::Index j = 0; j < 3; ++j) CHECK(v(i + 3 * j) == rho(i, j));
  CHECK(max_abs_diff(unvec(v, 3), rho) == 0.0);
}

TEST_CASE("assembled superoperator matches the Kronecker construction and the direct dissipator") {
  for (std::size_t N : {2u, 3u, 4u}) {
    const auto basis = su_n_basis(N);
    const ComplexMatrix K = sample_kossakowski(N, 7);
    const ComplexMatrix L = assemble_superoperator(K, basis);
    CHECK(max_abs_diff(L, kronecker_superoperator(K, basis)) <= 1e-12);
    for (std::uint64_t s = 0; s < 5; ++s) {
      const ComplexMatrix rho = dflow::testing::random_matrix(N, s);
      CHECK(max_abs_diff(unvec(L * vec(rho), N), apply_dissipator(K, basis, rho)) <= 1e-12);
    }
  }
  // N = 2 with a diagonal Kossakowski matrix
  const auto basis = su_n_basis(2);
  ComplexMatrix K = ComplexMatrix::Zero(3, 3);
  K(0, 0) = 0.3;
  K(1, 1) = 1.1;
  K(2, 2) = 0.6;
  CHECK(max_abs_diff(assemble_superoperator(K, basis), kronecker_superoperator(K, basis)) <= 1e-12);
}

TEST_CASE("dissipator preserves trace and maps Hermitian inputs consistently") {
  const std::size_t N = 5;
  const auto basis = su_n_basis(N);
  const ComplexMatrix K = sample_kossakowski(N, 3);
  const ComplexMatrix L = build_superoperator({N, 3});
  for (Eigen::Index col = 0; col < L.cols(); ++col) {
    Complex tr = 0.0;
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(N); ++i) tr += L(i + i * static_cast<Eigen::Index>(N), col);
    REQUIRE(std::abs(tr) <= 1e-10);
  }
  for (std::uint64_t s = 0; s < 50; ++s) {
    const ComplexMatrix rho = dflow::testing::random_matrix(N, s);
    const ComplexMatrix out = apply_dissipator(K, basis, rho);
    const ComplexMatrix out_dag = apply_dissipator(K, basis, rho.adjoint());
    // with the leading factor i the map is anti-Hermiticity preserving; the bare dissipator is Hermiticity preserving
    REQUIRE(max_abs_diff(out_dag.adjoint(), -out) <= 1e-10);
    const ComplexMatrix bare = out / I;
    const ComplexMatrix bare_dag = out_dag / I;
    REQUIRE(max_abs_diff(bare_dag.adjoint(), bare) <= 1e-10);
  }
}

TEST_CASE("superoperator spectrum: stationary state, decay and pairing") {
  for (bool with_h : {false, true}) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const ComplexMatrix L = build_superoperator({5, seed, with_h});
      const Spectrum s = eigenvalues(L);
      std::size_t zeros = 0;
      Spectrum mirrored;
      for (Complex l : s) {
        zeros += std::abs(l) <= 1e-8 ? 1 : 0;
        CHECK(l.imag() <= 1e-8);
        mirrored.push_back(-std::conj(l));
      }
      CAPTURE(with_h);
      CHECK(zeros == 1);
      CHECK(spectral_max_deviation(s, mirrored) <= 1e-6);
    }
  }
}

TEST_CASE("stationary state is a density matrix") {
  const std::size_t N = 4;
  const ComplexMatrix L = build_superoperator({N, 11});
  const auto ed = eigen_decomposition(L);
  std::size_t k = 0;
  for (std::size_t i = 1; i < ed.values.size(); ++i)
    if (std::abs(ed.values[i]) < std::abs(ed.values[k])) k = i;
  ComplexMatrix rho = unvec(ed.vectors.col(static_cast<Eigen::Index>(k)), N);
  rho /= rho.trace();
  CHECK(max_abs_diff(rho, rho.adjoint()) < 1e-10);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es{Eigen::MatrixXcd(0.5 * (rho + rho.adjoint()))};
  CHECK(es.eigenvalues().minCoeff() > -1e-10);
}

TEST_CASE("lindblad model builder") {
  const ModelSpec spec = LindbladSpec{3, 2};
  CHECK(model_dimension(spec) == 9);
  CHECK(max_abs_diff(build_model(spec), build_superoperator({3, 2})) == 0.0);
  CHECK_THROWS_AS(build_superoperator({1, 0}), InvalidInput);
}
