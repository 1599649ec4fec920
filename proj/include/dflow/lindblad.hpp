#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dflow/linalg.hpp"

namespace dflow {

struct LindbladSpec {
  std::size_t N = 2;
  std::uint64_t seed = 0;
  bool include_hamiltonian = false;
};

struct HilbertSchmidtBasis {
  std::size_t N = 0;
  std::vector<ComplexMatrix> elements;  // N^2 - 1 traceless, orthonormal, Hermitian N x N matrices
};

// Symmetric S_jk, antisymmetric J_jk, then diagonal D_l, all normalized to Tr(F F^dagger) = 1.
HilbertSchmidtBasis su_n_basis(std::size_t N);

// Wishart K = G G^dagger from a complex Ginibre G of size N^2 - 1, rescaled to Tr K = N.
ComplexMatrix sample_kossakowski(std::size_t N, std::uint64_t seed);

// Random Hermitian H = (X + X^dagger) / (2 sqrt(N)) from a complex Ginibre X.
ComplexMatrix sample_hamiltonian(std::size_t N, std::uint64_t seed);

// L_D(rho) = i sum_mn K_mn [F_n rho F_m^dagger - (1/2){F_m^dagger F_n, rho}]
ComplexMatrix apply_dissipator(const ComplexMatrix& K, const HilbertSchmidtBasis& basis, const ComplexMatrix& rho);

// N^2 x N^2 matrix of rho -> [H, rho] + L_D(rho) acting on column-stacked rho (vec index = row + col * N).
ComplexMatrix assemble_superoperator(const ComplexMatrix& K, const HilbertSchmidtBasis& basis,
                                     const std::optional<ComplexMatrix>& hamiltonian = std::nullopt);

ComplexMatrix build_superoperator(const LindbladSpec& spec);

ComplexMatrix unvec(const Eigen::Ref<const Eigen::VectorXcd>& v, std::size_t N);
Eigen::VectorXcd vec(const ComplexMatrix& rho);

}  // namespace dflow
