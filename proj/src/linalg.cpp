#include "dflow/linalg.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

namespace dflow {

BandMask::BandMask(std::size_t order, std::size_t dim) : order_(order), dim_(dim) {}

void require_square(const ComplexMatrix& m, std::string_view what) {
  if (m.rows() != m.cols()) {
    throw DimensionMismatch(std::string(what) + ": matrix is " + std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()) + ", expected square");
  }
}

bool is_finite(const ComplexMatrix& m) {
  const Complex* p = m.data();
  for (Eigen::Index k = 0; k < m.size(); ++k) {
    if (!std::isfinite(p[k].real()) || !std::isfinite(p[k].imag())) return false;
  }
  return true;
}

void require_finite(const ComplexMatrix& m, std::string_view what) {
  if (!is_finite(m)) throw InvalidInput(std::string(what) + ": non-finite matrix entry");
}

HermitianSplit hermitian_split(const ComplexMatrix& m) {
  require_square(m, "hermitian_split");
  require_finite(m, "hermitian_split");
  ComplexMatrix adj = m.adjoint();
  HermitianSplit out;
  out.hermitian = 0.5 * (m + adj);
  out.antihermitian = 0.5 * (m - adj);
  return out;
}

double rod(const ComplexMatrix& m) {
  require_square(m, "rod");
  const Eigen::Index d = m.rows();
  if (d == 0) return 0.0;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      if (i != j) sum += std::norm(m(i, j));
    }
  }
  return std::sqrt(sum) / static_cast<double>(d);
}

ComplexMatrix commutator(const ComplexMatrix& x, const ComplexMatrix& y) {
  require_square(x, "commutator");
  require_square(y, "commutator");
  if (x.rows() != y.rows()) {
    throw DimensionMismatch("commutator: dimensions " + std::to_string(x.rows()) + " and " +
                            std::to_string(y.rows()) + " differ");
  }
  ComplexMatrix out = x * y;
  out.noalias() -= y * x;
  return out;
}

ComplexMatrix apply_band_mask(const ComplexMatrix& m, const BandMask& mask) {
  require_square(m, "apply_band_mask");
  if (static_cast<std::size_t>(m.rows()) != mask.dim()) {
    throw DimensionMismatch("apply_band_mask: mask dimension " + std::to_string(mask.dim()) +
                            " does not match matrix dimension " + std::to_string(m.rows()));
  }
  ComplexMatrix out = m;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
      if (!mask.keeps(static_cast<std::size_t>(i), static_cast<std::size_t>(j))) out(i, j) = 0.0;
    }
  }
  return out;
}

ComplexMatrix diagonal_part(const ComplexMatrix& m) {
  ComplexMatrix out = ComplexMatrix::Zero(m.rows(), m.cols());
  out.diagonal() = m.diagonal();
  return out;
}

ComplexMatrix off_diagonal_part(const ComplexMatrix& m) {
  ComplexMatrix out = m;
  out.diagonal().setZero();
  return out;
}

Spectrum diagonal_of(const ComplexMatrix& m) {
  Spectrum out(static_cast<std::size_t>(m.diagonal().size()));
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = m(k, k);
  return out;
}

namespace {

constexpr Eigen::Index kSweepsPerRow = 100;

Eigen::MatrixXcd to_col_major(const ComplexMatrix& m) { return Eigen::MatrixXcd(m); }

}  // namespace

Spectrum eigenvalues(const ComplexMatrix& m) {
  require_square(m, "eigenvalues");
  require_finite(m, "eigenvalues");
  if (m.rows() == 0) throw InvalidInput("eigenvalues: empty matrix");
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(m.rows());
  schur.setMaxIterations(kSweepsPerRow * m.rows());
  schur.compute(to_col_major(m), false);
  if (schur.info() != Eigen::Success) {
    throw SolverFailure("eigenvalues: QR iteration did not converge within " +
                        std::to_string(kSweepsPerRow * m.rows()) + " sweeps");
  }
  const auto& t = schur.matrixT();
  Spectrum out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index k = 0; k < m.rows(); ++k) out[static_cast<std::size_t>(k)] = t(k, k);
  return out;
}

EigenDecomposition eigen_decomposition(const ComplexMatrix& m) {
  require_square(m, "eigen_decomposition");
  require_finite(m, "eigen_decomposition");
  if (m.rows() == 0) throw InvalidInput("eigen_decomposition: empty matrix");
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m.rows());
  solver.setMaxIterations(kSweepsPerRow * m.rows());
  solver.compute(to_col_major(m), true);
  if (solver.info() != Eigen::Success) {
    throw SolverFailure("eigen_decomposition: QR iteration did not converge within " +
                        std::to_string(kSweepsPerRow * m.rows()) + " sweeps");
  }
  EigenDecomposition out;
  out.values.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + m.rows());
  out.vectors = solver.eigenvectors();
  return out;
}

std::vector<std::size_t> min_cost_assignment(const Eigen::MatrixXd& cost) {
  if (cost.rows() != cost.cols()) throw DimensionMismatch("min_cost_assignment: cost matrix not square");
  const std::size_t n = static_cast<std::size_t>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  // Shortest augmenting path with row/column potentials; 1-based with a sentinel column 0.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(static_cast<Eigen::Index>(i0 - 1), static_cast<Eigen::Index>(j - 1)) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_to_col(n);
  for (std::size_t j = 1; j <= n; ++j) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

namespace {

std::vector<double> matched_gaps(const Spectrum& a, const Spectrum& b) {
  if (a.size() != b.size()) {
    throw DimensionMismatch("spectral_distance: spectra have lengths " + std::to_string(a.size()) + " and " +
                            std::to_string(b.size()));
  }
  const auto n = static_cast<Eigen::Index>(a.size());
  Eigen::MatrixXd cost(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) cost(i, j) = std::abs(a[i] - b[j]);
  }
  auto match = min_cost_assignment(cost);
  std::vector<double> gaps(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) gaps[i] = cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(match[i]));
  return gaps;
}

}  // namespace

double spectral_distance(const Spectrum& a, const Spectrum& b) {
  double sum = 0.0;
  for (double g : matched_gaps(a, b)) sum += g * g;
  return std::sqrt(sum);
}

double spectral_max_deviation(const Spectrum& a, const Spectrum& b) {
  double worst = 0.0;
  for (double g : matched_gaps(a, b)) worst = std::max(worst, g);
  return worst;
}

}  // namespace dflow
