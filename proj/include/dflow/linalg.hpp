#pragma once

#include <complex>
#include <cstddef>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "dflow/errors.hpp"

namespace dflow {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Spectrum = std::vector<Complex>;

struct HermitianSplit {
  ComplexMatrix hermitian;
  ComplexMatrix antihermitian;
};

// Band of width `order` around the diagonal: (n, j) is kept iff |n - j| <= order.
class BandMask {
 public:
  BandMask(std::size_t order, std::size_t dim);

  std::size_t order() const { return order_; }
  std::size_t dim() const { return dim_; }
  bool keeps(std::size_t n, std::size_t j) const { return (n > j ? n - j : j - n) <= order_; }
  bool is_full() const { return dim_ == 0 || order_ + 1 >= dim_; }

 private:
  std::size_t order_;
  std::size_t dim_;
};

void require_square(const ComplexMatrix& m, std::string_view what);
void require_finite(const ComplexMatrix& m, std::string_view what);
bool is_finite(const ComplexMatrix& m);

HermitianSplit hermitian_split(const ComplexMatrix& m);

// (1/D) * sqrt(sum of |m_ij|^2 over i != j)
double rod(const ComplexMatrix& m);

ComplexMatrix commutator(const ComplexMatrix& x, const ComplexMatrix& y);

ComplexMatrix apply_band_mask(const ComplexMatrix& m, const BandMask& mask);

ComplexMatrix diagonal_part(const ComplexMatrix& m);
ComplexMatrix off_diagonal_part(const ComplexMatrix& m);
Spectrum diagonal_of(const ComplexMatrix& m);

Spectrum eigenvalues(const ComplexMatrix& m);

struct EigenDecomposition {
  Spectrum values;
  ComplexMatrix vectors;  // column k belongs to values[k]
};
EigenDecomposition eigen_decomposition(const ComplexMatrix& m);

// Minimal-cost perfect matching on a square cost matrix; result[i] is the column assigned to row i.
std::vector<std::size_t> min_cost_assignment(const Eigen::MatrixXd& cost);

// Root-sum-square distance between two spectra under the minimal-cost pairing.
double spectral_distance(const Spectrum& a, const Spectrum& b);

// Largest |a_i - b_sigma(i)| under the same pairing.
double spectral_max_deviation(const Spectrum& a, const Spectrum& b);

}  // namespace dflow
