#pragma once

#include <cstddef>

#include "dflow/generators.hpp"
#include "dflow/linalg.hpp"

// OpenMP-parallel building blocks of the flow right-hand side. All kernels write into a
// caller-owned output of the right size, so the integrator can reuse its buffers.
// A "band" argument b means the matrix may be nonzero only where |n - j| <= b; b >= D - 1 is dense.
namespace dflow::kernels {

std::size_t generator_band(const GeneratorScheme& scheme, std::size_t m_band, std::size_t dim);

// Coefficient c with eta_nj = c * m_nj for the entrywise schemes.
Complex entrywise_factor(const GeneratorScheme& scheme, std::size_t n, std::size_t j, Complex m_nn, Complex m_jj);

void generator(const ComplexMatrix& m, const GeneratorScheme& scheme, std::size_t m_band, ComplexMatrix& eta);

void commutator(const ComplexMatrix& x, std::size_t x_band, const ComplexMatrix& y, std::size_t y_band,
                std::size_t out_band, ComplexMatrix& out);

// out = x * y restricted to the given bands.
void product(const ComplexMatrix& x, std::size_t x_band, const ComplexMatrix& y, std::size_t y_band,
             std::size_t out_band, ComplexMatrix& out);

}  // namespace dflow::kernels
