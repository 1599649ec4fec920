#pragma once

#include <optional>

#include "dflow/generators.hpp"
#include "dflow/linalg.hpp"

// Plain serial implementations written straight from the defining formulas. They are slow and
// exist to cross-check the parallel kernels.
namespace dflow::reference {

ComplexMatrix multiply(const ComplexMatrix& x, const ComplexMatrix& y);
ComplexMatrix commutator(const ComplexMatrix& x, const ComplexMatrix& y);
ComplexMatrix generator(const ComplexMatrix& m, const GeneratorScheme& scheme);
ComplexMatrix flow_rhs(const ComplexMatrix& m, const GeneratorScheme& scheme,
                       const std::optional<BandMask>& truncation = std::nullopt);

}  // namespace dflow::reference
