#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "dflow/flow.hpp"
#include "dflow/models.hpp"

namespace dflow {

inline constexpr double kCoefficientTarget = 1e-6;  // ROD(l_max) in units of J
inline constexpr double kCoefficientRatio = 2.0;    // ROD(l_min) / ROD(l_max)

struct ConvergenceReport {
  double c_conv_l = 0.0;
  double c_conv_t = 0.0;
  double l_min = 0.0;
  double l_max = 0.0;
  double t_min = 0.0;
  double t_max = 0.0;
  bool valid = false;
};

// ln 2 over the flow distance between ROD = 2e-6 J and ROD = 1e-6 J, both placed by log-linear
// interpolation between recorded samples. The upper point is the first crossing of 1e-6 J, the lower
// point the last sample before it that still has ROD >= 2e-6 J. Trajectories that did not converge
// report zero coefficients.
ConvergenceReport convergence_coefficient(const FlowTrajectory& traj, double J);

struct TruncationReport {
  double delta_trunc = 0.0;
  std::size_t order = 0;
  double lambda = 1.0;
  std::string scheme;
  bool converged = false;
  std::uint64_t sample_seed = 0;
  std::optional<std::string> error;
  FlowTrajectory trajectory;
};

TruncationReport truncation_benchmark(const ModelSpec& model, const GeneratorScheme& scheme, std::size_t n_max,
                                      double lambda, const FlowConfig& cfg);

TruncationReport truncation_benchmark_matrix(const ComplexMatrix& m, const GeneratorScheme& scheme, std::size_t n_max,
                                             double lambda, const FlowConfig& cfg);

std::uint64_t model_seed(const ModelSpec& spec);

}  // namespace dflow
