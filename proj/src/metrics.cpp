#include "dflow/metrics.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace dflow {

namespace {

// Position where log(rod) reaches log(target) on the segment between samples a and b.
double log_interp(double xa, double xb, double ra, double rb, double target) {
  if (!(ra > 0.0) || !(rb > 0.0) || ra == rb) return rb <= target ? xb : xa;
  const double w = (std::log(target) - std::log(ra)) / (std::log(rb) - std::log(ra));
  return xa + w * (xb - xa);
}

}  // namespace

ConvergenceReport convergence_coefficient(const FlowTrajectory& traj, double J) {
  ConvergenceReport rep;
  const auto& s = traj.samples;
  if (!traj.converged || s.size() < 2 || !(J > 0.0)) return rep;
  const double upper_target = kCoefficientTarget * J;
  const double lower_target = kCoefficientRatio * upper_target;

  std::size_t k = 0;
  while (k < s.size() && s[k].rod > upper_target) ++k;
  if (k == s.size() || k == 0) return rep;

  std::size_t j = k;
  for (std::size_t idx = k; idx-- > 0;) {
    if (s[idx].rod >= lower_target) {
      j = idx;
      break;
    }
  }
  if (j == k) return rep;

  rep.l_max = log_interp(s[k - 1].l, s[k].l, s[k - 1].rod, s[k].rod, upper_target);
  rep.t_max = log_interp(s[k - 1].wall_time_s, s[k].wall_time_s, s[k - 1].rod, s[k].rod, upper_target);
  rep.l_min = log_interp(s[j].l, s[j + 1].l, s[j].rod, s[j + 1].rod, lower_target);
  rep.t_min = log_interp(s[j].wall_time_s, s[j + 1].wall_time_s, s[j].rod, s[j + 1].rod, lower_target);
  if (!(rep.l_max > rep.l_min)) return ConvergenceReport{};

  const double ln_ratio = std::log(kCoefficientRatio);
  rep.c_conv_l = ln_ratio / (rep.l_max - rep.l_min);
  rep.c_conv_t = rep.t_max > rep.t_min ? ln_ratio / (rep.t_max - rep.t_min) : 0.0;
  rep.valid = true;
  return rep;
}

std::uint64_t model_seed(const ModelSpec& spec) {
  return std::visit(
      [](const auto& s) -> std::uint64_t {
        if constexpr (requires { s.seed; }) {
          return s.seed;
        } else {
          return 0;
        }
      },
      spec);
}

TruncationReport truncation_benchmark_matrix(const ComplexMatrix& m, const GeneratorScheme& scheme, std::size_t n_max,
                                             double lambda, const FlowConfig& cfg) {
  require_square(m, "truncation_benchmark");
  if (static_cast<std::size_t>(m.rows()) <= n_max) {
    throw InvalidInput("truncation_benchmark: dimension " + std::to_string(m.rows()) + " must exceed n_max " +
                       std::to_string(n_max));
  }
  TruncationReport rep;
  rep.order = n_max;
  rep.lambda = lambda;
  rep.scheme = scheme.name();

  const ComplexMatrix prep = prepare_truncated(m, lambda, n_max);
  const Spectrum exact = eigenvalues(prep);

  FlowConfig run = cfg;
  run.scheme = scheme;
  run.truncation = BandMask(n_max, static_cast<std::size_t>(m.rows()));
  try {
    rep.trajectory = integrate_flow(prep, run);
    rep.converged = rep.trajectory.converged;
  } catch (const FlowError& e) {
    rep.trajectory = e.trajectory();
    rep.converged = false;
    rep.error = std::string(e.kind()) + ": " + e.what();
  }
  const ComplexMatrix& final_m = rep.trajectory.final_matrix;
  if (final_m.rows() == m.rows() && is_finite(final_m)) {
    rep.delta_trunc = spectral_distance(diagonal_of(final_m), exact);
  } else {
    rep.delta_trunc = std::numeric_limits<double>::quiet_NaN();
    if (!rep.error) rep.error = "flow produced no finite final matrix";
  }
  return rep;
}

TruncationReport truncation_benchmark(const ModelSpec& model, const GeneratorScheme& scheme, std::size_t n_max,
                                      double lambda, const FlowConfig& cfg) {
  if (const auto* rc = std::get_if<RandomCrossoverSpec>(&model); rc && (rc->lambda_expansion || rc->truncation_order)) {
    throw InvalidInput(
        "truncation_benchmark: pass lambda and n_max as arguments, not inside the random-crossover spec");
  }
  auto rep = truncation_benchmark_matrix(build_model(model), scheme, n_max, lambda, cfg);
  rep.sample_seed = model_seed(model);
  return rep;
}

}  // namespace dflow
