#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "dflow/errors.hpp"
#include "dflow/generators.hpp"
#include "dflow/linalg.hpp"

namespace dflow {

struct FlowConfig {
  double abs_tol = 1e-8;
  double rel_tol = 1e-8;
  double rod_stop = 1e-8;      // in units of energy_scale
  double energy_scale = 1.0;   // J
  double l_max_cap = 1e6;
  std::size_t max_steps = 50000;  // accepted-step budget; 0 disables it
  std::optional<BandMask> truncation;
  GeneratorScheme scheme = GeneratorScheme::gpc();
  std::size_t record_stride = 1;
  std::optional<double> initial_step;

  void validate() const;
};

enum class StopReason { converged, flow_cap, step_budget };
std::string to_string(StopReason r);

struct FlowSample {
  double l = 0.0;
  double wall_time_s = 0.0;
  double rod = 0.0;
  Complex trace;
  Complex trace_sq;
};

struct FlowTrajectory {
  std::vector<FlowSample> samples;
  ComplexMatrix final_matrix;
  std::vector<ComplexMatrix> final_observables;
  bool converged = false;
  std::size_t steps_taken = 0;
  std::size_t steps_rejected = 0;
  StopReason stop_reason = StopReason::flow_cap;

  double final_l() const { return samples.empty() ? 0.0 : samples.back().l; }
};

class FlowError : public Error {
 public:
  FlowError(const std::string& what, FlowTrajectory partial)
      : Error(what), partial_(std::make_shared<FlowTrajectory>(std::move(partial))) {}
  const FlowTrajectory& trajectory() const { return *partial_; }

 private:
  std::shared_ptr<FlowTrajectory> partial_;
};

class StepSizeUnderflow : public FlowError {
 public:
  using FlowError::FlowError;
  const char* kind() const noexcept override { return "step_size_underflow"; }
};

class FlowDivergence : public FlowError {
 public:
  using FlowError::FlowError;
  const char* kind() const noexcept override { return "flow_divergence"; }
};

inline constexpr double kMinStepSize = 1e-14;

// [eta[M], M] with the derivative masked to the band when a truncation is given.
ComplexMatrix flow_rhs(const ComplexMatrix& m, const GeneratorScheme& scheme,
                       const std::optional<BandMask>& truncation = std::nullopt);

// [eta[M], O]: eta is built from M.
ComplexMatrix observable_rhs(const ComplexMatrix& m, const ComplexMatrix& o, const GeneratorScheme& scheme);

// Called after every accepted step (and once at the start) with the current flow parameter, M, and
// the co-flowed observables.
using StepObserver = std::function<void(double l, const ComplexMatrix& m, std::span<const ComplexMatrix> observables)>;

FlowTrajectory integrate_flow(const ComplexMatrix& m0, std::span<const ComplexMatrix> observables,
                              const FlowConfig& cfg, const StepObserver& observer = {});

inline FlowTrajectory integrate_flow(const ComplexMatrix& m0, const FlowConfig& cfg) {
  return integrate_flow(m0, std::span<const ComplexMatrix>{}, cfg);
}

// ipc on the antihermitian part until its ROD drops below the stop threshold, then pc on the
// Hermitian part. cfg.scheme is ignored.
FlowTrajectory alternating_pc_ipc_flow(const ComplexMatrix& m0, const FlowConfig& cfg);

// Header "l,t_wall,rod,tr_re,tr_im,tr2_re,tr2_im".
std::string trajectory_csv(const FlowTrajectory& traj);
void write_trajectory_csv(const std::filesystem::path& path, const FlowTrajectory& traj);

FlowConfig flow_config_from_json(const nlohmann::json& j, std::size_t dim);
nlohmann::json flow_config_to_json(const FlowConfig& cfg);

}  // namespace dflow
