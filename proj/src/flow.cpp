#include "dflow/flow.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <set>

#include "dflow/kernels.hpp"
#include "dflow/matrix_io.hpp"

namespace dflow {

void FlowConfig::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw InvalidInput("flow config: tolerances must be > 0");
  if (!(rod_stop > 0.0)) throw InvalidInput("flow config: rod_stop must be > 0");
  if (!(energy_scale > 0.0)) throw InvalidInput("flow config: energy_scale must be > 0");
  if (!(l_max_cap > 0.0)) throw InvalidInput("flow config: l_max_cap must be > 0");
  if (record_stride == 0) throw InvalidInput("flow config: record_stride must be >= 1");
  if (initial_step && !(*initial_step > 0.0)) throw InvalidInput("flow config: initial_step must be > 0");
  scheme.validate();
}

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::converged: return "converged";
    case StopReason::flow_cap: return "flow_cap";
    case StopReason::step_budget: return "step_budget";
  }
  return "unknown";
}

namespace {

std::size_t full_band(const ComplexMatrix& m) { return m.rows() > 0 ? static_cast<std::size_t>(m.rows() - 1) : 0; }

std::size_t band_of(const std::optional<BandMask>& t, const ComplexMatrix& m) {
  return t ? std::min(t->order(), full_band(m)) : full_band(m);
}

void check_truncation(const std::optional<BandMask>& t, const ComplexMatrix& m) {
  if (t && t->dim() != static_cast<std::size_t>(m.rows())) {
    throw DimensionMismatch("truncation mask dimension " + std::to_string(t->dim()) +
                            " does not match matrix dimension " + std::to_string(m.rows()));
  }
}

}  // namespace

ComplexMatrix flow_rhs(const ComplexMatrix& m, const GeneratorScheme& scheme, const std::optional<BandMask>& truncation) {
  require_square(m, "flow_rhs");
  check_truncation(truncation, m);
  scheme.validate();
  const std::size_t d = static_cast<std::size_t>(m.rows());
  ComplexMatrix eta, out;
  kernels::generator(m, scheme, full_band(m), eta);
  const std::size_t eb = kernels::generator_band(scheme, full_band(m), d);
  kernels::commutator(eta, eb, m, full_band(m), band_of(truncation, m), out);
  return out;
}

ComplexMatrix observable_rhs(const ComplexMatrix& m, const ComplexMatrix& o, const GeneratorScheme& scheme) {
  require_square(m, "observable_rhs");
  if (o.rows() != m.rows() || o.cols() != m.cols()) throw DimensionMismatch("observable_rhs: dimension mismatch");
  ComplexMatrix eta, out;
  kernels::generator(m, scheme, full_band(m), eta);
  kernels::commutator(eta, kernels::generator_band(scheme, full_band(m), static_cast<std::size_t>(m.rows())), o,
                      full_band(o), full_band(o), out);
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

// Builds eta for the current M (band m_band) and reports the band of the result.
using EtaFunction = std::function<std::size_t(const ComplexMatrix& m, std::size_t m_band, ComplexMatrix& eta)>;
using StopMetric = std::function<double(const ComplexMatrix& m)>;

// M plus observables flattened into one real vector: tracked entries of M (all of them, or the band
// when truncated) followed by every entry of each observable, each as an interleaved (re, im) pair.
class FlowSystem {
 public:
  FlowSystem(Eigen::Index dim, std::size_t m_band, std::size_t n_obs, EtaFunction eta_fn)
      : d_(dim), m_band_(m_band), n_obs_(n_obs), eta_fn_(std::move(eta_fn)) {
    dense_ = m_band_ + 1 >= static_cast<std::size_t>(d_);
    if (!dense_) {
      for (Eigen::Index i = 0; i < d_; ++i) {
        for (Eigen::Index j = 0; j < d_; ++j) {
          if (static_cast<std::size_t>(std::abs(i - j)) <= m_band_) tracked_.push_back(i * d_ + j);
        }
      }
    }
    m_entries_ = dense_ ? static_cast<std::size_t>(d_ * d_) : tracked_.size();
    m_ = ComplexMatrix::Zero(d_, d_);
    dm_ = ComplexMatrix::Zero(d_, d_);
    obs_.assign(n_obs_, ComplexMatrix::Zero(d_, d_));
    dobs_.assign(n_obs_, ComplexMatrix::Zero(d_, d_));
  }

  Eigen::Index size() const {
    return static_cast<Eigen::Index>(2 * (m_entries_ + n_obs_ * static_cast<std::size_t>(d_ * d_)));
  }

  Eigen::VectorXd pack(const ComplexMatrix& m, std::span<const ComplexMatrix> obs) const {
    Eigen::VectorXd y(size());
    pack_into(m, obs, y);
    return y;
  }

  void unpack(const Eigen::VectorXd& y, ComplexMatrix& m, std::vector<ComplexMatrix>& obs) const {
    if (m.rows() != d_ || m.cols() != d_) m = ComplexMatrix::Zero(d_, d_);
    const double* p = y.data();
    if (dense_) {
      std::memcpy(static_cast<void*>(m.data()), p, sizeof(double) * 2 * m_entries_);
    } else {
      Complex* md = m.data();
      for (std::size_t k = 0; k < tracked_.size(); ++k) md[tracked_[k]] = Complex(p[2 * k], p[2 * k + 1]);
    }
    p += 2 * m_entries_;
    obs.resize(n_obs_);
    for (auto& o : obs) {
      if (o.rows() != d_ || o.cols() != d_) o.resize(d_, d_);
      std::memcpy(static_cast<void*>(o.data()), p, sizeof(double) * 2 * static_cast<std::size_t>(d_ * d_));
      p += 2 * d_ * d_;
    }
  }

  void derivative(const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
    unpack(y, m_, obs_);
    const std::size_t eb = eta_fn_(m_, m_band_, eta_);
    kernels::commutator(eta_, eb, m_, m_band_, m_band_, dm_);
    for (std::size_t k = 0; k < n_obs_; ++k) {
      kernels::commutator(eta_, eb, obs_[k], static_cast<std::size_t>(d_ - 1), static_cast<std::size_t>(d_ - 1),
                          dobs_[k]);
    }
    if (dy.size() != size()) dy.resize(size());
    pack_into(dm_, dobs_, dy);
  }

 private:
  void pack_into(const ComplexMatrix& m, std::span<const ComplexMatrix> obs, Eigen::VectorXd& y) const {
    double* p = y.data();
    if (dense_) {
      std::memcpy(p, static_cast<const void*>(m.data()), sizeof(double) * 2 * m_entries_);
    } else {
      const Complex* md = m.data();
      for (std::size_t k = 0; k < tracked_.size(); ++k) {
        p[2 * k] = md[tracked_[k]].real();
        p[2 * k + 1] = md[tracked_[k]].imag();
      }
    }
    p += 2 * m_entries_;
    for (const auto& o : obs) {
      std::memcpy(p, static_cast<const void*>(o.data()), sizeof(double) * 2 * static_cast<std::size_t>(d_ * d_));
      p += 2 * d_ * d_;
    }
  }

  Eigen::Index d_;
  std::size_t m_band_;
  std::size_t n_obs_;
  EtaFunction eta_fn_;
  bool dense_ = true;
  std::vector<Eigen::Index> tracked_;
  std::size_t m_entries_ = 0;
  ComplexMatrix m_, dm_, eta_;
  std::vector<ComplexMatrix> obs_, dobs_;
};

FlowSample make_sample(double l, double t, const ComplexMatrix& m) {
  FlowSample s;
  s.l = l;
  s.wall_time_s = t;
  s.rod = rod(m);
  s.trace = m.trace();
  Complex tr2 = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) tr2 += m(i, j) * m(j, i);
  }
  s.trace_sq = tr2;
  return s;
}

// Dormand-Prince 5(4) coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

// PI step-size control constants.
constexpr double kSafety = 0.9;
constexpr double kBeta = 0.04;
constexpr double kExpo = 0.2 - 0.75 * kBeta;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 10.0;

struct PhaseSpec {
  EtaFunction eta_fn;
  StopMetric metric;
  double l_start = 0.0;
  bool record_initial = true;
};

struct PhaseOutcome {
  double l = 0.0;
  StopReason reason = StopReason::flow_cap;
};

class Integrator {
 public:
  Integrator(const FlowConfig& cfg, Clock::time_point t0, const StepObserver& observer)
      : cfg_(cfg), t0_(t0), observer_(observer) {}

  double initial_step(const ComplexMatrix& m0) const {
    if (cfg_.initial_step) return *cfg_.initial_step;
    double scale = 1.0;
    if (auto k = cfg_.scheme.rate_exponent(); k && *k != 0.0) {
      double max_gap = 0.0;
      for (Eigen::Index i = 0; i < m0.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < m0.rows(); ++j) max_gap = std::max(max_gap, std::abs(m0(i, i) - m0(j, j)));
      }
      if (max_gap > 0.0) scale = std::max(1.0, std::pow(max_gap, *k));
    }
    return 1e-4 / scale;
  }

  // Advances (m, obs) in place and appends samples to traj.
  PhaseOutcome run(const PhaseSpec& phase, ComplexMatrix& m, std::vector<ComplexMatrix>& obs, std::size_t m_band,
                   FlowTrajectory& traj, double h0) {
    FlowSystem sys(m.rows(), m_band, obs.size(), phase.eta_fn);
    Eigen::VectorXd y = sys.pack(m, obs);
    double l = phase.l_start;
    const double stop = cfg_.rod_stop * cfg_.energy_scale;

    auto elapsed = [this] { return std::chrono::duration<double>(Clock::now() - t0_).count(); };
    auto record = [&](bool force) {
      if (force || traj.steps_taken % cfg_.record_stride == 0) {
        if (!traj.samples.empty() && traj.samples.back().l == l) return;
        traj.samples.push_back(make_sample(l, elapsed(), m));
      }
    };
    auto finish = [&](StopReason reason) {
      if (traj.samples.empty() || traj.samples.back().l != l) traj.samples.push_back(make_sample(l, elapsed(), m));
      return PhaseOutcome{l, reason};
    };
    auto fail_partial = [&]() {
      FlowTrajectory partial = traj;
      if (partial.samples.empty() || partial.samples.back().l != l) partial.samples.push_back(make_sample(l, elapsed(), m));
      partial.final_matrix = m;
      partial.final_observables = obs;
      partial.converged = false;
      return partial;
    };

    if (phase.record_initial) record(true);
    if (observer_ && phase.record_initial) observer_(l, m, obs);
    if (phase.metric(m) <= stop) return finish(StopReason::converged);

    const Eigen::Index n = y.size();
    Eigen::VectorXd k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), y_new(n), err(n);
    sys.derivative(y, k1);
    if (!k1.allFinite()) throw FlowDivergence("flow derivative is not finite at l = " + format_double(l), fail_partial());

    double h = h0;
    double facold = 1e-4;
    bool last_rejected = false;

    while (true) {
      if (l >= cfg_.l_max_cap) return finish(StopReason::flow_cap);
      if (cfg_.max_steps != 0 && traj.steps_taken >= cfg_.max_steps) return finish(StopReason::step_budget);
      const double remaining = cfg_.l_max_cap - l;
      if (remaining < kMinStepSize) {
        l = cfg_.l_max_cap;
        return finish(StopReason::flow_cap);
      }
      h = std::min(h, remaining);
      if (h < kMinStepSize) {
        throw StepSizeUnderflow("step size " + format_double(h) + " fell below " + format_double(kMinStepSize) +
                                    " at l = " + format_double(l),
                                fail_partial());
      }

      tmp = y + h * (a21 * k1);
      sys.derivative(tmp, k2);
      tmp = y + h * (a31 * k1 + a32 * k2);
      sys.derivative(tmp, k3);
      tmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
      sys.derivative(tmp, k4);
      tmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
      sys.derivative(tmp, k5);
      tmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
      sys.derivative(tmp, k6);
      y_new = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
      if (!y_new.allFinite()) {
        throw FlowDivergence("non-finite flow state at l = " + format_double(l + h), fail_partial());
      }
      sys.derivative(y_new, k7);
      err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

      double err_norm = 0.0;
      for (Eigen::Index k = 0; k < n; ++k) {
        const double sk = cfg_.abs_tol + cfg_.rel_tol * std::max(std::abs(y[k]), std::abs(y_new[k]));
        err_norm = std::max(err_norm, std::abs(err[k]) / sk);
      }
      if (!std::isfinite(err_norm) || !k7.allFinite()) {
        h *= kMinFactor;
        ++traj.steps_rejected;
        last_rejected = true;
        continue;
      }

      const double fac11 = std::pow(err_norm, kExpo);
      if (err_norm <= 1.0) {
        double fac = fac11 / std::pow(facold, kBeta);
        fac = std::clamp(fac / kSafety, 1.0 / kMaxFactor, 1.0 / kMinFactor);
        double h_new = h / fac;
        if (last_rejected) h_new = std::min(h_new, h);
        facold = std::max(err_norm, 1e-4);
        l += h;
        y.swap(y_new);
        k1.swap(k7);
        ++traj.steps_taken;
        last_rejected = false;
        sys.unpack(y, m, obs);
        record(false);
        if (observer_) observer_(l, m, obs);
        if (phase.metric(m) <= stop) return finish(StopReason::converged);
        h = h_new;
      } else {
        h /= std::min(1.0 / kMinFactor, fac11 / kSafety);
        ++traj.steps_rejected;
        last_rejected = true;
      }
    }
  }

 private:
  const FlowConfig& cfg_;
  Clock::time_point t0_;
  const StepObserver& observer_;
};

EtaFunction scheme_eta(const GeneratorScheme& scheme, std::size_t dim) {
  return [scheme, dim](const ComplexMatrix& m, std::size_t band, ComplexMatrix& eta) {
    kernels::generator(m, scheme, band, eta);
    return kernels::generator_band(scheme, band, dim);
  };
}

void check_inputs(const ComplexMatrix& m0, std::span<const ComplexMatrix> observables, const FlowConfig& cfg) {
  cfg.validate();
  require_square(m0, "integrate_flow");
  require_finite(m0, "integrate_flow");
  if (m0.rows() == 0) throw InvalidInput("integrate_flow: empty matrix");
  check_truncation(cfg.truncation, m0);
  for (const auto& o : observables) {
    if (o.rows() != m0.rows() || o.cols() != m0.cols()) {
      throw DimensionMismatch("integrate_flow: observable dimension does not match M");
    }
    require_finite(o, "integrate_flow observable");
  }
}

}  // namespace

FlowTrajectory integrate_flow(const ComplexMatrix& m0, std::span<const ComplexMatrix> observables,
                              const FlowConfig& cfg, const StepObserver& observer) {
  check_inputs(m0, observables, cfg);
  const auto t0 = Clock::now();
  const std::size_t band = band_of(cfg.truncation, m0);
  ComplexMatrix m = cfg.truncation ? apply_band_mask(m0, *cfg.truncation) : m0;
  std::vector<ComplexMatrix> obs(observables.begin(), observables.end());

  FlowTrajectory traj;
  Integrator integrator(cfg, t0, observer);
  PhaseSpec phase{scheme_eta(cfg.scheme, static_cast<std::size_t>(m.rows())), [](const ComplexMatrix& x) { return rod(x); }};
  auto outcome = integrator.run(phase, m, obs, band, traj, integrator.initial_step(m));
  traj.stop_reason = outcome.reason;
  traj.converged = outcome.reason == StopReason::converged;
  traj.final_matrix = std::move(m);
  traj.final_observables = std::move(obs);
  return traj;
}

FlowTrajectory alternating_pc_ipc_flow(const ComplexMatrix& m0, const FlowConfig& cfg) {
  check_inputs(m0, {}, cfg);
  const auto t0 = Clock::now();
  const std::size_t dim = static_cast<std::size_t>(m0.rows());
  const std::size_t band = band_of(cfg.truncation, m0);
  ComplexMatrix m = cfg.truncation ? apply_band_mask(m0, *cfg.truncation) : m0;
  std::vector<ComplexMatrix> obs;

  auto split_eta = [dim](GeneratorScheme scheme, bool antihermitian_part) -> EtaFunction {
    return [=](const ComplexMatrix& x, std::size_t b, ComplexMatrix& eta) {
      const ComplexMatrix part = antihermitian_part ? ComplexMatrix(0.5 * (x - x.adjoint())) : ComplexMatrix(0.5 * (x + x.adjoint()));
      kernels::generator(part, scheme, b, eta);
      return kernels::generator_band(scheme, b, dim);
    };
  };
  auto part_rod = [](bool antihermitian_part) -> StopMetric {
    return [=](const ComplexMatrix& x) {
      return rod(antihermitian_part ? ComplexMatrix(0.5 * (x - x.adjoint())) : ComplexMatrix(0.5 * (x + x.adjoint())));
    };
  };

  FlowTrajectory traj;
  const StepObserver no_observer;
  Integrator integrator(cfg, t0, no_observer);
  const double h0 = integrator.initial_step(m);
  PhaseSpec ipc_phase{split_eta(GeneratorScheme::ipc(), true), part_rod(true), 0.0, true};
  auto first = integrator.run(ipc_phase, m, obs, band, traj, h0);
  StopReason reason = first.reason;
  if (first.reason == StopReason::converged) {
    PhaseSpec pc_phase{split_eta(GeneratorScheme::pc(), false), part_rod(false), first.l, false};
    reason = integrator.run(pc_phase, m, obs, band, traj, h0).reason;
  }
  traj.converged = reason == StopReason::converged && rod(m) <= cfg.rod_stop * cfg.energy_scale;
  traj.stop_reason = traj.converged ? StopReason::converged : (reason == StopReason::converged ? StopReason::flow_cap : reason);
  traj.final_matrix = std::move(m);
  return traj;
}

std::string trajectory_csv(const FlowTrajectory& traj) {
  std::string out = "l,t_wall,rod,tr_re,tr_im,tr2_re,tr2_im\n";
  for (const auto& s : traj.samples) {
    out += format_double(s.l) + ',' + format_double(s.wall_time_s) + ',' + format_double(s.rod) + ',' +
           format_double(s.trace.real()) + ',' + format_double(s.trace.imag()) + ',' + format_double(s.trace_sq.real()) +
           ',' + format_double(s.trace_sq.imag()) + '\n';
  }
  return out;
}

void write_trajectory_csv(const std::filesystem::path& path, const FlowTrajectory& traj) {
  write_text_file(path, trajectory_csv(traj));
}

FlowConfig flow_config_from_json(const nlohmann::json& j, std::size_t dim) {
  FlowConfig cfg;
  if (j.is_null()) return cfg;
  if (!j.is_object()) throw ConfigError("flow config must be an object");
  static const std::set<std::string> known = {"abs_tol",       "rel_tol",    "rod_stop",        "energy_scale",
                                              "l_max_cap",     "max_steps",  "truncation_order", "record_stride",
                                              "initial_step"};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw ConfigError("flow config: unknown key '" + key + "'");
  }
  try {
    cfg.abs_tol = j.value("abs_tol", cfg.abs_tol);
    cfg.rel_tol = j.value("rel_tol", cfg.rel_tol);
    cfg.rod_stop = j.value("rod_stop", cfg.rod_stop);
    cfg.energy_scale = j.value("energy_scale", cfg.energy_scale);
    cfg.l_max_cap = j.value("l_max_cap", cfg.l_max_cap);
    cfg.max_steps = j.value("max_steps", cfg.max_steps);
    cfg.record_stride = j.value("record_stride", cfg.record_stride);
    if (j.contains("initial_step")) cfg.initial_step = j.at("initial_step").get<double>();
    if (j.contains("truncation_order") && !j.at("truncation_order").is_null()) {
      cfg.truncation = BandMask(j.at("truncation_order").get<std::size_t>(), dim);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("flow config: ") + e.what());
  }
  return cfg;
}

nlohmann::json flow_config_to_json(const FlowConfig& cfg) {
  nlohmann::json j = {{"abs_tol", cfg.abs_tol},     {"rel_tol", cfg.rel_tol},         {"rod_stop", cfg.rod_stop},
                      {"energy_scale", cfg.energy_scale}, {"l_max_cap", cfg.l_max_cap}, {"max_steps", cfg.max_steps},
                      {"record_stride", cfg.record_stride}};
  if (cfg.truncation) j["truncation_order"] = cfg.truncation->order();
  if (cfg.initial_step) j["initial_step"] = *cfg.initial_step;
  return j;
}

}  // namespace dflow
