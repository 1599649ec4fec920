#include "dflow/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include "dflow/rng.hpp"

namespace dflow {

namespace {

void require_rate(double g, const char* name) {
  if (!(g >= 0.0) || !std::isfinite(g)) throw InvalidInput(std::string(name) + " must be finite and >= 0");
}

}  // namespace

ComplexMatrix build_single_mode(const SingleModeSpec& spec) {
  require_rate(spec.gamma1, "gamma1");
  require_rate(spec.gamma2, "gamma2");
  if (!std::isfinite(spec.epsilon)) throw InvalidInput("epsilon must be finite");
  const double alpha = -(spec.gamma1 - spec.gamma2) / 2.0;
  ComplexMatrix m(2, 2);
  m(0, 0) = Complex(spec.epsilon, alpha);
  m(0, 1) = spec.gamma2;
  m(1, 0) = -spec.gamma1;
  m(1, 1) = Complex(spec.epsilon, -alpha);
  return m;
}

double band_edge(const OrderedScatteringSpec& spec) {
  return spec.v * (2.0 * std::numbers::pi / spec.L) * static_cast<double>(spec.N);
}

ComplexMatrix build_ordered_scattering(const OrderedScatteringSpec& spec) {
  if (spec.N < 1) throw InvalidInput("ordered scattering: N must be >= 1");
  if (!(spec.L > 0.0)) throw InvalidInput("ordered scattering: L must be > 0");
  require_rate(spec.gamma, "gamma");
  const auto d = static_cast<Eigen::Index>(2 * spec.N + 1);
  const Complex coupling(0.0, -spec.gamma / (2.0 * spec.L));
  ComplexMatrix m = ComplexMatrix::Constant(d, d, coupling);
  const double spacing = spec.v * 2.0 * std::numbers::pi / spec.L;
  for (Eigen::Index k = 0; k < d; ++k) {
    const double n = static_cast<double>(k) - static_cast<double>(spec.N);
    m(k, k) += spacing * n;
  }
  return m;
}

ComplexMatrix build_disordered_scattering(const DisorderedScatteringSpec& spec) {
  if (spec.N_sites < 3) throw InvalidInput("disordered scattering: N_sites must be >= 3");
  require_rate(spec.gamma, "gamma");
  if (!(spec.W >= 0.0)) throw InvalidInput("disordered scattering: W must be >= 0");
  const auto d = static_cast<Eigen::Index>(spec.N_sites);
  const CounterRng rng(spec.seed, stream::disorder);
  ComplexMatrix m = ComplexMatrix::Zero(d, d);
  for (Eigen::Index n = 0; n < d; ++n) m(n, n) = rng.uniform(static_cast<std::uint64_t>(n), -spec.W, spec.W);
  m(0, 0) += Complex(0.0, -spec.gamma / 2.0);
  const Complex hop(-spec.J_hop, 0.0);
  for (Eigen::Index n = 0; n < d; ++n) {
    const Eigen::Index next = (n + 1) % d;
    m(n, next) = hop;
    m(next, n) = hop;
  }
  return m;
}

ComplexMatrix sample_random_crossover(const RandomCrossoverSpec& spec) {
  if (spec.D < 1) throw InvalidInput("random crossover: D must be >= 1");
  if (!(spec.alpha >= 0.0 && spec.alpha <= 1.0)) throw InvalidInput("random crossover: alpha must lie in [0, 1]");
  const auto d = static_cast<Eigen::Index>(spec.D);
  const CounterRng rng(spec.seed, stream::crossover);
  ComplexMatrix r(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const auto key = static_cast<std::uint64_t>(i * d + j);
      r(i, j) = Complex(rng.uniform(2 * key, -1.0, 1.0), rng.uniform(2 * key + 1, -1.0, 1.0));
    }
  }
  ComplexMatrix m = r + (1.0 - 2.0 * spec.alpha) * r.adjoint();
  if (spec.ordered_diagonal) m = impose_ordered_diagonal(m, spec.alpha, spec.seed);
  return m;
}

ComplexMatrix impose_ordered_diagonal(const ComplexMatrix& m, double alpha, std::uint64_t seed) {
  require_square(m, "impose_ordered_diagonal");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidInput("impose_ordered_diagonal: alpha must lie in [0, 1]");
  const CounterRng rng(seed, stream::ordered_diagonal);
  const double angle = alpha * std::numbers::pi / 2.0;
  const Complex direction(std::cos(angle), std::sin(angle));
  ComplexMatrix out = m;
  double position = 0.0;
  for (Eigen::Index n = 0; n < out.rows(); ++n) {
    position += rng.uniform(static_cast<std::uint64_t>(n));
    out(n, n) = direction * position;
  }
  return out;
}

ComplexMatrix prepare_truncated(const ComplexMatrix& m, double lambda, std::size_t n_max) {
  require_square(m, "prepare_truncated");
  if (!(lambda > 0.0 && lambda <= 1.0)) throw InvalidInput("prepare_truncated: lambda must lie in (0, 1]");
  const Eigen::Index d = m.rows();
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const auto dist = static_cast<std::size_t>(std::abs(i - j));
      if (dist <= n_max) out(i, j) = m(i, j) * std::pow(lambda, static_cast<double>(dist));
    }
  }
  return out;
}

Complex lambda_sds_reference(const OrderedScatteringSpec& spec) {
  if (!(spec.gamma >= 4.0 * spec.v)) {
    throw NotApplicable("lambda_sds_reference: requires gamma >= 4 v (gamma = " + std::to_string(spec.gamma) +
                        ", v = " + std::to_string(spec.v) + ")");
  }
  const double arg = (std::numbers::pi / 2.0) * (4.0 * spec.v / spec.gamma - 1.0);
  return Complex(0.0, -band_edge(spec) * std::tan(arg));
}

DissipativeStateReport find_dissipative_state(const Spectrum& s, double re_tolerance, double min_dominance) {
  DissipativeStateReport rep;
  if (s.empty()) return rep;
  std::size_t best = s.size();
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (std::abs(s[k].real()) >= re_tolerance) continue;
    if (best == s.size() || std::abs(s[k].imag()) > std::abs(s[best].imag())) best = k;
  }
  if (best == s.size()) return rep;
  double runner_up = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (k != best) runner_up = std::max(runner_up, std::abs(s[k].imag()));
  }
  rep.eigenvalue = s[best];
  rep.index = best;
  const double top = std::abs(s[best].imag());
  rep.dominance = runner_up > 0.0 ? top / runner_up : (top > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  rep.found = rep.dominance >= min_dominance;
  return rep;
}

ComplexMatrix build_model(const ModelSpec& spec) {
  return std::visit(
      [](const auto& s) -> ComplexMatrix {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, SingleModeSpec>) {
          return build_single_mode(s);
        } else if constexpr (std::is_same_v<T, OrderedScatteringSpec>) {
          return build_ordered_scattering(s);
        } else if constexpr (std::is_same_v<T, DisorderedScatteringSpec>) {
          return build_disordered_scattering(s);
        } else if constexpr (std::is_same_v<T, RandomCrossoverSpec>) {
          ComplexMatrix m = sample_random_crossover(s);
          if (s.lambda_expansion || s.truncation_order) {
            m = prepare_truncated(m, s.lambda_expansion.value_or(1.0),
                                  s.truncation_order.value_or(s.D > 0 ? s.D - 1 : 0));
          }
          return m;
        } else {
          return build_superoperator(s);
        }
      },
      spec);
}

std::size_t model_dimension(const ModelSpec& spec) {
  return std::visit(
      [](const auto& s) -> std::size_t {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, SingleModeSpec>) {
          return 2;
        } else if constexpr (std::is_same_v<T, OrderedScatteringSpec>) {
          return 2 * s.N + 1;
        } else if constexpr (std::is_same_v<T, DisorderedScatteringSpec>) {
          return s.N_sites;
        } else if constexpr (std::is_same_v<T, RandomCrossoverSpec>) {
          return s.D;
        } else {
          return s.N * s.N;
        }
      },
      spec);
}

std::string model_kind(const ModelSpec& spec) {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, SingleModeSpec>) {
          return "single_mode";
        } else if constexpr (std::is_same_v<T, OrderedScatteringSpec>) {
          return "ordered_scattering";
        } else if constexpr (std::is_same_v<T, DisorderedScatteringSpec>) {
          return "disordered_scattering";
        } else if constexpr (std::is_same_v<T, RandomCrossoverSpec>) {
          return s.ordered_diagonal ? "ordered_random" : "random_crossover";
        } else {
          return "lindblad";
        }
      },
      spec);
}

namespace {

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known, const std::string& kind) {
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw ConfigError("model '" + kind + "': unknown key '" + key + "'");
  }
}

}  // namespace

ModelSpec model_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
    throw ConfigError("model must be an object with a string 'kind'");
  }
  const std::string kind = j.at("kind").get<std::string>();
  try {
    if (kind == "single_mode") {
      reject_unknown(j, {"kind", "epsilon", "gamma1", "gamma2"}, kind);
      SingleModeSpec s;
      s.epsilon = j.value("epsilon", 0.0);
      s.gamma1 = j.at("gamma1").get<double>();
      s.gamma2 = j.at("gamma2").get<double>();
      return s;
    }
    if (kind == "ordered_scattering") {
      reject_unknown(j, {"kind", "N", "v", "gamma", "L"}, kind);
      OrderedScatteringSpec s;
      s.N = j.at("N").get<std::size_t>();
      s.v = j.value("v", s.v);
      s.gamma = j.at("gamma").get<double>();
      s.L = j.value("L", s.L);
      return s;
    }
    if (kind == "disordered_scattering") {
      reject_unknown(j, {"kind", "N_sites", "J", "W", "gamma", "seed"}, kind);
      DisorderedScatteringSpec s;
      s.N_sites = j.at("N_sites").get<std::size_t>();
      s.J_hop = j.value("J", s.J_hop);
      s.W = j.value("W", s.W);
      s.gamma = j.at("gamma").get<double>();
      s.seed = j.value("seed", std::uint64_t{0});
      return s;
    }
    if (kind == "random_crossover" || kind == "ordered_random") {
      reject_unknown(j, {"kind", "D", "alpha", "seed", "lambda", "truncation_order"}, kind);
      RandomCrossoverSpec s;
      s.D = j.at("D").get<std::size_t>();
      s.alpha = j.at("alpha").get<double>();
      s.seed = j.value("seed", std::uint64_t{0});
      s.ordered_diagonal = kind == "ordered_random";
      if (j.contains("lambda")) s.lambda_expansion = j.at("lambda").get<double>();
      if (j.contains("truncation_order")) s.truncation_order = j.at("truncation_order").get<std::size_t>();
      return s;
    }
    if (kind == "lindblad") {
      reject_unknown(j, {"kind", "N", "seed", "include_hamiltonian"}, kind);
      LindbladSpec s;
      s.N = j.at("N").get<std::size_t>();
      s.seed = j.value("seed", std::uint64_t{0});
      s.include_hamiltonian = j.value("include_hamiltonian", false);
      return s;
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("model '" + kind + "': " + e.what());
  }
  throw ConfigError("unknown model kind '" + kind + "'");
}

nlohmann::json model_to_json(const ModelSpec& spec) {
  return std::visit(
      [&spec](const auto& s) -> nlohmann::json {
        using T = std::decay_t<decltype(s)>;
        nlohmann::json j = {{"kind", model_kind(spec)}};
        if constexpr (std::is_same_v<T, SingleModeSpec>) {
          j["epsilon"] = s.epsilon;
          j["gamma1"] = s.gamma1;
          j["gamma2"] = s.gamma2;
        } else if constexpr (std::is_same_v<T, OrderedScatteringSpec>) {
          j["N"] = s.N;
          j["v"] = s.v;
          j["gamma"] = s.gamma;
          j["L"] = s.L;
        } else if constexpr (std::is_same_v<T, DisorderedScatteringSpec>) {
          j["N_sites"] = s.N_sites;
          j["J"] = s.J_hop;
          j["W"] = s.W;
          j["gamma"] = s.gamma;
          j["seed"] = s.seed;
        } else if constexpr (std::is_same_v<T, RandomCrossoverSpec>) {
          j["D"] = s.D;
          j["alpha"] = s.alpha;
          j["seed"] = s.seed;
          if (s.lambda_expansion) j["lambda"] = *s.lambda_expansion;
          if (s.truncation_order) j["truncation_order"] = *s.truncation_order;
        } else {
          j["N"] = s.N;
          j["seed"] = s.seed;
          j["include_hamiltonian"] = s.include_hamiltonian;
        }
        return j;
      },
      spec);
}

ModelSpec with_seed(const ModelSpec& spec, std::uint64_t seed) {
  ModelSpec out = spec;
  std::visit(
      [seed](auto& s) {
        if constexpr (requires { s.seed; }) s.seed = seed;
      },
      out);
  return out;
}

}  // namespace dflow
