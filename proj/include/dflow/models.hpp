#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include <json.hpp>

#include "dflow/linalg.hpp"
#include "dflow/lindblad.hpp"

namespace dflow {

struct SingleModeSpec {
  double epsilon = 0.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
};

// Index n runs over [-N, N]; D = 2N + 1.
struct OrderedScatteringSpec {
  std::size_t N = 1;
  double v = 1.0;
  double gamma = 0.0;
  double L = 6.283185307179586;
};

struct DisorderedScatteringSpec {
  std::size_t N_sites = 3;
  double J_hop = 1.0;
  double W = 1.0;
  double gamma = 0.0;
  std::uint64_t seed = 0;
};

// ordered_diagonal=true is the "ordered random" family.
struct RandomCrossoverSpec {
  std::size_t D = 2;
  double alpha = 0.5;
  std::uint64_t seed = 0;
  bool ordered_diagonal = false;
  std::optional<double> lambda_expansion{};
  std::optional<std::size_t> truncation_order{};
};

using ModelSpec =
    std::variant<SingleModeSpec, OrderedScatteringSpec, DisorderedScatteringSpec, RandomCrossoverSpec, LindbladSpec>;

ComplexMatrix build_single_mode(const SingleModeSpec& spec);
ComplexMatrix build_ordered_scattering(const OrderedScatteringSpec& spec);
ComplexMatrix build_disordered_scattering(const DisorderedScatteringSpec& spec);
ComplexMatrix sample_random_crossover(const RandomCrossoverSpec& spec);
ComplexMatrix impose_ordered_diagonal(const ComplexMatrix& m, double alpha, std::uint64_t seed);
ComplexMatrix prepare_truncated(const ComplexMatrix& m, double lambda, std::size_t n_max);

// lambda_expansion / truncation_order of a crossover spec are applied here through prepare_truncated.
ComplexMatrix build_model(const ModelSpec& spec);
std::size_t model_dimension(const ModelSpec& spec);

// Largest |Re| band scale Lambda_N = v (2 pi / L) N.
double band_edge(const OrderedScatteringSpec& spec);
Complex lambda_sds_reference(const OrderedScatteringSpec& spec);

struct DissipativeStateReport {
  bool found = false;
  Complex eigenvalue;
  double dominance = 0.0;  // |Im| of the candidate over the next largest |Im|
  std::size_t index = 0;
};

// The eigenvalue with maximal |Im| among those with |Re| < re_tolerance; `found` requires the
// candidate's |Im| to exceed min_dominance times every other |Im|.
DissipativeStateReport find_dissipative_state(const Spectrum& s, double re_tolerance, double min_dominance);

std::string model_kind(const ModelSpec& spec);
ModelSpec model_from_json(const nlohmann::json& j);
nlohmann::json model_to_json(const ModelSpec& spec);
ModelSpec with_seed(const ModelSpec& spec, std::uint64_t seed);

}  // namespace dflow
