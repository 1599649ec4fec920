#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dflow/errors.hpp"
#include "dflow/flow.hpp"
#include "dflow/models.hpp"
#include "test_util.hpp"

using namespace dflow;
using dflow::testing::max_abs;
using dflow::testing::max_abs_diff;

namespace {
const Complex I(0.0, 1.0);
}

TEST_CASE("single-mode matrix") {
  ComplexMatrix expected(2, 2);
  expected << 1.0 - 0.1 * I, 0.1, -0.3, 1.0 + 0.1 * I;
  CHECK(max_abs_diff(build_single_mode({1.0, 0.3, 0.1}), expected) < 1e-16);
  CHECK(build_single_mode({0.0, 0.4, 0.4})(0, 0).imag() == 0.0);
  const ComplexMatrix g0 = build_single_mode({0.0, 1.0, 0.0});
  CHECK(g0(0, 1) == Complex(0.0));
  CHECK(g0(0, 0).imag() == -0.5);
  CHECK_THROWS_AS(build_single_mode({0.0, -1.0, 0.0}), InvalidInput);
}

TEST_CASE("ordered scattering matrix") {
  const OrderedScatteringSpec spec{5, 1.5, 3.0, 2.0 * std::numbers::pi};
  const ComplexMatrix m = build_ordered_scattering(spec);
  REQUIRE(m.rows() == 11);
  const Complex off = -I * spec.gamma / (2.0 * spec.L);
  for (Eigen::Index i = 0; i < 11; ++i) {
    for (Eigen::Index j = 0; j < 11; ++j) {
      if (i != j) REQUIRE(std::abs(m(i, j) - off) < 1e-16);
    }
    CHECK(std::abs(m(i, i).real() - spec.v * (2.0 * std::numbers::pi / spec.L) * static_cast<double>(i - 5)) < 1e-14);
    CHECK(std::abs(m(i, i).imag() - off.imag()) < 1e-16);
  }
  CHECK(m(5, 5).real() == 0.0);

  const ComplexMatrix free = build_ordered_scattering({5, 1.0, 0.0});
  CHECK(rod(free) == 0.0);
  const auto traj = integrate_flow(free, FlowConfig{});
  CHECK(traj.converged);
  CHECK(traj.steps_taken == 0);
  CHECK(band_edge(spec) == doctest::Approx(spec.v * 5.0));
}

TEST_CASE("ordered scattering symmetries survive the gpc flow") {
  const std::size_t N = 10, D = 2 * N + 1;
  const ComplexMatrix m0 = build_ordered_scattering({N, 1.0, 6.0});
  auto asymmetry = [D](const ComplexMatrix& m) {
    double worst = 0.0;
    for (std::size_t i = 0; i < D; ++i) {
      for (std::size_t j = 0; j < D; ++j) {
        worst = std::max(worst, std::abs(m(i, j) - m(j, i)));
        worst = std::max(worst, std::abs(m(i, j) + std::conj(m(D - 1 - i, D - 1 - j))));
      }
    }
    return worst;
  };
  CHECK(asymmetry(m0) == 0.0);
  double worst = 0.0;
  const StepObserver watch = [&](double, const ComplexMatrix& m, std::span<const ComplexMatrix>) {
    worst = std::max(worst, asymmetry(m));
  };
  const auto traj = integrate_flow(m0, {}, FlowConfig{}, watch);
  CHECK(traj.converged);
  CHECK(worst <= 1e-8);
}

TEST_CASE("disordered scattering matrix") {
  const DisorderedScatteringSpec spec{8, 0.7, 0.0, 2.0, 1};
  const ComplexMatrix m = build_disordered_scattering(spec);
  CHECK(m(0, 0) == Complex(0.0, -1.0));
  for (Eigen::Index i = 1; i < 8; ++i) CHECK(m(i, i) == Complex(0.0));
  CHECK(m(0, 7) == Complex(-0.7));
  CHECK(m(7, 0) == Complex(-0.7));
  CHECK(m(3, 4) == Complex(-0.7));
  CHECK(m(4, 3) == Complex(-0.7));
  CHECK(m(2, 5) == Complex(0.0));

  const DisorderedScatteringSpec rough{30, 1.0, 1.0, 5.0, 9};
  const ComplexMatrix a = build_disordered_scattering(rough);
  CHECK(max_abs_diff(a, build_disordered_scattering(rough)) == 0.0);
  DisorderedScatteringSpec other = rough;
  other.seed = 10;
  CHECK(max_abs_diff(a, build_disordered_scattering(other)) > 0.0);
  for (Eigen::Index i = 1; i < 30; ++i) {
    CHECK(std::abs(a(i, i).real()) <= 1.0);
    CHECK(a(i, i).imag() == 0.0);
  }
  CHECK_THROWS_AS(build_disordered_scattering({2, 1.0, 1.0, 1.0, 0}), InvalidInput);
}

TEST_CASE("disordered model develops a strongly dissipative state for gamma >= 4J") {
  for (double gamma : {4.0, 6.0, 10.0}) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const Spectrum s = eigenvalues(build_disordered_scattering({40, 1.0, 1.0, gamma, seed}));
      std::vector<double> im;
      for (Complex l : s) im.push_back(std::abs(l.imag()));
      std::sort(im.begin(), im.end());
      const double median = 0.5 * (im[19] + im[20]);
      CAPTURE(gamma);
      CAPTURE(seed);
      CHECK(im.back() >= 3.0 * median);
      if (gamma >= 6.0) CHECK(im.back() >= 2.0 * im[im.size() - 2]);
      for (Complex l : s) CHECK(l.imag() <= 1e-12);
    }
  }
}

TEST_CASE("random crossover matrices") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ComplexMatrix h = sample_random_crossover({9, 0.0, seed});
    const ComplexMatrix a = sample_random_crossover({9, 1.0, seed});
    const ComplexMatrix r = sample_random_crossover({9, 0.5, seed});
    CHECK(max_abs_diff(h, h.adjoint()) <= 1e-15);
    CHECK(max_abs_diff(a, -a.adjoint()) <= 1e-15);
    CHECK(max_abs_diff(r, (h + a) / 2.0) <= 1e-15);
    CHECK(r.real().cwiseAbs().maxCoeff() <= 1.0);
    CHECK(r.imag().cwiseAbs().maxCoeff() <= 1.0);
  }
  CHECK_THROWS_AS(sample_random_crossover({4, 1.5, 0}), InvalidInput);
}

TEST_CASE("ordered diagonal recipe") {
  const ComplexMatrix base = sample_random_crossover({12, 0.3, 4});
  for (double alpha : {0.0, 0.4, 1.0}) {
    const ComplexMatrix m = impose_ordered_diagonal(base, alpha, 4);
    const Complex dir = std::polar(1.0, alpha * std::numbers::pi / 2.0);
    CHECK(max_abs_diff(off_diagonal_part(m), off_diagonal_part(base)) == 0.0);
    for (Eigen::Index i = 0; i < 12; ++i) {
      const Complex along = m(i, i) / dir;
      CHECK(std::abs(along.imag()) < 1e-14);
      if (i > 0) CHECK(((m(i, i) - m(i - 1, i - 1)) / dir).real() > 0.0);
      if (i > 0) CHECK(std::abs(m(i, i)) > std::abs(m(i - 1, i - 1)));
    }
  }
  const ComplexMatrix real_diag = impose_ordered_diagonal(base, 0.0, 4);
  for (Eigen::Index i = 0; i < 12; ++i) CHECK(real_diag(i, i).imag() == 0.0);
  const ComplexMatrix imag_diag = impose_ordered_diagonal(base, 1.0, 4);
  for (Eigen::Index i = 0; i < 12; ++i) CHECK(std::abs(imag_diag(i, i).real()) < 1e-15);
}

TEST_CASE("prepare_truncated") {
  const ComplexMatrix m = dflow::testing::random_matrix(4, 3);
  CHECK(max_abs_diff(prepare_truncated(m, 1.0, 3), m) == 0.0);
  const double lambda = 0.3;
  const ComplexMatrix p = prepare_truncated(m, lambda, 2);
  CHECK(p(0, 3) == Complex(0.0));
  CHECK(p(3, 0) == Complex(0.0));
  CHECK(std::abs(p(0, 2) - lambda * lambda * m(0, 2)) < 1e-16);
  CHECK(std::abs(p(2, 1) - lambda * m(2, 1)) < 1e-16);
  CHECK(p(1, 1) == m(1, 1));
  CHECK(std::abs(prepare_truncated(m, 0.1, 1)(0, 1) - 0.1 * m(0, 1)) < 1e-16);
  const ComplexMatrix once = prepare_truncated(m, 1.0, 1);
  CHECK(max_abs_diff(prepare_truncated(once, 1.0, 1), once) == 0.0);
  CHECK_THROWS_AS(prepare_truncated(m, 0.0, 1), InvalidInput);
  CHECK_THROWS_AS(prepare_truncated(m, 1.1, 1), InvalidInput);
}

TEST_CASE("strongly dissipative state reference formula") {
  CHECK(std::abs(lambda_sds_reference({100, 1.0, 4.0})) < 1e-15);
  CHECK_THROWS_AS(lambda_sds_reference({100, 1.0, 3.0}), NotApplicable);
  const double near = std::abs(lambda_sds_reference({100, 1.0, 4.0001}));
  const double far = std::abs(lambda_sds_reference({100, 1.0, 1e6}));
  CHECK(far > 1e3 * near);

  const OrderedScatteringSpec spec{100, 1.0, 8.0};
  const Spectrum s = eigenvalues(build_ordered_scattering(spec));
  const auto rep = find_dissipative_state(s, 1e-6 * band_edge(spec), 10.0);
  REQUIRE(rep.found);
  const double ed = std::abs(rep.eigenvalue.imag());
  const double closed = std::abs(lambda_sds_reference(spec));
  MESSAGE("gamma/v = 8, N = 100: |Im| exact " << ed << ", tan formula " << closed);
  CHECK(ed > 0.0);
}

TEST_CASE("find_dissipative_state") {
  const Spectrum s = {Complex(1.0, -0.1), Complex(0.0, -5.0), Complex(-1.0, -0.2)};
  const auto rep = find_dissipative_state(s, 1e-6, 10.0);
  CHECK(rep.found);
  CHECK(rep.eigenvalue == Complex(0.0, -5.0));
  CHECK(rep.dominance == doctest::Approx(25.0));
  CHECK_FALSE(find_dissipative_state(s, 1e-6, 30.0).found);
  CHECK_FALSE(find_dissipative_state({Complex(1.0, -5.0), Complex(0.0, -1.0)}, 1e-6, 2.0).found);
}

TEST_CASE("model specs round-trip through JSON") {
  const std::vector<ModelSpec> specs = {
      SingleModeSpec{0.5, 0.3, 0.2},
      OrderedScatteringSpec{7, 2.0, 9.0, 3.0},
      DisorderedScatteringSpec{12, 1.0, 0.5, 4.0, 33},
      RandomCrossoverSpec{10, 0.25, 7, false},
      RandomCrossoverSpec{10, 0.75, 8, true},
      LindbladSpec{3, 5, true},
  };
  for (const auto& spec : specs) {
    const auto j = model_to_json(spec);
    CAPTURE(j.dump());
    const ModelSpec back = model_from_json(j);
    CHECK(model_kind(back) == model_kind(spec));
    CHECK(max_abs_diff(build_model(back), build_model(spec)) == 0.0);
    CHECK(model_dimension(spec) == static_cast<std::size_t>(build_model(spec).rows()));
  }
  CHECK(model_kind(model_from_json(nlohmann::json{{"kind", "ordered_random"}, {"D", 4}, {"alpha", 0.2}})) ==
        "ordered_random");
  CHECK_THROWS_AS(model_from_json(nlohmann::json{{"kind", "single_mode"}, {"gamma1", 1}, {"gamma2", 0}, {"eps", 1}}),
                  ConfigError);
  CHECK_THROWS_AS(model_from_json(nlohmann::json{{"kind", "kicked_rotor"}}), ConfigError);
  CHECK_THROWS_AS(model_from_json(nlohmann::json{{"kind", "random_crossover"}, {"alpha", 0.2}}), ConfigError);

  const ModelSpec reseeded = with_seed(DisorderedScatteringSpec{12, 1.0, 0.5, 4.0, 33}, 99);
  CHECK(std::get<DisorderedScatteringSpec>(reseeded).seed == 99);
  const ModelSpec untouched = with_seed(SingleModeSpec{0.5, 0.3, 0.2}, 99);
  CHECK(std::get<SingleModeSpec>(untouched).gamma1 == 0.3);

  RandomCrossoverSpec prepared{10, 0.5, 1, true, 0.2, 1};
  CHECK(max_abs_diff(build_model(prepared),
                     prepare_truncated(sample_random_crossover({10, 0.5, 1, true}), 0.2, 1)) == 0.0);
}
