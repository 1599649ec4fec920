#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "dflow/errors.hpp"
#include "dflow/linalg.hpp"
#include "dflow/matrix_io.hpp"
#include "test_util.hpp"

using namespace dflow;
using dflow::testing::max_abs_diff;
using dflow::testing::random_matrix;

namespace {
const Complex I(0.0, 1.0);

ComplexMatrix mat2(Complex a, Complex b, Complex c, Complex d) {
  ComplexMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}
}  // namespace

TEST_CASE("hermitian_split examples") {
  const ComplexMatrix m = mat2(1.0, 1.0 + I, 0.0, I);
  const auto [h, a] = hermitian_split(m);
  CHECK(max_abs_diff(h, mat2(1.0, (1.0 + I) / 2.0, (1.0 - I) / 2.0, 0.0)) < 1e-15);
  CHECK(max_abs_diff(a, mat2(0.0, (1.0 + I) / 2.0, -(1.0 - I) / 2.0, I)) < 1e-15);

  const ComplexMatrix herm = dflow::testing::random_hermitian(5, 3);
  const auto split_h = hermitian_split(herm);
  CHECK(max_abs_diff(split_h.hermitian, herm) < 1e-15);
  CHECK(dflow::testing::max_abs(split_h.antihermitian) < 1e-15);

  const ComplexMatrix anti = dflow::testing::random_antihermitian(5, 3);
  const auto split_a = hermitian_split(anti);
  CHECK(dflow::testing::max_abs(split_a.hermitian) < 1e-15);
  CHECK(max_abs_diff(split_a.antihermitian, anti) < 1e-15);
}

TEST_CASE("hermitian_split rejects non-finite input") {
  ComplexMatrix m = ComplexMatrix::Identity(2, 2);
  m(0, 1) = std::nan("");
  CHECK_THROWS_AS(hermitian_split(m), InvalidInput);
}

TEST_CASE("hermitian_split reconstructs random matrices") {
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const ComplexMatrix m = random_matrix(1 + s % 7, s);
    const auto [h, a] = hermitian_split(m);
    REQUIRE(max_abs_diff(h + a, m) <= 1e-14 * std::max(1.0, dflow::testing::max_abs(m)));
    REQUIRE(max_abs_diff(h, h.adjoint()) == 0.0);
    REQUIRE(max_abs_diff(a, -a.adjoint()) == 0.0);
  }
}

TEST_CASE("rod examples") {
  CHECK(rod(ComplexMatrix::Identity(4, 4) * 3.0) == 0.0);
  CHECK(rod(mat2(0.0, 1.0, I, 0.0)) == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-15));
  CHECK(rod(ComplexMatrix::Ones(3, 3)) == doctest::Approx(std::sqrt(6.0) / 3.0).epsilon(1e-15));
}

TEST_CASE("rod vanishes exactly on diagonal matrices") {
  for (std::uint64_t s = 0; s < 50; ++s) {
    ComplexMatrix m = diagonal_part(random_matrix(6, s));
    CHECK(rod(m) == 0.0);
    m(s % 6, (s + 1) % 6) = 1e-12;
    CHECK(rod(m) > 0.0);
  }
}

TEST_CASE("commutator examples") {
  const ComplexMatrix x = random_matrix(4, 1);
  CHECK(dflow::testing::max_abs(commutator(x, x)) == 0.0);
  const ComplexMatrix d1 = diagonal_part(random_matrix(4, 2));
  const ComplexMatrix d2 = diagonal_part(random_matrix(4, 3));
  CHECK(dflow::testing::max_abs(commutator(d1, d2)) < 1e-15);
  const ComplexMatrix sx = mat2(0.0, 1.0, 1.0, 0.0);
  const ComplexMatrix sy = mat2(0.0, -I, I, 0.0);
  CHECK(max_abs_diff(commutator(sx, sy), 2.0 * I * mat2(1.0, 0.0, 0.0, -1.0)) < 1e-15);
  CHECK_THROWS_AS(commutator(ComplexMatrix::Zero(2, 2), ComplexMatrix::Zero(3, 3)), DimensionMismatch);
}

TEST_CASE("apply_band_mask") {
  const ComplexMatrix m = random_matrix(4, 9);
  CHECK(max_abs_diff(apply_band_mask(m, BandMask(3, 4)), m) == 0.0);
  CHECK(max_abs_diff(apply_band_mask(m, BandMask(0, 4)), diagonal_part(m)) == 0.0);
  const ComplexMatrix o2 = apply_band_mask(m, BandMask(2, 4));
  CHECK(o2(0, 3) == Complex(0.0));
  CHECK(o2(3, 0) == Complex(0.0));
  CHECK(o2(0, 2) == m(0, 2));
  CHECK(o2(1, 3) == m(1, 3));
  CHECK(BandMask(2, 4).keeps(3, 1));
  CHECK_FALSE(BandMask(2, 4).keeps(3, 0));
}

TEST_CASE("eigenvalues examples") {
  auto sorted = [](Spectrum s) {
    std::sort(s.begin(), s.end(), [](Complex a, Complex b) {
      return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return s;
  };
  const auto s1 = sorted(eigenvalues(mat2(0.0, 1.0, 1.0, 0.0)));
  CHECK(std::abs(s1[0] + 1.0) < 1e-14);
  CHECK(std::abs(s1[1] - 1.0) < 1e-14);

  const ComplexMatrix d = diagonal_part(random_matrix(5, 4));
  CHECK(spectral_max_deviation(eigenvalues(d), diagonal_of(d)) < 1e-14);

  // eps = 1, gamma1 = 0.3, gamma2 = 0.1 single mode
  const ComplexMatrix sm = mat2(1.0 - 0.1 * I, 0.1, -0.3, 1.0 + 0.1 * I);
  CHECK(spectral_max_deviation(eigenvalues(sm), {1.0 + 0.2 * I, 1.0 - 0.2 * I}) < 1e-14);
}

TEST_CASE("eigen_decomposition residuals") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const ComplexMatrix m = random_matrix(12, s);
    const auto ed = eigen_decomposition(m);
    const double scale = m.norm();
    for (std::size_t k = 0; k < ed.values.size(); ++k) {
      const auto v = ed.vectors.col(static_cast<Eigen::Index>(k));
      CHECK((m * v - ed.values[k] * v).norm() / (scale * v.norm()) <= 1e-10);
    }
  }
}

TEST_CASE("eigenvalues agree with characteristic polynomial roots on small integer matrices") {
  // 2x2: roots of x^2 - tr x + det; 3x3 checked through tr, tr(M^2) and det identities.
  std::size_t checked = 0;
  for (int a = -2; a <= 2; ++a)
    for (int b = -2; b <= 2; ++b)
      for (int c = -2; c <= 2; ++c)
        for (int d = -2; d <= 2; ++d) {
          const ComplexMatrix m = mat2(a, b, c, d);
          const Complex tr = static_cast<double>(a + d);
          const Complex det = static_cast<double>(a * d - b * c);
          const Complex disc = std::sqrt(tr * tr - 4.0 * det);
          const Spectrum roots = {(tr + disc) / 2.0, (tr - disc) / 2.0};
          // A defective (Jordan) block perturbs its eigenvalues at the sqrt(eps) scale.
          const bool defective = std::abs(disc) == 0.0 && (b != 0 || c != 0);
          REQUIRE(spectral_max_deviation(eigenvalues(m), roots) < (defective ? 1e-7 : 1e-8));
          ++checked;
        }
  CHECK(checked == 625);

  const CounterRng rng(17, 1);
  for (std::uint64_t k = 0; k < 300; ++k) {
    ComplexMatrix m(3, 3);
    for (int i = 0; i < 9; ++i) m(i / 3, i % 3) = std::floor(rng.uniform(9 * k + i) * 5.0) - 2.0;
    const Spectrum ev = eigenvalues(m);
    Complex s1 = 0.0, s2 = 0.0, p = 1.0;
    for (Complex l : ev) {
      s1 += l;
      s2 += l * l;
      p *= l;
    }
    REQUIRE(std::abs(s1 - m.trace()) < 1e-8);
    REQUIRE(std::abs(s2 - (m * m).trace()) < 1e-7);
    REQUIRE(std::abs(p - m.determinant()) < 1e-7);
  }
}

TEST_CASE("eigenvalues of App-D-symmetric matrices pair as (l, -conj l)") {
  // m_{nj} = -conj(m_{-n,-j}) with indices n in [-N, N]
  const std::size_t N = 4, D = 2 * N + 1;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const ComplexMatrix r = random_matrix(D, s);
    ComplexMatrix m(D, D);
    for (std::size_t i = 0; i < D; ++i)
      for (std::size_t j = 0; j < D; ++j) m(i, j) = (r(i, j) - std::conj(r(D - 1 - i, D - 1 - j))) / 2.0;
    const Spectrum ev = eigenvalues(m);
    Spectrum mirrored;
    for (Complex l : ev) mirrored.push_back(-std::conj(l));
    CHECK(spectral_max_deviation(ev, mirrored) < 1e-8);
  }
}

TEST_CASE("spectral_distance") {
  CHECK(spectral_distance({1.0, 2.0, I}, {I, 1.0, 2.0}) < 1e-15);
  CHECK(spectral_distance({0.0, 1.0}, {1.0, 0.0}) == 0.0);
  CHECK(spectral_distance({0.0, 1.0}, {0.0, 1.0 + I}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(spectral_distance({0.0}, {0.0, 1.0}), DimensionMismatch);

  const CounterRng rng(5, 5);
  for (std::uint64_t k = 0; k < 50; ++k) {
    Spectrum a, b;
    for (std::uint64_t i = 0; i < 8; ++i) {
      a.emplace_back(rng.normal(100 * k + i), rng.normal(100 * k + i + 50));
      b.emplace_back(rng.normal(100 * k + i + 20), rng.normal(100 * k + i + 70));
    }
    CHECK(spectral_distance(a, b) == doctest::Approx(spectral_distance(b, a)).epsilon(1e-12));
    CHECK(spectral_distance(a, a) == 0.0);
    // matching never exceeds the identity pairing
    double ident = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) ident += std::norm(a[i] - b[i]);
    CHECK(spectral_distance(a, b) <= std::sqrt(ident) + 1e-12);
  }
}

TEST_CASE("min_cost_assignment finds the optimum on small instances") {
  const CounterRng rng(11, 2);
  for (std::uint64_t k = 0; k < 30; ++k) {
    Eigen::MatrixXd cost(5, 5);
    for (int i = 0; i < 25; ++i) cost(i / 5, i % 5) = rng.uniform(25 * k + i);
    const auto sigma = min_cost_assignment(cost);
    double got = 0.0;
    for (int i = 0; i < 5; ++i) got += cost(i, static_cast<Eigen::Index>(sigma[i]));
    std::vector<int> perm = {0, 1, 2, 3, 4};
    double best = 1e300;
    do {
      double c = 0.0;
      for (int i = 0; i < 5; ++i) c += cost(i, perm[i]);
      best = std::min(best, c);
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(got == doctest::Approx(best).epsilon(1e-14));
  }
}

TEST_CASE("matrix serialization round-trips bit-exactly") {
  const auto dir = std::filesystem::temp_directory_path() / "dflow_test_linalg";
  const ComplexMatrix m = random_matrix(7, 42) * 1e-3 + ComplexMatrix::Identity(7, 7) * Complex(1.0 / 3.0, -0.1);
  write_matrix_json(dir / "m.json", m);
  write_matrix_binary(dir / "m.bin", m);
  CHECK(max_abs_diff(read_matrix_json(dir / "m.json"), m) == 0.0);
  CHECK(max_abs_diff(read_matrix_binary(dir / "m.bin"), m) == 0.0);
  CHECK(max_abs_diff(read_matrix_file(dir / "m.bin"), m) == 0.0);
  CHECK(matrix_to_json(m)["dim"] == 7);

  const Spectrum s = {Complex(0.1, -2.0), Complex(1e-300, 3.0)};
  write_spectrum_csv(dir / "s.csv", s);
  CHECK(read_spectrum_csv(dir / "s.csv") == s);
  CHECK(read_text_file(dir / "s.csv").rfind("re,im\n", 0) == 0);

  CHECK_THROWS_AS(matrix_from_json(nlohmann::json{{"dim", 2}, {"re", {{1, 2}}}, {"im", {{0, 0}}}}), Error);
  std::filesystem::remove_all(dir);
}
