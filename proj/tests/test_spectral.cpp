#include <doctest.h>

#include <numbers>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "support.hpp"
#include "toda/spectral.hpp"

using namespace toda;

namespace {

LatticeState single_site(double b0_value, int half = 10) {
  std::vector<double> a(static_cast<std::size_t>(2 * half + 1), 0.5), b(a.size(), 0.0);
  b[static_cast<std::size_t>(half)] = b0_value;
  return LatticeState(-half, a, b, 0.5, 0.0);
}

}  // namespace

TEST_CASE("build_jacobi needs the normalized background") {
  CHECK_NOTHROW(build_jacobi(LatticeState::constant(0, 3)));
  CHECK_THROWS_AS(build_jacobi(LatticeState::constant(0, 3, 1.0, 0.0)), UnnormalizedBackground);
  CHECK_THROWS_AS(build_jacobi(LatticeState::constant(0, 3, 0.5, 0.1)), UnnormalizedBackground);
}

TEST_CASE("k grid and the lambda map") {
  const auto g = default_k_grid();
  REQUIRE(g.size() == 256);
  CHECK(std::arg(g.front()) == doctest::Approx(kBandEdgeExclusion));
  CHECK(std::arg(g.back()) == doctest::Approx(std::numbers::pi - kBandEdgeExclusion));
  for (const auto& k : g) CHECK(std::abs(std::abs(k) - 1.0) < 1e-15);
  CHECK_THROWS_AS(default_k_grid(1), DomainError);

  testing::Rng rng(41);
  for (int i = 0; i < 200; ++i) {
    const double lambda = (i % 2 ? 1 : -1) * testing::uniform(rng, 1.0 + 1e-6, 50.0);
    const double k = k_from_lambda(lambda);
    CHECK(std::abs(k) < 1.0);
    CHECK((k > 0) == (lambda > 0));
    CHECK(std::abs(lambda_from_k(k) - lambda) <= 1e-14 * std::abs(lambda));
  }
  CHECK_THROWS_AS(k_from_lambda(0.5), DomainError);
}

TEST_CASE("constant state: no bound states, no reflection") {
  const auto H = build_jacobi(LatticeState::constant(-10, 21));
  CHECK(bound_states(H).empty());
  CHECK(norming_constants(H, {}).empty());
  const auto sd = scattering_data(H, default_k_grid(64));
  for (const auto& R : sd.R_plus) CHECK(std::abs(R) < 1e-12);
  for (const auto& R : sd.R_minus) CHECK(std::abs(R) < 1e-12);
  CHECK(sd.bound_states.empty());
}

TEST_CASE("single site b(0) = 3/4: analytic bound state") {
  // psi = k^{|n|} with k^2 + 2 b k - 1 = 0, so k = 1/2, lambda = 5/4 and
  // gamma^{-1} = sum k^{2|n|} = (1 + k^2)/(1 - k^2).
  const auto H = build_jacobi(single_site(0.75));
  const auto sd = scattering_data(H, default_k_grid(32));
  REQUIRE(sd.bound_states.size() == 1);
  const auto& bs = sd.bound_states[0];
  CHECK(bs.lambda == doctest::Approx(1.25).epsilon(1e-13));
  CHECK(bs.k == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(bs.gamma_plus == doctest::Approx(0.6).epsilon(1e-10));
  CHECK(std::abs(bs.gamma_plus - bs.gamma_minus) < 1e-10);
}

TEST_CASE("bound states agree with a dense eigensolver on 401 and 801 sites") {
  testing::Rng rng(42);
  for (int trial = 0; trial < 5; ++trial) {
    const auto s = testing::random_compact(rng, 32, 4, 0.9);
    const auto small = bound_states(build_jacobi(s), 200 - s.n_max());
    const auto large = bound_states(build_jacobi(s), 400 - s.n_max());
    REQUIRE(small.size() == large.size());
    const Eigen::MatrixXd D = testing::dense_oracle(s, -200, 200);
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(D).eigenvalues();
    std::vector<double> outside;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
      if (std::abs(ev(i)) > 1.0 + kSpectralMargin) outside.push_back(ev(i));
    REQUIRE(outside.size() == small.size());
    for (std::size_t i = 0; i < small.size(); ++i) {
      CHECK(std::abs(small[i].lambda - outside[i]) < 1e-10);
      CHECK(std::abs(small[i].lambda - large[i].lambda) < 1e-8);
    }
  }
}

TEST_CASE("R_+ agrees with the brute-force linear solve") {
  const auto s = single_site(0.75);
  const auto H = build_jacobi(s);
  for (double theta : {0.1, 0.7, 1.5, 2.2, 3.0}) {
    const auto k = std::polar(1.0, theta);
    const auto R = jost_and_reflection(H, k, Side::right);
    CHECK(std::abs(R - testing::brute_force_R_plus(s, k, -200, 200)) < 1e-8);
  }
  testing::Rng rng(43);
  const auto r = testing::random_compact(rng, 12, 2, 0.5);
  const auto Hr = build_jacobi(r);
  for (double theta : {0.3, 1.1, 2.6}) {
    const auto k = std::polar(1.0, theta);
    CHECK(std::abs(scattering_point(Hr, k).R_plus -
                   testing::brute_force_R_plus(r, k, -200, 200)) < 1e-8);
  }
}

TEST_CASE("R_- is R_+ of the reflected operator") {
  testing::Rng rng(44);
  const auto s = testing::random_compact(rng, 10, 3, 0.5);
  const auto H = build_jacobi(s);
  const auto Hr = build_jacobi(reflect(s));
  for (double theta : {0.4, 1.3, 2.5}) {
    const auto k = std::polar(1.0, theta);
    CHECK(std::abs(jost_and_reflection(H, k, Side::left) -
                   jost_and_reflection(Hr, k, Side::right)) < 1e-12);
  }
}

TEST_CASE("unitarity and conjugation symmetry on random compact data") {
  testing::Rng rng(45);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = testing::random_compact(rng, 16, 2, 0.8);
    const auto H = build_jacobi(s);
    for (double theta = 0.05; theta < 3.1; theta += 0.3) {
      const auto k = std::polar(1.0, theta);
      const auto p = scattering_point(H, k);
      CHECK(std::abs(std::norm(p.R_plus) + std::norm(p.T) - 1.0) < 1e-10);
      CHECK(std::abs(std::norm(p.R_minus) + std::norm(p.T) - 1.0) < 1e-10);
      CHECK(std::abs(p.R_plus) <= 1.0 + 1e-12);
      const auto q = scattering_point(H, std::conj(k));
      CHECK(std::abs(q.R_plus - std::conj(p.R_plus)) < 1e-12);
      CHECK(std::abs(q.R_minus - std::conj(p.R_minus)) < 1e-12);
    }
  }
}

TEST_CASE("scattering_point errors") {
  const auto H = build_jacobi(single_site(0.3));
  CHECK_THROWS_AS(scattering_point(H, {1.0, 0.0}), BandEdgeError);
  CHECK_THROWS_AS(scattering_point(H, {-1.0, 0.0}), BandEdgeError);
  CHECK_THROWS_AS(scattering_point(H, {0.5, 0.0}), DomainError);
}

TEST_CASE("symmetric perturbation has gamma_+ = gamma_-") {
  std::vector<double> a(21, 0.5), b(21, 0.0);
  b[9] = b[11] = 0.6;
  b[10] = 0.9;
  a[9] = a[10] = 0.7;  // a(-1) = a(0)
  const LatticeState s(-10, a, b, 0.5, 0.0);
  const auto sd = scattering_data(build_jacobi(s), default_k_grid(16), 200);
  REQUIRE(!sd.bound_states.empty());
  for (const auto& bs : sd.bound_states)
    CHECK(std::abs(bs.gamma_plus - bs.gamma_minus) < 1e-10 * bs.gamma_plus);
}

TEST_CASE("localization error when the truncation is too tight") {
  const auto H = build_jacobi(single_site(0.01, 2));
  // lambda barely above 1: the eigenvector decays very slowly.
  const auto bs = bound_states(H, 400);
  REQUIRE(bs.size() == 1);
  CHECK_THROWS_AS(norming_constants(H, bs, 20), LocalizationError);
}

TEST_CASE("auto_margin localizes weakly bound states") {
  const auto H = build_jacobi(single_site(0.1, 2));
  CHECK_THROWS_AS(scattering_data(H, default_k_grid(8)), LocalizationError);
  const int m = auto_margin(H);
  CHECK(m > kDefaultTruncationMargin);
  const auto sd = scattering_data(H, default_k_grid(8), m);
  REQUIRE(sd.bound_states.size() == 1);
  const double k = sd.bound_states[0].k;
  CHECK(k == doctest::Approx(-0.1 + std::sqrt(1.01)).epsilon(1e-10));
  CHECK(sd.bound_states[0].gamma_plus == doctest::Approx((1 - k * k) / (1 + k * k)).epsilon(1e-8));
  CHECK(auto_margin(build_jacobi(LatticeState::constant(0, 5))) == kDefaultTruncationMargin);
}

TEST_CASE("parallel scattering matches the serial reference") {
#ifdef _OPENMP
  const int saved = omp_get_max_threads();
  omp_set_num_threads(4);
#endif
  testing::Rng rng(46);
  const auto s = testing::random_compact(rng, 20, 2, 0.5);
  const auto H = build_jacobi(s);
  const auto grid = default_k_grid(256);
  const auto par = scattering_data(H, grid, 400);
  const auto ser = reference::scattering_data_serial(H, grid, 400);
  CHECK(par.R_plus == ser.R_plus);
  CHECK(par.R_minus == ser.R_minus);
  REQUIRE(par.bound_states.size() == ser.bound_states.size());
#ifdef _OPENMP
  omp_set_num_threads(saved);
#endif
}
