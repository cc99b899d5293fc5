#include <doctest.h>

#include <numbers>

#include "support.hpp"
#include "toda/evolution.hpp"
#include "toda/flow.hpp"

using namespace toda;

namespace {

ScatteringData synthetic(double t, const DispersionLaw& law) {
  ScatteringData sd;
  sd.t = 0.0;
  sd.k_grid = default_k_grid(128);
  for (const auto& k : sd.k_grid) {
    const double th = std::arg(k);
    sd.R_plus.push_back(0.3 * std::sin(th) * std::polar(1.0, 0.7 * th));
    sd.R_minus.push_back(0.2 * std::sin(th) * std::polar(1.0, -0.4 * th));
  }
  sd.bound_states.push_back({0.4, lambda_from_k(0.4), 1.3, 0.8});
  return t == 0.0 ? sd : evolve_scattering(sd, law, t);
}

}  // namespace

TEST_CASE("alpha basics") {
  const auto law = DispersionLaw::toda();
  CHECK(law.r() == 0);
  CHECK(std::abs(alpha(law, 1.0)) == 0.0);
  CHECK(std::abs(alpha(law, 2.0) - 1.5) < 1e-15);
  CHECK_THROWS_AS(alpha(law, 0.0), DomainError);
  CHECK_THROWS_AS(DispersionLaw(1, {1.0, 0.0}), DomainError);
  for (int r = 0; r <= 4; ++r) {
    const auto l = DispersionLaw::from_symbol(HierarchyCoeffs::homogeneous(r));
    CHECK(std::abs(alpha(l, 1.0)) < 1e-14);
    CHECK(std::abs(alpha(l, -1.0)) < 1e-14);
    const cplx k(0.3, 0.8);
    CHECK(std::abs(alpha(l, std::conj(k)) - std::conj(alpha(l, k))) < 1e-14);
  }
}

TEST_CASE("symbol of the Lax operator") {
  const auto l0 = DispersionLaw::from_symbol(HierarchyCoeffs::homogeneous(0));
  CHECK(l0.coefficients() == DispersionLaw::toda().coefficients());

  for (int r = 0; r <= 4; ++r) {
    const auto law = DispersionLaw::from_symbol(HierarchyCoeffs::homogeneous(r));
    double rem = 1.0;
    const auto G = law.factor(&rem);
    CHECK(rem < 1e-14);
    REQUIRE(G.size() == static_cast<std::size_t>(r + 1));
    CHECK(G.back() == doctest::Approx(1.0).epsilon(1e-13));  // monic
    CHECK(law.d(r + 1) == doctest::Approx(std::ldexp(1.0, -r)).epsilon(1e-13));
    CHECK(law.d(-(r + 1)) == doctest::Approx(-std::ldexp(1.0, -r)).epsilon(1e-13));
    for (int j = 0; j <= r + 1; ++j) CHECK(law.d(-j) == doctest::Approx(-law.d(j)).scale(1));
  }

  // With c_1 = c, G(lambda) = lambda + c for r = 1.
  const auto law = DispersionLaw::from_symbol(HierarchyCoeffs(1, {1.0, 0.3, 0.0}));
  const auto G = law.factor();
  CHECK(G[0] == doctest::Approx(0.3));
  CHECK(G[1] == doctest::Approx(1.0));
}

TEST_CASE("factor remainder detects non-factorizable laws") {
  double rem = 0.0;
  DispersionLaw bad(0, {-1.0, 0.0, 2.0});
  bad.factor(&rem);
  CHECK(rem > 0.5);
}

TEST_CASE("evolve_scattering group law and exact bound-state positions") {
  const auto law = DispersionLaw::from_symbol(HierarchyCoeffs::homogeneous(1));
  const auto sd = synthetic(0.0, law);
  const auto same = evolve_scattering(sd, law, 0.0);
  CHECK(same.R_plus == sd.R_plus);
  CHECK(same.bound_states[0].gamma_plus == sd.bound_states[0].gamma_plus);
  const auto ab = evolve_scattering(evolve_scattering(sd, law, 0.4), law, 0.7);
  const auto direct = evolve_scattering(sd, law, 1.1);
  for (std::size_t i = 0; i < sd.R_plus.size(); ++i) {
    CHECK(std::abs(ab.R_plus[i] - direct.R_plus[i]) < 1e-12);
    CHECK(std::abs(ab.R_minus[i] - direct.R_minus[i]) < 1e-12);
    // alpha is imaginary on the unit circle.
    CHECK(std::abs(std::abs(direct.R_plus[i]) - std::abs(sd.R_plus[i])) < 1e-14);
  }
  CHECK(direct.bound_states[0].k == sd.bound_states[0].k);
  CHECK(direct.bound_states[0].lambda == sd.bound_states[0].lambda);
  CHECK(direct.t == doctest::Approx(1.1));
  const double a = alpha(law, 0.4).real();
  CHECK(direct.bound_states[0].gamma_plus ==
        doctest::Approx(1.3 * std::exp(1.1 * a)).epsilon(1e-13));
  CHECK(direct.bound_states[0].gamma_minus ==
        doctest::Approx(0.8 * std::exp(-1.1 * a)).epsilon(1e-13));
}

TEST_CASE("fit_dispersion recovers a synthetic law exactly") {
  for (int r = 0; r <= 2; ++r) {
    const auto law = DispersionLaw::from_symbol(HierarchyCoeffs::homogeneous(r));
    const auto sd0 = synthetic(0.0, law);
    const auto sd1 = synthetic(1.0, law);
    const auto fit = fit_dispersion(sd0, sd1, r);
    for (int j = -(r + 1); j <= r + 1; ++j) CHECK(std::abs(fit.law.d(j) - law.d(j)) < 1e-10);
    CHECK(fit.residual < 1e-10);
    CHECK(fit.points_used == 128);
  }
}

TEST_CASE("fit_dispersion errors") {
  const auto law = DispersionLaw::toda();
  auto sd0 = synthetic(0.0, law);
  auto sd1 = synthetic(1.0, law);
  auto quiet = sd0;
  for (auto& R : quiet.R_plus) R = 0.0;
  CHECK_THROWS_AS(fit_dispersion(quiet, sd1, 0), InsufficientSignal);
  CHECK_THROWS_AS(fit_dispersion(sd0, sd0, 0), DomainError);
  // Random phases break the unwrapping.
  testing::Rng rng(51);
  auto noisy = sd1;
  for (auto& R : noisy.R_plus) R *= std::polar(1.0, testing::uniform(rng, -3.0, 3.0));
  CHECK_THROWS_AS(fit_dispersion(sd0, noisy, 0), BranchTrackingFailure);
}

TEST_CASE("Toda flow gives alpha_0 through integrate and scatter") {
  const auto s = testing::gaussian_state(60, 0.1, 0.08, 4.0, 1.0);
  FlowConfig cfg;
  const auto s1 = integrate(s, HierarchyCoeffs::homogeneous(0), 1.0, cfg).final_state();
  const auto grid = default_k_grid(256);
  const auto sd0 = scattering_data(build_jacobi(s), grid);
  const auto sd1 = scattering_data(build_jacobi(s1), grid);
  const auto pred = evolve_scattering(sd0, DispersionLaw::toda(), 1.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    worst = std::max(worst, std::abs(pred.R_plus[i] - sd1.R_plus[i]));
  CHECK(worst < 1e-4);
  const auto fit = fit_dispersion(sd0, sd1, 0);
  CHECK(std::abs(fit.law.d(1) - 1.0) < 1e-6);
  CHECK(std::abs(fit.law.d(-1) + 1.0) < 1e-6);
  CHECK(std::abs(fit.law.d(0)) < 1e-3);
  CHECK(fit.residual < 1e-4);
}

TEST_CASE("indicator estimates") {
  const LogFunction e2 = [](cplx z) { return 2.0 * z; };
  CHECK(indicator_estimate(e2, 0.0, 50.0).h_estimate == doctest::Approx(2.0).epsilon(0.05));
  const double h_pi = indicator_estimate(e2, std::numbers::pi, 50.0).h_estimate;
  CHECK(h_pi == doctest::Approx(-2.0).epsilon(0.05));

  // At r_max = 50, h_{f+f} exceeds h_f by log 2 / r ~ 0.015 (finite-sample
  // bias), so the inequalities are checked further out.
  const double r_max = 100.0;
  const auto family = testing::indicator_family();
  for (double phi : {0.0, 0.6, std::numbers::pi / 2, 2.0, std::numbers::pi}) {
    for (std::size_t i = 0; i < family.size(); ++i) {
      const double hf = indicator_estimate(family[i], phi, r_max).h_estimate;
      const double hf_op = indicator_estimate(family[i], phi + std::numbers::pi, r_max).h_estimate;
      CHECK(hf + hf_op >= -0.01);
      for (std::size_t j = 0; j < family.size(); ++j) {
        const double hg = indicator_estimate(family[j], phi, r_max).h_estimate;
        const double hsum = indicator_estimate(log_sum(family[i], family[j]), phi, r_max).h_estimate;
        const double hprod = indicator_estimate(log_product(family[i], family[j]), phi, r_max).h_estimate;
        CHECK(hsum <= std::max(hf, hg) + 0.01);
        CHECK(hprod <= hf + hg + 0.01);
      }
    }
  }
}

TEST_CASE("indicator errors") {
  const LogFunction bad = [](cplx z) { return std::exp(std::exp(z.real())) * cplx(1.0, 0.0); };
  CHECK_THROWS_AS(indicator_estimate(bad, 0.0, 50.0), OverflowError);
  CHECK_THROWS_AS(indicator_estimate(bad, 0.0, -1.0), DomainError);
}

TEST_CASE("growth witness") {
  const auto law = DispersionLaw::toda();
  ScatteringData flat;
  flat.k_grid = default_k_grid(16);
  flat.R_plus.assign(16, 0.0);
  flat.R_minus.assign(16, 0.0);
  const auto triv = growth_exponent_witness(flat, law);
  CHECK(triv.trivial);
  CHECK(triv.verdict.rfind("trivial reflection; no contradiction", 0) == 0);

  const auto sd = synthetic(0.0, law);
  const auto rep = growth_exponent_witness(sd, law, 30.0);
  CHECK(!rep.trivial);
  CHECK(rep.forward_factor);
  CHECK(rep.growth_detected);
  // log|e^{alpha_0(-1/x)}| / x = (x - 1/x)/x -> 1.
  CHECK(rep.rows.back().x == 30.0);
  CHECK(rep.rows.back().rate_minus == doctest::Approx(1.0).epsilon(0.1));

  const auto odd = DispersionLaw::from_symbol(HierarchyCoeffs::homogeneous(1));
  const auto rep1 = growth_exponent_witness(sd, odd, 30.0);
  CHECK(!rep1.forward_factor);
  CHECK(rep1.growth_detected);
  CHECK(rep1.rows.back().rate_minus > 0.0);
}
