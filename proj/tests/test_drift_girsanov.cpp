#include "doctest.h"

#include "fbmjs/drift_girsanov.hpp"
#include "fbmjs/frac_ops.hpp"
#include "fbmjs/numerics.hpp"
#include "fbmjs/sim_core.hpp"

#include <cmath>
#include <stdexcept>

using namespace fbmjs;

TEST_CASE("built-in drifts") {
  const FbmModel model{2, 0.25, 1.0, 64};
  const auto zero = builtin_drift(DriftKind::zero, model);
  CHECK(zero.dimension() == 2);
  CHECK(zero.components[0].value(0.7) == 0.0);
  CHECK(zero.components[1].derivative(0.7) == 0.0);

  const auto lin = builtin_drift(DriftKind::linear, model, 2.0);
  CHECK(lin.components[0].value(0.5) == doctest::Approx(1.0));
  CHECK(lin.label == "linear(2)");

  const auto p = builtin_drift(DriftParams{DriftKind::power2H, 1.0, 0.25}, model);
  CHECK(p.components[0].value(1.0) == doctest::Approx(1.0));
  CHECK(p.components[0].value(0.0) == 0.0);
  CHECK(p.components[1].derivative(0.5) == doctest::Approx(0.5 * std::pow(0.5, -0.5)));
  CHECK(p.label == "power2H(1,0.25)");

  const auto custom = builtin_drift(DriftParams{DriftKind::custom, 3.0, 0.0, 1.5}, model);
  CHECK(custom.components[0].value(0.25) == doctest::Approx(3.0 * 0.125));
  CHECK(custom.label == "custom(3,1.5)");

  CHECK_THROWS_AS(builtin_drift(DriftParams{DriftKind::linear, NAN}, model), std::invalid_argument);
  for (auto k : {DriftKind::zero, DriftKind::linear, DriftKind::power2H, DriftKind::custom}) {
    CHECK(parse_drift_kind(to_string(k)) == k);
    CHECK_NOTHROW(validate_drift(builtin_drift(k, model), model));
  }
  CHECK_THROWS_AS(parse_drift_kind("quadratic"), std::invalid_argument);
}

TEST_CASE("drift validation catches bad drifts") {
  const FbmModel model{1, 0.25, 1.0, 16};
  DriftSpec offset{{{[](double t) { return 1.0 + t; }, [](double) { return 1.0; }}}, "offset"};
  CHECK_THROWS_AS(validate_drift(offset, model), std::invalid_argument);
  DriftSpec wrong{{{[](double t) { return t * t; }, [](double) { return 1.0; }}}, "wrong"};
  CHECK_THROWS_AS(validate_drift(wrong, model), std::invalid_argument);
  CHECK_THROWS_AS(validate_drift(builtin_drift(DriftKind::zero, FbmModel{3, 0.25, 1.0, 16}), model),
                  std::invalid_argument);
}

TEST_CASE("squared integral of exact power laws") {
  const FbmModel model{1, 0.25, 1.0, 200};
  std::vector<double> h(model.n + 1);
  for (double beta : {-0.25, 0.0, 0.5}) {
    for (std::size_t j = 1; j <= model.n; ++j) h[j] = std::pow(model.time(j), beta);
    CHECK(squared_integral(h, model) == doctest::Approx(1.0 / (2 * beta + 1)).epsilon(5e-3));
  }
  std::fill(h.begin(), h.end(), 0.0);
  CHECK(squared_integral(h, model) == 0.0);
}

TEST_CASE("membership diagnostic") {
  const FbmModel model{1, 0.25, 1.0, 256};
  const auto z = validate_membership(builtin_drift(DriftKind::zero, model), model);
  CHECK(z.energy[0] == 0.0);
  CHECK(z.energy_refined[0] == 0.0);
  CHECK_FALSE(z.suspected_non_member);

  // K^{-1}(t^{2H}) = 2H Gamma(H+1/2) t^{H-1/2}; energy (2H Gamma(H+1/2))^2 / (2H)
  const double k = 0.5 * gamma_fn(0.75);
  const auto p = validate_membership(builtin_drift(DriftKind::power2H, model, 1.0), model);
  CHECK(p.energy[0] == doctest::Approx(k * k / 0.5).epsilon(5e-3));
  CHECK(p.energy[0] == doctest::Approx(0.750822).epsilon(5e-3));
  CHECK(std::abs(p.energy_refined[0] / p.energy[0] - 1.0) < 0.02);
  CHECK_FALSE(p.suspected_non_member);

  const double g = gamma_fn(1.25) / gamma_fn(1.5);
  const auto l = validate_membership(builtin_drift(DriftKind::linear, model, 1.0), model);
  CHECK(l.energy[0] == doctest::Approx(g * g * 2.0 / 3.0).epsilon(1e-3));
  CHECK_FALSE(l.suspected_non_member);

  // theta = t^{H}: K^{-1} theta ~ t^{-1/2}, not square integrable
  const auto bad = validate_membership(builtin_drift(DriftParams{DriftKind::custom, 1.0, 0.0, 0.25}, model), model);
  CHECK(bad.suspected_non_member);

  CHECK_THROWS_AS(validate_membership(builtin_drift(DriftKind::zero, FbmModel{1, 0.6, 1.0, 8}),
                                      FbmModel{1, 0.6, 1.0, 8}),
                  std::invalid_argument);
}

TEST_CASE("log density: zero drift and classical Girsanov") {
  const FbmModel rough{2, 0.25, 1.0, 128};
  const auto r = simulate_fbm(rough, SimMethod::volterra, RngStream{4, 2});
  const auto z = girsanov_log_density(*r.brownian, builtin_drift(DriftKind::zero, rough), rough);
  CHECK(z.log_density == 0.0);
  CHECK(z.ito_term == 0.0);
  CHECK(z.energy_term == 0.0);

  const FbmModel bm{1, 0.5, 1.0, 128};
  const auto w = simulate_fbm(bm, SimMethod::volterra, RngStream{4, 3}).brownian.value();
  const auto g = girsanov_log_density(w, builtin_drift(DriftKind::linear, bm, 1.0), bm);
  CHECK(g.log_density == doctest::Approx(w(0, bm.n) - 0.5).epsilon(1e-12));
  CHECK(g.log_density == g.ito_term - g.energy_term);

  CHECK_THROWS_AS(GirsanovDensity(builtin_drift(DriftKind::zero, FbmModel{1, 0.6, 1.0, 8}),
                                  FbmModel{1, 0.6, 1.0, 8}),
                  std::invalid_argument);
  CHECK_THROWS_AS(GirsanovDensity(builtin_drift(DriftKind::zero, bm), rough), std::invalid_argument);
}

TEST_CASE("Ito term is linear in the drift") {
  const FbmModel model{1, 0.25, 1.0, 64};
  const auto w = simulate_fbm(model, SimMethod::volterra, RngStream{8, 1}).brownian.value();
  const auto a = girsanov_log_density(w, builtin_drift(DriftKind::linear, model, 1.0), model);
  const auto b = girsanov_log_density(w, builtin_drift(DriftKind::power2H, model, 1.0), model);
  DriftSpec sum;
  sum.label = "sum";
  sum.components.push_back({[](double t) { return 2.0 * t - 3.0 * std::sqrt(t); },
                            [](double t) { return 2.0 - 1.5 / std::sqrt(t); }});
  const auto c = girsanov_log_density(w, sum, model);
  CHECK(c.ito_term == doctest::Approx(2.0 * a.ito_term - 3.0 * b.ito_term).epsilon(1e-8));
}

TEST_CASE("integrand is the kernel-matched inverse of the drift") {
  const FbmModel model{1, 0.25, 1.0, 128};
  const GirsanovDensity density(builtin_drift(DriftKind::power2H, model, 1.0), model);
  const auto h = density.integrand(0);
  CHECK(std::isnan(h[0]));
  for (std::size_t j = 13; j <= model.n; j += 23) {
    const double t = model.time(j);
    const double want = 0.5 * gamma_fn(0.75) * std::pow(t, -0.25) * kernel_inverse_scale(0.25);
    CHECK(h[j] == doctest::Approx(want).epsilon(1e-3));
  }
}

TEST_CASE("mean-one and change of measure, small runs") {
  const FbmModel model{1, 0.25, 1.0, 128};
  const auto drift = builtin_drift(DriftKind::power2H, model, 0.5);
  const auto m = girsanov_mean_one_check(drift, model, 5000, 99);
  CAPTURE(m.mean);
  CAPTURE(m.std_error);
  CHECK(m.passed());
  CHECK(m.std_error > 0.0);
  const auto c = change_of_measure_check(drift, model, 4000, 99);
  CAPTURE(c.weighted_mean);
  CAPTURE(c.shifted_mean);
  CHECK(c.passed());
}

TEST_CASE("Girsanov checks are identical serially and in parallel") {
  const FbmModel model{2, 0.25, 1.0, 32};
  const auto drift = builtin_drift(DriftKind::linear, model, 1.0);
  const auto a = girsanov_mean_one_check(drift, model, 600, 5, ExecPolicy::serial);
  const auto b = girsanov_mean_one_check(drift, model, 600, 5, ExecPolicy::parallel);
  CHECK(a.mean == b.mean);
  CHECK(a.std_error == b.std_error);
  const auto c = change_of_measure_check(drift, model, 300, 5, 10.0, ExecPolicy::serial);
  const auto d = change_of_measure_check(drift, model, 300, 5, 10.0, ExecPolicy::parallel);
  CHECK(c.weighted_mean == d.weighted_mean);
  CHECK(c.shifted_mean == d.shifted_mean);
}
