#include "doctest.h"

#include "fbmjs/drift_girsanov.hpp"
#include "fbmjs/risk_engine.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

using namespace fbmjs;

namespace {

McSettings mc(std::size_t reps, std::uint64_t seed, ExecPolicy policy = ExecPolicy::parallel) {
  return McSettings{SimMethod::circulant, reps, seed, policy};
}

}  // namespace

TEST_CASE("Cramer-Rao bound") {
  CHECK(cramer_rao_bound(FbmModel{3, 0.25, 1.0, 8}) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(cramer_rao_bound(FbmModel{1, 0.5, 1.0, 8}) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(cramer_rao_bound(FbmModel{2, 0.3, 0.0, 8}) == 0.0);
  CHECK(cramer_rao_bound(FbmModel{2, 0.3, 2.0, 8}) > cramer_rao_bound(FbmModel{2, 0.3, 1.5, 8}));
  CHECK(cramer_rao_bound(FbmModel{4, 0.3, 1.7, 8}) == 2.0 * cramer_rao_bound(FbmModel{2, 0.3, 1.7, 8}));
}

TEST_CASE("MLE risk does not depend on the drift, bit for bit") {
  const FbmModel model{3, 0.25, 1.0, 64};
  const auto mle = make_estimator({"mle"}, model.H);
  const auto a = quadratic_risk_mc(mle, builtin_drift(DriftKind::zero, model), model, mc(2000, 3));
  const auto b = quadratic_risk_mc(mle, builtin_drift(DriftKind::linear, model, 5.0), model, mc(2000, 3));
  CHECK(a.mean == b.mean);
  CHECK(a.std_error == b.std_error);
  CHECK(a.drift_label == "zero");
  CHECK(b.drift_label == "linear(5)");
  CHECK(a.mean == doctest::Approx(cramer_rao_bound(model)).epsilon(0.05));
}

TEST_CASE("paired difference equals the difference of separate runs exactly") {
  const FbmModel model{3, 0.25, 1.0, 64};
  const auto drift = builtin_drift(DriftKind::power2H, model, 1.0);
  const ShrinkageSpec spec{1.0, r_rational(), model.H};
  const auto rep = risk_difference_paired(spec, drift, model, mc(3000, 17));
  const auto js = quadratic_risk_mc(Estimator{"custom", spec}, drift, model, mc(3000, 17));
  const auto mle = quadratic_risk_mc(make_estimator({"mle"}, model.H), drift, model, mc(3000, 17));
  CHECK(rep.delta_mean == js.mean - mle.mean);
  CHECK(rep.risk.mean == js.mean);
  CHECK(rep.mle_risk.mean == mle.mean);
  CHECK(rep.ci95_upper == rep.delta_mean + 1.96 * rep.delta_std_error);
  CHECK(rep.certified_conditions);
}

TEST_CASE("James-Stein risk and risk difference, moderate size") {
  const FbmModel model{3, 0.25, 1.0, 128};
  const auto zero = builtin_drift(DriftKind::zero, model);
  const auto js = quadratic_risk_mc(make_estimator({"js", 1.0}, model.H), zero, model, mc(10000, 5));
  CHECK(js.mean == doctest::Approx(2.0 - 2.0 / 3.0).epsilon(0.05));
  CHECK(js.estimator_label == "js(a=1)");
  const auto rep = risk_difference_paired(ShrinkageSpec{1.0, r_one(), model.H}, zero, model, mc(10000, 5));
  CHECK(rep.delta_mean == doctest::Approx(-2.0 / 3.0).epsilon(0.05));
  CHECK(rep.ci95_upper < 0.0);
  CHECK(rep.stein_agreement_z() < 4.0);
}

TEST_CASE("boundary a = 2(d-2) gives no improvement") {
  const FbmModel model{3, 0.25, 1.0, 128};
  const auto rep =
      risk_difference_paired(ShrinkageSpec{2.0, r_one(), model.H}, builtin_drift(DriftKind::zero, model), model, mc(10000, 8));
  CAPTURE(rep.delta_mean);
  CAPTURE(rep.delta_std_error);
  CHECK(std::abs(rep.delta_mean) < 3.0 * rep.delta_std_error);
  CHECK(rep.certified_conditions);
}

TEST_CASE("uncertified specs are reported as such") {
  const FbmModel model{3, 0.25, 1.0, 32};
  const auto rep =
      risk_difference_paired(ShrinkageSpec{3.0, r_one(), model.H}, builtin_drift(DriftKind::zero, model), model, mc(500, 1));
  CHECK_FALSE(rep.certified_conditions);
  CHECK_FALSE(rep.violations.empty());
}

TEST_CASE("batch reproduces single-case runs") {
  const FbmModel model{5, 0.1, 1.0, 32};
  const auto cases = standard_sweep_cases(model);
  REQUIRE(cases.size() == 18);
  const auto batch = risk_difference_batch(cases, model, mc(400, 9));
  for (std::size_t i : {0u, 7u, 17u}) {
    const auto one = risk_difference_paired(cases[i].spec, cases[i].drift, model, mc(400, 9));
    CHECK(one.delta_mean == batch[i].delta_mean);
    CHECK(one.delta_std_error == batch[i].delta_std_error);
    CHECK(one.stein_form_mean == batch[i].stein_form_mean);
  }
  for (const auto& r : batch) CHECK(r.certified_conditions);
}

TEST_CASE("serial and parallel execution agree bit for bit") {
  const FbmModel model{3, 0.25, 1.0, 32};
  const auto drift = builtin_drift(DriftKind::linear, model, 1.0);
  const auto js = make_estimator({"js-rational", 1.0}, model.H);
  const auto s = quadratic_risk_mc(js, drift, model, mc(700, 2, ExecPolicy::serial));
  const auto p = quadratic_risk_mc(js, drift, model, mc(700, 2, ExecPolicy::parallel));
  CHECK(s.mean == p.mean);
  CHECK(s.std_error == p.std_error);

  const auto cases = standard_sweep_cases(model);
  const auto bs = risk_difference_batch(cases, model, mc(300, 4, ExecPolicy::serial));
  const auto bp = risk_difference_batch(cases, model, mc(300, 4, ExecPolicy::parallel));
  for (std::size_t i = 0; i < cases.size(); ++i) {
    CHECK(bs[i].delta_mean == bp[i].delta_mean);
    CHECK(bs[i].stein_form_mean == bp[i].stein_form_mean);
  }

  const auto is = inverse_norm_moment_check(model, mc(500, 6, ExecPolicy::serial));
  const auto ip = inverse_norm_moment_check(model, mc(500, 6, ExecPolicy::parallel));
  CHECK(is.mc_value == ip.mc_value);

  const auto us = unbiasedness_check(js, drift, model, mc(1100, 6, ExecPolicy::serial));
  const auto up = unbiasedness_check(js, drift, model, mc(1100, 6, ExecPolicy::parallel));
  CHECK(us.max_bias == up.max_bias);
  CHECK(us.bias_norm == up.bias_norm);

  const std::array<double, 3> theta{1.0, 0.0, 0.0};
  const auto ss = stein_identity_check(ShrinkageSpec{}, 1.0, theta, 1000, 3, ExecPolicy::serial);
  const auto sp = stein_identity_check(ShrinkageSpec{}, 1.0, theta, 1000, 3, ExecPolicy::parallel);
  CHECK(ss.lhs == sp.lhs);
  CHECK(ss.rhs == sp.rhs);
}

TEST_CASE("Stein identity at a single time") {
  const std::array<double, 3> origin{0.0, 0.0, 0.0};
  const RFunctionSpec zero{[](double) { return 0.0; }, [](double) { return 0.0; }, "0"};
  const auto z = stein_identity_check(ShrinkageSpec{1.0, zero, 0.25}, 1.0, origin, 1000, 1);
  CHECK(z.lhs == 0.0);
  CHECK(z.rhs == 0.0);

  const ShrinkageSpec js{1.0, r_one(), 0.25};
  const auto c = stein_identity_check(js, 1.0, origin, 200000, 2);
  CAPTURE(c.lhs);
  CAPTURE(c.rhs);
  CHECK(c.passed());
  CHECK(c.rhs == doctest::Approx(-1.0).epsilon(0.05));  // -a t^{4H} (d-2) E[1/u] = -1

  const std::array<double, 3> shifted{3.0, 0.0, 0.0};
  const auto n = stein_identity_check(js, 1.0, shifted, 200000, 3);
  CAPTURE(n.lhs);
  CAPTURE(n.rhs);
  CHECK(n.passed());

  const auto r = stein_identity_check(ShrinkageSpec{1.5, r_rational(), 0.1}, 0.5, shifted, 100000, 4);
  CHECK(r.passed());
  CHECK_THROWS_AS(stein_identity_check(js, 0.0, origin, 10, 1), std::invalid_argument);
}

TEST_CASE("inverse-norm moment") {
  const FbmModel d5{5, 0.25, 1.0, 128};
  const auto c = inverse_norm_moment_check(d5, mc(10000, 12));
  CHECK(c.exact == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(std::abs(c.relative_error()) < 0.05);
  CHECK(inverse_norm_moment_check(FbmModel{3, 0.25, 1.0, 16}, mc(10, 1)).exact == doctest::Approx(2.0));
  CHECK_THROWS_AS(inverse_norm_moment_check(FbmModel{3, 0.6, 1.0, 16}, mc(10, 1)), std::invalid_argument);
  CHECK_THROWS_AS(inverse_norm_moment_check(FbmModel{2, 0.25, 1.0, 16}, mc(10, 1)), std::invalid_argument);
}

TEST_CASE("unbiasedness") {
  const FbmModel model{3, 0.25, 1.0, 32};
  const auto mle = make_estimator({"mle"}, model.H);
  const auto js = make_estimator({"js", 1.0}, model.H);
  CHECK(unbiasedness_check(mle, builtin_drift(DriftKind::zero, model), model, mc(4000, 1)).unbiased());
  CHECK(unbiasedness_check(mle, builtin_drift(DriftKind::linear, model, 2.0), model, mc(4000, 2)).unbiased());
  // shrinkage is odd in the path, so there is no bias at theta = 0; it shows
  // once the drift breaks the symmetry
  CHECK(unbiasedness_check(js, builtin_drift(DriftKind::zero, model), model, mc(4000, 3)).unbiased());
  const auto biased = unbiasedness_check(js, builtin_drift(DriftKind::linear, model, 2.0), model, mc(4000, 4));
  CHECK_FALSE(biased.unbiased());
  CHECK(biased.max_bias > 0.1);
}

TEST_CASE("shrinkage term is integrable and grid-stable") {
  const ShrinkageSpec spec{2.0, r_one(), 0.25};
  const FbmModel coarse{3, 0.25, 1.0, 256};
  const FbmModel fine{3, 0.25, 1.0, 512};
  const auto a = shrinkage_energy_mc(spec, builtin_drift(DriftKind::zero, coarse), coarse, mc(20000, 7));
  const auto b = shrinkage_energy_mc(spec, builtin_drift(DriftKind::zero, fine), fine, mc(20000, 7));
  CAPTURE(a.mean);
  CAPTURE(b.mean);
  CHECK(std::isfinite(a.mean));
  CHECK(std::abs(b.mean / a.mean - 1.0) < 0.05);
  // a^2 E int t^{4H} / |B_t|^2 dt = a^2 int t^{2H} dt / (d-2)
  CHECK(a.mean == doctest::Approx(4.0 / 1.5).epsilon(0.05));
}
