#include "doctest.h"

#include "fbmjs/errors.hpp"
#include "fbmjs/frac_ops.hpp"
#include "fbmjs/sim_core.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

using namespace fbmjs;

namespace {

DriftSpec linear_drift(std::size_t d, double c) {
  DriftSpec drift;
  drift.label = "linear";
  for (std::size_t i = 0; i < d; ++i) {
    drift.components.push_back({[c](double t) { return c * t; }, [c](double) { return c; }});
  }
  return drift;
}

}  // namespace

TEST_CASE("fbm covariance") {
  CHECK(fbm_covariance(1.0, 1.0, 0.25) == doctest::Approx(1.0));
  CHECK(fbm_covariance(1.0, 2.0, 0.5) == doctest::Approx(1.0));
  CHECK(fbm_covariance(0.0, 3.0, 0.3) == 0.0);
  CHECK(fbm_covariance(0.7, 1.9, 0.3) == fbm_covariance(1.9, 0.7, 0.3));
  CHECK_THROWS_AS(fbm_covariance(-1.0, 1.0, 0.3), std::invalid_argument);
  CHECK_THROWS_AS(fbm_covariance(1.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(fbm_covariance(1.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("fgn autocovariance") {
  CHECK(fgn_autocovariance(1, 0.5, 1.0) == doctest::Approx(0.0));
  CHECK(fgn_autocovariance(0, 0.25, 1.0) == doctest::Approx(1.0));
  CHECK(fgn_autocovariance(1, 0.25, 1.0) ==
        doctest::Approx(fbm_covariance(1, 2, 0.25) - fbm_covariance(1, 1, 0.25)).epsilon(1e-14));
  CHECK(fgn_autocovariance(1, 0.25, 1.0) == doctest::Approx(-0.2928932188134524).epsilon(1e-14));
  // against increments of the covariance for a non-unit step
  const double dt = 0.1, H = 0.37;
  for (std::size_t k = 0; k < 5; ++k) {
    const double a = dt, b = 2 * dt, c = (k + 1) * dt, e = (k + 2) * dt;
    const double want = fbm_covariance(b, e, H) - fbm_covariance(b, c, H) - fbm_covariance(a, e, H) +
                        fbm_covariance(a, c, H);
    CHECK(fgn_autocovariance(k, H, dt) == doctest::Approx(want).epsilon(1e-12));
  }
  CHECK_THROWS(fgn_autocovariance(1, 0.3, 0.0));
}

TEST_CASE("method names") {
  for (auto m : {SimMethod::circulant, SimMethod::cholesky, SimMethod::volterra}) {
    CHECK(parse_sim_method(to_string(m)) == m);
  }
  CHECK_THROWS_AS(parse_sim_method("wavelet"), std::invalid_argument);
}

TEST_CASE("paths start at zero and are deterministic") {
  const FbmModel model{3, 0.25, 2.0, 32};
  for (auto m : {SimMethod::circulant, SimMethod::cholesky, SimMethod::volterra}) {
    const auto a = simulate_fbm(model, m, RngStream{42, 7});
    const auto b = simulate_fbm(model, m, RngStream{42, 7});
    const auto c = simulate_fbm(model, m, RngStream{42, 8});
    CHECK(a.path == b.path);
    CHECK_FALSE(a.path == c.path);
    CHECK(a.method_used == m);
    for (std::size_t i = 0; i < model.d; ++i) CHECK(a.path(i, 0) == 0.0);
    CHECK(a.brownian.has_value() == (m == SimMethod::volterra));
  }
}

TEST_CASE("circulant embedding is nonnegative across H") {
  for (double H : {0.05, 0.25, 0.5, 0.75, 0.95}) {
    const PathSampler s(FbmModel{1, H, 1.0, 100}, SimMethod::circulant);
    CHECK(s.method() == SimMethod::circulant);
    CHECK(s.min_relative_eigenvalue() >= -kEmbeddingTolerance);
  }
}

TEST_CASE("volterra at H = 1/2 returns the driving Brownian path") {
  const FbmModel model{2, 0.5, 1.0, 64};
  const auto r = simulate_fbm(model, SimMethod::volterra, RngStream{3, 0});
  REQUIRE(r.brownian.has_value());
  CHECK(r.path == *r.brownian);
}

TEST_CASE("Brownian case covariance for every method") {
  const FbmModel model{1, 0.5, 1.0, 8};
  for (auto m : {SimMethod::circulant, SimMethod::cholesky, SimMethod::volterra}) {
    const auto chk = covariance_check(model, m, 20000, 11);
    CAPTURE(to_string(m));
    CAPTURE(chk.max_abs_z);
    CHECK(chk.passed());
  }
}

TEST_CASE("rough covariance, circulant and cholesky") {
  const FbmModel model{1, 0.25, 1.0, 16};
  for (auto m : {SimMethod::circulant, SimMethod::cholesky}) {
    const auto chk = covariance_check(model, m, 20000, 5);
    CAPTURE(to_string(m));
    CAPTURE(chk.max_abs_z);
    CHECK(chk.passed());
  }
}

TEST_CASE("marginal variance and cross-component independence") {
  const FbmModel model{4, 0.25, 1.0, 32};
  const PathSampler sampler(model, SimMethod::circulant);
  auto ws = sampler.make_workspace();
  PathMatrix p(model);
  const std::size_t N = 20000;
  const std::size_t j = 20;
  std::vector<double> sq(model.d, 0.0);
  double cross01 = 0.0, cross12 = 0.0;
  for (std::size_t k = 0; k < N; ++k) {
    sampler.sample(RngStream{9, k}, ws, p);
    for (std::size_t c = 0; c < model.d; ++c) sq[c] += p(c, j) * p(c, j);
    cross01 += p(0, j) * p(1, j);
    cross12 += p(1, j) * p(2, j);
  }
  const double var = std::pow(model.time(j), 2 * model.H);
  for (double s : sq) CHECK(std::abs(s / N - var) < 4 * var * std::sqrt(2.0 / N));
  CHECK(std::abs(cross01 / N / var) < 4 / std::sqrt(double(N)));
  CHECK(std::abs(cross12 / N / var) < 4 / std::sqrt(double(N)));
}

TEST_CASE("volterra matches the fBm law up to discretization") {
  const FbmModel model{1, 0.25, 1.0, 64};
  const PathSampler sampler(model, SimMethod::volterra);
  auto ws = sampler.make_workspace();
  PathMatrix p(model);
  const std::size_t N = 20000;
  double s_end = 0.0, s_mid = 0.0;
  for (std::size_t k = 0; k < N; ++k) {
    sampler.sample(RngStream{21, k}, ws, p);
    s_end += p(0, 64) * p(0, 64);
    s_mid += p(0, 64) * p(0, 32);
  }
  CHECK(std::abs(s_end / N - 1.0) < 4 * std::sqrt(2.0 / N));
  CHECK(std::abs(s_mid / N - fbm_covariance(0.5, 1.0, 0.25)) < 0.05);
}

TEST_CASE("add_drift") {
  const FbmModel model{2, 0.25, 1.0, 8};
  const PathMatrix zero(model);
  const auto shifted = add_drift(zero, linear_drift(2, 1.0), model);
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t j = 0; j <= model.n; ++j) CHECK(shifted(c, j) == model.time(j));
  }
  const auto x = simulate_fbm(model, SimMethod::circulant, RngStream{1, 1}).path;
  CHECK(add_drift(x, linear_drift(2, 0.0), model) == x);
  auto y = add_drift(x, linear_drift(2, 1.0), model);
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t j = 0; j <= model.n; ++j) y(c, j) -= model.time(j);
  }
  // exact up to the rounding of one addition and one subtraction
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t j = 0; j <= model.n; ++j) {
      CHECK(std::abs(y(c, j) - x(c, j)) <= 2 * std::numeric_limits<double>::epsilon() *
                                               (std::abs(x(c, j)) + model.time(j)));
    }
  }
  CHECK_THROWS_AS(add_drift(x, linear_drift(3, 1.0), model), std::invalid_argument);
}

TEST_CASE("path csv") {
  const FbmModel model{2, 0.5, 1.0, 4};
  const auto r = simulate_fbm(model, SimMethod::cholesky, RngStream{5, 0});
  std::ostringstream a, b;
  write_path_csv(a, r.path, model);
  write_path_csv(b, simulate_fbm(model, SimMethod::cholesky, RngStream{5, 0}).path, model);
  CHECK(a.str() == b.str());
  std::istringstream in(a.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,comp_1,comp_2");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 5);
}

TEST_CASE("sample_brownian reproduces the volterra driving path") {
  const FbmModel model{3, 0.25, 1.0, 40};
  const auto r = simulate_fbm(model, SimMethod::volterra, RngStream{77, 4});
  PathMatrix w(model);
  std::vector<double> scratch;
  sample_brownian(RngStream{77, 4}, model, w, scratch);
  CHECK(w == *r.brownian);
}
