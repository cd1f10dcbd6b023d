#pragma once

#include "fbmjs/model.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fbmjs {

/// The shrinkage profile r(u) of u = |x|^2 and its derivative.
struct RFunctionSpec {
  std::function<double(double)> r;
  std::function<double(double)> r_prime;
  std::string label;
};

/// r == 1 (James-Stein).
RFunctionSpec r_one();
/// r(u) = u / (1 + u).
RFunctionSpec r_rational();
/// r(u) = u^p / (c + u^p), p > 0, c > 0.
RFunctionSpec r_power_rational(double p, double c);

/// Probe-based checks of an r-function on 1000 log-spaced points of
/// (1e-8, 1e4): 0 <= r <= 1, r' >= 0, and r' against central differences
/// (relative 1e-5 where |r'| > 1e-8).
struct RProbeReport {
  bool in_unit_range = true;
  bool increasing = true;
  bool derivative_consistent = true;
  bool ok() const { return in_unit_range && increasing && derivative_consistent; }
};
RProbeReport probe_r_function(const RFunctionSpec& r);

/// delta(x)_t = x - a t^{2H} r(|x|^2) / |x|^2 x, i.e. x + g(x, t) with
/// g(x, t) = -a t^{2H} r(|x|^2) / |x|^2 x.
struct ShrinkageSpec {
  double a = 1.0;
  RFunctionSpec r = r_one();
  double H = 0.25;
};

/// The factor multiplying x: 1 - a t^{2H} r(u) / u, or 1 when u < 1e-300.
double shrink_factor(double u, double t, const ShrinkageSpec& spec);
inline double shrink_factor(double u, double t2H, double a, const RFunctionSpec& r) {
  return u < 1e-300 ? 1.0 : 1.0 - a * t2H * r.r(u) / u;
}

/// The identity estimator.
PathMatrix mle_estimate(const PathMatrix& path);
/// Componentwise factor times the path; column 0 (t = 0) is set to zero.
PathMatrix shrinkage_estimate(const PathMatrix& path, const ShrinkageSpec& spec, const FbmModel& model);

/// g(x, t) written into `out` (same size as x).
void shrinkage_g(std::span<const double> x, double t, const ShrinkageSpec& spec, std::span<double> out);
/// sum_i d g^i / d x_i = -a t^{2H} (2 r'(u) + (d-2) r(u) / u).
double shrinkage_divergence(std::span<const double> x, double t, const ShrinkageSpec& spec);

/// |g|^2 + 2 t^{2H} div g = a t^{4H} (a r^2/u - 2(d-2) r/u - 4 r'), u = |x|^2.
/// Throws std::invalid_argument when u == 0 or x.size() != d.
double stein_integrand(std::span<const double> x, double t, const ShrinkageSpec& spec, std::size_t d);
/// The same in terms of u and t^{2H}.
double stein_integrand_u(double u, double t2H, const ShrinkageSpec& spec, std::size_t d);

struct DominanceVerdict {
  bool certified = false;
  std::vector<std::string> violations;
};
/// The sufficient conditions for dominance: d >= 3, 0 < a <= 2(d-2), H < 1/2,
/// and r within [0, 1] and increasing (by probe).
DominanceVerdict validate_dominance_conditions(const ShrinkageSpec& spec, std::size_t d);

/// Registry parameters. Labels: mle, js (r == 1), js-rational (u/(1+u)),
/// custom (u^p/(c+u^p) with p = custom_power, c = custom_scale).
struct EstimatorParams {
  std::string label = "mle";
  double a = 1.0;
  double custom_power = 1.0;
  double custom_scale = 1.0;
  bool operator==(const EstimatorParams&) const = default;
};

struct Estimator {
  std::string label;
  std::optional<ShrinkageSpec> shrinkage;  ///< empty for the MLE
  PathMatrix apply(const PathMatrix& path, const FbmModel& model) const;
};

const std::vector<std::string>& estimator_labels();
/// Throws std::invalid_argument on an unknown label or a <= 0.
Estimator make_estimator(const EstimatorParams& params, double H);

}  // namespace fbmjs
