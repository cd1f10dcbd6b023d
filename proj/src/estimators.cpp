#include "fbmjs/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fbmjs {

RFunctionSpec r_one() {
  return {[](double) { return 1.0; }, [](double) { return 0.0; }, "1"};
}

RFunctionSpec r_rational() {
  return {[](double u) { return u / (1.0 + u); },
          [](double u) { return 1.0 / ((1.0 + u) * (1.0 + u)); }, "u/(1+u)"};
}

RFunctionSpec r_power_rational(double p, double c) {
  if (!(p > 0.0) || !(c > 0.0)) throw std::invalid_argument("r_power_rational: p and c must be positive");
  return {[p, c](double u) {
            const double up = std::pow(u, p);
            return up / (c + up);
          },
          [p, c](double u) {
            if (u <= 0.0) return 0.0;
            const double up = std::pow(u, p);
            return c * p * up / (u * (c + up) * (c + up));
          },
          "u^p/(c+u^p)"};
}

RProbeReport probe_r_function(const RFunctionSpec& r) {
  RProbeReport rep;
  if (!r.r || !r.r_prime) {
    rep.in_unit_range = rep.increasing = rep.derivative_consistent = false;
    return rep;
  }
  constexpr int kProbes = 1000;
  const double lo = std::log(1e-8), hi = std::log(1e4);
  for (int k = 0; k < kProbes; ++k) {
    const double u = std::exp(lo + (hi - lo) * k / (kProbes - 1));
    const double v = r.r(u);
    const double dv = r.r_prime(u);
    if (!(v >= 0.0 && v <= 1.0)) rep.in_unit_range = false;
    if (!(dv >= 0.0)) rep.increasing = false;
    if (std::abs(dv) > 1e-8) {
      const double h = 1e-5 * u;
      const double fd = (r.r(u + h) - r.r(u - h)) / (2.0 * h);
      if (!(std::abs(fd - dv) <= 1e-5 * std::abs(dv))) rep.derivative_consistent = false;
    }
  }
  return rep;
}

double shrink_factor(double u, double t, const ShrinkageSpec& spec) {
  return shrink_factor(u, std::pow(t, 2.0 * spec.H), spec.a, spec.r);
}

PathMatrix mle_estimate(const PathMatrix& path) { return path; }

PathMatrix shrinkage_estimate(const PathMatrix& path, const ShrinkageSpec& spec, const FbmModel& model) {
  path.require_shape(model);
  PathMatrix out(model);
  for (std::size_t j = 1; j <= model.n; ++j) {
    const double f = shrink_factor(path.column_norm2(j), model.time(j), spec);
    for (std::size_t c = 0; c < model.d; ++c) out(c, j) = f * path(c, j);
  }
  return out;
}

namespace {

double norm2(std::span<const double> x) {
  double u = 0.0;
  for (double v : x) u += v * v;
  return u;
}

}  // namespace

void shrinkage_g(std::span<const double> x, double t, const ShrinkageSpec& spec, std::span<double> out) {
  if (out.size() != x.size()) throw std::invalid_argument("shrinkage_g: size mismatch");
  const double f = shrink_factor(norm2(x), t, spec) - 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = f * x[i];
}

double shrinkage_divergence(std::span<const double> x, double t, const ShrinkageSpec& spec) {
  const double u = norm2(x);
  if (!(u > 0.0)) throw std::invalid_argument("shrinkage_divergence: x must be nonzero");
  const double d = static_cast<double>(x.size());
  return -spec.a * std::pow(t, 2.0 * spec.H) * (2.0 * spec.r.r_prime(u) + (d - 2.0) * spec.r.r(u) / u);
}

double stein_integrand_u(double u, double t2H, const ShrinkageSpec& spec, std::size_t d) {
  if (!(u > 0.0)) throw std::invalid_argument("stein_integrand: |x|^2 must be positive");
  const double r = spec.r.r(u);
  const double dd = static_cast<double>(d);
  return spec.a * t2H * t2H *
         (spec.a * r * r / u - 2.0 * (dd - 2.0) * r / u - 4.0 * spec.r.r_prime(u));
}

double stein_integrand(std::span<const double> x, double t, const ShrinkageSpec& spec, std::size_t d) {
  if (x.size() != d) throw std::invalid_argument("stein_integrand: x has the wrong dimension");
  return stein_integrand_u(norm2(x), std::pow(t, 2.0 * spec.H), spec, d);
}

DominanceVerdict validate_dominance_conditions(const ShrinkageSpec& spec, std::size_t d) {
  DominanceVerdict v;
  if (d < 3) v.violations.push_back("d >= 3 fails (d = " + std::to_string(d) + ")");
  const double bound = 2.0 * (static_cast<double>(d) - 2.0);
  if (!(spec.a > 0.0 && spec.a <= bound)) {
    v.violations.push_back("0 < a <= 2(d-2) fails (a = " + std::to_string(spec.a) + ")");
  }
  if (!(spec.H < 0.5)) v.violations.push_back("H < 1/2 fails (H = " + std::to_string(spec.H) + ")");
  const auto probe = probe_r_function(spec.r);
  if (!probe.in_unit_range) v.violations.push_back("0 <= r <= 1 fails");
  if (!probe.increasing) v.violations.push_back("r increasing fails");
  if (!probe.derivative_consistent) v.violations.push_back("r' does not match r");
  v.certified = v.violations.empty();
  return v;
}

PathMatrix Estimator::apply(const PathMatrix& path, const FbmModel& model) const {
  return shrinkage ? shrinkage_estimate(path, *shrinkage, model) : mle_estimate(path);
}

const std::vector<std::string>& estimator_labels() {
  static const std::vector<std::string> labels{"mle", "js", "js-rational", "custom"};
  return labels;
}

Estimator make_estimator(const EstimatorParams& p, double H) {
  if (p.label == "mle") return {"mle", std::nullopt};
  if (!(p.a > 0.0) || !std::isfinite(p.a)) throw std::invalid_argument("estimator.a must be positive");
  if (p.label == "js") return {"js", ShrinkageSpec{p.a, r_one(), H}};
  if (p.label == "js-rational") return {"js-rational", ShrinkageSpec{p.a, r_rational(), H}};
  if (p.label == "custom") {
    return {"custom", ShrinkageSpec{p.a, r_power_rational(p.custom_power, p.custom_scale), H}};
  }
  throw std::invalid_argument("unknown estimator '" + p.label + "'");
}

}  // namespace fbmjs
