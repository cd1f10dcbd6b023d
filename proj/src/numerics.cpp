#include "fbmjs/numerics.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <stdexcept>

namespace fbmjs {

double gamma_fn(double z) {
  if (!(z > 0.0) || !std::isfinite(z)) {
    throw std::invalid_argument("gamma_fn: argument must be positive and finite");
  }
  return std::tgamma(z);
}

double beta_fn(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::invalid_argument("beta_fn: arguments must be positive");
  }
  return std::beta(a, b);
}

namespace {

template <unsigned N>
QuadratureRule make_rule() {
  using G = boost::math::quadrature::gauss<double, N>;
  const auto& x = G::abscissa();
  const auto& w = G::weights();
  QuadratureRule rule;
  // boost stores the non-negative half of the symmetric rule on [-1, 1].
  for (std::size_t i = x.size(); i-- > 0;) {
    if (x[i] == 0.0) continue;
    rule.nodes.push_back(0.5 * (1.0 - x[i]));
    rule.weights.push_back(0.5 * w[i]);
  }
  if (N % 2 == 1) {
    rule.nodes.push_back(0.5);
    rule.weights.push_back(0.5 * w[0]);
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) continue;
    rule.nodes.push_back(0.5 * (1.0 + x[i]));
    rule.weights.push_back(0.5 * w[i]);
  }
  return rule;
}

}  // namespace

const QuadratureRule& gauss_legendre(int order) {
  static const QuadratureRule r4 = make_rule<4>();
  static const QuadratureRule r8 = make_rule<8>();
  static const QuadratureRule r16 = make_rule<16>();
  static const QuadratureRule r32 = make_rule<32>();
  switch (order) {
    case 4: return r4;
    case 8: return r8;
    case 16: return r16;
    case 32: return r32;
    default: throw std::invalid_argument("gauss_legendre: unsupported order");
  }
}

MeanAndError mean_and_error(std::span<const double> values) {
  MeanAndError out;
  const std::size_t n = values.size();
  if (n == 0) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(n);
  if (n < 2) return out;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.std_error = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
  return out;
}

double trapezoid_from_zero(std::span<const double> integrand, double dt) {
  if (integrand.size() < 2) return 0.0;
  double sum = 0.0;
  for (std::size_t j = 1; j + 1 < integrand.size(); ++j) sum += integrand[j];
  sum += 0.5 * integrand.back();
  return dt * sum;
}

}  // namespace fbmjs
