#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace fbmjs {

/// Euler Gamma for z > 0. Throws std::invalid_argument otherwise.
double gamma_fn(double z);

/// Euler Beta for a, b > 0.
double beta_fn(double a, double b);

/// Gauss-Legendre rule mapped to [0, 1].
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached rules; supported orders are 4, 8, 16 and 32.
const QuadratureRule& gauss_legendre(int order);

/// Integrand position handed to singular-aware rules. `from_left` and
/// `from_right` are the distances to the interval ends computed without
/// cancellation, so integrands can evaluate (x - a)^p and (b - x)^p safely
/// even when x rounds to an endpoint.
struct QuadPoint {
  double x;
  double from_left;
  double from_right;
};

/// Integrates f over [a, b] when f behaves like (x - a)^left_exp near a and
/// (b - x)^right_exp near b (exponents > -1). The interval is split at its
/// midpoint and each half is graded with x - a = h v^k, k = 1 / (1 + exp),
/// which turns the power singularity into a bounded integrand.
template <class F>
double integrate_singular(F&& f, double a, double b, double left_exp,
                          double right_exp, const QuadratureRule& rule) {
  const double width = b - a;
  const double h = 0.5 * width;
  const double kl = left_exp < 0.0 ? 1.0 / (1.0 + left_exp) : 1.0;
  const double kr = right_exp < 0.0 ? 1.0 / (1.0 + right_exp) : 1.0;
  double total = 0.0;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const double v = rule.nodes[q];
    const double w = rule.weights[q];
    const double dl = h * std::pow(v, kl);
    const double jl = h * kl * std::pow(v, kl - 1.0);
    total += w * jl * f(QuadPoint{a + dl, dl, width - dl});
    const double dr = h * std::pow(v, kr);
    const double jr = h * kr * std::pow(v, kr - 1.0);
    total += w * jr * f(QuadPoint{b - dr, width - dr, dr});
  }
  return total;
}

/// Plain Gauss-Legendre on [a, b] for integrands smooth on the interval.
template <class F>
double integrate_smooth(F&& f, double a, double b, const QuadratureRule& rule) {
  const double width = b - a;
  double total = 0.0;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const double d = width * rule.nodes[q];
    total += rule.weights[q] * f(QuadPoint{a + d, d, width - d});
  }
  return width * total;
}

/// Sample mean and standard error (sample sd / sqrt(n)), reduced in index
/// order so the result does not depend on how the values were produced.
struct MeanAndError {
  double mean = 0.0;
  double std_error = 0.0;
};
MeanAndError mean_and_error(std::span<const double> values);

/// Composite trapezoid on a uniform grid with the t_0 integrand taken as 0.
double trapezoid_from_zero(std::span<const double> integrand, double dt);

}  // namespace fbmjs
