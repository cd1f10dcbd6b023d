#pragma once

#include "fbmjs/functions.hpp"

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace fbmjs {

/// Normalizing constant of the Volterra kernel,
/// sqrt(2H Gamma(3/2-H) / (Gamma(H+1/2) Gamma(2-2H))).
double c_H(double H);

/// Evaluator for the fBm Volterra kernel K_H(t, s) with the H-dependent
/// constants precomputed. K_H(t, s) = 0 for s >= t.
///
/// For H < 1/2 the inner integral of the kernel is evaluated two ways:
/// for s >= t/2 by the substitution u = s + (t-s) v^{1/(H+1/2)}, which leaves a
/// bounded integrand; for s < t/2 through w = s/u, where the integral over
/// [s/t, 1] is written as the analytically continued value over [0, 1] minus a
/// smooth remainder over [0, s/t]. Both use 32-point Gauss-Legendre.
class KernelEvaluator {
 public:
  explicit KernelEvaluator(double H);

  double H() const { return H_; }

  /// K_H(t, s). At s = 0 < t the kernel is 1 for H = 1/2 and diverges
  /// otherwise, reported as +infinity.
  double operator()(double t, double s) const { return eval(t, s, t - s); }

  /// Same, with the gap t - s supplied by the caller (avoids cancellation when
  /// s is within a few ulps of t).
  double eval(double t, double s, double gap) const;

 private:
  double H_;
  double cH_;
  double J0_ = 0.0;
  std::vector<double> w_;
  std::vector<double> y_;
  std::vector<double> ypow_;
  std::vector<double> vpow_;
  std::vector<double> vneg_;
};

double kernel_K(double t, double s, double H);

/// int_0^{min(t1,t2)} K_H(t1,u) K_H(t2,u) du by per-cell Gauss-Legendre with
/// graded rules in the cells touching u = 0 and u = min(t1,t2). Equals the fBm
/// covariance when kernel, constant and quadrature are all right.
double kernel_covariance(double t1, double t2, double H, std::size_t cells);

/// Per-cell moments of K_H(t_i, .) against the two hat functions of each grid
/// cell on the uniform grid t_i = i T / n. For i >= 1 and 1 <= j <= i:
///   left(i, j)  = int_{t_{j-1}}^{t_j} K(t_i, s) (t_j - s) / dt ds
///   right(i, j) = int_{t_{j-1}}^{t_j} K(t_i, s) (s - t_{j-1}) / dt ds
///   average(i, j) = (left + right) / dt
/// At H = 1/2 the averages are exactly 1.
class KernelMoments {
 public:
  KernelMoments(double H, double T, std::size_t n);

  /// Shared, process-wide cache keyed by (H, T, n).
  static std::shared_ptr<const KernelMoments> get(double H, double T, std::size_t n);

  double H() const { return H_; }
  double T() const { return T_; }
  std::size_t n() const { return n_; }
  double dt() const { return dt_; }

  double left(std::size_t i, std::size_t j) const { return left_[index(i, j)]; }
  double right(std::size_t i, std::size_t j) const { return right_[index(i, j)]; }
  double average(std::size_t i, std::size_t j) const { return average_[index(i, j)]; }
  /// Row i of the averages, j = 1..i stored at offsets 0..i-1.
  std::span<const double> average_row(std::size_t i) const {
    return {average_.data() + index(i, 1), i};
  }

 private:
  static std::size_t index(std::size_t i, std::size_t j) { return i * (i - 1) / 2 + (j - 1); }

  double H_;
  double T_;
  std::size_t n_;
  double dt_;
  std::vector<double> left_;
  std::vector<double> right_;
  std::vector<double> average_;
};

/// Left Riemann-Liouville integral I^alpha_{0+} of grid samples, alpha in
/// (0, 1]. Product integration: f piecewise linear between nodes, the
/// (x-y)^{alpha-1} moments integrated exactly.
SampledFunction rl_integral(const SampledFunction& f, double alpha);

/// I^alpha_{0+} of a callable at a point. The integrand may carry an
/// integrable power singularity at 0 no stronger than y^{-3/4}.
double rl_integral_at(const std::function<double(double)>& f, double alpha, double x);

/// I^alpha_{0+} of a callable on a grid.
SampledFunction rl_integral(const AcFunction& f, double alpha, const std::vector<double>& grid);

/// Left Riemann-Liouville derivative D^alpha_{0+} in Marchaud form,
/// alpha in (0, 1). Near y = x the difference quotient switches to the
/// supplied derivative (or a central difference when none is given).
double rl_derivative_at(const AcFunction& f, double alpha, double x);

/// D^alpha_{0+} f on a grid; the t_0 entry is NaN (not defined there).
SampledFunction rl_derivative(const AcFunction& f, double alpha, const std::vector<double>& grid);

/// (K_H f)(t_i) = int_0^{t_i} K_H(t_i, s) f(s) ds for piecewise-linear f using
/// the cached cell moments. A non-finite f(t_0) (e.g. f ~ t^{H-1/2}) is
/// handled by a power-law fit through (t_1, t_2) on the first cell.
SampledFunction apply_K(const SampledFunction& f, double H);

/// Which normalization of K_H^{-1} to use.
///
/// `literal` is t^{H-1/2} I^{1/2-H}(s^{1/2-H} f') as written for absolutely
/// continuous f, which gives K^{-1}(t^{2H}) = 2H Gamma(H+1/2) t^{H-1/2}.
/// That operator is c_H Gamma(H+1/2) times the inverse of apply_K with the
/// normalized kernel; `kernel_matched` divides that factor out so that
/// apply_K(apply_K_inverse(f)) == f.
enum class KInverseScale { literal, kernel_matched };

/// 1 / (c_H Gamma(H + 1/2)).
double kernel_inverse_scale(double H);

/// K_H^{-1} f at t > 0 for H <= 1/2 (at H = 1/2 this is f').
double apply_K_inverse_at(const AcFunction& f, double H, double t,
                          KInverseScale scale = KInverseScale::literal);

/// K_H^{-1} f on a grid for H <= 1/2; entry t_0 is NaN. Throws for H > 1/2 or
/// a missing derivative.
SampledFunction apply_K_inverse(const AcFunction& f, double H, const std::vector<double>& grid,
                                KInverseScale scale = KInverseScale::literal);

/// K_H^{-1} f = t^{H-1/2} D^{H-1/2}(s^{1/2-H} f') for H >= 1/2.
double apply_K_inverse_smooth_at(const AcFunction& f, double H, double t,
                                 KInverseScale scale = KInverseScale::literal);

SampledFunction apply_K_inverse_smooth(const AcFunction& f, double H,
                                       const std::vector<double>& grid,
                                       KInverseScale scale = KInverseScale::literal);

}  // namespace fbmjs
