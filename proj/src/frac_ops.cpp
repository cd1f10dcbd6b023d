#include "fbmjs/frac_ops.hpp"

#include "fbmjs/numerics.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace fbmjs {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

void require_hurst(double H) {
  if (!(H > 0.0 && H < 1.0)) throw std::invalid_argument("Hurst parameter must lie in (0,1)");
}

// K_H(t, s) ~ s^{-|H-1/2|} as s -> 0 and ~ (t-s)^{H-1/2} as s -> t.
double kernel_left_exponent(double H) { return -std::abs(H - 0.5); }
double kernel_right_exponent(double H) { return std::min(H - 0.5, 0.0); }

void require_uniform_grid(const std::vector<double>& grid) {
  if (grid.size() < 2 || grid.front() != 0.0) {
    throw std::invalid_argument("grid must start at 0 and contain at least two points");
  }
}

}  // namespace

SampledFunction sample(const AcFunction& f, const std::vector<double>& grid) {
  SampledFunction out{grid, std::vector<double>(grid.size())};
  for (std::size_t i = 0; i < grid.size(); ++i) out.values[i] = f.value(grid[i]);
  return out;
}

double c_H(double H) {
  require_hurst(H);
  return std::sqrt(2.0 * H * gamma_fn(1.5 - H) / (gamma_fn(H + 0.5) * gamma_fn(2.0 - 2.0 * H)));
}

KernelEvaluator::KernelEvaluator(double H) : H_(H), cH_(c_H(H)) {
  const auto& rule = gauss_legendre(32);
  w_ = rule.weights;
  y_ = rule.nodes;
  if (H < 0.5) {
    const double q = 0.5 - H;
    const double p = 1.0 / (H + 0.5);
    // int_0^1 (1-w)^{H-3/2} (w^{-1/2-H} - w^{-2H}) dw, continued analytically.
    J0_ = gamma_fn(H + 0.5) * gamma_fn(1.0 - 2.0 * H) / (q * gamma_fn(q));
    for (double v : y_) {
      ypow_.push_back(std::pow(v, 1.0 / q));
      vpow_.push_back(std::pow(v, p));
      vneg_.push_back(std::pow(v, -p));
    }
  } else if (H > 0.5) {
    const double p = 1.0 / (H - 0.5);
    for (double v : y_) vpow_.push_back(std::pow(v, p));
  }
}

double KernelEvaluator::eval(double t, double s, double gap) const {
  if (!(gap > 0.0)) return 0.0;
  if (H_ == 0.5) return 1.0;
  if (!(s > 0.0)) return kInf;

  if (H_ > 0.5) {
    // c_H s^{1/2-H} int_s^t (u-s)^{H-3/2} u^{H-1/2} du with
    // u = s + (t-s) v^{1/(H-1/2)}.
    const double r = gap / s;
    double acc = 0.0;
    for (std::size_t k = 0; k < w_.size(); ++k) {
      acc += w_[k] * std::exp((H_ - 0.5) * std::log1p(r * vpow_[k]));
    }
    return cH_ * std::pow(gap, H_ - 0.5) * acc;
  }

  const double q = 0.5 - H_;
  const double z = s / t;
  double inner = 0.0;
  if (z >= 0.5) {
    const double p = 1.0 / (H_ + 0.5);
    const double r = gap / s;
    double acc = 0.0;
    for (std::size_t k = 0; k < w_.size(); ++k) {
      acc += w_[k] * vneg_[k] * -std::expm1(-q * std::log1p(r * vpow_[k]));
    }
    inner = std::pow(gap, H_ - 0.5) * p * acc;
  } else {
    const double zq = std::pow(z, q);
    double acc = 0.0;
    for (std::size_t k = 0; k < w_.size(); ++k) {
      const double w = z * ypow_[k];
      acc += w_[k] * std::exp((H_ - 1.5) * std::log1p(-w)) * (1.0 - zq * y_[k]);
    }
    inner = std::pow(s, H_ - 0.5) * (J0_ - zq / q * acc);
  }
  return cH_ * (std::pow(gap, H_ - 0.5) + q * inner);
}

double kernel_K(double t, double s, double H) {
  require_hurst(H);
  if (t < 0.0 || s < 0.0) throw std::invalid_argument("kernel_K: times must be non-negative");
  return KernelEvaluator(H)(t, s);
}

double kernel_covariance(double t1, double t2, double H, std::size_t cells) {
  require_hurst(H);
  if (cells == 0) throw std::invalid_argument("kernel_covariance: need at least one cell");
  const double lo = std::min(t1, t2);
  const double hi = std::max(t1, t2);
  if (!(lo > 0.0)) return 0.0;
  const KernelEvaluator K(H);
  const double width = lo / static_cast<double>(cells);
  const bool same = lo == hi;
  const double le = kernel_left_exponent(H);
  const double re = kernel_right_exponent(H);
  const auto& r32 = gauss_legendre(32);
  const auto& r16 = gauss_legendre(16);
  const auto& r8 = gauss_legendre(8);

  double total = 0.0;
  for (std::size_t c = 1; c <= cells; ++c) {
    const double a = width * static_cast<double>(c - 1);
    const double b = c == cells ? lo : width * static_cast<double>(c);
    const bool first = c == 1;
    const bool last = c == cells;
    auto integrand = [&](const QuadPoint& qp) {
      const double gap_lo = last ? qp.from_right : lo - qp.x;
      const double k_lo = K.eval(lo, qp.x, gap_lo);
      const double k_hi = same ? k_lo : K.eval(hi, qp.x, hi - qp.x);
      return k_lo * k_hi;
    };
    if (first || last) {
      const double left_exp = first ? 2.0 * le : 0.0;
      const double right_exp = last ? (same ? 2.0 * re : re) : 0.0;
      total += integrate_singular(integrand, a, b, left_exp, right_exp, r32);
    } else if (c == 2 || c + 1 == cells) {
      total += integrate_smooth(integrand, a, b, r16);
    } else {
      total += integrate_smooth(integrand, a, b, r8);
    }
  }
  return total;
}

KernelMoments::KernelMoments(double H, double T, std::size_t n)
    : H_(H), T_(T), n_(n), dt_(T / static_cast<double>(n)) {
  require_hurst(H);
  if (n == 0 || !(T > 0.0)) throw std::invalid_argument("KernelMoments: need n >= 1 and T > 0");
  const std::size_t size = n * (n + 1) / 2;
  left_.assign(size, 0.0);
  right_.assign(size, 0.0);
  average_.assign(size, 0.0);

  if (H == 0.5) {
    for (std::size_t k = 0; k < size; ++k) {
      left_[k] = 0.5 * dt_;
      right_[k] = 0.5 * dt_;
      average_[k] = 1.0;
    }
    return;
  }

  const KernelEvaluator K(H);
  const auto& r32 = gauss_legendre(32);
  const auto& r16 = gauss_legendre(16);
  const auto& r4 = gauss_legendre(4);
  auto time = [&](std::size_t i) {
    return i == n ? T : T * static_cast<double>(i) / static_cast<double>(n);
  };

#pragma omp parallel for schedule(dynamic, 8)
  for (std::size_t i = 1; i <= n; ++i) {
    const double ti = time(i);
    for (std::size_t j = 1; j <= i; ++j) {
      const double a = time(j - 1);
      const double b = time(j);
      const bool diagonal = j == i;
      auto kernel_at = [&](const QuadPoint& qp) {
        return K.eval(ti, qp.x, diagonal ? qp.from_right : ti - qp.x);
      };
      auto left_hat = [&](const QuadPoint& qp) { return kernel_at(qp) * qp.from_right / dt_; };
      auto right_hat = [&](const QuadPoint& qp) { return kernel_at(qp) * qp.from_left / dt_; };
      double ml = 0.0;
      double mr = 0.0;
      if (j == 1 || diagonal) {
        const double le = j == 1 ? kernel_left_exponent(H) : 0.0;
        const double re = diagonal ? kernel_right_exponent(H) : 0.0;
        ml = integrate_singular(left_hat, a, b, le, re, r32);
        mr = integrate_singular(right_hat, a, b, le, re, r32);
      } else if (j == 2 || j + 1 == i) {
        ml = integrate_smooth(left_hat, a, b, r16);
        mr = integrate_smooth(right_hat, a, b, r16);
      } else {
        ml = integrate_smooth(left_hat, a, b, r4);
        mr = integrate_smooth(right_hat, a, b, r4);
      }
      const std::size_t k = index(i, j);
      left_[k] = ml;
      right_[k] = mr;
      average_[k] = (ml + mr) / dt_;
    }
  }
}

std::shared_ptr<const KernelMoments> KernelMoments::get(double H, double T, std::size_t n) {
  static std::mutex mutex;
  static std::map<std::tuple<double, double, std::size_t>, std::shared_ptr<const KernelMoments>> cache;
  const auto key = std::make_tuple(H, T, n);
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto built = std::make_shared<const KernelMoments>(H, T, n);
  std::lock_guard lock(mutex);
  return cache.emplace(key, std::move(built)).first->second;
}

SampledFunction rl_integral(const SampledFunction& f, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("rl_integral: alpha must lie in (0,1]");
  require_uniform_grid(f.grid);
  if (f.values.size() != f.grid.size()) throw std::invalid_argument("rl_integral: size mismatch");
  const std::size_t n = f.grid.size() - 1;
  const double h = f.grid.back() / static_cast<double>(n);
  const double scale = std::pow(h, alpha) / gamma_fn(alpha + 2.0);
  const double a1 = alpha + 1.0;

  // Differences of (k+1)^{a+1} - 2 k^{a+1} + (k-1)^{a+1} depend only on k.
  std::vector<double> pw(n + 2);
  for (std::size_t k = 0; k < pw.size(); ++k) pw[k] = std::pow(static_cast<double>(k), a1);
  std::vector<double> interior(n + 1, 0.0);
  for (std::size_t k = 1; k <= n; ++k) interior[k] = pw[k + 1] - 2.0 * pw[k] + pw[k - 1];

  SampledFunction out{f.grid, std::vector<double>(n + 1, 0.0)};
  for (std::size_t i = 1; i <= n; ++i) {
    const double di = static_cast<double>(i);
    double acc = (pw[i - 1] - (di - 1.0 - alpha) * std::pow(di, alpha)) * f.values[0];
    for (std::size_t j = 1; j < i; ++j) acc += interior[i - j] * f.values[j];
    acc += f.values[i];
    out.values[i] = scale * acc;
  }
  return out;
}

double rl_integral_at(const std::function<double(double)>& f, double alpha, double x) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("rl_integral: alpha must lie in (0,1]");
  if (!(x > 0.0)) return 0.0;
  auto integrand = [&](const QuadPoint& qp) {
    return std::pow(qp.from_right, alpha - 1.0) * f(qp.x);
  };
  const double right_exp = alpha < 1.0 ? alpha - 1.0 : 0.0;
  return integrate_singular(integrand, 0.0, x, -0.75, right_exp, gauss_legendre(32)) / gamma_fn(alpha);
}

SampledFunction rl_integral(const AcFunction& f, double alpha, const std::vector<double>& grid) {
  require_uniform_grid(grid);
  SampledFunction out{grid, std::vector<double>(grid.size(), 0.0)};
  for (std::size_t i = 1; i < grid.size(); ++i) out.values[i] = rl_integral_at(f.value, alpha, grid[i]);
  return out;
}

double rl_derivative_at(const AcFunction& f, double alpha, double x) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("rl_derivative: alpha must lie in (0,1)");
  if (!(x > 0.0)) return kNaN;
  const auto& rule = gauss_legendre(32);
  const double fx = f.value(x);
  const double h = 0.5 * x;

  // [0, x/2]: y = h v^4 absorbs a possible power singularity of f at 0.
  double left = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    const double v = rule.nodes[k];
    const double y = h * v * v * v * v;
    const double jac = 4.0 * h * v * v * v;
    left += rule.weights[k] * jac * (fx - f.value(y)) * std::pow(x - y, -alpha - 1.0);
  }

  // [x/2, x]: x - y = h w^{1/(1-alpha)} turns (x-y)^{-alpha} dy into a constant.
  const double expo = 1.0 / (1.0 - alpha);
  double right = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    const double e = h * std::pow(rule.nodes[k], expo);
    double quotient = 0.0;
    if (e > 1e-6 * x) {
      quotient = (fx - f.value(x - e)) / e;
    } else if (f.has_derivative()) {
      quotient = f.derivative(x - 0.5 * e);
    } else {
      const double step = 1e-6 * x;
      quotient = (f.value(x) - f.value(x - step)) / step;
    }
    right += rule.weights[k] * quotient;
  }
  right *= std::pow(h, 1.0 - alpha) / (1.0 - alpha);

  return (fx * std::pow(x, -alpha) + alpha * (left + right)) / gamma_fn(1.0 - alpha);
}

SampledFunction rl_derivative(const AcFunction& f, double alpha, const std::vector<double>& grid) {
  require_uniform_grid(grid);
  SampledFunction out{grid, std::vector<double>(grid.size(), kNaN)};
  for (std::size_t i = 1; i < grid.size(); ++i) out.values[i] = rl_derivative_at(f, alpha, grid[i]);
  return out;
}

SampledFunction apply_K(const SampledFunction& f, double H) {
  require_hurst(H);
  require_uniform_grid(f.grid);
  if (f.values.size() != f.grid.size()) throw std::invalid_argument("apply_K: size mismatch");
  const std::size_t n = f.grid.size() - 1;
  const auto moments = KernelMoments::get(H, f.grid.back(), n);
  const auto& v = f.values;

  // First-cell model f ~ f_1 (s/t_1)^beta when f(t_0) is not finite.
  const bool singular_start = !std::isfinite(v[0]);
  double beta = 0.0;
  if (singular_start && n >= 2 && v[1] != 0.0 && v[2] / v[1] > 0.0) {
    beta = std::log(v[2] / v[1]) / std::log(f.grid[2] / f.grid[1]);
  }
  if (beta <= -1.0) throw std::invalid_argument("apply_K: input not integrable at 0");
  const KernelEvaluator K(H);
  const double t1 = f.grid[1];

  SampledFunction out{f.grid, std::vector<double>(n + 1, 0.0)};
  for (std::size_t i = 1; i <= n; ++i) {
    double acc = 0.0;
    if (singular_start) {
      const double ti = f.grid[i];
      auto integrand = [&](const QuadPoint& qp) {
        const double gap = i == 1 ? qp.from_right : ti - qp.x;
        return K.eval(ti, qp.x, gap) * v[1] * std::pow(qp.x / t1, beta);
      };
      const double le = beta + kernel_left_exponent(H);
      const double re = i == 1 ? kernel_right_exponent(H) : 0.0;
      acc += integrate_singular(integrand, 0.0, t1, std::min(le, 0.0), re, gauss_legendre(32));
    } else {
      acc += moments->left(i, 1) * v[0] + moments->right(i, 1) * v[1];
    }
    for (std::size_t j = 2; j <= i; ++j) {
      acc += moments->left(i, j) * v[j - 1] + moments->right(i, j) * v[j];
    }
    out.values[i] = acc;
  }
  return out;
}

double kernel_inverse_scale(double H) { return 1.0 / (c_H(H) * gamma_fn(H + 0.5)); }

double apply_K_inverse_at(const AcFunction& f, double H, double t, KInverseScale scale) {
  require_hurst(H);
  if (H > 0.5) throw std::invalid_argument("apply_K_inverse: requires H <= 1/2 (use apply_K_inverse_smooth)");
  if (!f.has_derivative()) throw std::invalid_argument("apply_K_inverse: derivative required");
  if (!(t > 0.0)) return kNaN;
  if (H == 0.5) return f.derivative(t);
  const double q = 0.5 - H;
  auto g = [&](double s) { return s > 0.0 ? std::pow(s, q) * f.derivative(s) : 0.0; };
  const double literal = std::pow(t, -q) * rl_integral_at(g, q, t);
  return scale == KInverseScale::literal ? literal : literal * kernel_inverse_scale(H);
}

SampledFunction apply_K_inverse(const AcFunction& f, double H, const std::vector<double>& grid,
                                KInverseScale scale) {
  require_uniform_grid(grid);
  require_hurst(H);
  if (H > 0.5) throw std::invalid_argument("apply_K_inverse: requires H <= 1/2 (use apply_K_inverse_smooth)");
  if (!f.has_derivative()) throw std::invalid_argument("apply_K_inverse: derivative required");
  SampledFunction out{grid, std::vector<double>(grid.size(), kNaN)};
  for (std::size_t i = 1; i < grid.size(); ++i) out.values[i] = apply_K_inverse_at(f, H, grid[i], scale);
  return out;
}

double apply_K_inverse_smooth_at(const AcFunction& f, double H, double t, KInverseScale scale) {
  require_hurst(H);
  if (H < 0.5) throw std::invalid_argument("apply_K_inverse_smooth: requires H >= 1/2");
  if (!f.has_derivative()) throw std::invalid_argument("apply_K_inverse_smooth: derivative required");
  if (!(t > 0.0)) return kNaN;
  if (H == 0.5) return f.derivative(t);
  const double shift = H - 0.5;
  AcFunction g;
  g.value = [&](double s) { return s > 0.0 ? std::pow(s, -shift) * f.derivative(s) : 0.0; };
  g.derivative = [&g](double s) {
    const double step = 1e-6 * s;
    return (g.value(s + step) - g.value(s - step)) / (2.0 * step);
  };
  const double literal = std::pow(t, shift) * rl_derivative_at(g, shift, t);
  return scale == KInverseScale::literal ? literal : literal * kernel_inverse_scale(H);
}

SampledFunction apply_K_inverse_smooth(const AcFunction& f, double H, const std::vector<double>& grid,
                                       KInverseScale scale) {
  require_uniform_grid(grid);
  SampledFunction out{grid, std::vector<double>(grid.size(), kNaN)};
  for (std::size_t i = 1; i < grid.size(); ++i) {
    out.values[i] = apply_K_inverse_smooth_at(f, H, grid[i], scale);
  }
  return out;
}

}  // namespace fbmjs
