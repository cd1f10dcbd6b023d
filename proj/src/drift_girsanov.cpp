#include "fbmjs/drift_girsanov.hpp"

#include "fbmjs/frac_ops.hpp"
#include "fbmjs/numerics.hpp"
#include "fbmjs/sim_core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace fbmjs {

namespace {

std::string shortest(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

DriftSpec replicate(AcFunction f, std::size_t d, std::string label) {
  DriftSpec spec;
  spec.components.assign(d, f);
  spec.label = std::move(label);
  return spec;
}

void require_dimension(const DriftSpec& drift, const FbmModel& model) {
  if (drift.dimension() != model.d) {
    throw std::invalid_argument("drift has " + std::to_string(drift.dimension()) +
                                " components but the model has d = " + std::to_string(model.d));
  }
}

double functional_max_abs(const PathMatrix& p, double clip) {
  double m = 0.0;
  for (double v : p.data()) m = std::max(m, std::abs(v));
  return std::min(m, clip);
}

}  // namespace

std::string_view to_string(DriftKind kind) {
  switch (kind) {
    case DriftKind::zero: return "zero";
    case DriftKind::linear: return "linear";
    case DriftKind::power2H: return "power2H";
    case DriftKind::custom: return "custom";
  }
  return "unknown";
}

DriftKind parse_drift_kind(std::string_view name) {
  for (auto k : {DriftKind::zero, DriftKind::linear, DriftKind::power2H, DriftKind::custom}) {
    if (name == to_string(k)) return k;
  }
  throw std::invalid_argument("unknown drift '" + std::string(name) + "'");
}

DriftSpec builtin_drift(const DriftParams& p, const FbmModel& model) {
  if (!std::isfinite(p.c) || !std::isfinite(p.hurst) || !std::isfinite(p.power)) {
    throw std::invalid_argument("drift parameters must be finite");
  }
  const double c = p.c;
  switch (p.kind) {
    case DriftKind::zero:
      return replicate({[](double) { return 0.0; }, [](double) { return 0.0; }}, model.d, "zero");
    case DriftKind::linear:
      return replicate({[c](double t) { return c * t; }, [c](double) { return c; }}, model.d,
                       "linear(" + shortest(c) + ")");
    case DriftKind::power2H:
    case DriftKind::custom: {
      const bool is_power2H = p.kind == DriftKind::power2H;
      const double hurst = p.hurst > 0.0 ? p.hurst : model.H;
      const double e = is_power2H ? 2.0 * hurst : p.power;
      if (!(e > 0.0)) throw std::invalid_argument("drift exponent must be positive");
      AcFunction f{[c, e](double t) { return t > 0.0 ? c * std::pow(t, e) : 0.0; },
                   [c, e](double t) { return c * e * std::pow(t, e - 1.0); }};
      const std::string label = is_power2H
                                    ? "power2H(" + shortest(c) + "," + shortest(hurst) + ")"
                                    : "custom(" + shortest(c) + "," + shortest(e) + ")";
      return replicate(std::move(f), model.d, label);
    }
  }
  throw std::invalid_argument("unknown drift kind");
}

DriftSpec builtin_drift(DriftKind kind, const FbmModel& model, double c) {
  return builtin_drift(DriftParams{kind, c}, model);
}

void validate_drift(const DriftSpec& drift, const FbmModel& model) {
  require_dimension(drift, model);
  for (std::size_t i = 0; i < drift.dimension(); ++i) {
    const auto& f = drift.components[i];
    const std::string who = "drift '" + drift.label + "' component " + std::to_string(i + 1);
    if (!f.value) throw std::invalid_argument(who + " has no value function");
    if (f.value(0.0) != 0.0) throw std::invalid_argument(who + " does not vanish at t = 0");
    for (std::size_t j = 0; j <= model.n; ++j) {
      if (!std::isfinite(f.value(model.time(j)))) {
        throw std::invalid_argument(who + " is not finite on the grid");
      }
    }
    if (!f.has_derivative()) continue;
    for (int k = 1; k <= 9; k += 2) {
      const double t = model.T * k / 10.0;
      const double step = 1e-5 * model.T;
      const double fd = (f.value(t + step) - f.value(t - step)) / (2.0 * step);
      const double d = f.derivative(t);
      const double scale = std::max({std::abs(d), std::abs(fd), 1e-8});
      if (!(std::abs(fd - d) <= 1e-6 * scale)) {
        throw std::invalid_argument(who + " derivative disagrees with central differences at t = " +
                                    shortest(t));
      }
    }
  }
}

double squared_integral(std::span<const double> h, const FbmModel& model) {
  const std::size_t n = model.n;
  if (h.size() != n + 1) throw std::invalid_argument("squared_integral: size mismatch");
  const double t1 = model.time(1);
  const double h1 = h[1];
  double sliver = h1 * h1 * t1;
  if (n >= 2) {
    const double h2 = h[2];
    if (h1 != 0.0 && h2 != 0.0 && (h1 > 0.0) == (h2 > 0.0)) {
      const double beta = std::log(h2 / h1) / std::log(model.time(2) / t1);
      const double e = 2.0 * beta + 1.0;
      sliver = e > 0.0 ? h1 * h1 * t1 / e : std::numeric_limits<double>::infinity();
    }
  }
  double trap = 0.0;
  for (std::size_t j = 1; j < n; ++j) {
    const double a = h[j], b = h[j + 1];
    trap += 0.5 * (model.time(j + 1) - model.time(j)) * (a * a + b * b);
  }
  return sliver + trap;
}

MembershipReport validate_membership(const DriftSpec& drift, const FbmModel& model) {
  model.require_rough();
  require_dimension(drift, model);
  FbmModel fine = model;
  fine.n = 2 * model.n;
  MembershipReport report;
  const auto grid = model.grid();
  const auto fine_grid = fine.grid();
  for (const auto& f : drift.components) {
    const auto h = apply_K_inverse(f, model.H, grid);
    const auto hf = apply_K_inverse(f, model.H, fine_grid);
    const double e = squared_integral(h.values, model);
    const double ef = squared_integral(hf.values, fine);
    report.energy.push_back(e);
    report.energy_refined.push_back(ef);
    double ratio = 1.0;
    if (e > 0.0) {
      ratio = ef / e;
    } else if (ef > 0.0) {
      ratio = std::numeric_limits<double>::infinity();
    }
    if (!std::isfinite(e) || !std::isfinite(ef)) ratio = std::numeric_limits<double>::infinity();
    report.refinement_ratio = std::max(report.refinement_ratio, ratio);
  }
  report.suspected_non_member = report.refinement_ratio > 1.2;
  return report;
}

GirsanovDensity::GirsanovDensity(const DriftSpec& drift, const FbmModel& model) : model_(model) {
  model_.validate();
  if (model_.H > 0.5) throw std::invalid_argument("Girsanov density requires H <= 1/2");
  require_dimension(drift, model_);
  const auto grid = model_.grid();
  h_.reserve(model_.d * (model_.n + 1));
  double energy = 0.0;
  for (const auto& f : drift.components) {
    const auto hk = apply_K_inverse(f, model_.H, grid, KInverseScale::kernel_matched);
    h_.insert(h_.end(), hk.values.begin(), hk.values.end());
    energy += squared_integral(hk.values, model_);
  }
  energy_term_ = 0.5 * energy;
  if (!std::isfinite(energy_term_)) {
    throw std::invalid_argument("drift '" + drift.label + "' has infinite discrete energy");
  }
}

GirsanovEvaluation GirsanovDensity::evaluate(const PathMatrix& W) const {
  W.require_shape(model_);
  double ito = 0.0;
  for (std::size_t c = 0; c < model_.d; ++c) {
    const auto h = integrand(c);
    const auto w = W.row(c);
    double s = h[1] * (w[1] - w[0]);
    for (std::size_t j = 2; j <= model_.n; ++j) s += h[j - 1] * (w[j] - w[j - 1]);
    ito += s;
  }
  return {ito - energy_term_, ito, energy_term_};
}

GirsanovEvaluation girsanov_log_density(const PathMatrix& W, const DriftSpec& drift,
                                        const FbmModel& model) {
  return GirsanovDensity(drift, model).evaluate(W);
}

bool MeanOneCheck::passed(double z_limit) const {
  return std::abs(mean - 1.0) <= z_limit * std_error;
}

MeanOneCheck girsanov_mean_one_check(const DriftSpec& drift, const FbmModel& model,
                                     std::size_t n_reps, std::uint64_t seed, ExecPolicy policy) {
  const GirsanovDensity density(drift, model);
  std::vector<double> values(n_reps);
  struct State {
    PathMatrix w;
    std::vector<double> scratch;
  };
  for_each_replicate(
      n_reps, policy, [&] { return State{PathMatrix(model), {}}; },
      [&](State& st, std::size_t k) {
        sample_brownian(RngStream{seed, k}, model, st.w, st.scratch);
        const auto g = density.evaluate(st.w);
        values[k] = 0.5 * (std::exp(g.ito_term - g.energy_term) + std::exp(-g.ito_term - g.energy_term));
      });
  const auto me = mean_and_error(values);
  return {me.mean, me.std_error, n_reps};
}

double ChangeOfMeasureCheck::combined_std_error() const {
  return std::hypot(weighted_std_error, shifted_std_error);
}

bool ChangeOfMeasureCheck::passed(double z_limit) const {
  return std::abs(weighted_mean - shifted_mean) <= z_limit * combined_std_error();
}

ChangeOfMeasureCheck change_of_measure_check(const DriftSpec& drift, const FbmModel& model,
                                             std::size_t n_reps, std::uint64_t seed, double clip,
                                             ExecPolicy policy) {
  const GirsanovDensity density(drift, model);
  const PathSampler sampler(model, SimMethod::volterra);
  const PathMatrix theta = sample_drift(drift, model);
  std::vector<double> weighted(n_reps), shifted(n_reps);
  struct State {
    PathSampler::Workspace ws;
    PathMatrix b;
    PathMatrix w;
  };
  for_each_replicate(
      n_reps, policy, [&] { return State{sampler.make_workspace(), PathMatrix(model), PathMatrix(model)}; },
      [&](State& st, std::size_t k) {
        sampler.sample(RngStream{seed, k}, st.ws, st.b, &st.w);
        weighted[k] = std::exp(density.evaluate(st.w).log_density) * functional_max_abs(st.b, clip);
        sampler.sample(RngStream{seed, n_reps + k}, st.ws, st.b);
        auto x = st.b.data();
        const auto th = theta.data();
        for (std::size_t e = 0; e < x.size(); ++e) x[e] += th[e];
        shifted[k] = functional_max_abs(st.b, clip);
      });
  const auto a = mean_and_error(weighted);
  const auto b = mean_and_error(shifted);
  return {a.mean, a.std_error, b.mean, b.std_error, n_reps};
}

}  // namespace fbmjs
