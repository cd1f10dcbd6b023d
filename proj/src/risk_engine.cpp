#include "fbmjs/risk_engine.hpp"

#include "fbmjs/drift_girsanov.hpp"
#include "fbmjs/numerics.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <cmath>
#include <stdexcept>

namespace fbmjs {

namespace {

std::string shortest(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::vector<double> time_powers(const FbmModel& model, double exponent) {
  std::vector<double> p(model.n + 1);
  for (std::size_t j = 0; j <= model.n; ++j) p[j] = std::pow(model.time(j), exponent);
  return p;
}

/// Per-replicate quantities. The integrand buffers hold index 0 unused.
struct Replicate {
  PathSampler::Workspace ws;
  PathMatrix x;
  std::vector<double> integrand;
  std::vector<double> stein;
};

/// int |X_t|^2 dt: the MLE's error X + theta - theta is X itself.
double mle_error(const PathMatrix& x, const FbmModel& model, std::vector<double>& buf) {
  for (std::size_t j = 1; j <= model.n; ++j) buf[j] = x.column_norm2(j);
  return trapezoid_from_zero(buf, model.dt());
}

/// int |X_t + g(X_t + theta_t, t)|^2 dt and, when `stein_buf` is non-null,
/// int (|g|^2 + 2 t^{2H} div g) dt evaluated at the observed X + theta.
double shrinkage_error(const PathMatrix& x, const PathMatrix& theta, const ShrinkageSpec& spec,
                       std::span<const double> t2H, const FbmModel& model, std::vector<double>& buf,
                       std::vector<double>* stein_buf, double* stein_out) {
  const std::size_t d = model.d;
  for (std::size_t j = 1; j <= model.n; ++j) {
    double u = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      const double y = x(c, j) + theta(c, j);
      u += y * y;
    }
    const double gcoef = u < 1e-300 ? 0.0 : -spec.a * t2H[j] * spec.r.r(u) / u;
    double e = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      const double err = x(c, j) + gcoef * (x(c, j) + theta(c, j));
      e += err * err;
    }
    buf[j] = e;
    if (stein_buf != nullptr) (*stein_buf)[j] = stein_integrand_u(u, t2H[j], spec, d);
  }
  if (stein_buf != nullptr) *stein_out = trapezoid_from_zero(*stein_buf, model.dt());
  return trapezoid_from_zero(buf, model.dt());
}

Replicate make_replicate(const PathSampler& sampler, const FbmModel& model) {
  return {sampler.make_workspace(), PathMatrix(model), std::vector<double>(model.n + 1, 0.0),
          std::vector<double>(model.n + 1, 0.0)};
}

}  // namespace

double DominanceReport::stein_agreement_z() const {
  const double se = std::hypot(delta_std_error, stein_form_std_error);
  return std::abs(delta_mean - stein_form_mean) / se;
}

double cramer_rao_bound(const FbmModel& model) {
  model.validate();
  const double e = 2.0 * model.H + 1.0;
  return std::pow(model.T, e) / e * static_cast<double>(model.d);
}

std::string shrinkage_label(const ShrinkageSpec& spec) {
  const std::string base = spec.r.label == "1" ? "js" : spec.r.label == "u/(1+u)" ? "js-rational" : "custom";
  return base + "(a=" + shortest(spec.a) + ")";
}

RiskEstimate quadratic_risk_mc(const Estimator& estimator, const DriftSpec& drift,
                               const FbmModel& model, const McSettings& mc) {
  model.validate();
  const PathSampler sampler(model, mc.method);
  const PathMatrix theta = sample_drift(drift, model);
  const auto t2H = time_powers(model, 2.0 * model.H);
  std::vector<double> risk(mc.n_reps);
  for_each_replicate(
      mc.n_reps, mc.policy, [&] { return make_replicate(sampler, model); },
      [&](Replicate& r, std::size_t k) {
        sampler.sample(RngStream{mc.seed, k}, r.ws, r.x);
        risk[k] = estimator.shrinkage
                      ? shrinkage_error(r.x, theta, *estimator.shrinkage, t2H, model, r.integrand, nullptr, nullptr)
                      : mle_error(r.x, model, r.integrand);
      });
  const auto me = mean_and_error(risk);
  const std::string label = estimator.shrinkage ? shrinkage_label(*estimator.shrinkage) : estimator.label;
  return {me.mean, me.std_error, mc.n_reps, mc.seed, label, drift.label};
}

std::vector<DominanceReport> risk_difference_batch(std::span<const DominanceCase> cases,
                                                   const FbmModel& model, const McSettings& mc) {
  model.validate();
  const PathSampler sampler(model, mc.method);
  const auto t2H = time_powers(model, 2.0 * model.H);
  std::vector<PathMatrix> thetas;
  for (const auto& c : cases) thetas.push_back(sample_drift(c.drift, model));
  const std::size_t m = cases.size();
  const std::size_t n = mc.n_reps;
  std::vector<double> mle(n), risk(m * n), diff(m * n), stein(m * n);
  for_each_replicate(
      n, mc.policy, [&] { return make_replicate(sampler, model); },
      [&](Replicate& r, std::size_t k) {
        sampler.sample(RngStream{mc.seed, k}, r.ws, r.x);
        const double base = mle_error(r.x, model, r.integrand);
        mle[k] = base;
        for (std::size_t i = 0; i < m; ++i) {
          double s = 0.0;
          const double e = shrinkage_error(r.x, thetas[i], cases[i].spec, t2H, model, r.integrand, &r.stein, &s);
          risk[i * n + k] = e;
          diff[i * n + k] = e - base;
          stein[i * n + k] = s;
        }
      });
  const auto mle_me = mean_and_error(mle);
  std::vector<DominanceReport> out;
  out.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto span_of = [&](std::vector<double>& v) { return std::span<const double>(v).subspan(i * n, n); };
    const auto r_me = mean_and_error(span_of(risk));
    const auto d_me = mean_and_error(span_of(diff));
    const auto s_me = mean_and_error(span_of(stein));
    DominanceReport rep;
    rep.risk = {r_me.mean, r_me.std_error, n, mc.seed, shrinkage_label(cases[i].spec), cases[i].drift.label};
    rep.mle_risk = {mle_me.mean, mle_me.std_error, n, mc.seed, "mle", cases[i].drift.label};
    // Difference of the two means as quadratic_risk_mc would report them;
    // the standard error comes from the paired differences.
    rep.delta_mean = r_me.mean - mle_me.mean;
    rep.delta_std_error = d_me.std_error;
    rep.ci95_upper = rep.delta_mean + 1.96 * rep.delta_std_error;
    rep.stein_form_mean = s_me.mean;
    rep.stein_form_std_error = s_me.std_error;
    const auto verdict = validate_dominance_conditions(cases[i].spec, model.d);
    rep.certified_conditions = verdict.certified;
    rep.violations = verdict.violations;
    out.push_back(std::move(rep));
  }
  return out;
}

DominanceReport risk_difference_paired(const ShrinkageSpec& spec, const DriftSpec& drift,
                                       const FbmModel& model, const McSettings& mc) {
  const DominanceCase c{spec, drift};
  return risk_difference_batch(std::span<const DominanceCase>(&c, 1), model, mc).front();
}

std::vector<DominanceCase> standard_sweep_cases(const FbmModel& model) {
  std::vector<DominanceCase> cases;
  const double base = static_cast<double>(model.d) - 2.0;
  const std::vector<DriftSpec> drifts{builtin_drift(DriftKind::zero, model),
                                      builtin_drift(DriftKind::linear, model, 1.0),
                                      builtin_drift(DriftKind::power2H, model, 1.0)};
  for (double mult : {0.5, 1.0, 1.5}) {
    for (const auto& r : {r_one(), r_rational()}) {
      for (const auto& drift : drifts) cases.push_back({ShrinkageSpec{mult * base, r, model.H}, drift});
    }
  }
  return cases;
}

RiskEstimate shrinkage_energy_mc(const ShrinkageSpec& spec, const DriftSpec& drift,
                                 const FbmModel& model, const McSettings& mc) {
  model.validate();
  const PathSampler sampler(model, mc.method);
  const PathMatrix theta = sample_drift(drift, model);
  const auto t2H = time_powers(model, 2.0 * model.H);
  std::vector<double> values(mc.n_reps);
  for_each_replicate(
      mc.n_reps, mc.policy, [&] { return make_replicate(sampler, model); },
      [&](Replicate& r, std::size_t k) {
        sampler.sample(RngStream{mc.seed, k}, r.ws, r.x);
        for (std::size_t j = 1; j <= model.n; ++j) {
          double u = 0.0;
          for (std::size_t c = 0; c < model.d; ++c) {
            const double y = r.x(c, j) + theta(c, j);
            u += y * y;
          }
          const double gcoef = u < 1e-300 ? 0.0 : spec.a * t2H[j] * spec.r.r(u) / u;
          r.integrand[j] = gcoef * gcoef * u;
        }
        values[k] = trapezoid_from_zero(r.integrand, model.dt());
      });
  const auto me = mean_and_error(values);
  return {me.mean, me.std_error, mc.n_reps, mc.seed, shrinkage_label(spec), drift.label};
}

bool SteinIdentityCheck::passed(double z_limit) const {
  return std::abs(lhs - rhs) <= z_limit * combined_std_error;
}

SteinIdentityCheck stein_identity_check(const ShrinkageSpec& spec, double t,
                                        std::span<const double> theta_t, std::size_t n_samples,
                                        std::uint64_t seed, ExecPolicy policy) {
  if (!(t > 0.0)) throw std::invalid_argument("stein_identity_check: t must be positive");
  const std::size_t d = theta_t.size();
  if (d == 0) throw std::invalid_argument("stein_identity_check: empty theta");
  const double sd = std::pow(t, spec.H);
  const double t2H = sd * sd;
  std::vector<double> lhs(n_samples), rhs(n_samples);
  for_each_replicate(
      n_samples, policy, [&] { return std::vector<double>(d); },
      [&](std::vector<double>& b, std::size_t k) {
        const RngStream stream{seed, k};
        double u = 0.0;
        for (std::size_t c = 0; c < d; ++c) {
          b[c] = theta_t[c] + sd * stream.normal(static_cast<std::uint32_t>(c), 0);
          u += b[c] * b[c];
        }
        const double gcoef = u < 1e-300 ? 0.0 : -spec.a * t2H * spec.r.r(u) / u;
        double l = 0.0;
        for (std::size_t c = 0; c < d; ++c) l += gcoef * b[c] * (b[c] - theta_t[c]);
        lhs[k] = l;
        rhs[k] = t2H * shrinkage_divergence(b, t, spec);
      });
  const auto l = mean_and_error(lhs);
  const auto r = mean_and_error(rhs);
  return {l.mean, r.mean, l.std_error, r.std_error, std::hypot(l.std_error, r.std_error)};
}

InverseNormCheck inverse_norm_moment_check(const FbmModel& model, const McSettings& mc) {
  model.require_rough();
  if (model.d < 3) throw std::invalid_argument("inverse_norm_moment_check: requires d >= 3");
  const PathSampler sampler(model, mc.method);
  const double H = model.H;
  const double t1 = model.time(1);
  std::vector<double> values(mc.n_reps);
  for_each_replicate(
      mc.n_reps, mc.policy, [&] { return make_replicate(sampler, model); },
      [&](Replicate& r, std::size_t k) {
        sampler.sample(RngStream{mc.seed, k}, r.ws, r.x);
        double trap = 0.0;
        double prev = 1.0 / r.x.column_norm2(1);
        const double sliver = prev * t1 / (1.0 - 2.0 * H);
        for (std::size_t j = 2; j <= model.n; ++j) {
          const double cur = 1.0 / r.x.column_norm2(j);
          trap += 0.5 * (model.time(j) - model.time(j - 1)) * (prev + cur);
          prev = cur;
        }
        values[k] = sliver + trap;
      });
  const auto me = mean_and_error(values);
  const double exact = std::pow(model.T, 1.0 - 2.0 * H) / ((1.0 - 2.0 * H) * (double(model.d) - 2.0));
  return {me.mean, me.std_error, exact};
}

UnbiasednessCheck unbiasedness_check(const Estimator& estimator, const DriftSpec& drift,
                                     const FbmModel& model, const McSettings& mc) {
  model.validate();
  const PathSampler sampler(model, mc.method);
  const PathMatrix theta = sample_drift(drift, model);
  // Fixed-size chunks keep the summation order independent of threading.
  constexpr std::size_t kChunk = 512;
  const std::size_t chunks = (mc.n_reps + kChunk - 1) / kChunk;
  const std::size_t cells = model.d * (model.n + 1);
  std::vector<double> sums(chunks * cells, 0.0), squares(chunks * cells, 0.0);
  for_each_replicate(
      chunks, mc.policy, [&] { return make_replicate(sampler, model); },
      [&](Replicate& r, std::size_t chunk) {
        double* s = sums.data() + chunk * cells;
        double* q = squares.data() + chunk * cells;
        const std::size_t end = std::min(mc.n_reps, (chunk + 1) * kChunk);
        for (std::size_t k = chunk * kChunk; k < end; ++k) {
          sampler.sample(RngStream{mc.seed, k}, r.ws, r.x);
          auto xd = r.x.data();
          const auto th = theta.data();
          for (std::size_t e = 0; e < cells; ++e) xd[e] += th[e];
          const auto est = estimator.apply(r.x, model);
          const auto ed = est.data();
          for (std::size_t e = 0; e < cells; ++e) {
            const double err = ed[e] - th[e];
            s[e] += err;
            q[e] += err * err;
          }
        }
      });
  std::vector<double> sum(cells, 0.0), sq(cells, 0.0);
  for (std::size_t c = 0; c < chunks; ++c) {
    for (std::size_t e = 0; e < cells; ++e) {
      sum[e] += sums[c * cells + e];
      sq[e] += squares[c * cells + e];
    }
  }
  UnbiasednessCheck out;
  out.bias_norm.assign(model.n + 1, 0.0);
  out.std_error.assign(model.n + 1, 0.0);
  const double N = static_cast<double>(mc.n_reps);
  for (std::size_t j = 0; j <= model.n; ++j) {
    double b2 = 0.0;
    for (std::size_t c = 0; c < model.d; ++c) {
      const std::size_t e = c * (model.n + 1) + j;
      const double mean = sum[e] / N;
      const double var = std::max(sq[e] / N - mean * mean, 0.0) * N / (N - 1.0);
      const double se = std::sqrt(var / N);
      b2 += mean * mean;
      out.std_error[j] = std::max(out.std_error[j], se);
      if (se > 0.0) {
        out.max_z = std::max(out.max_z, std::abs(mean) / se);
      } else if (mean != 0.0) {
        out.max_z = std::numeric_limits<double>::infinity();
      }
    }
    out.bias_norm[j] = std::sqrt(b2);
    out.max_bias = std::max(out.max_bias, out.bias_norm[j]);
  }
  return out;
}

}  // namespace fbmjs
