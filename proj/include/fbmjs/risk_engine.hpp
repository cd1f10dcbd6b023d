#pragma once

#include "fbmjs/drift_spec.hpp"
#include "fbmjs/estimators.hpp"
#include "fbmjs/model.hpp"
#include "fbmjs/parallel.hpp"
#include "fbmjs/sim_core.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace fbmjs {

/// Monte Carlo size and streams. Replicate k uses RngStream{seed, k}.
struct McSettings {
  SimMethod method = SimMethod::circulant;
  std::size_t n_reps = 50000;
  std::uint64_t seed = 1;
  ExecPolicy policy = ExecPolicy::parallel;
};

struct RiskEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_reps = 0;
  std::uint64_t seed = 0;
  std::string estimator_label;
  std::string drift_label;
};

struct DominanceReport {
  RiskEstimate risk;      ///< risk of the shrinkage estimator
  RiskEstimate mle_risk;  ///< risk of the MLE on the same replicates
  double delta_mean = 0.0;
  double delta_std_error = 0.0;
  double ci95_upper = 0.0;
  double stein_form_mean = 0.0;
  double stein_form_std_error = 0.0;
  bool certified_conditions = false;
  std::vector<std::string> violations;
  /// |delta_mean - stein_form_mean| in units of the combined standard error.
  double stein_agreement_z() const;
};

/// T^{2H+1} / (2H+1) d.
double cramer_rao_bound(const FbmModel& model);

/// E_theta int_0^T |delta_t - theta_t|^2 dt. Each replicate simulates X with
/// zero drift, observes X + theta, applies the estimator and integrates the
/// error by the trapezoid rule (t_0 integrand 0).
RiskEstimate quadratic_risk_mc(const Estimator& estimator, const DriftSpec& drift,
                               const FbmModel& model, const McSettings& mc);

/// Shrinkage-minus-MLE risk with common random numbers, plus the mean of
/// int (|g|^2 + 2 t^{2H} div g) dt on the same replicates.
DominanceReport risk_difference_paired(const ShrinkageSpec& spec, const DriftSpec& drift,
                                       const FbmModel& model, const McSettings& mc);

struct DominanceCase {
  ShrinkageSpec spec;
  DriftSpec drift;
};
/// risk_difference_paired for many cases at once: each replicate path is
/// simulated once and reused by every case.
std::vector<DominanceReport> risk_difference_batch(std::span<const DominanceCase> cases,
                                                   const FbmModel& model, const McSettings& mc);

/// The 18 (a, r, theta) cases of the standard sweep for one (d, H):
/// a in {0.5, 1, 1.5} (d-2), r in {1, u/(1+u)}, theta in {0, linear(1), power2H(1, H)}.
std::vector<DominanceCase> standard_sweep_cases(const FbmModel& model);

/// "js(a=1)"-style label for a shrinkage spec.
std::string shrinkage_label(const ShrinkageSpec& spec);

/// E int_0^T |g(B_t + theta_t, t)|^2 dt, the integrability requirement on
/// the shrinkage term.
RiskEstimate shrinkage_energy_mc(const ShrinkageSpec& spec, const DriftSpec& drift,
                                 const FbmModel& model, const McSettings& mc);

struct SteinIdentityCheck {
  double lhs = 0.0;  ///< E sum_i g^i(B_t, t) (B^i_t - theta^i_t)
  double rhs = 0.0;  ///< t^{2H} E div g(B_t, t)
  double lhs_std_error = 0.0;
  double rhs_std_error = 0.0;
  double combined_std_error = 0.0;
  bool passed(double z_limit = 4.0) const;
};
/// Gaussian integration by parts at a single time: B_t ~ N(theta_t, t^{2H} I).
SteinIdentityCheck stein_identity_check(const ShrinkageSpec& spec, double t,
                                        std::span<const double> theta_t, std::size_t n_samples,
                                        std::uint64_t seed, ExecPolicy policy = ExecPolicy::parallel);

struct InverseNormCheck {
  double mc_value = 0.0;
  double std_error = 0.0;
  double exact = 0.0;  ///< T^{1-2H} / ((1-2H)(d-2))
  double relative_error() const { return mc_value / exact - 1.0; }
};
/// E int_0^T |B_t|^{-2} dt. The [0, t_1] sliver uses |B_{t_1}|^{-2} t_1 / (1-2H),
/// the rest the trapezoid rule. Requires d >= 3 and H < 1/2.
InverseNormCheck inverse_norm_moment_check(const FbmModel& model, const McSettings& mc);

struct UnbiasednessCheck {
  double max_bias = 0.0;  ///< max over grid times of |mean(delta_t) - theta_t|
  double max_z = 0.0;     ///< max over times and components of |bias| / std error
  std::vector<double> bias_norm;  ///< per grid time
  std::vector<double> std_error;  ///< per grid time, largest over components
  bool unbiased(double z_limit = 4.0) const { return max_z <= z_limit; }
};
UnbiasednessCheck unbiasedness_check(const Estimator& estimator, const DriftSpec& drift,
                                     const FbmModel& model, const McSettings& mc);

}  // namespace fbmjs
