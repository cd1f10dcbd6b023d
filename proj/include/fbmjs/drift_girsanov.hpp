#pragma once

#include "fbmjs/drift_spec.hpp"
#include "fbmjs/model.hpp"
#include "fbmjs/parallel.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fbmjs {

enum class DriftKind { zero, linear, power2H, custom };

std::string_view to_string(DriftKind kind);
/// Throws std::invalid_argument on an unknown name.
DriftKind parse_drift_kind(std::string_view name);

/// Parameters of the built-in drifts, the same in every component:
///   zero     theta = 0
///   linear   theta = c t
///   power2H  theta = c t^{2 hurst}   (hurst defaults to the model's H)
///   custom   theta = c t^power
struct DriftParams {
  DriftKind kind = DriftKind::zero;
  double c = 1.0;
  double hurst = 0.0;  ///< power2H only; <= 0 means "use the model's H"
  double power = 1.0;  ///< custom only
  bool operator==(const DriftParams&) const = default;
};

DriftSpec builtin_drift(const DriftParams& params, const FbmModel& model);
DriftSpec builtin_drift(DriftKind kind, const FbmModel& model, double c = 1.0);

/// Checks theta(0) = 0, finite values on the grid, and (where defined) the
/// derivative against central differences at interior probe points.
/// Throws std::invalid_argument describing the first violation.
void validate_drift(const DriftSpec& drift, const FbmModel& model);

/// int_0^T h(s)^2 ds from grid samples h(t_1..t_n) (entry 0 is ignored):
/// trapezoid over [t_1, T] plus the [0, t_1] sliver integrated analytically
/// for the power law through (t_1, h_1) and (t_2, h_2).
double squared_integral(std::span<const double> h, const FbmModel& model);

struct MembershipReport {
  std::vector<double> energy;          ///< per component, grid n
  std::vector<double> energy_refined;  ///< per component, grid 2n
  double refinement_ratio = 1.0;       ///< max over components of refined / coarse
  bool suspected_non_member = false;   ///< energy grew by more than 20%
};

/// Discrete int (K_H^{-1} theta^i)^2 ds (literal normalization) at n and 2n.
/// A diagnostic only. Requires H < 1/2.
MembershipReport validate_membership(const DriftSpec& drift, const FbmModel& model);

struct GirsanovEvaluation {
  double log_density = 0.0;
  double ito_term = 0.0;
  double energy_term = 0.0;  ///< 1/2 sum_i int (K_H^{-1} theta^i)^2 ds
};

/// log dP_theta/dP along driving Brownian paths, with K_H^{-1} theta
/// precomputed on the grid. Uses the kernel-matched inverse, so that under
/// exp(L) dP the volterra path B = int K dW is distributed as fBm + theta.
class GirsanovDensity {
 public:
  /// Requires H <= 1/2 and drift.dimension() == model.d.
  GirsanovDensity(const DriftSpec& drift, const FbmModel& model);

  const FbmModel& model() const { return model_; }
  double energy_term() const { return energy_term_; }
  /// K_H^{-1} theta^c on the grid; entry 0 is NaN.
  std::span<const double> integrand(std::size_t comp) const {
    return {h_.data() + comp * (model_.n + 1), model_.n + 1};
  }

  /// Ito term: sum_j h(t_{j-1}) (W_{t_j} - W_{t_{j-1}}), the first cell using
  /// h(t_1) in place of the singular value at 0.
  GirsanovEvaluation evaluate(const PathMatrix& W) const;

 private:
  FbmModel model_;
  std::vector<double> h_;
  double energy_term_ = 0.0;
};

GirsanovEvaluation girsanov_log_density(const PathMatrix& W, const DriftSpec& drift,
                                        const FbmModel& model);

struct MeanOneCheck {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_reps = 0;
  bool passed(double z_limit = 4.0) const;
};

/// E[exp L] over n_reps antithetic pairs (W, -W) of driving paths.
MeanOneCheck girsanov_mean_one_check(const DriftSpec& drift, const FbmModel& model,
                                     std::size_t n_reps, std::uint64_t seed,
                                     ExecPolicy policy = ExecPolicy::parallel);

struct ChangeOfMeasureCheck {
  double weighted_mean = 0.0;  ///< E_P[exp(L) F(B)]
  double weighted_std_error = 0.0;
  double shifted_mean = 0.0;   ///< E[F(X + theta)]
  double shifted_std_error = 0.0;
  std::size_t n_reps = 0;
  double combined_std_error() const;
  bool passed(double z_limit = 4.0) const;
};

/// Compares E_P[exp(L) F(B)] with E[F(X + theta)] for the bounded
/// functional F(B) = min(max_{i,j} |B^i_{t_j}|, clip). Both sides use the
/// volterra discretization; the shifted side uses replicate streams
/// n_reps..2 n_reps-1 so the two estimates are independent.
ChangeOfMeasureCheck change_of_measure_check(const DriftSpec& drift, const FbmModel& model,
                                             std::size_t n_reps, std::uint64_t seed,
                                             double clip = 10.0,
                                             ExecPolicy policy = ExecPolicy::parallel);

}  // namespace fbmjs
