#pragma once

#include "fbmjs/drift_spec.hpp"
#include "fbmjs/model.hpp"
#include "fbmjs/random.hpp"

#include <complex>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

namespace fbmjs {

class KernelMoments;

enum class SimMethod { circulant, cholesky, volterra };

std::string_view to_string(SimMethod method);
/// Throws std::invalid_argument on an unknown name.
SimMethod parse_sim_method(std::string_view name);

/// E[B_s B_t] = (s^{2H} + t^{2H} - |t-s|^{2H}) / 2.
double fbm_covariance(double s, double t, double H);

/// Autocovariance at lag k of the increments of fBm on a grid of step dt.
double fgn_autocovariance(std::size_t k, double H, double dt);

/// Relative tolerance for negative circulant eigenvalues.
inline constexpr double kEmbeddingTolerance = 1e-10;

/// Precomputed sampler for one (model, method). Immutable after
/// construction and safe to share across threads; each thread needs its own
/// Workspace.
///
/// A circulant sampler whose embedding fails falls back to Cholesky; check
/// method() for what is actually used.
class PathSampler {
 public:
  PathSampler(const FbmModel& model, SimMethod requested);
  ~PathSampler();
  PathSampler(const PathSampler&) = delete;
  PathSampler& operator=(const PathSampler&) = delete;

  const FbmModel& model() const { return model_; }
  SimMethod method() const { return method_; }
  SimMethod requested_method() const { return requested_; }
  /// Smallest circulant eigenvalue relative to the largest (circulant only).
  double min_relative_eigenvalue() const { return min_rel_eig_; }

  struct Workspace {
    std::vector<std::complex<double>> spectrum;
    std::vector<std::complex<double>> signal;
    std::vector<double> normals;
    std::vector<double> normals2;
    std::vector<double> increments;
  };
  Workspace make_workspace() const;

  /// Writes one fBm sample into `out` (shape d x (n+1), column 0 zero). For
  /// the volterra method, `brownian` (when non-null) receives the driving
  /// Brownian path.
  void sample(const RngStream& stream, Workspace& ws, PathMatrix& out,
              PathMatrix* brownian = nullptr) const;

 private:
  struct FftPlan;

  void init_circulant();
  void init_cholesky();
  void sample_circulant(const RngStream& stream, Workspace& ws, PathMatrix& out) const;
  void sample_cholesky(const RngStream& stream, Workspace& ws, PathMatrix& out) const;
  void sample_volterra(const RngStream& stream, Workspace& ws, PathMatrix& out,
                       PathMatrix* brownian) const;

  FbmModel model_;
  SimMethod requested_;
  SimMethod method_;
  double min_rel_eig_ = 0.0;
  std::vector<double> sqrt_eigen_;
  std::unique_ptr<FftPlan> plan_;
  std::vector<double> chol_;  // lower triangle, row-major n x n
  std::shared_ptr<const KernelMoments> moments_;
};

struct SimulationResult {
  PathMatrix path;
  std::optional<PathMatrix> brownian;  // volterra only
  SimMethod method_used = SimMethod::circulant;
};

/// One d-dimensional fBm sample for the given stream.
SimulationResult simulate_fbm(const FbmModel& model, SimMethod method, const RngStream& stream);

/// out(i, j) = path(i, j) + theta^i(t_j).
PathMatrix add_drift(const PathMatrix& path, const DriftSpec& drift, const FbmModel& model);

/// CSV with header t,comp_1,...,comp_d and one row per grid point, 17
/// significant digits.
/// The driving Brownian path that the volterra method uses for `stream`,
/// without the cost of the kernel sums.
void sample_brownian(const RngStream& stream, const FbmModel& model, PathMatrix& out,
                     std::vector<double>& scratch);

/// Entrywise comparison of the empirical covariance of (B_{t_1},...,B_{t_n})
/// against fbm_covariance. Components are pooled as independent samples;
/// each entry's standard error is the sample standard deviation of the
/// products divided by sqrt(samples).
struct CovarianceCheck {
  std::size_t samples = 0;
  std::size_t entries = 0;
  std::size_t exceedances = 0;  ///< entries with |z| > z_limit
  double max_abs_z = 0.0;
  double z_limit = 0.0;
  bool passed() const { return exceedances == 0; }
};
CovarianceCheck covariance_check(const FbmModel& model, SimMethod method, std::size_t n_paths,
                                 std::uint64_t seed, double z_limit = 3.0);

void write_path_csv(std::ostream& os, const PathMatrix& path, const FbmModel& model);

}  // namespace fbmjs
