#include "fbmjs/sim_core.hpp"

#include "fbmjs/errors.hpp"
#include "fbmjs/frac_ops.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <string>

namespace fbmjs {

namespace {

// FFTW planning is not thread-safe; execution on new arrays is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

void require_hurst(double H) {
  if (!(H > 0.0 && H < 1.0)) throw std::invalid_argument("Hurst parameter must lie in (0,1)");
}

}  // namespace

struct PathSampler::FftPlan {
  fftw_plan plan = nullptr;
  explicit FftPlan(std::size_t m) {
    std::vector<std::complex<double>> in(m), out(m);
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(m), reinterpret_cast<fftw_complex*>(in.data()),
                            reinterpret_cast<fftw_complex*>(out.data()), FFTW_FORWARD,
                            FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan == nullptr) throw NumericalError("FFTW could not create a plan");
  }
  ~FftPlan() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  void execute(std::vector<std::complex<double>>& in, std::vector<std::complex<double>>& out) const {
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(in.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
  }
};

std::string_view to_string(SimMethod method) {
  switch (method) {
    case SimMethod::circulant: return "circulant";
    case SimMethod::cholesky: return "cholesky";
    case SimMethod::volterra: return "volterra";
  }
  return "unknown";
}

SimMethod parse_sim_method(std::string_view name) {
  if (name == "circulant") return SimMethod::circulant;
  if (name == "cholesky") return SimMethod::cholesky;
  if (name == "volterra") return SimMethod::volterra;
  throw std::invalid_argument("unknown simulation method '" + std::string(name) + "'");
}

double fbm_covariance(double s, double t, double H) {
  require_hurst(H);
  if (s < 0.0 || t < 0.0) throw std::invalid_argument("fbm_covariance: times must be non-negative");
  const double h2 = 2.0 * H;
  return 0.5 * (std::pow(s, h2) + std::pow(t, h2) - std::pow(std::abs(t - s), h2));
}

double fgn_autocovariance(std::size_t k, double H, double dt) {
  require_hurst(H);
  if (!(dt > 0.0)) throw std::invalid_argument("fgn_autocovariance: dt must be positive");
  const double h2 = 2.0 * H;
  const double kk = static_cast<double>(k);
  const double lower = k == 0 ? 1.0 : std::pow(kk - 1.0, h2);
  return 0.5 * std::pow(dt, h2) * (std::pow(kk + 1.0, h2) - 2.0 * std::pow(kk, h2) + lower);
}

PathSampler::PathSampler(const FbmModel& model, SimMethod requested)
    : model_(model), requested_(requested), method_(requested) {
  model_.validate();
  if (!(model_.T > 0.0)) throw std::invalid_argument("PathSampler: T must be positive");
  switch (requested) {
    case SimMethod::circulant:
      try {
        init_circulant();
      } catch (const EmbeddingError&) {
        method_ = SimMethod::cholesky;
        init_cholesky();
      }
      break;
    case SimMethod::cholesky:
      init_cholesky();
      break;
    case SimMethod::volterra:
      moments_ = KernelMoments::get(model_.H, model_.T, model_.n);
      break;
  }
}

PathSampler::~PathSampler() = default;

void PathSampler::init_circulant() {
  const std::size_t n = model_.n;
  const std::size_t m = 2 * n;
  std::vector<std::complex<double>> row(m), eig(m);
  for (std::size_t k = 0; k <= n; ++k) row[k] = fgn_autocovariance(k, model_.H, model_.dt());
  for (std::size_t k = 1; k < n; ++k) row[m - k] = row[k];
  plan_ = std::make_unique<FftPlan>(m);
  plan_->execute(row, eig);

  double max_eig = 0.0;
  double min_eig = 0.0;
  for (const auto& e : eig) {
    max_eig = std::max(max_eig, e.real());
    min_eig = std::min(min_eig, e.real());
  }
  min_rel_eig_ = min_eig / max_eig;
  if (min_eig < -kEmbeddingTolerance * max_eig) {
    plan_.reset();
    throw EmbeddingError("circulant embedding has a negative eigenvalue");
  }
  sqrt_eigen_.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    sqrt_eigen_[k] = std::sqrt(std::max(eig[k].real(), 0.0) / static_cast<double>(m));
  }
}

void PathSampler::init_cholesky() {
  const std::size_t n = model_.n;
  Eigen::MatrixXd cov(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double c = fbm_covariance(model_.time(i + 1), model_.time(j + 1), model_.H);
      cov(i, j) = c;
      cov(j, i) = c;
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("fBm covariance matrix is not positive definite");
  }
  const Eigen::MatrixXd L = llt.matrixL();
  chol_.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) chol_[i * n + j] = L(i, j);
  }
}

PathSampler::Workspace PathSampler::make_workspace() const {
  Workspace ws;
  const std::size_t n = model_.n;
  if (method_ == SimMethod::circulant) {
    ws.spectrum.resize(2 * n);
    ws.signal.resize(2 * n);
    ws.normals.resize(2 * n);
    ws.normals2.resize(2 * n);
  } else {
    ws.normals.resize(n);
    ws.increments.resize(n);
  }
  return ws;
}

void PathSampler::sample(const RngStream& stream, Workspace& ws, PathMatrix& out,
                         PathMatrix* brownian) const {
  out.require_shape(model_);
  switch (method_) {
    case SimMethod::circulant: sample_circulant(stream, ws, out); break;
    case SimMethod::cholesky: sample_cholesky(stream, ws, out); break;
    case SimMethod::volterra: sample_volterra(stream, ws, out, brownian); break;
  }
}

void PathSampler::sample_circulant(const RngStream& stream, Workspace& ws, PathMatrix& out) const {
  const std::size_t n = model_.n;
  const std::size_t m = 2 * n;
  // Real and imaginary parts of one transform are independent samples, so
  // components are generated in pairs (2p, 2p+1) from channels 2p and 2p+1.
  for (std::size_t p = 0; 2 * p < model_.d; ++p) {
    const auto c0 = static_cast<std::uint32_t>(2 * p);
    stream.fill_normals(c0, 0, ws.normals);
    stream.fill_normals(c0 + 1, 0, ws.normals2);
    for (std::size_t k = 0; k < m; ++k) {
      ws.spectrum[k] = sqrt_eigen_[k] * std::complex<double>(ws.normals[k], ws.normals2[k]);
    }
    plan_->execute(ws.spectrum, ws.signal);
    auto first = out.row(2 * p);
    first[0] = 0.0;
    for (std::size_t j = 0; j < n; ++j) first[j + 1] = first[j] + ws.signal[j].real();
    if (2 * p + 1 < model_.d) {
      auto second = out.row(2 * p + 1);
      second[0] = 0.0;
      for (std::size_t j = 0; j < n; ++j) second[j + 1] = second[j] + ws.signal[j].imag();
    }
  }
}

void PathSampler::sample_cholesky(const RngStream& stream, Workspace& ws, PathMatrix& out) const {
  const std::size_t n = model_.n;
  for (std::size_t c = 0; c < model_.d; ++c) {
    stream.fill_normals(static_cast<std::uint32_t>(c), 0, ws.normals);
    auto row = out.row(c);
    row[0] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double* L = chol_.data() + i * n;
      double acc = 0.0;
      for (std::size_t j = 0; j <= i; ++j) acc += L[j] * ws.normals[j];
      row[i + 1] = acc;
    }
  }
}

void PathSampler::sample_volterra(const RngStream& stream, Workspace& ws, PathMatrix& out,
                                  PathMatrix* brownian) const {
  const std::size_t n = model_.n;
  const double sqrt_dt = std::sqrt(model_.dt());
  if (brownian != nullptr) brownian->require_shape(model_);
  for (std::size_t c = 0; c < model_.d; ++c) {
    stream.fill_normals(static_cast<std::uint32_t>(c), 0, ws.normals);
    for (std::size_t j = 0; j < n; ++j) ws.increments[j] = sqrt_dt * ws.normals[j];
    auto row = out.row(c);
    row[0] = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      const auto weights = moments_->average_row(i);
      double acc = 0.0;
      for (std::size_t j = 0; j < i; ++j) acc += weights[j] * ws.increments[j];
      row[i] = acc;
    }
    if (brownian != nullptr) {
      auto w = brownian->row(c);
      w[0] = 0.0;
      for (std::size_t j = 0; j < n; ++j) w[j + 1] = w[j] + ws.increments[j];
    }
  }
}

SimulationResult simulate_fbm(const FbmModel& model, SimMethod method, const RngStream& stream) {
  const PathSampler sampler(model, method);
  auto ws = sampler.make_workspace();
  SimulationResult result{PathMatrix(model), std::nullopt, sampler.method()};
  if (sampler.method() == SimMethod::volterra) {
    result.brownian = PathMatrix(model);
    sampler.sample(stream, ws, result.path, &*result.brownian);
  } else {
    sampler.sample(stream, ws, result.path);
  }
  return result;
}

PathMatrix sample_drift(const DriftSpec& drift, const FbmModel& model) {
  if (drift.dimension() != model.d) throw std::invalid_argument("drift dimension does not match model");
  PathMatrix theta(model);
  for (std::size_t c = 0; c < model.d; ++c) {
    for (std::size_t j = 0; j <= model.n; ++j) theta(c, j) = drift.components[c].value(model.time(j));
  }
  return theta;
}

PathMatrix add_drift(const PathMatrix& path, const DriftSpec& drift, const FbmModel& model) {
  path.require_shape(model);
  const PathMatrix theta = sample_drift(drift, model);
  PathMatrix out = path;
  auto dst = out.data();
  const auto src = theta.data();
  for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
  return out;
}

void sample_brownian(const RngStream& stream, const FbmModel& model, PathMatrix& out,
                     std::vector<double>& scratch) {
  out.require_shape(model);
  scratch.resize(model.n);
  const double sqrt_dt = std::sqrt(model.dt());
  for (std::size_t c = 0; c < model.d; ++c) {
    stream.fill_normals(static_cast<std::uint32_t>(c), 0, scratch);
    auto w = out.row(c);
    w[0] = 0.0;
    for (std::size_t j = 0; j < model.n; ++j) w[j + 1] = w[j] + sqrt_dt * scratch[j];
  }
}

CovarianceCheck covariance_check(const FbmModel& model, SimMethod method, std::size_t n_paths,
                                 std::uint64_t seed, double z_limit) {
  const PathSampler sampler(model, method);
  auto ws = sampler.make_workspace();
  PathMatrix path(model);
  const std::size_t n = model.n;
  const std::size_t entries = n * (n + 1) / 2;
  std::vector<double> sum(entries, 0.0), sum_sq(entries, 0.0);
  for (std::size_t k = 0; k < n_paths; ++k) {
    sampler.sample(RngStream{seed, k}, ws, path);
    for (std::size_t c = 0; c < model.d; ++c) {
      const auto x = path.row(c);
      std::size_t e = 0;
      for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = 1; j <= i; ++j, ++e) {
          const double p = x[i] * x[j];
          sum[e] += p;
          sum_sq[e] += p * p;
        }
      }
    }
  }
  CovarianceCheck out;
  out.samples = n_paths * model.d;
  out.entries = entries;
  out.z_limit = z_limit;
  const double N = static_cast<double>(out.samples);
  std::size_t e = 0;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= i; ++j, ++e) {
      const double mean = sum[e] / N;
      const double var = std::max(sum_sq[e] / N - mean * mean, 0.0) * N / (N - 1.0);
      const double se = std::sqrt(var / N);
      const double z = std::abs(mean - fbm_covariance(model.time(i), model.time(j), model.H)) / se;
      out.max_abs_z = std::max(out.max_abs_z, z);
      if (z > z_limit) ++out.exceedances;
    }
  }
  return out;
}

void write_path_csv(std::ostream& os, const PathMatrix& path, const FbmModel& model) {
  path.require_shape(model);
  os << "t";
  for (std::size_t c = 0; c < model.d; ++c) os << ",comp_" << (c + 1);
  os << '\n';
  const auto old = os.precision(17);
  for (std::size_t j = 0; j <= model.n; ++j) {
    os << model.time(j);
    for (std::size_t c = 0; c < model.d; ++c) os << ',' << path(c, j);
    os << '\n';
  }
  os.precision(old);
}

}  // namespace fbmjs
