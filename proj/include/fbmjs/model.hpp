#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace fbmjs {

/// The ambient statistical model: d independent fBm components with Hurst
/// index H on the uniform grid t_i = i T / n, i = 0..n.
struct FbmModel {
  std::size_t d = 1;
  double H = 0.25;
  double T = 1.0;
  std::size_t n = 256;

  /// Throws std::invalid_argument on d == 0, H outside (0,1), T < 0, n == 0.
  void validate() const;
  /// Additionally rejects H >= 1/2.
  void require_rough() const;

  double dt() const { return T / static_cast<double>(n); }
  /// t_i; t_0 == 0 and t_n == T exactly.
  double time(std::size_t i) const {
    return i == n ? T : T * static_cast<double>(i) / static_cast<double>(n);
  }
  std::vector<double> grid() const;

  bool operator==(const FbmModel&) const = default;
};

/// d x (n+1) path values, row-major by component. Used for fBm samples,
/// driving Brownian paths, drifts and estimates alike.
class PathMatrix {
 public:
  PathMatrix() = default;
  PathMatrix(std::size_t components, std::size_t points)
      : components_(components), points_(points), values_(components * points, 0.0) {}
  explicit PathMatrix(const FbmModel& model) : PathMatrix(model.d, model.n + 1) {}

  std::size_t components() const { return components_; }
  std::size_t points() const { return points_; }

  double& operator()(std::size_t comp, std::size_t j) { return values_[comp * points_ + j]; }
  double operator()(std::size_t comp, std::size_t j) const { return values_[comp * points_ + j]; }

  std::span<double> row(std::size_t comp) {
    return {values_.data() + comp * points_, points_};
  }
  std::span<const double> row(std::size_t comp) const {
    return {values_.data() + comp * points_, points_};
  }
  std::span<const double> data() const { return values_; }
  std::span<double> data() { return values_; }

  /// Squared Euclidean norm of the column at grid index j.
  double column_norm2(std::size_t j) const {
    double s = 0.0;
    for (std::size_t c = 0; c < components_; ++c) {
      const double v = (*this)(c, j);
      s += v * v;
    }
    return s;
  }

  void require_shape(const FbmModel& model) const {
    if (components_ != model.d || points_ != model.n + 1) {
      throw std::invalid_argument("PathMatrix: shape does not match model");
    }
  }

  bool operator==(const PathMatrix&) const = default;

 private:
  std::size_t components_ = 0;
  std::size_t points_ = 0;
  std::vector<double> values_;
};

}  // namespace fbmjs
