#pragma once

#include <functional>
#include <vector>

namespace fbmjs {

/// Values of a function on a uniform grid starting at 0.
struct SampledFunction {
  std::vector<double> grid;
  std::vector<double> values;
};

/// An absolutely continuous function given by its value and a.e. derivative.
struct AcFunction {
  std::function<double(double)> value;
  std::function<double(double)> derivative;

  bool has_derivative() const { return static_cast<bool>(derivative); }
};

/// Samples f on the grid.
SampledFunction sample(const AcFunction& f, const std::vector<double>& grid);

}  // namespace fbmjs
