#include "fbmjs/model.hpp"

#include <cmath>

namespace fbmjs {

void FbmModel::validate() const {
  if (d == 0) throw std::invalid_argument("FbmModel: dimension d must be >= 1");
  if (!(H > 0.0 && H < 1.0)) throw std::invalid_argument("FbmModel: H must lie in (0,1)");
  if (!(T >= 0.0) || !std::isfinite(T)) throw std::invalid_argument("FbmModel: T must be finite and >= 0");
  if (n == 0) throw std::invalid_argument("FbmModel: n must be >= 1");
}

void FbmModel::require_rough() const {
  validate();
  if (!(H < 0.5)) throw std::invalid_argument("FbmModel: this operation requires H < 1/2");
}

std::vector<double> FbmModel::grid() const {
  std::vector<double> t(n + 1);
  for (std::size_t i = 0; i <= n; ++i) t[i] = time(i);
  return t;
}

}  // namespace fbmjs
