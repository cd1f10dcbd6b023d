#pragma once

#include "fbmjs/drift_girsanov.hpp"
#include "fbmjs/estimators.hpp"
#include "fbmjs/model.hpp"
#include "fbmjs/sim_core.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace fbmjs {

/// A malformed or invalid configuration. The message names the line and/or
/// key at fault.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything a CLI run depends on. The text form is flat `key = value`
/// lines with `#` comments; see config_keys() for the accepted keys.
struct ExperimentConfig {
  FbmModel model{3, 0.25, 1.0, 256};
  SimMethod method = SimMethod::circulant;
  std::vector<std::string> estimators{"mle"};
  double estimator_a = 1.0;
  double custom_power = 1.0;
  double custom_scale = 1.0;
  DriftParams drift;
  std::size_t n_reps = 50000;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  std::vector<double> sweep_a{0.5, 1.0, 1.5};
  double stein_t = 1.0;
  std::vector<double> stein_theta;  ///< empty means the origin
  std::size_t stein_samples = 200000;
  std::size_t kernel_points = 16;
  std::size_t simulate_replicate = 0;

  /// Registry parameters for one of the configured labels.
  EstimatorParams estimator_params(const std::string& label) const {
    return {label, estimator_a, custom_power, custom_scale};
  }

  /// Cross-field checks (model ranges, labels, list lengths). Throws ConfigError.
  void validate() const;
  bool operator==(const ExperimentConfig&) const = default;
};

const std::vector<std::string>& config_keys();

/// `source` names the input in error messages.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);
/// Canonical text: every key, shortest round-trip number formatting.
std::string to_config_text(const ExperimentConfig& config);
void save_config(const std::filesystem::path& path, const ExperimentConfig& config);

}  // namespace fbmjs
