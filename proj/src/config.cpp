#include "fbmjs/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace fbmjs {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    if constexpr (std::is_same_v<T, double>) {
      out += fmt(v[i]);
    } else {
      out += v[i];
    }
  }
  return out;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

struct Entry {
  std::string value;
  std::string where;  // "file:line"
};

class Reader {
 public:
  explicit Reader(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  double number(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    const auto& e = entries_.at(key);
    double v = 0.0;
    const auto* end = e.value.data() + e.value.size();
    const auto res = std::from_chars(e.value.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end || !std::isfinite(v)) fail(key, "expected a finite number");
    return v;
  }

  std::uint64_t integer(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const auto& e = entries_.at(key);
    std::uint64_t v = 0;
    const auto* end = e.value.data() + e.value.size();
    const auto res = std::from_chars(e.value.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end) fail(key, "expected a non-negative integer");
    return v;
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    return has(key) ? entries_.at(key).value : fallback;
  }

  std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback) const {
    if (!has(key)) return fallback;
    std::vector<double> out;
    if (entries_.at(key).value.empty()) return out;
    for (const auto& item : split_list(entries_.at(key).value)) {
      double v = 0.0;
      const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
      if (res.ec != std::errc() || res.ptr != item.data() + item.size() || !std::isfinite(v)) {
        fail(key, "expected a comma-separated list of numbers");
      }
      out.push_back(v);
    }
    return out;
  }

  template <class Parse>
  auto parsed(const std::string& key, const std::string& fallback, Parse parse) const {
    try {
      return parse(text(key, fallback));
    } catch (const std::invalid_argument& e) {
      fail(key, e.what());
    }
  }

  [[noreturn]] void fail(const std::string& key, const std::string& why) const {
    throw ConfigError(entries_.at(key).where + ": key '" + key + "': " + why);
  }

 private:
  std::map<std::string, Entry> entries_;
};

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "model.d",          "model.H",          "model.T",           "model.n",
      "method",           "estimator.labels", "estimator.a",       "estimator.custom_power",
      "estimator.custom_scale", "drift.kind", "drift.c",           "drift.hurst",
      "drift.power",      "n_reps",           "seed",              "output.dir",
      "sweep.a",          "stein.t",          "stein.theta",       "stein.n_samples",
      "kernel.points",    "simulate.replicate"};
  return keys;
}

void ExperimentConfig::validate() const {
  try {
    model.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(model.T > 0.0)) throw ConfigError("key 'model.T': must be positive");
  if (estimators.empty()) throw ConfigError("key 'estimator.labels': at least one estimator required");
  for (const auto& label : estimators) {
    const auto& known = estimator_labels();
    if (std::find(known.begin(), known.end(), label) == known.end()) {
      throw ConfigError("key 'estimator.labels': unknown estimator '" + label + "'");
    }
  }
  if (!(estimator_a > 0.0)) throw ConfigError("key 'estimator.a': must be positive");
  if (!(custom_power > 0.0)) throw ConfigError("key 'estimator.custom_power': must be positive");
  if (!(custom_scale > 0.0)) throw ConfigError("key 'estimator.custom_scale': must be positive");
  if (n_reps < 2) throw ConfigError("key 'n_reps': at least 2 replicates required");
  if (sweep_a.empty()) throw ConfigError("key 'sweep.a': at least one value required");
  for (double a : sweep_a) {
    if (!(a > 0.0)) throw ConfigError("key 'sweep.a': values must be positive");
  }
  if (!(stein_t > 0.0)) throw ConfigError("key 'stein.t': must be positive");
  if (!stein_theta.empty() && stein_theta.size() != model.d) {
    throw ConfigError("key 'stein.theta': needs model.d = " + std::to_string(model.d) + " entries");
  }
  if (stein_samples < 2) throw ConfigError("key 'stein.n_samples': at least 2 samples required");
  if (kernel_points == 0) throw ConfigError("key 'kernel.points': must be positive");
  if (output_dir.empty()) throw ConfigError("key 'output.dir': must not be empty");
}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  std::map<std::string, Entry> entries;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  const auto& keys = config_keys();
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string where = source + ":" + std::to_string(line_no);
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + ": missing key before '='");
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ConfigError(where + ": unknown key '" + key + "'");
    }
    if (entries.count(key)) throw ConfigError(where + ": key '" + key + "' given twice");
    entries[key] = {value, where};
  }

  const Reader r(std::move(entries));
  ExperimentConfig c;
  c.model.d = r.integer("model.d", c.model.d);
  c.model.H = r.number("model.H", c.model.H);
  c.model.T = r.number("model.T", c.model.T);
  c.model.n = r.integer("model.n", c.model.n);
  c.method = r.parsed("method", std::string(to_string(c.method)),
                      [](const std::string& s) { return parse_sim_method(s); });
  if (r.has("estimator.labels")) {
    c.estimators = split_list(r.text("estimator.labels", ""));
    for (const auto& label : c.estimators) {
      const auto& known = estimator_labels();
      if (std::find(known.begin(), known.end(), label) == known.end()) {
        r.fail("estimator.labels", "unknown estimator '" + label + "'");
      }
    }
  }
  c.estimator_a = r.number("estimator.a", c.estimator_a);
  c.custom_power = r.number("estimator.custom_power", c.custom_power);
  c.custom_scale = r.number("estimator.custom_scale", c.custom_scale);
  c.drift.kind = r.parsed("drift.kind", std::string(to_string(c.drift.kind)),
                          [](const std::string& s) { return parse_drift_kind(s); });
  c.drift.c = r.number("drift.c", c.drift.c);
  c.drift.hurst = r.number("drift.hurst", c.drift.hurst);
  c.drift.power = r.number("drift.power", c.drift.power);
  c.n_reps = r.integer("n_reps", c.n_reps);
  c.seed = r.integer("seed", c.seed);
  c.output_dir = r.text("output.dir", c.output_dir);
  c.sweep_a = r.numbers("sweep.a", c.sweep_a);
  c.stein_t = r.number("stein.t", c.stein_t);
  c.stein_theta = r.numbers("stein.theta", c.stein_theta);
  c.stein_samples = r.integer("stein.n_samples", c.stein_samples);
  c.kernel_points = r.integer("kernel.points", c.kernel_points);
  c.simulate_replicate = r.integer("simulate.replicate", c.simulate_replicate);
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

std::string to_config_text(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "model.d = " << c.model.d << '\n'
     << "model.H = " << fmt(c.model.H) << '\n'
     << "model.T = " << fmt(c.model.T) << '\n'
     << "model.n = " << c.model.n << '\n'
     << "method = " << to_string(c.method) << '\n'
     << "estimator.labels = " << join(c.estimators) << '\n'
     << "estimator.a = " << fmt(c.estimator_a) << '\n'
     << "estimator.custom_power = " << fmt(c.custom_power) << '\n'
     << "estimator.custom_scale = " << fmt(c.custom_scale) << '\n'
     << "drift.kind = " << to_string(c.drift.kind) << '\n'
     << "drift.c = " << fmt(c.drift.c) << '\n'
     << "drift.hurst = " << fmt(c.drift.hurst) << '\n'
     << "drift.power = " << fmt(c.drift.power) << '\n'
     << "n_reps = " << c.n_reps << '\n'
     << "seed = " << c.seed << '\n'
     << "output.dir = " << c.output_dir << '\n'
     << "sweep.a = " << join(c.sweep_a) << '\n'
     << "stein.t = " << fmt(c.stein_t) << '\n'
     << "stein.theta = " << join(c.stein_theta) << '\n'
     << "stein.n_samples = " << c.stein_samples << '\n'
     << "kernel.points = " << c.kernel_points << '\n'
     << "simulate.replicate = " << c.simulate_replicate << '\n';
  return os.str();
}

void save_config(const std::filesystem::path& path, const ExperimentConfig& config) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << to_config_text(config);
}

}  // namespace fbmjs
