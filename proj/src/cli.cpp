#include "fbmjs/cli.hpp"

#include "fbmjs/errors.hpp"
#include "fbmjs/frac_ops.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace fbmjs {

namespace {

namespace fs = std::filesystem;

std::size_t count_rows(const std::string& csv) {
  const auto lines = static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n'));
  return lines > 0 ? lines - 1 : 0;
}

class OutputDir {
 public:
  explicit OutputDir(const fs::path& dir) : dir_(dir) { fs::create_directories(dir_); }

  void csv(const std::string& name, const std::string& text) {
    write(name, text);
    files_.push_back({name, count_rows(text)});
  }
  void other(const std::string& name, const std::string& text) {
    write(name, text);
    files_.push_back({name, 0});
  }
  const fs::path& path() const { return dir_; }
  const std::vector<ManifestFile>& files() const { return files_; }

 private:
  void write(const std::string& name, const std::string& text) {
    std::ofstream out(dir_ / name, std::ios::binary);
    out << text;
    if (!out.flush()) throw std::runtime_error("cannot write '" + (dir_ / name).string() + "'");
  }
  fs::path dir_;
  std::vector<ManifestFile> files_;
};

/// The first shrinkage estimator named in the config.
Estimator first_shrinkage(const ExperimentConfig& c, const std::string& subcommand) {
  for (const auto& label : c.estimators) {
    if (label == "mle") continue;
    return make_estimator(c.estimator_params(label), c.model.H);
  }
  throw ConfigError("key 'estimator.labels': " + subcommand + " needs a shrinkage estimator (js, js-rational or custom)");
}

McSettings mc_settings(const ExperimentConfig& c) {
  return McSettings{c.method, c.n_reps, c.seed, ExecPolicy::parallel};
}

void run_simulate(const ExperimentConfig& c, OutputDir& out, RunManifest& m, std::ostream* log) {
  const PathSampler sampler(c.model, c.method);
  auto ws = sampler.make_workspace();
  PathMatrix x(c.model), w(c.model);
  const RngStream stream{c.seed, c.simulate_replicate};
  const bool volterra = sampler.method() == SimMethod::volterra;
  sampler.sample(stream, ws, x, volterra ? &w : nullptr);
  const auto drift = builtin_drift(c.drift, c.model);
  validate_drift(drift, c.model);
  std::ostringstream path_csv;
  write_path_csv(path_csv, add_drift(x, drift, c.model), c.model);
  out.csv("path.csv", path_csv.str());
  if (volterra) {
    std::ostringstream bm;
    write_path_csv(bm, w, c.model);
    out.csv("brownian.csv", bm.str());
  }
  m.info.emplace_back("method_used", std::string(to_string(sampler.method())));
  if (log) *log << "simulated one path (" << to_string(sampler.method()) << ") with drift " << drift.label << '\n';
}

void run_risk(const ExperimentConfig& c, OutputDir& out, RunManifest& m, std::ostream* log) {
  const auto drift = builtin_drift(c.drift, c.model);
  validate_drift(drift, c.model);
  std::ostringstream csv;
  write_risk_csv_header(csv);
  for (const auto& label : c.estimators) {
    const auto risk = quadratic_risk_mc(make_estimator(c.estimator_params(label), c.model.H), drift, c.model, mc_settings(c));
    write_risk_csv_row(csv, risk, c.model);
    if (log) {
      *log << risk.estimator_label << ": risk " << format_number(risk.mean) << " +- "
           << format_number(risk.std_error) << '\n';
    }
  }
  out.csv("risk.csv", csv.str());
  m.info.emplace_back("cramer_rao_bound", format_number(cramer_rao_bound(c.model)));
  if (log) *log << "Cramer-Rao bound " << format_number(cramer_rao_bound(c.model)) << '\n';
}

void run_dominance_sweep(const ExperimentConfig& c, OutputDir& out, RunManifest& m, std::ostream* log) {
  const auto est = first_shrinkage(c, "dominance-sweep");
  const auto drift = builtin_drift(c.drift, c.model);
  validate_drift(drift, c.model);
  std::vector<DominanceCase> cases;
  for (double a : c.sweep_a) {
    ShrinkageSpec spec = *est.shrinkage;
    spec.a = a;
    cases.push_back({spec, drift});
  }
  const auto reports = risk_difference_batch(cases, c.model, mc_settings(c));
  std::ostringstream csv;
  write_dominance_csv_header(csv);
  for (const auto& r : reports) {
    write_dominance_csv_row(csv, r, c.model);
    if (log) {
      *log << r.risk.estimator_label << ": delta " << format_number(r.delta_mean) << " ci95_upper "
           << format_number(r.ci95_upper) << (r.certified_conditions ? "" : " (not certified)") << '\n';
    }
  }
  out.csv("dominance.csv", csv.str());
  std::ostringstream title;
  title << est.label << ", r = " << est.shrinkage->r.label << ", d = " << c.model.d
        << ", H = " << c.model.H << ", drift " << drift.label;
  out.other("dominance.svg", dominance_svg(c.sweep_a, reports, title.str()));
  m.info.emplace_back("r_function", est.shrinkage->r.label);
}

void run_stein_check(const ExperimentConfig& c, OutputDir& out, RunManifest&, std::ostream* log) {
  const auto est = first_shrinkage(c, "stein-check");
  std::vector<double> theta = c.stein_theta;
  if (theta.empty()) theta.assign(c.model.d, 0.0);
  const auto chk = stein_identity_check(*est.shrinkage, c.stein_t, theta, c.stein_samples, c.seed);
  std::ostringstream csv;
  csv << "estimator,t,d,H,n_samples,seed,lhs,rhs,lhs_std_error,rhs_std_error,combined_std_error,passed\n";
  csv << csv_field(shrinkage_label(*est.shrinkage)) << ',' << format_number(c.stein_t) << ',' << c.model.d
      << ',' << format_number(c.model.H) << ',' << c.stein_samples << ',' << c.seed << ','
      << format_number(chk.lhs) << ',' << format_number(chk.rhs) << ',' << format_number(chk.lhs_std_error)
      << ',' << format_number(chk.rhs_std_error) << ',' << format_number(chk.combined_std_error) << ','
      << (chk.passed() ? "true" : "false") << '\n';
  out.csv("stein.csv", csv.str());
  if (log) {
    *log << "lhs " << format_number(chk.lhs) << " rhs " << format_number(chk.rhs) << " combined se "
         << format_number(chk.combined_std_error) << '\n';
  }
}

void run_kernel_table(const ExperimentConfig& c, OutputDir& out, RunManifest&, std::ostream* log) {
  const KernelEvaluator K(c.model.H);
  const std::size_t p = c.kernel_points;
  std::ostringstream csv;
  csv << "t,s,K\n";
  for (std::size_t i = 1; i <= p; ++i) {
    const double t = i == p ? c.model.T : c.model.T * double(i) / double(p);
    for (std::size_t j = 1; j <= i; ++j) {
      const double s = c.model.T * (double(j) - 0.5) / double(p);
      csv << format_number(t) << ',' << format_number(s) << ',' << format_number(K(t, s)) << '\n';
    }
  }
  out.csv("kernel.csv", csv.str());
  if (log) *log << "kernel table with " << p * (p + 1) / 2 << " rows\n";
}

void run_girsanov_check(const ExperimentConfig& c, OutputDir& out, RunManifest& m, std::ostream* log) {
  if (c.model.H > 0.5) throw ConfigError("key 'model.H': girsanov-check requires H <= 1/2");
  const auto drift = builtin_drift(c.drift, c.model);
  validate_drift(drift, c.model);
  const auto one = girsanov_mean_one_check(drift, c.model, c.n_reps, c.seed);
  const auto com = change_of_measure_check(drift, c.model, c.n_reps, c.seed);
  std::ostringstream csv;
  csv << "check,drift,d,H,n,n_reps,seed,value,std_error,reference,reference_std_error,z,passed\n";
  const auto row = [&](const char* name, double v, double se, double ref, double ref_se, bool ok) {
    const double z = (v - ref) / std::hypot(se, ref_se);
    csv << name << ',' << csv_field(drift.label) << ',' << c.model.d << ',' << format_number(c.model.H) << ','
        << c.model.n << ',' << c.n_reps << ',' << c.seed << ',' << format_number(v) << ',' << format_number(se)
        << ',' << format_number(ref) << ',' << format_number(ref_se) << ',' << format_number(z) << ','
        << (ok ? "true" : "false") << '\n';
    if (log) *log << name << ": " << format_number(v) << " vs " << format_number(ref) << " (z " << z << ")\n";
  };
  row("mean_one", one.mean, one.std_error, 1.0, 0.0, one.passed());
  row("change_of_measure", com.weighted_mean, com.weighted_std_error, com.shifted_mean, com.shifted_std_error,
      com.passed());
  out.csv("girsanov.csv", csv.str());
  if (c.model.H < 0.5) {
    const auto mem = validate_membership(drift, c.model);
    std::ostringstream mcsv;
    mcsv << "component,energy_n,energy_2n,refinement_ratio,suspected_non_member\n";
    for (std::size_t i = 0; i < mem.energy.size(); ++i) {
      mcsv << i + 1 << ',' << format_number(mem.energy[i]) << ',' << format_number(mem.energy_refined[i]) << ','
           << format_number(mem.energy[i] > 0 ? mem.energy_refined[i] / mem.energy[i] : 1.0) << ','
           << (mem.suspected_non_member ? "true" : "false") << '\n';
    }
    out.csv("membership.csv", mcsv.str());
  }
  m.info.emplace_back("method_used", "volterra");
}

}  // namespace

const std::vector<std::string>& subcommand_names() {
  static const std::vector<std::string> names{"simulate",    "risk",         "dominance-sweep",
                                              "stein-check", "kernel-table", "girsanov-check"};
  return names;
}

RunManifest execute_subcommand(const std::string& name, const ExperimentConfig& config, std::ostream* log) {
  config.validate();
  RunManifest m;
  m.subcommand = name;
  m.started = utc_timestamp();
  m.config_text = to_config_text(config);
  using Runner = void (*)(const ExperimentConfig&, OutputDir&, RunManifest&, std::ostream*);
  Runner runner = nullptr;
  if (name == "simulate") runner = run_simulate;
  if (name == "risk") runner = run_risk;
  if (name == "dominance-sweep") runner = run_dominance_sweep;
  if (name == "stein-check") runner = run_stein_check;
  if (name == "kernel-table") runner = run_kernel_table;
  if (name == "girsanov-check") runner = run_girsanov_check;
  if (runner == nullptr) throw ConfigError("unknown subcommand '" + name + "'");
  OutputDir out(config.output_dir);
  runner(config, out, m, log);
  out.other("config.txt", m.config_text);
  m.files = out.files();
  m.finished = utc_timestamp();
  write_manifest(out.path(), m);
  return m;
}

int run_subcommand(const std::string& name, const ExperimentConfig& config, std::ostream& err, std::ostream* log) {
  try {
    execute_subcommand(name, config, log);
    return 0;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return 1;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace fbmjs
