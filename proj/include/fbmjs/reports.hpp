#pragma once

#include "fbmjs/model.hpp"
#include "fbmjs/risk_engine.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace fbmjs {

inline constexpr const char* kToolVersion = "fbmjs 1.0.0";

/// 17 significant digits, enough to round-trip any double.
std::string format_number(double x);
/// Quotes a CSV field when it contains a comma, quote or newline.
std::string csv_field(const std::string& s);

void write_risk_csv_header(std::ostream& os);
void write_risk_csv_row(std::ostream& os, const RiskEstimate& risk, const FbmModel& model);
void write_dominance_csv_header(std::ostream& os);
void write_dominance_csv_row(std::ostream& os, const DominanceReport& report, const FbmModel& model);

/// Risk difference against a, with 95% whiskers and a zero reference line.
std::string dominance_svg(const std::vector<double>& a, const std::vector<DominanceReport>& reports,
                          const std::string& title);

struct ManifestFile {
  std::string name;
  std::size_t rows = 0;  ///< data rows, header excluded
};

struct RunManifest {
  std::string subcommand;
  std::string started;
  std::string finished;
  std::string config_text;
  std::vector<ManifestFile> files;
  std::vector<std::pair<std::string, std::string>> info;
};

/// Current UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

/// Writes dir/manifest.txt via a temporary file and a rename.
void write_manifest(const std::filesystem::path& dir, const RunManifest& manifest);

}  // namespace fbmjs
