#include "fbmjs/reports.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace fbmjs {

std::string format_number(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

void write_risk_csv_header(std::ostream& os) {
  os << "estimator,drift,d,H,T,n,n_reps,seed,mean,std_error\n";
}

namespace {

void write_risk_prefix(std::ostream& os, const RiskEstimate& r, const FbmModel& m) {
  os << csv_field(r.estimator_label) << ',' << csv_field(r.drift_label) << ',' << m.d << ','
     << format_number(m.H) << ',' << format_number(m.T) << ',' << m.n << ',' << r.n_reps << ','
     << r.seed << ',' << format_number(r.mean) << ',' << format_number(r.std_error);
}

}  // namespace

void write_risk_csv_row(std::ostream& os, const RiskEstimate& risk, const FbmModel& model) {
  write_risk_prefix(os, risk, model);
  os << '\n';
}

void write_dominance_csv_header(std::ostream& os) {
  os << "estimator,drift,d,H,T,n,n_reps,seed,mean,std_error,"
        "delta_mean,delta_std_error,ci95_upper,stein_form_mean,certified\n";
}

void write_dominance_csv_row(std::ostream& os, const DominanceReport& r, const FbmModel& model) {
  write_risk_prefix(os, r.risk, model);
  os << ',' << format_number(r.delta_mean) << ',' << format_number(r.delta_std_error) << ','
     << format_number(r.ci95_upper) << ',' << format_number(r.stein_form_mean) << ','
     << (r.certified_conditions ? "true" : "false") << '\n';
}

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += ch;
    }
  }
  return out;
}

}  // namespace

std::string dominance_svg(const std::vector<double>& a, const std::vector<DominanceReport>& reports,
                          const std::string& title) {
  if (a.size() != reports.size() || a.empty()) throw std::invalid_argument("dominance_svg: size mismatch");
  constexpr double W = 640, Hgt = 420, left = 80, right = 30, top = 50, bottom = 60;
  double xmin = *std::min_element(a.begin(), a.end());
  double xmax = *std::max_element(a.begin(), a.end());
  const double xpad = xmax > xmin ? 0.1 * (xmax - xmin) : 0.5;
  xmin -= xpad;
  xmax += xpad;
  double ymin = 0.0, ymax = 0.0;
  for (const auto& r : reports) {
    ymin = std::min(ymin, r.delta_mean - 1.96 * r.delta_std_error);
    ymax = std::max(ymax, r.delta_mean + 1.96 * r.delta_std_error);
  }
  const double ypad = ymax > ymin ? 0.1 * (ymax - ymin) : 1.0;
  ymin -= ypad;
  ymax += ypad;
  const auto X = [&](double v) { return left + (v - xmin) / (xmax - xmin) * (W - left - right); };
  const auto Y = [&](double v) { return top + (ymax - v) / (ymax - ymin) * (Hgt - top - bottom); };

  std::ostringstream s;
  s << std::setprecision(6);
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << Hgt
    << "\" viewBox=\"0 0 " << W << ' ' << Hgt << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << W / 2 << "\" y=\"28\" text-anchor=\"middle\" font-size=\"15\">" << xml_escape(title) << "</text>\n";
  // axes
  s << "<line x1=\"" << left << "\" y1=\"" << Hgt - bottom << "\" x2=\"" << W - right << "\" y2=\"" << Hgt - bottom
    << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << Hgt - bottom
    << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 5; ++k) {
    const double xv = xmin + (xmax - xmin) * k / 5.0;
    const double yv = ymin + (ymax - ymin) * k / 5.0;
    s << "<line x1=\"" << X(xv) << "\" y1=\"" << Hgt - bottom << "\" x2=\"" << X(xv) << "\" y2=\""
      << Hgt - bottom + 5 << "\" stroke=\"black\"/>\n";
    s << "<text x=\"" << X(xv) << "\" y=\"" << Hgt - bottom + 20 << "\" text-anchor=\"middle\">" << xv << "</text>\n";
    s << "<line x1=\"" << left - 5 << "\" y1=\"" << Y(yv) << "\" x2=\"" << left << "\" y2=\"" << Y(yv)
      << "\" stroke=\"black\"/>\n";
    s << "<text x=\"" << left - 8 << "\" y=\"" << Y(yv) + 4 << "\" text-anchor=\"end\">" << yv << "</text>\n";
  }
  s << "<text x=\"" << (left + W - right) / 2 << "\" y=\"" << Hgt - 15 << "\" text-anchor=\"middle\">a</text>\n";
  s << "<text x=\"20\" y=\"" << (top + Hgt - bottom) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
    << (top + Hgt - bottom) / 2 << ")\">risk difference (shrinkage - MLE)</text>\n";
  // zero reference
  s << "<line x1=\"" << left << "\" y1=\"" << Y(0) << "\" x2=\"" << W - right << "\" y2=\"" << Y(0)
    << "\" stroke=\"gray\" stroke-dasharray=\"6 4\"/>\n";
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& r = reports[i];
    const double lo = r.delta_mean - 1.96 * r.delta_std_error;
    const double hi = r.delta_mean + 1.96 * r.delta_std_error;
    const double x = X(a[i]);
    s << "<line x1=\"" << x << "\" y1=\"" << Y(lo) << "\" x2=\"" << x << "\" y2=\"" << Y(hi)
      << "\" stroke=\"steelblue\"/>\n";
    for (double v : {lo, hi}) {
      s << "<line x1=\"" << x - 5 << "\" y1=\"" << Y(v) << "\" x2=\"" << x + 5 << "\" y2=\"" << Y(v)
        << "\" stroke=\"steelblue\"/>\n";
    }
    s << "<circle cx=\"" << x << "\" cy=\"" << Y(r.delta_mean) << "\" r=\"4\" fill=\"steelblue\"/>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_manifest(const std::filesystem::path& dir, const RunManifest& m) {
  const auto final_path = dir / "manifest.txt";
  const auto tmp_path = dir / "manifest.txt.tmp";
  {
    std::ofstream out(tmp_path);
    if (!out) throw std::runtime_error("cannot write '" + tmp_path.string() + "'");
    out << "tool = " << kToolVersion << '\n'
        << "subcommand = " << m.subcommand << '\n'
        << "started = " << m.started << '\n'
        << "finished = " << m.finished << '\n';
    for (const auto& [k, v] : m.info) out << k << " = " << v << '\n';
    out << "\n[config]\n" << m.config_text << "\n[files]\n";
    for (const auto& f : m.files) out << f.name << " rows=" << f.rows << '\n';
    if (!out.flush()) throw std::runtime_error("failed writing '" + tmp_path.string() + "'");
  }
  std::filesystem::rename(tmp_path, final_path);
}

}  // namespace fbmjs
