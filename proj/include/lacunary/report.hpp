// report.hpp
//
// Experiment reports: flat records written as RFC-4180 CSV or as JSON
// ("schema": 1), plus an optional gnuplot script over the CSV.
//
// CSV columns, in order:
//   kind          config | cell | summary
//   experiment    thm1 | thm2 | clt | oracle | stat
//   sequence      sequence description (empty for i.i.d. points)
//   n, l          N and L(N)
//   replicate     alpha replicate or trial index
//   alpha         alpha at full precision: literal, or uniform(lo,hi;seed,stream)
//   alpha_approx  alpha to 20 significant digits
//   statistic     statistic name (config rows: the key)
//   value         statistic value (config rows: empty)
//   error_bound   rigorous truncation bound
//   std_error     Monte Carlo or sampling standard error
//   method        exact | fourier | monte-carlo | summary
//   detail        free text (config rows: the value)
// Reals use %.17g, so the CSV round-trips to identical doubles.
#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lacunary/config.hpp"
#include "lacunary/errors.hpp"

namespace lacunary {

inline constexpr const char* kLibraryVersion = "1.0.0";
inline constexpr int kReportSchema = 1;

struct Record {
  std::string kind;
  std::string experiment;
  std::string sequence;
  std::optional<std::uint64_t> n;
  std::optional<double> l;
  std::optional<std::uint64_t> replicate;
  std::string alpha;
  std::string alpha_approx;
  std::string statistic;
  std::optional<double> value;
  std::optional<double> error_bound;
  std::optional<double> std_error;
  std::string method;
  std::string detail;

  bool operator==(const Record&) const = default;
};

struct ExperimentReport {
  std::string experiment;
  std::vector<Record> records;  // config echo, then cells, then summaries
  std::vector<std::string> warnings;
  double wall_time_s = 0.0;
};

inline const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {
      "kind",      "experiment", "sequence", "n",           "l",         "replicate", "alpha",
      "alpha_approx", "statistic", "value",  "error_bound", "std_error", "method",    "detail"};
  return cols;
}

/// Config echo rows: statistic = key, detail = value.
inline std::vector<Record> config_records(const ExperimentConfig& cfg, const std::string& experiment) {
  std::vector<Record> out;
  for (const auto& [key, value] : config_echo(cfg)) {
    Record r;
    r.kind = "config";
    r.experiment = experiment;
    r.statistic = key;
    r.detail = value;
    out.push_back(std::move(r));
  }
  return out;
}

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string opt_u64(const std::optional<std::uint64_t>& x) {
  return x ? std::to_string(*x) : std::string();
}

inline std::string opt_real(const std::optional<double>& x) { return x ? format_g17(*x) : std::string(); }

inline std::vector<std::string> record_fields(const Record& r) {
  return {r.kind,         r.experiment, r.sequence,        opt_u64(r.n),
          opt_real(r.l),  opt_u64(r.replicate), r.alpha,   r.alpha_approx,
          r.statistic,    opt_real(r.value), opt_real(r.error_bound), opt_real(r.std_error),
          r.method,       r.detail};
}

/// Splits RFC-4180 text into rows of fields. Quoted fields may hold commas,
/// doubled quotes and line breaks; CRLF and LF both end a row.
inline std::vector<std::vector<std::string>> parse_csv_rows(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\r' || c == '\n') {
      if (c == '\r' && in.peek() == '\n') in.get(c);
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else {
      field += c;
    }
  }
  if (quoted) throw ParseError(rows.size() + 1, "unterminated quoted CSV field");
  if (any) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::optional<std::uint64_t> parse_opt_u64(const std::string& s, std::size_t line) {
  if (s.empty()) return std::nullopt;
  return parse_u64(s, line, "csv");
}

inline std::optional<double> parse_opt_real(const std::string& s, std::size_t line) {
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  const double x = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) throw ParseError(line, "'" + s + "' is not a number");
  return x;
}

inline nlohmann::ordered_json record_json(const Record& r) {
  nlohmann::ordered_json j;
  const auto& cols = csv_columns();
  const auto put_u64 = [&](const char* k, const std::optional<std::uint64_t>& x) {
    j[k] = x ? nlohmann::ordered_json(*x) : nlohmann::ordered_json(nullptr);
  };
  const auto put_real = [&](const char* k, const std::optional<double>& x) {
    j[k] = x ? nlohmann::ordered_json(*x) : nlohmann::ordered_json(nullptr);
  };
  j[cols[0]] = r.kind;
  j[cols[1]] = r.experiment;
  j[cols[2]] = r.sequence;
  put_u64("n", r.n);
  put_real("l", r.l);
  put_u64("replicate", r.replicate);
  j["alpha"] = r.alpha;
  j["alpha_approx"] = r.alpha_approx;
  j["statistic"] = r.statistic;
  put_real("value", r.value);
  put_real("error_bound", r.error_bound);
  put_real("std_error", r.std_error);
  j["method"] = r.method;
  j["detail"] = r.detail;
  return j;
}

}  // namespace detail

inline void write_csv(std::ostream& os, const std::vector<Record>& records) {
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << "\r\n";
  for (const Record& r : records) {
    const auto fields = detail::record_fields(r);
    for (std::size_t i = 0; i < fields.size(); ++i) os << (i ? "," : "") << detail::csv_field(fields[i]);
    os << "\r\n";
  }
}

/// Inverse of write_csv; ParseError on a malformed header or row.
inline std::vector<Record> read_csv(std::istream& in) {
  const auto rows = detail::parse_csv_rows(in);
  if (rows.empty() || rows[0] != csv_columns()) throw ParseError(1, "unexpected CSV header");
  std::vector<Record> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& f = rows[i];
    const std::size_t line = i + 1;
    if (f.size() != csv_columns().size()) {
      throw ParseError(line, "expected " + std::to_string(csv_columns().size()) + " fields, got " +
                                 std::to_string(f.size()));
    }
    Record r;
    r.kind = f[0];
    r.experiment = f[1];
    r.sequence = f[2];
    r.n = detail::parse_opt_u64(f[3], line);
    r.l = detail::parse_opt_real(f[4], line);
    r.replicate = detail::parse_opt_u64(f[5], line);
    r.alpha = f[6];
    r.alpha_approx = f[7];
    r.statistic = f[8];
    r.value = detail::parse_opt_real(f[9], line);
    r.error_bound = detail::parse_opt_real(f[10], line);
    r.std_error = detail::parse_opt_real(f[11], line);
    r.method = f[12];
    r.detail = f[13];
    out.push_back(std::move(r));
  }
  return out;
}

/// JSON report. Top-level key order: schema, library, version, experiment,
/// config, warnings, wall_time_s, records, summary.
inline nlohmann::ordered_json report_json(const ExperimentReport& report) {
  nlohmann::ordered_json j;
  j["schema"] = kReportSchema;
  j["library"] = "lacunary";
  j["version"] = kLibraryVersion;
  j["experiment"] = report.experiment;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  nlohmann::ordered_json records = nlohmann::ordered_json::array();
  nlohmann::ordered_json summary = nlohmann::ordered_json::array();
  for (const Record& r : report.records) {
    if (r.kind == "config") config[r.statistic] = r.detail;
    else if (r.kind == "summary") summary.push_back(detail::record_json(r));
    else records.push_back(detail::record_json(r));
  }
  j["config"] = std::move(config);
  j["warnings"] = report.warnings;
  j["wall_time_s"] = report.wall_time_s;
  j["records"] = std::move(records);
  j["summary"] = std::move(summary);
  return j;
}

/// gnuplot script plotting the summary rows of csv_path against N.
inline std::string gnuplot_script(const ExperimentReport& report, const std::string& csv_path) {
  std::ostringstream os;
  os << "# summary statistics against N\n"
     << "set datafile separator \",\"\n"
     << "set key autotitle columnhead\n"
     << "set logscale x 2\n"
     << "set xlabel \"N\"\n"
     << "set ylabel \"value\"\n"
     << "set title \"" << report.experiment << "\"\n"
     << "csv = \"" << csv_path << "\"\n";
  std::vector<std::string> stats;
  for (const Record& r : report.records) {
    if (r.kind == "summary" && r.n &&
        std::find(stats.begin(), stats.end(), r.statistic) == stats.end()) {
      stats.push_back(r.statistic);
    }
  }
  if (stats.empty()) {
    os << "print \"no per-N summary rows in \" . csv\n";
    return os.str();
  }
  os << "plot ";
  for (std::size_t i = 0; i < stats.size(); ++i) {
    os << (i ? ", \\\n     " : "") << "csv using 4:(strcol(1) eq \"summary\" && strcol(9) eq \""
       << stats[i] << "\" ? $10 : NaN) with linespoints title \"" << stats[i] << "\"";
  }
  os << "\n";
  return os.str();
}

/// Writes the report to path (or stdout when path is empty or "-").
/// With plot set and CSV output, also writes <path minus extension>.gp.
inline void emit_report(const ExperimentReport& report, const std::string& path, OutputFormat format,
                        bool plot = false) {
  std::ostringstream body;
  if (format == OutputFormat::csv) write_csv(body, report.records);
  else body << report_json(report).dump(2) << "\n";
  if (path.empty() || path == "-") {
    std::fwrite(body.str().data(), 1, body.str().size(), stdout);
    std::fflush(stdout);
    return;
  }
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write report '" + path + "'");
    out << body.str();
    if (!out) throw IoError("write failed for '" + path + "'");
  }
  if (plot && format == OutputFormat::csv) {
    const std::string gp = std::filesystem::path(path).replace_extension(".gp").string();
    std::ofstream out(gp, std::ios::binary);
    if (!out) throw IoError("cannot write plot script '" + gp + "'");
    out << gnuplot_script(report, path);
  }
}

}  // namespace lacunary
