// config.hpp
//
// Experiment configuration: a line-based `key = value` format with `#`
// comments and dotted keys. Every key has an explicit default; defaults for
// n.list, l.*, and alpha.samples depend on the experiment.
#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lacunary/bigfloat.hpp"
#include "lacunary/errors.hpp"
#include "lacunary/sequence.hpp"

namespace lacunary {

enum class Experiment { thm1, thm2, clt, oracle };

inline const char* to_string(Experiment e) {
  switch (e) {
    case Experiment::thm1: return "thm1";
    case Experiment::thm2: return "thm2";
    case Experiment::clt: return "clt";
    case Experiment::oracle: return "oracle";
  }
  return "?";
}

enum class OutputFormat { csv, json };

inline const char* to_string(OutputFormat f) { return f == OutputFormat::csv ? "csv" : "json"; }

/// Window intensity L(N): const c, power N^s, or logpow (ln N)^t.
struct LSchedule {
  enum class Kind { constant, power, logpow };
  Kind kind = Kind::power;
  double param = 0.4;

  double operator()(std::size_t n) const {
    const double x = static_cast<double>(n);
    switch (kind) {
      case Kind::constant: return param;
      case Kind::power: return std::pow(x, param);
      case Kind::logpow: return std::pow(std::log(x), param);
    }
    return param;
  }
};

inline const char* to_string(LSchedule::Kind k) {
  switch (k) {
    case LSchedule::Kind::constant: return "const";
    case LSchedule::Kind::power: return "power";
    case LSchedule::Kind::logpow: return "logpow";
  }
  return "?";
}

struct ExperimentConfig {
  Experiment experiment = Experiment::thm1;
  SequenceSpec sequence = SequenceSpec::geometric(2.0, 2.0);
  std::string alpha_lo = "1";
  std::string alpha_hi = "2";
  std::size_t alpha_samples = 200;
  std::vector<std::size_t> n_list{256, 1024, 4096};
  LSchedule l_schedule{};
  double delta = 0.25;
  std::uint64_t seed = 0;
  std::size_t grid = 100000;
  double tol = 5e-3;
  std::string output_path;
  OutputFormat format = OutputFormat::csv;
  std::size_t oracle_trials = 1000;
  bool clt_control = true;
  std::vector<std::string> warnings;
};

/// Experiment-specific defaults, applied before explicit keys.
inline ExperimentConfig default_config(Experiment e) {
  ExperimentConfig c;
  c.experiment = e;
  switch (e) {
    case Experiment::thm1:
      break;
    case Experiment::thm2:
      c.alpha_samples = 10;
      c.n_list = {256, 512, 1024, 2048, 4096, 8192};
      c.l_schedule = {LSchedule::Kind::power, 0.3};
      break;
    case Experiment::clt:
      c.alpha_samples = 10;
      c.n_list = {1024, 4096, 16384};
      c.l_schedule = {LSchedule::Kind::logpow, 2.0};
      break;
    case Experiment::oracle:
      c.alpha_samples = 1;
      c.n_list = {1024};
      c.l_schedule = {LSchedule::Kind::constant, 8.0};
      break;
  }
  return c;
}

namespace detail {

inline std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

inline double parse_double(const std::string& v, std::size_t line, const std::string& key) {
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    throw ParseError(line, "key '" + key + "': '" + v + "' is not a number");
  }
  return x;
}

inline std::uint64_t parse_u64(const std::string& v, std::size_t line, const std::string& key) {
  std::uint64_t x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    throw ParseError(line, "key '" + key + "': '" + v + "' is not a non-negative integer");
  }
  return x;
}

inline LSchedule::Kind parse_l_kind(const std::string& v, std::size_t line) {
  if (v == "const") return LSchedule::Kind::constant;
  if (v == "power") return LSchedule::Kind::power;
  if (v == "logpow") return LSchedule::Kind::logpow;
  throw ParseError(line, "l.kind must be const, power or logpow, got '" + v + "'");
}

inline Experiment parse_experiment(const std::string& v, std::size_t line) {
  if (v == "thm1") return Experiment::thm1;
  if (v == "thm2") return Experiment::thm2;
  if (v == "clt") return Experiment::clt;
  if (v == "oracle") return Experiment::oracle;
  throw ParseError(line, "experiment must be thm1, thm2, clt or oracle, got '" + v + "'");
}

}  // namespace detail

/// Checks cross-field invariants; throws ValidationError naming the first violated one.
/// Appends non-fatal notes to cfg.warnings.
inline void validate_config(ExperimentConfig& cfg) {
  cfg.warnings.clear();
  try {
    cfg.sequence.validate();
  } catch (const Error& e) {
    throw ValidationError(std::string("sequence: ") + e.what());
  }
  BigFloat lo(128), hi(128);
  try {
    lo = parse_real(cfg.alpha_lo, 128);
    hi = parse_real(cfg.alpha_hi, 128);
  } catch (const Error& e) {
    throw ValidationError(std::string("alpha interval: ") + e.what());
  }
  if (!(mpfr_less_p(lo.get(), hi.get()))) {
    throw ValidationError("alpha interval must have positive length (alpha.lo < alpha.hi)");
  }
  if (cfg.alpha_samples < 1) throw ValidationError("alpha.samples must be at least 1");
  if (cfg.n_list.empty()) throw ValidationError("n.list must not be empty");
  for (std::size_t i = 0; i < cfg.n_list.size(); ++i) {
    if (cfg.n_list[i] < 2) throw ValidationError("n.list entries must be at least 2");
    if (i > 0 && cfg.n_list[i] <= cfg.n_list[i - 1]) {
      throw ValidationError("n.list must be strictly increasing");
    }
  }
  const double s = cfg.l_schedule.param;
  switch (cfg.l_schedule.kind) {
    case LSchedule::Kind::constant:
      if (!(s > 0.0)) throw ValidationError("l.param for const must be positive");
      break;
    case LSchedule::Kind::power:
      if (!(s > 0.0 && s < 1.0)) throw ValidationError("l.param for power must satisfy 0 < s < 1");
      break;
    case LSchedule::Kind::logpow:
      if (!(s > 0.0)) throw ValidationError("l.param for logpow must be positive");
      break;
  }
  for (std::size_t n : cfg.n_list) {
    const double l = cfg.l_schedule(n);
    if (!(l > 0.0 && l < static_cast<double>(n))) {
      throw ValidationError("L(N) = " + detail::format_g17(l) + " must lie in (0, N) at N = " +
                            std::to_string(n));
    }
  }
  if (!(cfg.delta > 0.0)) throw ValidationError("delta must be positive");
  if (cfg.grid < 1000) throw ValidationError("grid must be at least 1000");
  if (!(cfg.tol > 0.0)) throw ValidationError("tol must be positive");
  if (cfg.oracle_trials < 2) throw ValidationError("oracle.trials must be at least 2");
  if (cfg.experiment == Experiment::clt && cfg.l_schedule.kind != LSchedule::Kind::logpow) {
    throw ValidationError("experiment clt needs l.kind = logpow");
  }
  if (cfg.experiment == Experiment::thm2) {
    if (cfg.l_schedule.kind == LSchedule::Kind::logpow) {
      throw ValidationError("experiment thm2 needs l.kind = power or const");
    }
    if (cfg.l_schedule.kind == LSchedule::Kind::power && s >= 0.5) {
      cfg.warnings.push_back("l.param = " + detail::format_g17(s) +
                             " >= 1/2 leaves the L = O(N^{1/2 - eps}) regime of the almost-sure result");
    }
  }
}

/// Parses config text. ParseError carries the 1-based line number.
inline ExperimentConfig parse_config_text(const std::string& text) {
  struct Entry {
    std::string value;
    std::size_t line;
  };
  std::map<std::string, Entry> entries;
  std::istringstream is(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(is, raw)) {
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string line = detail::trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, "expected 'key = value', got '" + line + "'");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError(line_no, "empty key");
    if (!entries.emplace(key, Entry{value, line_no}).second) {
      throw ParseError(line_no, "duplicate key '" + key + "'");
    }
  }

  Experiment experiment = Experiment::thm1;
  if (const auto it = entries.find("experiment"); it != entries.end()) {
    experiment = detail::parse_experiment(it->second.value, it->second.line);
  }
  ExperimentConfig cfg = default_config(experiment);

  std::string kind = "geometric";
  double a1 = 2.0;
  double ratio = 2.0;
  unsigned degree = 0;
  std::vector<double> ratios;
  std::optional<double> lacunarity;
  std::size_t kind_line = 0;

  for (const auto& [key, entry] : entries) {
    const std::string& v = entry.value;
    const std::size_t ln = entry.line;
    if (key == "experiment") {
      continue;
    } else if (key == "sequence.kind") {
      kind = v;
      kind_line = ln;
    } else if (key == "sequence.a1") {
      a1 = detail::parse_double(v, ln, key);
    } else if (key == "sequence.ratio") {
      ratio = detail::parse_double(v, ln, key);
    } else if (key == "sequence.poly_degree") {
      degree = static_cast<unsigned>(detail::parse_u64(v, ln, key));
    } else if (key == "sequence.ratios") {
      for (const auto& item : detail::split(v, ',')) ratios.push_back(detail::parse_double(item, ln, key));
    } else if (key == "sequence.lacunarity") {
      lacunarity = detail::parse_double(v, ln, key);
    } else if (key == "alpha.lo") {
      cfg.alpha_lo = v;
    } else if (key == "alpha.hi") {
      cfg.alpha_hi = v;
    } else if (key == "alpha.samples") {
      cfg.alpha_samples = detail::parse_u64(v, ln, key);
    } else if (key == "n.list") {
      cfg.n_list.clear();
      for (const auto& item : detail::split(v, ',')) cfg.n_list.push_back(detail::parse_u64(item, ln, key));
    } else if (key == "l.kind") {
      cfg.l_schedule.kind = detail::parse_l_kind(v, ln);
    } else if (key == "l.param") {
      cfg.l_schedule.param = detail::parse_double(v, ln, key);
    } else if (key == "l.schedule") {
      const auto colon = v.find(':');
      if (colon == std::string::npos) throw ParseError(ln, "l.schedule must look like kind:param");
      cfg.l_schedule.kind = detail::parse_l_kind(detail::trim(v.substr(0, colon)), ln);
      cfg.l_schedule.param = detail::parse_double(detail::trim(v.substr(colon + 1)), ln, key);
    } else if (key == "delta") {
      cfg.delta = detail::parse_double(v, ln, key);
    } else if (key == "seed") {
      cfg.seed = detail::parse_u64(v, ln, key);
    } else if (key == "grid") {
      cfg.grid = detail::parse_u64(v, ln, key);
    } else if (key == "tol") {
      cfg.tol = detail::parse_double(v, ln, key);
    } else if (key == "output.path") {
      cfg.output_path = v;
    } else if (key == "output.format") {
      if (v == "csv") cfg.format = OutputFormat::csv;
      else if (v == "json") cfg.format = OutputFormat::json;
      else throw ParseError(ln, "output.format must be csv or json, got '" + v + "'");
    } else if (key == "oracle.trials") {
      cfg.oracle_trials = detail::parse_u64(v, ln, key);
    } else if (key == "clt.control") {
      if (v == "true" || v == "1") cfg.clt_control = true;
      else if (v == "false" || v == "0") cfg.clt_control = false;
      else throw ParseError(ln, "clt.control must be true or false");
    } else {
      throw ParseError(ln, "unknown key '" + key + "'");
    }
  }
  if (entries.count("l.schedule") && (entries.count("l.kind") || entries.count("l.param"))) {
    throw ParseError(entries.at("l.schedule").line, "l.schedule conflicts with l.kind / l.param");
  }

  if (kind == "geometric") {
    cfg.sequence = SequenceSpec::geometric(a1, ratio);
  } else if (kind == "geometric-plus-poly") {
    cfg.sequence = SequenceSpec::geometric_plus_poly(a1, ratio, degree);
  } else if (kind == "custom-ratios") {
    cfg.sequence = SequenceSpec::custom(a1, ratios);
  } else {
    throw ParseError(kind_line, "sequence.kind must be geometric, geometric-plus-poly or custom-ratios");
  }
  cfg.sequence.lacunarity = lacunarity;
  validate_config(cfg);
  return cfg;
}

/// Reads and parses a config file; IoError when it cannot be opened.
inline ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

/// Every effective setting as (key, value), defaults included, in a fixed order.
inline std::vector<std::pair<std::string, std::string>> config_echo(const ExperimentConfig& cfg) {
  using detail::format_g17;
  std::vector<std::pair<std::string, std::string>> out;
  out.emplace_back("experiment", to_string(cfg.experiment));
  out.emplace_back("sequence.kind", to_string(cfg.sequence.kind));
  out.emplace_back("sequence.a1", format_g17(cfg.sequence.a1));
  out.emplace_back("sequence.ratio", format_g17(cfg.sequence.ratio));
  out.emplace_back("sequence.poly_degree", std::to_string(cfg.sequence.poly_degree));
  std::string ratios;
  for (std::size_t i = 0; i < cfg.sequence.ratios.size(); ++i) {
    ratios += (i ? "," : "") + format_g17(cfg.sequence.ratios[i]);
  }
  out.emplace_back("sequence.ratios", ratios);
  out.emplace_back("sequence.lacunarity", format_g17(cfg.sequence.lacunarity_constant()));
  out.emplace_back("alpha.lo", cfg.alpha_lo);
  out.emplace_back("alpha.hi", cfg.alpha_hi);
  out.emplace_back("alpha.samples", std::to_string(cfg.alpha_samples));
  std::string ns;
  for (std::size_t i = 0; i < cfg.n_list.size(); ++i) ns += (i ? "," : "") + std::to_string(cfg.n_list[i]);
  out.emplace_back("n.list", ns);
  out.emplace_back("l.kind", to_string(cfg.l_schedule.kind));
  out.emplace_back("l.param", format_g17(cfg.l_schedule.param));
  out.emplace_back("delta", format_g17(cfg.delta));
  out.emplace_back("seed", std::to_string(cfg.seed));
  out.emplace_back("grid", std::to_string(cfg.grid));
  out.emplace_back("tol", format_g17(cfg.tol));
  out.emplace_back("output.path", cfg.output_path);
  out.emplace_back("output.format", to_string(cfg.format));
  out.emplace_back("oracle.trials", std::to_string(cfg.oracle_trials));
  out.emplace_back("clt.control", cfg.clt_control ? "true" : "false");
  return out;
}

}  // namespace lacunary
