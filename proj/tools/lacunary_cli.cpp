// lacunary: command-line front end.
//
//   lacunary gen        fractional parts {alpha a_n} as index,value CSV
//   lacunary stat       one statistic for one (sequence, alpha, N, L)
//   lacunary experiment run the experiment named in --config
//   lacunary oracle     i.i.d. oracle suite
//
// Exit codes: 0 success, 2 config error, 3 numerical error, 4 I/O error.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lacunary/config.hpp"
#include "lacunary/experiments.hpp"
#include "lacunary/random_model.hpp"
#include "lacunary/report.hpp"
#include "lacunary/sequence.hpp"
#include "lacunary/statistics.hpp"

using namespace lacunary;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::io_error:
      return kExitIo;
    case ErrorKind::precision_exhausted:
    case ErrorKind::tol_unreachable:
    case ErrorKind::overflow:
    case ErrorKind::cost_guard:
    case ErrorKind::dimension_too_large:
      return kExitNumerical;
    default:
      return kExitConfig;
  }
}

struct GlobalOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format;
  std::size_t threads = 1;
};

struct SequenceOptions {
  std::string kind;
  std::optional<double> a1, ratio, lacunarity;
  std::optional<unsigned> degree;
  std::vector<double> ratios;
  std::string alpha;
  std::uint64_t replicate = 0;
};

void add_sequence_options(CLI::App* cmd, SequenceOptions& o) {
  cmd->add_option("--kind", o.kind, "geometric | geometric-plus-poly | custom-ratios")
      ->check(CLI::IsMember({"geometric", "geometric-plus-poly", "custom-ratios"}));
  cmd->add_option("--a1", o.a1, "first term");
  cmd->add_option("--ratio", o.ratio, "growth ratio C");
  cmd->add_option("--degree", o.degree, "polynomial degree d");
  cmd->add_option("--ratios", o.ratios, "ratio cycle for custom-ratios")->delimiter(',');
  cmd->add_option("--lacunarity", o.lacunarity, "lacunarity constant to check");
  cmd->add_option("--alpha", o.alpha, "alpha literal (p/q, decimal or hex float); default: seeded draw");
  cmd->add_option("--replicate", o.replicate, "stream of the seeded alpha draw");
}

ExperimentConfig base_config(const GlobalOptions& g, std::optional<Experiment> force = std::nullopt) {
  ExperimentConfig cfg = g.config.empty() ? default_config(force.value_or(Experiment::thm1))
                                          : parse_config(g.config);
  if (force) cfg.experiment = *force;  // a config file keeps its other settings
  if (g.seed) cfg.seed = *g.seed;
  if (!g.out.empty()) cfg.output_path = g.out;
  if (g.format == "csv") cfg.format = OutputFormat::csv;
  if (g.format == "json") cfg.format = OutputFormat::json;
  return cfg;
}

SequenceSpec sequence_from(const ExperimentConfig& cfg, const SequenceOptions& o) {
  SequenceSpec spec = cfg.sequence;
  std::string kind = o.kind.empty() ? to_string(spec.kind) : o.kind;
  const double a1 = o.a1.value_or(spec.a1);
  const double ratio = o.ratio.value_or(spec.ratio);
  const unsigned degree = o.degree.value_or(spec.poly_degree);
  const std::vector<double> ratios = o.ratios.empty() ? spec.ratios : o.ratios;
  if (kind == "geometric") spec = SequenceSpec::geometric(a1, ratio);
  else if (kind == "geometric-plus-poly") spec = SequenceSpec::geometric_plus_poly(a1, ratio, degree);
  else spec = SequenceSpec::custom(a1, ratios);
  spec.lacunarity = o.lacunarity ? o.lacunarity : cfg.sequence.lacunarity;
  spec.validate();
  return spec;
}

AlphaSpec alpha_from(const ExperimentConfig& cfg, const SequenceOptions& o) {
  if (!o.alpha.empty()) return AlphaSpec::exact(o.alpha);
  return AlphaSpec::uniform(cfg.alpha_lo, cfg.alpha_hi, RngSpec{cfg.seed, o.replicate});
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + path + "'");
}

void print_warnings(const ExperimentReport& rep) {
  for (const auto& w : rep.warnings) std::cerr << "warning: " << w << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Intermediate-scale statistics of lacunary sequences modulo one"};
  app.fallthrough();
  app.require_subcommand(1);

  GlobalOptions g;
  app.add_option("--config", g.config, "experiment config file");
  app.add_option("--seed", g.seed, "override the config seed");
  app.add_option("--out", g.out, "output path ('-' or empty: stdout)");
  app.add_option("--format", g.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber);

  SequenceOptions gen_seq, stat_seq;
  std::size_t gen_n = 0;
  auto* gen = app.add_subcommand("gen", "write fractional parts {alpha a_n} as CSV");
  add_sequence_options(gen, gen_seq);
  gen->add_option("--n", gen_n, "number of points")->required()->check(CLI::PositiveNumber);

  struct StatOptions {
    std::size_t n = 0;
    double l = 0.0;
    std::string statistic = "number_variance";
    int k = 2;
    std::size_t samples = 100000;
    std::size_t quad = 100;
    bool iid = false;
    std::optional<std::size_t> grid;
    std::optional<double> tol;
  } so;
  auto* stat = app.add_subcommand("stat", "compute one statistic");
  add_sequence_options(stat, stat_seq);
  stat->add_option("--n", so.n, "number of points")->required()->check(CLI::PositiveNumber);
  stat->add_option("--l", so.l, "window intensity L")->required();
  stat->add_option("--statistic", so.statistic)
      ->check(CLI::IsMember({"number_variance", "number_variance_mc", "pair_correlation",
                             "k_level_correlation", "count_moment", "ks_distance", "t_n", "v_n"}));
  stat->add_option("--k", so.k, "order for k_level_correlation / count_moment");
  stat->add_option("--samples", so.samples, "Monte Carlo samples");
  stat->add_option("--grid", so.grid, "grid size for ks_distance");
  stat->add_option("--tol", so.tol, "truncation tolerance for t_n / v_n");
  stat->add_option("--quad", so.quad, "quadrature points for v_n");
  stat->add_flag("--iid", so.iid, "use i.i.d. uniform points instead of the sequence");

  bool plot = false;
  auto* experiment = app.add_subcommand("experiment", "run the experiment in --config");
  experiment->add_flag("--plot", plot, "also write a gnuplot script next to the CSV");

  std::optional<std::size_t> trials;
  auto* oracle = app.add_subcommand("oracle", "i.i.d. oracle suite");
  oracle->add_option("--trials", trials, "draws per N");
  oracle->add_flag("--plot", plot, "also write a gnuplot script next to the CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (gen->parsed()) {
      const ExperimentConfig cfg = base_config(g);
      const auto pts = frac_points(sequence_from(cfg, gen_seq), alpha_from(cfg, gen_seq), gen_n);
      std::ostringstream os;
      write_points_csv(os, pts);
      write_text(g.out, os.str());
      return 0;
    }

    if (stat->parsed()) {
      ExperimentConfig cfg = base_config(g);
      if (so.grid) cfg.grid = *so.grid;
      if (so.tol) cfg.tol = *so.tol;
      const SequenceSpec spec = sequence_from(cfg, stat_seq);
      const AlphaSpec alpha = alpha_from(cfg, stat_seq);
      const WindowParams w(so.n, so.l);
      auto points = [&] {
        return so.iid ? iid_points(so.n, RngSpec{cfg.seed, stat_seq.replicate})
                      : frac_points(spec, alpha, so.n);
      };
      StatResult res{};
      std::string note;
      const std::string& s = so.statistic;
      if (s == "number_variance") res = number_variance_exact(points(), w);
      else if (s == "number_variance_mc") res = number_variance_mc(points(), w, so.samples, cfg.seed);
      else if (s == "pair_correlation") res = pair_correlation(points(), w);
      else if (s == "k_level_correlation") res = k_level_correlation(points(), w, so.k);
      else if (s == "count_moment") res = count_moment(points(), w, so.k);
      else if (s == "ks_distance") {
        const auto c = empirical_clt(points(), w, cfg.grid);
        res = {c.ks_distance, 0.0, 0.0, Method::exact};
        note = "mean=" + detail::format_g17(c.mean) + ";scale=" + detail::format_g17(c.scale) +
                 ";grid=" + std::to_string(c.grid_size);
      } else if (s == "t_n") {
        if (so.iid) throw ValidationError("t_n needs a sequence, not --iid");
        res = t_n_fourier(spec, alpha, w, cfg.tol);
      } else {
        if (so.iid) throw ValidationError("v_n needs a sequence, not --iid");
        res = vn_estimate(spec, w, WeightSpec{}, so.quad, cfg.tol, cfg.seed);
        note = "weight=bump(center=1.5,radius=0.5);quad=" + std::to_string(so.quad);
      }
      if (s == "k_level_correlation" || s == "count_moment") {
        note += (note.empty() ? "" : ";") + std::string("k=") + std::to_string(so.k);
      }
      ExperimentReport rep;
      rep.experiment = "stat";
      Record r;
      r.kind = "cell";
      r.experiment = "stat";
      r.sequence = so.iid ? "" : spec.describe();
      r.n = so.n;
      r.l = so.l;
      r.replicate = stat_seq.replicate;
      if (so.iid) {
        r.alpha = "iid(seed=" + std::to_string(cfg.seed) + ",stream=" + std::to_string(stat_seq.replicate) + ")";
      } else if (s != "v_n") {
        r.alpha = alpha.describe();
        r.alpha_approx = alpha.evaluate(96).to_string(20);
      }
      r.statistic = s;
      r.value = res.value;
      r.error_bound = res.truncation_bound;
      r.std_error = res.mc_std_error;
      r.method = to_string(res.method);
      r.detail = note;
      rep.records.push_back(std::move(r));
      emit_report(rep, g.out, g.format == "json" ? OutputFormat::json : OutputFormat::csv);
      return 0;
    }

    ExperimentConfig cfg;
    if (experiment->parsed()) {
      if (g.config.empty()) throw ValidationError("experiment needs --config");
      cfg = base_config(g);
    } else {
      cfg = base_config(g, Experiment::oracle);
      if (trials) cfg.oracle_trials = *trials;
    }
    validate_config(cfg);
    const ExperimentReport rep = run_experiment(cfg, g.threads);
    print_warnings(rep);
    std::cerr << rep.experiment << ": " << (rep.records.size()) << " records in " << rep.wall_time_s
              << " s\n";
    emit_report(rep, cfg.output_path, cfg.format, plot);
    if (rep.experiment == "oracle") {
      const auto failed = summary_value(rep, "properties_failed");
      if (failed && *failed > 0) std::cerr << "oracle: " << *failed << " properties failed\n";
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
