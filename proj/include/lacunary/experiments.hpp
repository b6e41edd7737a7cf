// experiments.hpp
//
// Desk-scale experiments: deviation of the number variance from L
// (thm1, thm2), Kolmogorov-Smirnov distance of the normalised counting
// function to the Gaussian (clt), and the i.i.d. oracle suite (oracle).
//
// Replicate r uses alpha = uniform(alpha.lo, alpha.hi; seed, stream = r) at
// every N, so cells are paired across N and each one can be rebuilt from
// (config, seed). i.i.d. controls use stream 2^32 + r; oracle trial t at the
// j-th N uses stream j * 2^32 + t.
#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "lacunary/config.hpp"
#include "lacunary/kernels.hpp"
#include "lacunary/random_model.hpp"
#include "lacunary/report.hpp"
#include "lacunary/sequence.hpp"
#include "lacunary/statistics.hpp"

namespace lacunary {

/// Runs fn(0..count-1) on up to `threads` workers. Results must go to
/// index-owned slots; the exception of the lowest failing index is rethrown.
inline void parallel_for(std::size_t count, std::size_t threads,
                         const std::function<void(std::size_t)>& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

inline constexpr std::uint64_t kControlStreamBase = std::uint64_t{1} << 32;

inline AlphaSpec replicate_alpha(const ExperimentConfig& cfg, std::uint64_t r) {
  return AlphaSpec::uniform(cfg.alpha_lo, cfg.alpha_hi, RngSpec{cfg.seed, r});
}

inline double median(std::vector<double> xs) {
  if (xs.empty()) return std::nan("");
  std::sort(xs.begin(), xs.end());
  const std::size_t m = xs.size() / 2;
  return xs.size() % 2 ? xs[m] : 0.5 * (xs[m - 1] + xs[m]);
}

namespace detail {

/// Record skeleton for one (N, replicate) cell of a lacunary sequence.
inline Record cell_record(const ExperimentConfig& cfg, const AlphaSpec& alpha, std::size_t n,
                          double l, std::uint64_t r) {
  Record rec;
  rec.kind = "cell";
  rec.experiment = to_string(cfg.experiment);
  rec.sequence = cfg.sequence.describe();
  rec.n = n;
  rec.l = l;
  rec.replicate = r;
  rec.alpha = alpha.describe();
  rec.alpha_approx = alpha.evaluate(96).to_string(20);
  rec.method = "exact";
  return rec;
}

inline Record summary_record(const ExperimentConfig& cfg, std::string statistic, double value) {
  Record rec;
  rec.kind = "summary";
  rec.experiment = to_string(cfg.experiment);
  rec.sequence = cfg.sequence.describe();
  rec.statistic = std::move(statistic);
  rec.value = value;
  rec.method = "summary";
  return rec;
}

inline ExperimentReport start_report(const ExperimentConfig& cfg) {
  ExperimentReport rep;
  rep.experiment = to_string(cfg.experiment);
  rep.records = config_records(cfg, rep.experiment);
  rep.warnings = cfg.warnings;
  return rep;
}

/// Sigma^2_N(L, alpha_r) for every (N index j, replicate r), j-major.
inline std::vector<StatResult> variance_grid(const ExperimentConfig& cfg, std::size_t threads) {
  const std::size_t reps = cfg.alpha_samples;
  std::vector<StatResult> out(cfg.n_list.size() * reps);
  parallel_for(out.size(), threads, [&](std::size_t idx) {
    const std::size_t j = idx / reps;
    const std::size_t r = idx % reps;
    const std::size_t n = cfg.n_list[j];
    const auto pts = frac_points(cfg.sequence, replicate_alpha(cfg, r), n);
    out[idx] = number_variance_exact(pts, WindowParams(n, cfg.l_schedule(n)));
  });
  return out;
}

}  // namespace detail

/// Fraction of alpha samples with |Sigma^2/L - 1| > delta, per N.
inline ExperimentReport run_thm1(const ExperimentConfig& cfg, std::size_t threads = 1) {
  ExperimentReport rep = detail::start_report(cfg);
  const std::size_t reps = cfg.alpha_samples;
  const auto grid = detail::variance_grid(cfg, threads);
  std::vector<Record> summaries;
  for (std::size_t j = 0; j < cfg.n_list.size(); ++j) {
    const std::size_t n = cfg.n_list[j];
    const double l = cfg.l_schedule(n);
    std::size_t exceed = 0;
    for (std::size_t r = 0; r < reps; ++r) {
      const AlphaSpec alpha = replicate_alpha(cfg, r);
      const double var = grid[j * reps + r].value;
      const double dev = std::abs(var / l - 1.0);
      const bool over = dev > cfg.delta;
      exceed += over;
      Record v = detail::cell_record(cfg, alpha, n, l, r);
      v.statistic = "number_variance";
      v.value = var;
      v.error_bound = 0.0;
      rep.records.push_back(v);
      v.statistic = "deviation";
      v.value = dev;
      v.detail = over ? "exceeds" : "within";
      rep.records.push_back(std::move(v));
    }
    const double p = static_cast<double>(exceed) / static_cast<double>(reps);
    Record s = detail::summary_record(cfg, "exceedance_fraction", p);
    s.n = n;
    s.l = l;
    s.std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(reps));
    s.detail = "exceed=" + std::to_string(exceed) + ";samples=" + std::to_string(reps) +
               ";delta=" + detail::format_g17(cfg.delta);
    summaries.push_back(std::move(s));
  }
  rep.records.insert(rep.records.end(), summaries.begin(), summaries.end());
  return rep;
}

/// Sigma^2_N / L along n.list for fixed alpha replicates; head and tail
/// halves of n.list are compared through their maximal deviation from 1.
inline ExperimentReport run_thm2(const ExperimentConfig& cfg, std::size_t threads = 1) {
  ExperimentReport rep = detail::start_report(cfg);
  const std::size_t reps = cfg.alpha_samples;
  const std::size_t count = cfg.n_list.size();
  const std::size_t split = count / 2;  // head: [0, split), tail: [split, count)
  const auto grid = detail::variance_grid(cfg, threads);
  std::vector<double> dev(count * reps);
  for (std::size_t r = 0; r < reps; ++r) {
    const AlphaSpec alpha = replicate_alpha(cfg, r);
    for (std::size_t j = 0; j < count; ++j) {
      const std::size_t n = cfg.n_list[j];
      const double l = cfg.l_schedule(n);
      const double var = grid[j * reps + r].value;
      dev[j * reps + r] = std::abs(var / l - 1.0);
      Record v = detail::cell_record(cfg, alpha, n, l, r);
      v.statistic = "number_variance";
      v.value = var;
      v.error_bound = 0.0;
      rep.records.push_back(v);
      v.statistic = "ratio";
      v.value = var / l;
      rep.records.push_back(std::move(v));
    }
  }
  std::vector<Record> summaries;
  for (std::size_t j = 0; j < count; ++j) {
    std::vector<double> col(dev.begin() + j * reps, dev.begin() + (j + 1) * reps);
    Record s = detail::summary_record(cfg, "median_abs_deviation", median(col));
    s.n = cfg.n_list[j];
    s.l = cfg.l_schedule(cfg.n_list[j]);
    summaries.push_back(std::move(s));
  }
  std::vector<double> heads, tails;
  for (std::size_t r = 0; r < reps; ++r) {
    double head = 0.0, tail = 0.0;
    for (std::size_t j = 0; j < count; ++j) {
      double& slot = j < split ? head : tail;
      slot = std::max(slot, dev[j * reps + r]);
    }
    const AlphaSpec alpha = replicate_alpha(cfg, r);
    if (split > 0) {
      heads.push_back(head);
      Record s = detail::summary_record(cfg, "head_max_deviation", head);
      s.replicate = r;
      s.alpha = alpha.describe();
      summaries.push_back(std::move(s));
    }
    tails.push_back(tail);
    Record s = detail::summary_record(cfg, "tail_max_deviation", tail);
    s.replicate = r;
    s.alpha = alpha.describe();
    summaries.push_back(std::move(s));
  }
  if (!heads.empty()) summaries.push_back(detail::summary_record(cfg, "median_head_max_deviation", median(heads)));
  summaries.push_back(detail::summary_record(cfg, "median_tail_max_deviation", median(tails)));
  rep.records.insert(rep.records.end(), summaries.begin(), summaries.end());
  return rep;
}

/// KS distance of (S_N - L)/sqrt(Sigma^2) to N(0,1) per (N, replicate), with an
/// optional i.i.d. control at the same (N, L).
inline ExperimentReport run_clt(const ExperimentConfig& cfg, std::size_t threads = 1) {
  ExperimentReport rep = detail::start_report(cfg);
  const std::size_t reps = cfg.alpha_samples;
  const std::size_t count = cfg.n_list.size();
  std::vector<EmpiricalCltResult> lac(count * reps), iid(cfg.clt_control ? count * reps : 0);
  parallel_for(count * reps, threads, [&](std::size_t idx) {
    const std::size_t j = idx / reps;
    const std::size_t r = idx % reps;
    const std::size_t n = cfg.n_list[j];
    const WindowParams w(n, cfg.l_schedule(n));
    lac[idx] = empirical_clt(frac_points(cfg.sequence, replicate_alpha(cfg, r), n), w, cfg.grid);
    if (cfg.clt_control) {
      iid[idx] = empirical_clt(iid_points(n, RngSpec{cfg.seed, kControlStreamBase + r}), w, cfg.grid);
    }
  });
  const auto describe = [](const EmpiricalCltResult& c) {
    return "mean=" + detail::format_g17(c.mean) + ";scale=" + detail::format_g17(c.scale) +
           ";atoms=" + std::to_string(c.histogram.size()) + ";grid=" + std::to_string(c.grid_size);
  };
  std::vector<Record> summaries;
  for (std::size_t j = 0; j < count; ++j) {
    const std::size_t n = cfg.n_list[j];
    const double l = cfg.l_schedule(n);
    std::vector<double> ks, ks_iid;
    for (std::size_t r = 0; r < reps; ++r) {
      const auto& c = lac[j * reps + r];
      Record v = detail::cell_record(cfg, replicate_alpha(cfg, r), n, l, r);
      v.statistic = "ks_distance";
      v.value = c.ks_distance;
      v.detail = describe(c);
      rep.records.push_back(std::move(v));
      ks.push_back(c.ks_distance);
      if (cfg.clt_control) {
        const auto& d = iid[j * reps + r];
        Record u;
        u.kind = "cell";
        u.experiment = rep.experiment;
        u.n = n;
        u.l = l;
        u.replicate = r;
        u.alpha = "iid(seed=" + std::to_string(cfg.seed) +
                  ",stream=" + std::to_string(kControlStreamBase + r) + ")";
        u.statistic = "ks_distance_iid";
        u.value = d.ks_distance;
        u.method = "exact";
        u.detail = describe(d);
        rep.records.push_back(std::move(u));
        ks_iid.push_back(d.ks_distance);
      }
    }
    Record s = detail::summary_record(cfg, "median_ks", median(ks));
    s.n = n;
    s.l = l;
    summaries.push_back(s);
    if (cfg.clt_control) {
      s.statistic = "median_ks_iid";
      s.value = median(ks_iid);
      summaries.push_back(std::move(s));
    }
  }
  rep.records.insert(rep.records.end(), summaries.begin(), summaries.end());
  return rep;
}

/// Lets tests perturb an oracle reference value to check that failures surface.
struct OracleHooks {
  std::function<double(const std::string& property, double reference)> reference;
};

/// Expected E_x[S^k] for N i.i.d. uniform points: L + L sum_j S(k,j) C_j(N) L^{j-1}.
inline double iid_moment_reference(int k, std::size_t n, double l) {
  double acc = l;
  for (int j = 2; j <= k; ++j) {
    acc += l * static_cast<double>(stirling2(k, j)) * ck_factor(j, n) * std::pow(l, j - 1);
  }
  return acc;
}

/// i.i.d. invariant suite. Each property reports its sample mean, standard error,
/// z-score against the reference and pass = |z| < 4. Failures are report content.
inline ExperimentReport run_oracle(const ExperimentConfig& cfg, std::size_t threads = 1,
                                   const OracleHooks& hooks = {}) {
  ExperimentReport rep = detail::start_report(cfg);
  const std::size_t trials = cfg.oracle_trials;
  constexpr std::size_t kStats = 6;
  const char* names[kStats] = {"number_variance", "pair_correlation", "k3_correlation",
                               "moment_2",        "moment_3",         "moment_4"};
  std::size_t failed = 0;
  for (std::size_t j = 0; j < cfg.n_list.size(); ++j) {
    const std::size_t n = cfg.n_list[j];
    const double l = cfg.l_schedule(n);
    const WindowParams w(n, l);
    std::vector<double> samples(trials * kStats);
    parallel_for(trials, threads, [&](std::size_t t) {
      const auto pts = iid_points(n, RngSpec{cfg.seed, (static_cast<std::uint64_t>(j) << 32) + t});
      double* row = &samples[t * kStats];
      row[0] = number_variance_exact(pts, w).value;
      row[1] = pair_correlation(pts, w).value;
      row[2] = k_level_correlation(pts, w, 3).value;
      for (int k = 2; k <= 4; ++k) row[1 + k] = count_moment(pts, w, k).value;
    });
    const double refs[kStats] = {binomial_variance_reference(n, l), ck_factor(2, n) * l,
                                 ck_factor(3, n) * l * l,           iid_moment_reference(2, n, l),
                                 iid_moment_reference(3, n, l),     iid_moment_reference(4, n, l)};
    for (std::size_t s = 0; s < kStats; ++s) {
      double mean = 0.0, m2 = 0.0;
      for (std::size_t t = 0; t < trials; ++t) {
        const double x = samples[t * kStats + s];
        const double d = x - mean;
        mean += d / static_cast<double>(t + 1);
        m2 += d * (x - mean);
      }
      const double sem = std::sqrt(m2 / static_cast<double>(trials - 1) / static_cast<double>(trials));
      double ref = refs[s];
      if (hooks.reference) ref = hooks.reference(names[s], ref);
      const double z = sem > 0.0 ? (mean - ref) / sem : (mean == ref ? 0.0 : INFINITY);
      const bool pass = std::abs(z) < 4.0;
      failed += !pass;
      Record rec = detail::summary_record(cfg, names[s], mean);
      rec.sequence.clear();
      rec.alpha = "iid(seed=" + std::to_string(cfg.seed) + ",streams=" +
                  std::to_string(static_cast<std::uint64_t>(j) << 32) + "+t)";
      rec.n = n;
      rec.l = l;
      rec.std_error = sem;
      rec.detail = "reference=" + detail::format_g17(ref) + ";z=" + detail::format_g17(z) +
                   ";trials=" + std::to_string(trials) + ";pass=" + (pass ? "true" : "false");
      if (s >= 3) rec.detail += ";poisson=" + detail::format_g17(poisson_moment(static_cast<int>(s) - 1, l));
      rep.records.push_back(std::move(rec));
    }
  }
  Record total = detail::summary_record(cfg, "properties_failed", static_cast<double>(failed));
  total.sequence.clear();
  rep.records.push_back(std::move(total));
  return rep;
}

/// Dispatches on cfg.experiment and stamps the wall time.
inline ExperimentReport run_experiment(const ExperimentConfig& cfg, std::size_t threads = 1) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport rep;
  switch (cfg.experiment) {
    case Experiment::thm1: rep = run_thm1(cfg, threads); break;
    case Experiment::thm2: rep = run_thm2(cfg, threads); break;
    case Experiment::clt: rep = run_clt(cfg, threads); break;
    case Experiment::oracle: rep = run_oracle(cfg, threads); break;
  }
  rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

/// Summary value of `statistic` at N (or with no N when n == 0).
inline std::optional<double> summary_value(const ExperimentReport& rep, const std::string& statistic,
                                           std::size_t n = 0) {
  for (const Record& r : rep.records) {
    if (r.kind != "summary" || r.statistic != statistic) continue;
    if ((n == 0 && !r.n) || (r.n && *r.n == n)) return r.value;
  }
  return std::nullopt;
}

}  // namespace lacunary
