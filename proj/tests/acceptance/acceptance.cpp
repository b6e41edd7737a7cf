// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "lacunary/config.hpp"
#include "lacunary/experiments.hpp"
#include "lacunary/kernels.hpp"
#include "lacunary/random_model.hpp"
#include "lacunary/report.hpp"
#include "lacunary/sequence.hpp"
#include "lacunary/statistics.hpp"

using namespace lacunary;

namespace {

struct Outcome {
  bool pass = true;
  std::string note;
};

std::size_t worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

// Naive R^k over ordered distinct tuples and shifts in {-1, 0, 1}, with the
// k-dimensional tent max(0, 1 - (max - min)) over the offsets and 0. Long double
// keeps the rounding of ~10^7 terms well below the 1e-12 comparison.
double brute_force_correlation(std::span<const double> v, double l, int k) {
  const std::size_t n = v.size();
  const long double w = static_cast<long double>(l) / static_cast<long double>(n);
  std::vector<std::size_t> idx(k);
  long double total = 0.0L;
  std::function<void(int)> rec = [&](int depth) {
    if (depth == k) {
      int shifts = 1;
      for (int i = 0; i < k - 1; ++i) shifts *= 3;
      for (int code = 0; code < shifts; ++code) {
        int c = code;
        long double hi = 0.0L, lo = 0.0L;
        for (int i = 0; i < k - 1; ++i) {
          const long double t =
              (static_cast<long double>(v[idx[i]]) - v[idx[k - 1]] + (c % 3 - 1)) / w;
          hi = std::max(hi, t);
          lo = std::min(lo, t);
          c /= 3;
        }
        total += std::max(1.0L - (hi - lo), 0.0L);
      }
      return;
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (std::find(idx.begin(), idx.begin() + depth, j) != idx.begin() + depth) continue;
      idx[depth] = j;
      rec(depth + 1);
    }
  };
  rec(0);
  return static_cast<double>(total / static_cast<long double>(n));
}

struct MeanSem {
  double mean;
  double sem;
};

MeanSem mean_sem(const std::vector<double>& xs) {
  double mean = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double d = xs[i] - mean;
    mean += d / static_cast<double>(i + 1);
    m2 += d * (xs[i] - mean);
  }
  const double n = static_cast<double>(xs.size());
  return {mean, std::sqrt(m2 / (n - 1.0) / n)};
}

std::string csv_of(const ExperimentReport& rep) {
  std::ostringstream os;
  write_csv(os, rep.records);
  return os.str();
}

// 1. Sigma^2 by Monte Carlo agrees with the exact pair-correlation identity.
Outcome identity_suite() {
  const SequenceSpec seqs[] = {SequenceSpec::geometric(2.0, 2.0), SequenceSpec::geometric(1.5, 1.5)};
  const std::size_t ns[] = {64, 256, 1024};
  Outcome out;
  std::size_t failures = 0;
  double worst = 0.0;
  constexpr std::size_t kConfigs = 50;
  std::vector<double> ratio(kConfigs);
  parallel_for(kConfigs, worker_count(), [&](std::size_t i) {
    const SequenceSpec& spec = seqs[i % 2];
    const std::size_t n = ns[(i / 2) % 3];
    const std::size_t li = (i / 6) % 3;
    const double l = li == 0 ? 1.0 : li == 1 ? 4.0 : std::pow(static_cast<double>(n), 0.3);
    const auto pts = frac_points(spec, AlphaSpec::uniform("1", "2", RngSpec{1, i}), n);
    const WindowParams w(n, l);
    const auto exact = number_variance_exact(pts, w);
    const auto mc = number_variance_mc(pts, w, 100000, 1000 + i);
    ratio[i] = std::abs(mc.value - exact.value) / mc.mc_std_error;
  });
  for (double r : ratio) {
    failures += !(r <= 3.0);
    worst = std::max(worst, r);
  }
  out.pass = failures == 0;
  out.note = std::to_string(kConfigs - failures) + "/50 within 3 sigma, worst " + fmt("%.2f", worst) + " sigma";
  return out;
}

// 2. R^2 = L - L/N + T_N within the truncation bound.
Outcome poisson_summation() {
  const std::size_t n = 512;
  const double l = 8.0;
  const WindowParams w(n, l);
  const auto spec = SequenceSpec::geometric(2.0, 2.0);
  std::vector<double> gap(10), bound(10);
  parallel_for(10, worker_count(), [&](std::size_t i) {
    const auto alpha = AlphaSpec::uniform("1", "2", RngSpec{2, i});
    const auto t = t_n_fourier(spec, alpha, w, 5e-3);
    const auto r2 = pair_correlation(frac_points(spec, alpha, n), w);
    gap[i] = std::abs(r2.value - (l - l / n + t.value));
    bound[i] = t.truncation_bound + 1e-8;
  });
  Outcome out;
  double worst = 0.0;
  for (std::size_t i = 0; i < 10; ++i) {
    out.pass = out.pass && gap[i] <= bound[i];
    worst = std::max(worst, gap[i] / bound[i]);
  }
  out.note = "10 alphas, worst |gap|/bound = " + fmt("%.3f", worst);
  return out;
}

// 3. Truncated Fejer sum against N/L, and its extrapolated limit.
Outcome fourier_sum_lemma() {
  struct Case {
    std::size_t n;
    double l;
    std::size_t m;
  };
  Outcome out;
  std::ostringstream note;
  for (const Case c : {Case{10, 2.0, 10000}, Case{100, 10.0, 100000}, Case{1000, 25.0, 1000000}}) {
    const WindowParams w(c.n, c.l);
    const double target = static_cast<double>(c.n) / c.l;
    const double bound = 2.0 * c.n * c.n / (std::numbers::pi * std::numbers::pi * c.l * c.l * c.m);
    const double err = std::abs(fourier_sum_check(w, c.m) - target);
    const double extrap = std::abs(fourier_sum_extrapolated(w, c.m) - target);
    out.pass = out.pass && err <= bound && extrap <= 1e-6;
    note << "(" << c.n << "," << c.l << "): err " << fmt("%.2e", err) << " <= " << fmt("%.2e", bound)
         << ", extrapolated " << fmt("%.1e", extrap) << "; ";
  }
  out.note = note.str();
  return out;
}

// 4. Fast correlation sums against naive enumeration.
Outcome brute_force_equivalence() {
  Outcome out;
  double worst = 0.0;
  const std::size_t ns[] = {16, 32, 64, 128};
  std::vector<double> err(20);
  parallel_for(20, worker_count(), [&](std::size_t s) {
    const std::size_t n = ns[s % 4];
    const double l = s % 3 == 0 ? 1.0 : s % 3 == 1 ? 4.0 : 0.3 * static_cast<double>(n);
    const auto pts = s % 2 ? iid_points(n, RngSpec{4, s})
                           : frac_points(SequenceSpec::geometric(2.0, 2.0),
                                         AlphaSpec::uniform("1", "2", RngSpec{4, s}), n);
    const WindowParams w(n, l);
    const double e2 = std::abs(pair_correlation(pts, w).value - brute_force_correlation(pts.values(), l, 2));
    const double e3 = std::abs(k_level_correlation(pts, w, 3).value - brute_force_correlation(pts.values(), l, 3));
    err[s] = std::max(e2, e3);
  });
  for (double e : err) {
    out.pass = out.pass && e <= 1e-12;
    worst = std::max(worst, e);
  }
  out.note = "20 inputs, N <= 128, k = 2, 3, max abs diff " + fmt("%.2e", worst);
  return out;
}

// 5. i.i.d. means against the finite-N references.
Outcome oracle_suite() {
  const std::size_t n = 1024;
  const double l = 8.0;
  const WindowParams w(n, l);
  constexpr std::size_t kTrials = 1000;
  std::vector<double> var(kTrials), r2(kTrials), r3(kTrials);
  parallel_for(kTrials, worker_count(), [&](std::size_t t) {
    const auto pts = iid_points(n, RngSpec{5, t});
    var[t] = number_variance_exact(pts, w).value;
    r2[t] = pair_correlation(pts, w).value;
    r3[t] = k_level_correlation(pts, w, 3).value;
  });
  const MeanSem stats[] = {mean_sem(var), mean_sem(r2), mean_sem(r3)};
  const double refs[] = {7.9375, (1.0 - 1.0 / n) * l, ck_factor(3, n) * l * l};
  const char* names[] = {"Sigma2", "R2", "R3"};
  Outcome out;
  std::ostringstream note;
  for (int i = 0; i < 3; ++i) {
    const double z = (stats[i].mean - refs[i]) / stats[i].sem;
    out.pass = out.pass && std::abs(z) <= 4.0;
    note << names[i] << " z=" << fmt("%+.2f", z) << " ";
  }
  out.note = note.str();
  return out;
}

// 6. Exceedance fractions for a_n = 2^n, L = N^0.4, delta = 0.25.
Outcome theorem1(ExperimentReport& rep) {
  const auto cfg = parse_config_text(
      "experiment = thm1\nsequence.kind = geometric\nsequence.a1 = 2\nsequence.ratio = 2\n"
      "alpha.lo = 1\nalpha.hi = 2\nalpha.samples = 200\nn.list = 256,1024,4096\n"
      "l.kind = power\nl.param = 0.4\ndelta = 0.25\nseed = 0\n");
  rep = run_thm1(cfg, worker_count());
  Outcome out;
  std::ostringstream note;
  double prev = 2.0;
  for (std::size_t n : cfg.n_list) {
    const double p = *summary_value(rep, "exceedance_fraction", n);
    out.pass = out.pass && p <= prev;
    prev = p;
    note << "N=" << n << ": " << fmt("%.3f", p) << " ";
  }
  out.pass = out.pass && prev <= 0.10;
  out.note = note.str() + "(need non-increasing, <= 0.10 at 4096)";
  return out;
}

// 7. Median KS distance for a_n = 2^n, L = (ln N)^2, with an i.i.d. control.
Outcome theorem3(ExperimentReport& rep) {
  const auto cfg = parse_config_text(
      "experiment = clt\nsequence.a1 = 2\nsequence.ratio = 2\nalpha.samples = 10\n"
      "n.list = 1024,4096,16384\nl.kind = logpow\nl.param = 2\nseed = 0\nclt.control = true\n");
  rep = run_clt(cfg, worker_count());
  Outcome out;
  std::ostringstream note;
  double prev = 2.0;
  for (std::size_t n : cfg.n_list) {
    const double ks = *summary_value(rep, "median_ks", n);
    out.pass = out.pass && ks < prev;
    prev = ks;
    note << "N=" << n << ": " << fmt("%.4f", ks) << " ";
  }
  const double control = *summary_value(rep, "median_ks_iid", cfg.n_list.back());
  out.pass = out.pass && prev <= 0.10 && control <= 0.05;
  out.note = note.str() + "iid control " + fmt("%.4f", control);
  return out;
}

// 8. Poisson, Gaussian and MGF machinery.
Outcome appendix_machinery() {
  Outcome out;
  double worst = 0.0;
  for (double l : {0.5, 1.0, 10.0}) {
    std::vector<double> mu{1.0};  // Touchard: mu_{k+1} = L sum_i C(k, i) mu_i
    for (int k = 0; k < 10; ++k) {
      double acc = 0.0, binom = 1.0;
      for (int i = 0; i <= k; ++i) {
        acc += binom * mu[i];
        binom = binom * (k - i) / (i + 1);
      }
      mu.push_back(l * acc);
    }
    for (int k = 1; k <= 10; ++k) worst = std::max(worst, std::abs(poisson_moment(k, l) - mu[k]) / mu[k]);
  }
  const double mgf_gap = std::abs(normalized_poisson_mgf(1.0, 1e6) - std::exp(0.5));
  const double normal[] = {0, 1, 0, 3, 0, 15};
  bool table = true;
  for (int k = 1; k <= 6; ++k) table = table && normal_moment(k) == normal[k - 1];
  out.pass = worst <= 1e-12 && mgf_gap <= 1e-2 && table;
  out.note = "Touchard rel err " + fmt("%.1e", worst) + ", mgf gap " + fmt("%.2e", mgf_gap) +
             ", normal table " + (table ? "ok" : "wrong");
  return out;
}

// 9. Re-running each experiment gives byte-identical CSV.
Outcome determinism(const ExperimentReport& thm1, const ExperimentReport& clt) {
  Outcome out;
  std::ostringstream note;
  const auto check = [&](const std::string& name, const ExperimentConfig& cfg, const std::string& first) {
    const std::string again = csv_of(run_experiment(cfg, 1));
    const bool same = again == first;
    out.pass = out.pass && same;
    note << name << (same ? " identical" : " DIFFERS") << " (" << first.size() << " bytes); ";
  };
  check("thm1", parse_config_text(
                    "experiment = thm1\nsequence.kind = geometric\nsequence.a1 = 2\nsequence.ratio = 2\n"
                    "alpha.lo = 1\nalpha.hi = 2\nalpha.samples = 200\nn.list = 256,1024,4096\n"
                    "l.kind = power\nl.param = 0.4\ndelta = 0.25\nseed = 0\n"),
        csv_of(thm1));
  check("clt", parse_config_text(
                   "experiment = clt\nsequence.a1 = 2\nsequence.ratio = 2\nalpha.samples = 10\n"
                   "n.list = 1024,4096,16384\nl.kind = logpow\nl.param = 2\nseed = 0\nclt.control = true\n"),
        csv_of(clt));
  for (const char* text : {"experiment = thm2\n", "experiment = oracle\n"}) {
    const auto cfg = parse_config_text(text);
    check(to_string(cfg.experiment), cfg, csv_of(run_experiment(cfg, worker_count())));
  }
  out.note = note.str();
  return out;
}

}  // namespace

int main() {
  int failed = 0;
  const auto report = [&](int id, const char* title, const std::function<Outcome()>& fn) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !o.pass;
    std::printf("%s [PRIMARY] %d. %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, title, o.note.c_str(), secs);
    std::fflush(stdout);
  };
  ExperimentReport thm1, clt;
  report(1, "number variance identity, Monte Carlo vs exact", identity_suite);
  report(2, "Poisson summation cross-check", poisson_summation);
  report(3, "truncated Fejer sum", fourier_sum_lemma);
  report(4, "brute-force correlation equivalence", brute_force_equivalence);
  report(5, "i.i.d. oracle suite", oracle_suite);
  report(6, "high-probability number variance (desk scale)", [&] { return theorem1(thm1); });
  report(7, "central limit theorem (desk scale)", [&] { return theorem3(clt); });
  report(8, "Poisson and Gaussian moment machinery", appendix_machinery);
  report(9, "determinism", [&] { return determinism(thm1, clt); });
  std::printf("%d of 9 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
