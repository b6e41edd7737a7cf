#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "lacunary/kernels.hpp"

using namespace lacunary;

namespace {

// Touchard recurrence: mu_{k+1} = L sum_{i=0}^{k} C(k, i) mu_i, mu_0 = 1.
std::vector<double> touchard(int k_max, double l) {
  std::vector<double> mu{1.0};
  for (int k = 0; k < k_max; ++k) {
    double acc = 0.0;
    double binom = 1.0;
    for (int i = 0; i <= k; ++i) {
      acc += binom * mu[i];
      binom = binom * (k - i) / (i + 1);
    }
    mu.push_back(l * acc);
  }
  return mu;
}

// Midpoint rule for delta_k over [-1,1]^{k-1}, the support of the kernel.
double delta_integral(int dims, int cells) {
  const double h = 2.0 / cells;
  std::vector<double> t(dims);
  double total = 0.0;
  std::function<void(int)> rec = [&](int d) {
    if (d == dims) {
      total += delta_k(t);
      return;
    }
    for (int i = 0; i < cells; ++i) {
      t[d] = -1.0 + (i + 0.5) * h;
      rec(d + 1);
    }
  };
  rec(0);
  return total * std::pow(h, dims);
}

}  // namespace

TEST(Tent, Values) {
  EXPECT_EQ(tent(0.0), 1.0);
  EXPECT_EQ(tent(0.5), 0.5);
  EXPECT_EQ(tent(-2.0), 0.0);
  EXPECT_EQ(tent(1.0), 0.0);
}

TEST(TentHat, Values) {
  EXPECT_EQ(tent_hat(0.0), 1.0);
  EXPECT_NEAR(tent_hat(1.0), 0.0, 1e-30);
  EXPECT_NEAR(tent_hat(0.5), 4.0 / (std::numbers::pi * std::numbers::pi), 1e-15);
  EXPECT_NEAR(tent_hat(0.5), 0.405285, 1e-6);
}

TEST(TentHat, SeriesBranchMatchesDirectFormula) {
  for (double x : {0.99e-4, 0.5e-4, 1e-5, -0.99e-4}) {
    const double y = std::numbers::pi * x;
    const double direct = std::pow(std::sin(y) / y, 2);
    EXPECT_NEAR(tent_hat(x), direct, 1e-14);
  }
  // continuity across the switch
  EXPECT_NEAR(tent_hat(std::nextafter(1e-4, 0.0)), tent_hat(1e-4), 1e-14);
}

TEST(TentHat, LargeArgumentsStayAccurate) {
  // sin^2(pi x) for x = 10^6 + 1/2 is exactly 1.
  const double x = 1e6 + 0.5;
  EXPECT_NEAR(tent_hat(x) * std::numbers::pi * std::numbers::pi * x * x, 1.0, 1e-9);
}

TEST(DeltaK, Values) {
  const double a[] = {0.3};
  EXPECT_DOUBLE_EQ(delta_k(a), 0.7);
  EXPECT_EQ(delta_k(a), tent(0.3));
  const double b[] = {0.3, -0.2};
  EXPECT_NEAR(delta_k(b), 0.5, 1e-15);
  const double c[] = {0.9, -0.9};
  EXPECT_EQ(delta_k(c), 0.0);
}

TEST(DeltaK, DimensionGuard) {
  std::vector<double> nine(9, 0.0);
  EXPECT_THROW(delta_k(nine), DimensionTooLarge);
  std::vector<double> eight(8, 0.0);
  EXPECT_EQ(delta_k(eight), 1.0);
  EXPECT_THROW(delta_k(std::span<const double>{}), OutOfRange);
}

TEST(DeltaK, ReducesToTentForKEqualsTwo) {
  for (int i = 0; i < 10000; ++i) {
    const double t = -2.0 + 4.0 * i / 9999.0;
    const double ts[] = {t};
    EXPECT_EQ(delta_k(ts), tent(t));
  }
}

TEST(DeltaK, UnitIntegral) {
  EXPECT_NEAR(delta_integral(1, 4000), 1.0, 1e-3);
  EXPECT_NEAR(delta_integral(2, 800), 1.0, 1e-3);
  EXPECT_NEAR(delta_integral(3, 160), 1.0, 1e-3);
}

TEST(Stirling, SmallValues) {
  EXPECT_TRUE(stirling2(3, 1) == 1);
  EXPECT_TRUE(stirling2(3, 2) == 3);
  EXPECT_TRUE(stirling2(4, 2) == 7);
  EXPECT_TRUE(stirling2(0, 0) == 1);
  EXPECT_TRUE(stirling2(5, 0) == 0);
  EXPECT_THROW(stirling2(31, 2), OutOfRange);
  EXPECT_THROW(stirling2(3, 4), OutOfRange);
}

TEST(Stirling, RowSumsAreBellNumbers) {
  const unsigned long long bell[] = {1, 1, 2, 5, 15, 52, 203, 877, 4140, 21147, 115975};
  for (int k = 0; k <= 10; ++k) {
    StirlingInt sum = 0;
    for (int j = 0; j <= k; ++j) sum += stirling2(k, j);
    EXPECT_TRUE(sum == bell[k]) << "k=" << k;
  }
  // Bell(30) = 846749014511809332450147
  StirlingInt b30 = 0;
  for (int j = 0; j <= 30; ++j) b30 += stirling2(30, j);
  const StirlingInt expected =
      static_cast<StirlingInt>(846749014511ULL) * 1000000000000ULL + 809332450147ULL;
  EXPECT_TRUE(b30 == expected);
}

TEST(PoissonMoment, Values) {
  EXPECT_EQ(poisson_moment(1, 5.0), 5.0);
  EXPECT_EQ(poisson_moment(2, 5.0), 30.0);
  EXPECT_EQ(poisson_moment(3, 2.0), 22.0);
  for (int k = 1; k <= 10; ++k) EXPECT_EQ(poisson_moment(k, 0.0), 0.0);
  EXPECT_THROW(poisson_moment(31, 1.0), OutOfRange);
}

TEST(PoissonMoment, MatchesTouchardRecurrence) {
  for (double l : {0.5, 1.0, 10.0}) {
    const auto mu = touchard(10, l);
    for (int k = 1; k <= 10; ++k) {
      EXPECT_NEAR(poisson_moment(k, l), mu[k], 1e-12 * mu[k]) << "k=" << k << " L=" << l;
    }
  }
}

TEST(NormalMoment, Values) {
  const double expected[] = {0, 1, 0, 3, 0, 15};
  for (int k = 1; k <= 6; ++k) EXPECT_EQ(normal_moment(k), expected[k - 1]);
}

TEST(CkFactor, Values) {
  EXPECT_EQ(ck_factor(2, 2), 0.5);
  EXPECT_NEAR(ck_factor(3, 10), 0.72, 1e-15);
  EXPECT_NEAR(ck_factor(2, 1000000), 1.0 - 1e-6, 1e-15);
  EXPECT_THROW(ck_factor(5, 4), OutOfRange);
}

TEST(PoissonMgf, Values) {
  EXPECT_EQ(normalized_poisson_mgf(0.0, 3.0), 1.0);
  EXPECT_NEAR(normalized_poisson_mgf(1.0, 1e6), std::exp(0.5), 1e-2);
  EXPECT_NEAR(normalized_poisson_mgf(1.0, 1.0), std::exp(std::numbers::e - 2.0), 1e-12);
  EXPECT_NEAR(normalized_poisson_mgf(1.0, 1.0), 2.0509, 1e-4);
  EXPECT_THROW(normalized_poisson_mgf(1.0, 0.0), OutOfRange);
  EXPECT_THROW(normalized_poisson_mgf(800.0, 1.0), Overflow);
  EXPECT_THROW(normalized_poisson_mgf(-1e7, 1.0), Overflow);
}

TEST(PoissonMgf, ApproachesGaussianMgf) {
  for (double t : {-2.0, -1.0, 1.0, 2.0}) {
    const double target = std::exp(t * t / 2.0);
    double prev = INFINITY;
    for (double l : {1e2, 1e4, 1e6}) {
      const double gap = std::abs(normalized_poisson_mgf(t, l) - target);
      EXPECT_LT(gap, prev) << "t=" << t << " L=" << l;
      prev = gap;
    }
  }
}

TEST(MomentTable, Invariants) {
  const auto table = moment_table(6, 4.0);
  EXPECT_EQ(table.poisson[0], 4.0);
  EXPECT_EQ(table.normal[3], 3.0);
  EXPECT_EQ(table.normal[4], 0.0);
}
