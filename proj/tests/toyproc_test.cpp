#include "bfpack/toyproc.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "bfpack/error.hpp"
#include "support/toy_monte_carlo.hpp"

namespace bfpack::toy {
namespace {

// Frozen from a 600-digit mpmath evaluation of the same sums.
struct Frozen {
  double p;
  std::uint32_t m;
  double loss_b;
  double relative;
};

constexpr Frozen kFrozen[] = {
    {0.55, 1, 0.692197149724779, 0.00589755428747},
    {0.55, 5, 0.692072410929261, 0.00571628447238},
    {0.55, 20, 0.691635802705531, 0.00508180751071},
    {0.55, 200, 0.689154954155913, 0.00147665038227},
    {0.6, 1, 0.685943550476079, 0.0192149469329},
    {0.6, 5, 0.684769747180264, 0.0174708415134},
    {0.6, 20, 0.680812457449641, 0.0115908695536},
    {0.6, 200, 0.673119459577181, 0.000160164486306},
    {0.75, 1, 0.597710035187233, 0.0629071309288},
    {0.75, 5, 0.585746395712697, 0.041632203354},
    {0.75, 20, 0.564362592261066, 0.00360540802342},
    {0.75, 200, 0.562335144618813, 7.97743617761e-15},
    {0.9, 1, 0.350085687660647, 0.076911792729},
    {0.9, 5, 0.330931938778909, 0.0179922231129},
    {0.9, 20, 0.325084896792697, 5.91664715077e-6},
    {0.9, 200, 0.325082973391448, 2.37495255472e-46},
};

double entropy(double p) { return -p * std::log(p) - (1 - p) * std::log(1 - p); }

TEST(ModelA, Entropy) {
  EXPECT_NEAR(model_a_loss(0.5), std::log(2.0), 1e-15);
  EXPECT_NEAR(model_a_loss(0.75), 0.5623351446188083, 1e-15);
  EXPECT_THROW(model_a_loss(0.0), Error);
  EXPECT_THROW(model_a_loss(1.0), Error);
}

TEST(ModelB, FrozenValues) {
  for (const auto& f : kFrozen) {
    EXPECT_NEAR(model_b_expected_loss(f.p, f.m), f.loss_b, 1e-13)
        << "p=" << f.p << " m=" << f.m;
    EXPECT_NEAR(relative_increase(f.p, f.m), f.relative, 1e-10 * f.relative)
        << "p=" << f.p << " m=" << f.m;
  }
}

TEST(ModelB, SingleTokenWindow) {
  for (const double p : {0.55, 0.75, 0.9}) {
    const double q = 1 - p;
    EXPECT_NEAR(model_b_prediction(p, 1, 1), p * p + q * q, 1e-15);
    const double direct = -(p * std::log(p * p + q * q) + q * std::log(2 * p * q));
    EXPECT_NEAR(model_b_loss_given(p, 1, 0, 1), direct, 1e-15);
  }
  EXPECT_NEAR(model_b_loss_given(0.75, 1, 0, 1), 0.597710035187233, 1e-15);
}

TEST(ModelB, UninformativeProcess) {
  for (const std::uint32_t m : {1u, 2u, 7u, 50u}) {
    EXPECT_NEAR(model_b_expected_loss(0.5, m), std::log(2.0), 1e-14);
    EXPECT_EQ(relative_increase(0.5, m), 0.0);
    for (std::uint32_t k = 0; k <= m; ++k) {
      EXPECT_NEAR(model_b_prediction(0.5, m, k), 0.5, 1e-15);
    }
  }
}

TEST(ModelB, PredictionsNormalizedAndSymmetric) {
  for (const double p : {0.5, 0.55, 0.75, 0.9, 0.999}) {
    for (const std::uint32_t m : {1u, 2u, 9u, 40u, 1000u}) {
      for (std::uint32_t k = 0; k <= m; k += std::max(1u, m / 17)) {
        const auto lp = model_b_log_prediction(p, m, k);
        ASSERT_NEAR(std::exp(lp.zero) + std::exp(lp.one), 1.0, 1e-12);
        ASSERT_NEAR(model_b_prediction(p, m, k),
                    1.0 - model_b_prediction(p, m, m - k), 1e-12);
        ASSERT_GE(model_b_prediction(p, m, k), 1 - p - 1e-15);
        ASSERT_LE(model_b_prediction(p, m, k), p + 1e-15);
      }
    }
  }
}

TEST(ModelB, ExpectedLossSymmetricInDigits) {
  // Swapping 0 and 1 everywhere leaves the loss unchanged.
  for (const std::uint32_t m : {1u, 4u, 11u}) {
    for (std::uint32_t k = 0; k + 1 <= m; ++k) {
      ASSERT_NEAR(model_b_loss_given(0.7, m, 0, k + 1),
                  model_b_loss_given(0.7, m, 1, m - k - 1), 1e-14);
    }
  }
}

TEST(ModelB, NeverBeatsModelA) {
  for (const double p : {0.51, 0.55, 0.6, 0.75, 0.9, 0.99}) {
    for (std::uint32_t m = 1; m <= 300; m += 13) {
      const double excess = log_expected_excess(p, m);
      ASSERT_GT(excess, -std::numeric_limits<double>::infinity()) << p << " " << m;
      ASSERT_GT(relative_increase(p, m), 0.0) << p << " " << m;
      ASSERT_GE(model_b_expected_loss(p, m), model_a_loss(p) - 1e-15);
    }
  }
}

TEST(ModelB, ExcessRouteMatchesDirectDifference) {
  for (const double p : {0.55, 0.6, 0.75, 0.9}) {
    for (std::uint32_t m = 1; m <= 60; ++m) {
      const double direct = (model_b_expected_loss(p, m) - model_a_loss(p)) / model_a_loss(p);
      ASSERT_NEAR(relative_increase(p, m), direct, 1e-13) << p << " " << m;
    }
  }
}

TEST(ModelB, PerWindowExcessMatchesDifference) {
  const double p = 0.7;
  for (const std::uint32_t m : {1u, 3u, 8u}) {
    for (const int x0 : {0, 1}) {
      for (std::uint32_t k = x0 == 0 ? 1 : 0; k <= (x0 == 0 ? m : m - 1); ++k) {
        const double diff = model_b_loss_given(p, m, x0, k) - entropy(p);
        const double via_log = std::exp(log_excess_given(p, m, x0, k));
        ASSERT_NEAR(via_log, diff, 1e-14);
      }
    }
  }
}

TEST(ModelB, ExcessDecaysEveryTwoSteps) {
  for (const double p : {0.55, 0.6, 0.75, 0.9}) {
    for (std::uint32_t m = 1; m <= 60; ++m) {
      ASSERT_LT(relative_increase(p, m + 2), relative_increase(p, m)) << p << " " << m;
    }
    EXPECT_LT(relative_increase(p, 200), relative_increase(p, 1));
  }
}

TEST(ModelB, Errors) {
  EXPECT_THROW(model_b_prediction(0.4, 1, 0), Error);
  EXPECT_THROW(model_b_prediction(1.0, 1, 0), Error);
  EXPECT_THROW(model_b_prediction(0.75, 0, 0), Error);
  EXPECT_THROW(model_b_prediction(0.75, 2, 3), Error);
  EXPECT_THROW(model_b_loss_given(0.75, 2, 0, 0), Error);
  EXPECT_THROW(model_b_loss_given(0.75, 2, 1, 2), Error);
  EXPECT_THROW(model_b_loss_given(0.75, 2, 2, 1), Error);
  EXPECT_THROW(model_b_expected_loss(0.75, 0), Error);
  EXPECT_THROW(model_b_expected_loss(0.75, 20, 10), Error);
}

TEST(ModelB, MonteCarloAgrees) {
  for (const std::uint32_t m : {1u, 5u, 20u}) {
    const auto est = testing::simulate_model_b_loss(0.75, m, 200'000, 100 + m);
    EXPECT_NEAR(est.mean, model_b_expected_loss(0.75, m), 4 * est.standard_error)
        << "m=" << m;
  }
}

TEST(ToyGrid, RowsAndCsv) {
  const std::vector<double> ps{0.5, 0.75};
  const auto rows = toy_grid(ps, 3);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[3].p, 0.75);
  EXPECT_EQ(rows[3].m, 1u);
  EXPECT_NEAR(rows[3].loss_b, 0.597710035187233, 1e-15);
  EXPECT_EQ(rows[0].relative_increase, 0.0);

  std::ostringstream out;
  write_toy_csv(out, std::span<const ToyRow>(rows).first(1));
  EXPECT_EQ(out.str(),
            "p,m,loss_a,loss_b,relative_increase\n"
            "0.5,1,0.6931471805599453,0.6931471805599453,0\n");
}

}  // namespace
}  // namespace bfpack::toy
