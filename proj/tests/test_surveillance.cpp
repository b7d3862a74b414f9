#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "epitrigger/scenario.hpp"
#include "epitrigger/surveillance.hpp"
#include "oracles.hpp"

using namespace epitrigger;

namespace {

SurveillanceParams effort(double tests, double confidence = 0.95) { return {{tests}, confidence}; }

std::vector<double> random_series(std::mt19937_64& rng, std::size_t days, double max_prevalence) {
  std::uniform_real_distribution<double> u(0.0, max_prevalence);
  std::vector<double> out(days);
  for (auto& v : out) v = u(rng) * u(rng) / max_prevalence;
  return out;
}

Trajectory<NaiveState> naive_run(double beta, double gamma, double n, double i0, double t_end) {
  const DiseaseParams d{beta, gamma};
  return integrate([d](double, const NaiveState& x) { return naive_derivative(x, d); },
                   NaiveState{n - i0, i0, 0.0, n}, {0.0, t_end}, {});
}

}  // namespace

TEST(DetectionProbability, ZeroPrevalenceNeverDetects) {
  const std::vector<double> zeros(50, 0.0);
  for (double p : detection_probability(zeros, effort(1000))) EXPECT_EQ(p, 0.0);
  EXPECT_FALSE(detection_time(zeros, effort(1000)).detection_day);
}

TEST(DetectionProbability, ConstantPrevalenceClosedForm) {
  const std::vector<double> constant(40, 0.01);
  const auto p = detection_probability(constant, effort(10));
  for (std::size_t t = 1; t <= p.size(); ++t) {
    EXPECT_NEAR(p[t - 1], 1.0 - std::pow(0.99, 10.0 * t), 1e-14);
  }
  EXPECT_NEAR(p[29], 0.9509591059287142, 1e-14);
}

TEST(DetectionProbability, CertainPositiveDetectsFromThatDay) {
  std::vector<double> series{0.0, 0.001, 1.0, 0.0, 0.2};
  const auto p = detection_probability(series, effort(1));
  EXPECT_LT(p[1], 1.0);
  for (std::size_t s = 2; s < p.size(); ++s) EXPECT_EQ(p[s], 1.0);
}

TEST(DetectionProbability, RejectsInvalidPrevalence) {
  for (double bad : {-0.01, 1.01, std::numeric_limits<double>::quiet_NaN()}) {
    const std::vector<double> series{0.1, bad};
    EXPECT_THROW(detection_probability(series, effort(5)), InvalidPrevalence);
  }
}

TEST(DetectionProbability, PerDaySchedule) {
  const std::vector<double> series{0.1, 0.1, 0.1, 0.1};
  const SurveillanceParams schedule{{0.0, 2.0, 1.0}, 0.95};
  const auto p = detection_probability(series, schedule);
  const auto oracle = oracles::detection_product(series, {0.0, 2.0, 1.0, 1.0});
  for (std::size_t s = 0; s < p.size(); ++s) EXPECT_NEAR(p[s], oracle[s], 1e-15);
  EXPECT_EQ(p[0], 0.0);
}

TEST(DetectionProbability, LogSpaceAgreesWithDirectProduct) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> tests(0.0, 50.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto series = random_series(rng, 60, 0.5);
    const double n = std::floor(tests(rng));
    const auto p = detection_probability(series, effort(n));
    const auto oracle = oracles::detection_product(series, std::vector<double>(series.size(), n));
    for (std::size_t s = 0; s < p.size(); ++s) EXPECT_NEAR(p[s], oracle[s], 1e-12);
  }
}

TEST(DetectionProbability, NonDecreasingAndBounded) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 100; ++trial) {
    const auto series = random_series(rng, 80, 1.0);
    const auto p = detection_probability(series, effort(3));
    for (std::size_t s = 0; s < p.size(); ++s) {
      EXPECT_GE(p[s], 0.0);
      EXPECT_LE(p[s], 1.0);
      if (s > 0) {
        EXPECT_GE(p[s], p[s - 1]);
      }
    }
  }
}

TEST(DetectionTime, ClosedFormInversion) {
  const std::vector<double> constant(100, 0.01);
  const auto r = detection_time(constant, effort(10));
  ASSERT_TRUE(r.detection_day);
  EXPECT_EQ(*r.detection_day, 30);
  EXPECT_EQ(*r.detection_day, static_cast<int>(std::ceil(std::log(0.05) / (10.0 * std::log(0.99)))));
  EXPECT_EQ(*r.prevalence_at_detection, 0.01);
}

TEST(DetectionTime, NoTestingNoDetection) {
  const std::vector<double> constant(100, 0.3);
  const auto r = detection_time(constant, effort(0));
  EXPECT_FALSE(r.detection_day);
  EXPECT_FALSE(r.prevalence_at_detection);
}

TEST(DetectionTime, CertainFirstDay) {
  const std::vector<double> series{1.0, 0.5};
  EXPECT_EQ(detection_time(series, effort(1)).detection_day, 1);
}

TEST(DetectionTime, MoreTestingNeverDetectsLater) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto series = random_series(rng, 120, 0.05);
    const double low = 50.0 * u(rng);
    const double high = low + 50.0 * u(rng);
    const auto a = detection_time(series, effort(low)).detection_day;
    const auto b = detection_time(series, effort(high)).detection_day;
    if (a) {
      ASSERT_TRUE(b);
      EXPECT_LE(*b, *a);
    }
  }
}

TEST(DetectionTime, HigherConfidenceNeverDetectsEarlier) {
  std::mt19937_64 rng(24);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  for (int trial = 0; trial < 100; ++trial) {
    const auto series = random_series(rng, 120, 0.05);
    double c1 = u(rng);
    double c2 = u(rng);
    if (c1 > c2) std::swap(c1, c2);
    const auto a = detection_time(series, effort(20, c1)).detection_day;
    const auto b = detection_time(series, effort(20, c2)).detection_day;
    if (b) {
      ASSERT_TRUE(a);
      EXPECT_LE(*a, *b);
    }
  }
}

TEST(DetectionTime, ValidatesParams) {
  const std::vector<double> series{0.1};
  EXPECT_THROW(detection_time(series, effort(10, 1.0)), InvalidArgument);
  EXPECT_THROW(detection_time(series, effort(10, 0.0)), InvalidArgument);
  EXPECT_THROW(detection_time(series, effort(-1)), InvalidArgument);
  EXPECT_THROW(detection_time(series, SurveillanceParams{{}, 0.95}), InvalidArgument);
}

TEST(EffortToThreshold, HugeEffortDetectsOnDayOne) {
  const auto traj = naive_run(0.3, 0.1, 1e5, 10, 100);
  const auto pstar = effort_to_threshold(traj, {0.3, 0.1}, effort(1e6));
  ASSERT_TRUE(pstar);
  EXPECT_EQ(*pstar, daily_prevalence(traj, {0.3, 0.1}).front());
  EXPECT_NEAR(*pstar, traj.states[100].i / 1e5, 1e-15);
}

TEST(EffortToThreshold, NoEffortNoThreshold) {
  const auto traj = naive_run(0.3, 0.1, 1e5, 10, 100);
  EXPECT_FALSE(effort_to_threshold(traj, {0.3, 0.1}, effort(0)));
}

TEST(EffortToThreshold, MatchesDayByDayProductMarch) {
  const double n = 1e5;
  const auto traj = naive_run(0.3, 0.1, n, 10, 200);
  const auto pstar = effort_to_threshold(traj, {0.3, 0.1}, effort(100));
  ASSERT_TRUE(pstar);

  const auto daily = oracles::daily_prevalence({0.3, 0.1, n}, {n - 10, 10, 0}, 200);
  const auto cumulative = oracles::detection_product(daily, std::vector<double>(daily.size(), 100.0));
  std::size_t day = 0;
  while (cumulative[day] < 0.95) ++day;
  EXPECT_EQ(day + 1, 21u);
  EXPECT_NEAR(*pstar, daily[day], 1e-9 * daily[day]);
  // Reference value from a high-order adaptive integration of the same outbreak.
  EXPECT_NEAR(*pstar, 0.006573438046558075, 1e-9);
}

TEST(DailyPrevalence, SamplesIntegerDays) {
  const auto traj = naive_run(0.3, 0.1, 1e5, 10, 30.5);
  const auto daily = daily_prevalence(traj, {0.3, 0.1});
  ASSERT_EQ(daily.size(), 30u);
  EXPECT_NEAR(daily[9], traj.states[1000].i / 1e5, 1e-15);
}
