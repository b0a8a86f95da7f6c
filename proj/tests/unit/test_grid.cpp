#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "ckam/error.hpp"
#include "ckam/grid.hpp"
#include "oracles.hpp"

using namespace ckam;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

GridMeasure random_atomic(const PeriodicGrid& g, std::mt19937_64& rng, int max_atoms,
                          std::vector<oracle::Atom>* atoms = nullptr) {
  std::uniform_int_distribution<int> count(1, max_atoms), node(0, g.size() - 1);
  std::uniform_real_distribution<double> w(0.05, 1.0);
  std::vector<double> weights(static_cast<std::size_t>(g.size()), 0.0);
  const int k = count(rng);
  for (int a = 0; a < k; ++a) weights[static_cast<std::size_t>(node(rng))] += w(rng);
  GridMeasure m = GridMeasure::normalized(g, weights);
  if (atoms) {
    atoms->clear();
    for (int i : m.support()) atoms->push_back({i, m[i]});
  }
  return m;
}

}  // namespace

TEST(Grid, NearestNodeTiesGoLow) {
  PeriodicGrid g(8);
  EXPECT_EQ(g.nearest(0.5), 4);
  EXPECT_EQ(g.nearest(1.0 / 16.0), 0);
  EXPECT_EQ(g.nearest(0.99), 0);
  EXPECT_EQ(g.wrap(-1), 7);
}

TEST(Grid, CenteredGradientOfCosineAtQuarter) {
  for (int n : {64, 128}) {
    PeriodicGrid g(n);
    auto f = GridFunction::sample(g, [](double x) { return std::cos(kTwoPi * x); });
    const double h = g.spacing();
    const double d = gradient(f)[g.nearest(0.25)];
    EXPECT_NEAR(d, -std::sin(kTwoPi * h) / h, 1e-12);
    EXPECT_NEAR(d, -kTwoPi, std::pow(kTwoPi, 3) / 6.0 * h * h);
  }
}

TEST(Grid, GradientOfConstantIsZero) {
  PeriodicGrid g(32);
  auto f = GridFunction::constant(g, 3.7);
  for (auto mode : {DiffMode::Centered, DiffMode::Forward, DiffMode::Backward}) {
    const auto d = gradient(f, mode);
    for (int i = 0; i < 32; ++i) EXPECT_EQ(d[i], 0.0);
  }
}

TEST(Grid, GradientIsLinear) {
  PeriodicGrid g(64);
  auto f = GridFunction::sample(g, [](double x) { return std::sin(kTwoPi * x); });
  auto q = GridFunction::sample(g, [](double x) { return std::cos(4 * kTwoPi * x) + x * 0.0; });
  std::vector<double> mix(64);
  for (int i = 0; i < 64; ++i) mix[i] = 2.0 * f[i] - 0.5 * q[i];
  auto gm = gradient(GridFunction(g, mix));
  auto gf = gradient(f), gq = gradient(q);
  for (int i = 0; i < 64; ++i) EXPECT_NEAR(gm[i], 2.0 * gf[i] - 0.5 * gq[i], 1e-12);
}

TEST(Grid, CenteredGradientIsSecondOrder) {
  auto err = [](int n) {
    PeriodicGrid g(n);
    auto f = GridFunction::sample(g, [](double x) { return std::exp(std::sin(kTwoPi * x)); });
    auto d = gradient(f);
    double e = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = g.node(i);
      e = std::max(e, std::abs(d[i] - kTwoPi * std::cos(kTwoPi * x) * std::exp(std::sin(kTwoPi * x))));
    }
    return e;
  };
  const double order = std::log2(err(64) / err(128));
  EXPECT_GT(order, 1.9);
}

TEST(Grid, InterpolationIsExactAtNodesAndAveragesMidpoints) {
  PeriodicGrid g(16);
  auto f = GridFunction::sample(g, [](double x) { return std::sin(kTwoPi * x) + x; });
  const double h = g.spacing();
  for (int i = 0; i < 16; ++i) {
    EXPECT_EQ(interpolate(f, g.node(i)), f[i]);
    EXPECT_NEAR(interpolate(f, g.node(i) + 0.5 * h), 0.5 * (f[i] + f[i + 1]), 1e-14);
  }
  EXPECT_NEAR(interpolate(f, 1.0 - 0.5 * h), 0.5 * (f[15] + f[0]), 1e-14);
}

TEST(Grid, InterpolationDoesNotOvershoot) {
  PeriodicGrid g(32);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1), x(0, 1);
  std::vector<double> v(32);
  for (auto& e : v) e = u(rng);
  GridFunction f(g, v);
  for (int k = 0; k < 500; ++k) {
    const double p = x(rng);
    const int i = static_cast<int>(std::floor(p * 32));
    const double y = interpolate(f, p);
    EXPECT_GE(y, std::min(f[i], f[i + 1]) - 1e-15);
    EXPECT_LE(y, std::max(f[i], f[i + 1]) + 1e-15);
  }
}

TEST(Grid, WassersteinSimpleCases) {
  PeriodicGrid g(64);
  EXPECT_NEAR(d1_distance(GridMeasure::dirac(g, 0), GridMeasure::dirac(g, 32)), 0.5, 1e-15);
  EXPECT_NEAR(d1_distance(GridMeasure::dirac(g, 0), GridMeasure::dirac(g, 48)), 0.25, 1e-15);
  EXPECT_EQ(d1_distance(GridMeasure::uniform(g), GridMeasure::uniform(g)), 0.0);
}

TEST(Grid, WassersteinMatchesTransportOracle) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    PeriodicGrid g(trial % 2 ? 37 : 64);
    std::vector<oracle::Atom> a, b;
    auto ma = random_atomic(g, rng, 4, &a);
    auto mb = random_atomic(g, rng, 4, &b);
    EXPECT_NEAR(d1_distance(ma, mb), oracle::transport_cost(a, b, g.size()), 1e-9) << trial;
  }
}

TEST(Grid, WassersteinMetricAxioms) {
  std::mt19937_64 rng(12);
  PeriodicGrid g(50);
  for (int trial = 0; trial < 200; ++trial) {
    auto a = random_atomic(g, rng, 6), b = random_atomic(g, rng, 6), c = random_atomic(g, rng, 6);
    const double ab = d1_distance(a, b), ba = d1_distance(b, a);
    EXPECT_EQ(ab, ba);
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, d1_distance(a, c) + d1_distance(c, b) + 1e-12);
    EXPECT_LE(d1_distance(a, a), 1e-12);
  }
}

TEST(Grid, WassersteinShiftEquivariant) {
  std::mt19937_64 rng(13);
  PeriodicGrid g(40);
  for (int trial = 0; trial < 50; ++trial) {
    auto a = random_atomic(g, rng, 5), b = random_atomic(g, rng, 5);
    const int s = trial % 40;
    std::vector<double> ra(40), rb(40);
    for (int i = 0; i < 40; ++i) {
      ra[g.wrap(i + s)] = a[i];
      rb[g.wrap(i + s)] = b[i];
    }
    // the cumulative sums start at a different node, so only rounding may differ
    EXPECT_NEAR(d1_distance(GridMeasure(g, ra), GridMeasure(g, rb)), d1_distance(a, b), 1e-15);
  }
}

TEST(Grid, PushforwardDepositsOnNearestNode) {
  PeriodicGrid g(10);
  auto single = pushforward(PhaseMeasure({{{0.5, 2.0, 0.0}, 1.0}}), g);
  EXPECT_EQ(single[5], 1.0);
  auto pair = pushforward(PhaseMeasure({{{0.11, 0.0, 0.0}, 0.3}, {{0.72, 0.0, 0.0}, 0.7}}), g);
  EXPECT_NEAR(pair[1] + pair[7], 1.0, 1e-15);
  auto merged = pushforward(PhaseMeasure({{{0.3, 0.0, 0.0}, 0.25}, {{0.3, 1.0, 1.0}, 0.75}}), g);
  EXPECT_EQ(merged[3], 1.0);
  // an exact tie between nodes 2 and 3 resolves to the lower index
  auto tie = pushforward(PhaseMeasure({{{0.25, 0.0, 0.0}, 1.0}}), g);
  EXPECT_EQ(tie[2], 1.0);
}

TEST(Grid, Quadrature) {
  PeriodicGrid g(64);
  EXPECT_NEAR(quadrature(GridFunction::sample(g, [](double x) { return std::cos(kTwoPi * x); })), 0.0,
              1e-12);
  std::mt19937_64 rng(5);
  auto m = random_atomic(g, rng, 8);
  EXPECT_NEAR(measure_integral(GridFunction::constant(g, 1.0), m), 1.0, 1e-15);
  auto f = GridFunction::sample(g, [](double x) { return x * x; });
  EXPECT_EQ(measure_integral(f, GridMeasure::dirac(g, 9)), f[9]);
}

TEST(Grid, MeasureValidation) {
  PeriodicGrid g(8);
  EXPECT_THROW(GridMeasure(g, {0.5, 0.5, 0.5, -0.5, 0.0, 0.0, 0.0, 0.0}), Error);
  EXPECT_THROW(GridMeasure(g, {0.5, 0.4, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0}), Error);
}

TEST(Grid, CsvRoundTripIsExact) {
  PeriodicGrid g(16);
  auto f = GridFunction::sample(g, [](double x) { return std::exp(x) / 3.0; });
  std::stringstream ss;
  write_csv(ss, f);
  EXPECT_EQ(ss.str().substr(0, 8), "x,value\n");
  auto back = read_grid_function_csv(ss);
  for (int i = 0; i < 16; ++i) EXPECT_EQ(back[i], f[i]);
  EXPECT_EQ(format_double(0.1), "0.1");
}
