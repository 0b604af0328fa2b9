#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "thermoflux/grid.hpp"

using namespace thermoflux;

namespace {

ScalarField repeat_pattern(const PeriodicGrid& g, std::vector<double> pattern) {
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = pattern[i % pattern.size()];
  return ScalarField(g, v);
}

ScalarField random_field(const PeriodicGrid& g, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.5, 2.0);
  return ScalarField::sample(g, [&](double) { return u(gen); });
}

}  // namespace

TEST(PeriodicGrid, RejectsInvalidShapes) {
  EXPECT_THROW(PeriodicGrid(3, 16, 1.0), ConfigError);
  EXPECT_THROW(PeriodicGrid(1, 7, 1.0), ConfigError);
  EXPECT_THROW(PeriodicGrid(1, 16, 0.0), ConfigError);
  EXPECT_THROW(PeriodicGrid(2, 16, -1.0), ConfigError);
  const PeriodicGrid g(2, 8, 2.0);
  EXPECT_EQ(g.size(), 64u);
  EXPECT_DOUBLE_EQ(g.spacing(), 0.25);
  EXPECT_DOUBLE_EQ(g.cell_volume(), 0.0625);
}

TEST(PeriodicGrid, RowMajorLayoutAndWraparound) {
  const PeriodicGrid g(2, 8, 8.0);
  // node (i0, i1) = (2, 5)
  const std::size_t idx = 2 * 8 + 5;
  EXPECT_DOUBLE_EQ(g.coordinate(idx, 0), 2.0);
  EXPECT_DOUBLE_EQ(g.coordinate(idx, 1), 5.0);
  EXPECT_EQ(g.neighbor(idx, 0, +1), 3u * 8 + 5);
  EXPECT_EQ(g.neighbor(idx, 1, +3), 2u * 8 + 0);
  EXPECT_EQ(g.neighbor(0, 0, -1), 7u * 8);
  const PeriodicGrid g1(1, 8, 1.0);
  EXPECT_EQ(g1.neighbor(0, 0, -1), 7u);
  EXPECT_EQ(g1.neighbor(7, 0, +1), 0u);
}

TEST(ScalarField, ShapeChecks) {
  const PeriodicGrid g(1, 8, 1.0);
  EXPECT_THROW(ScalarField(g, std::vector<double>(7, 1.0)), ShapeError);
  ScalarField a(g, 1.0);
  const ScalarField b(PeriodicGrid(1, 16, 1.0), 1.0);
  EXPECT_THROW(a += b, ShapeError);
  EXPECT_THROW(div_a_grad_b(a, b), ShapeError);
}

TEST(Laplacian, ConstantIsZero) {
  for (int dim = 1; dim <= 2; ++dim) {
    const PeriodicGrid g(dim, 8, 3.0);
    const auto out = laplacian(ScalarField(g, 4.2));
    for (double v : out.values()) EXPECT_EQ(v, 0.0);
  }
}

TEST(Laplacian, HandStencil) {
  // h = 1: (f[i-1] - 2 f[i] + f[i+1]) on (0, 1, 0, -1, ...) gives (0, -2, 0, 2, ...).
  const PeriodicGrid g(1, 8, 8.0);
  const auto out = laplacian(repeat_pattern(g, {0, 1, 0, -1}));
  const std::vector<double> expected = {0, -2, 0, 2, 0, -2, 0, 2};
  for (std::size_t i = 0; i < 8; ++i) EXPECT_DOUBLE_EQ(out[i], expected[i]) << i;
}

TEST(Laplacian, TwoDimensionalIsSumOfAxes) {
  const PeriodicGrid g(2, 8, 8.0);
  // f(i0, i1) = p(i0) + 10 p(i1) with p = (0, 1, 0, -1, ...)
  const std::vector<double> p = {0, 1, 0, -1, 0, 1, 0, -1};
  const std::vector<double> lp = {0, -2, 0, 2, 0, -2, 0, 2};
  std::vector<double> v(64);
  for (int i0 = 0; i0 < 8; ++i0) {
    for (int i1 = 0; i1 < 8; ++i1) v[i0 * 8 + i1] = p[i0] + 10 * p[i1];
  }
  const auto out = laplacian(ScalarField(g, v));
  for (int i0 = 0; i0 < 8; ++i0) {
    for (int i1 = 0; i1 < 8; ++i1) EXPECT_DOUBLE_EQ(out[i0 * 8 + i1], lp[i0] + 10 * lp[i1]);
  }
}

TEST(DivAGradB, HandFluxSum) {
  // a = (1, 2, 1, 2, ...): every face average is 1.5, so the result is 1.5 times
  // the plain stencil on b = (0, 1, 0, -1, ...): (0, -3, 0, 3, ...).
  const PeriodicGrid g(1, 8, 8.0);
  const auto out = div_a_grad_b(repeat_pattern(g, {1, 2}), repeat_pattern(g, {0, 1, 0, -1}));
  const std::vector<double> expected = {0, -3, 0, 3, 0, -3, 0, 3};
  for (std::size_t i = 0; i < 8; ++i) EXPECT_DOUBLE_EQ(out[i], expected[i]) << i;
}

TEST(DivAGradB, NonUniformFacesByHand) {
  // a = (1, 3, 0, 0, 0, 0, 0, 0), b = i: only faces 0|1 and 1|2 and 7|0 carry flux.
  const PeriodicGrid g(1, 8, 8.0);
  std::vector<double> a(8, 0.0), b(8);
  a[0] = 1;
  a[1] = 3;
  for (int i = 0; i < 8; ++i) b[i] = i;
  const auto out = div_a_grad_b(ScalarField(g, a), ScalarField(g, b));
  // face 7|0: 0.5 (0 + 1)(0 - 7) = -3.5; face 0|1: 2 * 1 = 2; face 1|2: 1.5 * 1 = 1.5
  EXPECT_DOUBLE_EQ(out[0], 2.0 - (-3.5));
  EXPECT_DOUBLE_EQ(out[1], 1.5 - 2.0);
  EXPECT_DOUBLE_EQ(out[2], 0.0 - 1.5);
  EXPECT_DOUBLE_EQ(out[7], -3.5 - 0.0);
}

TEST(DivAGradB, UnitCoefficientReducesToLaplacian) {
  std::mt19937_64 gen(3);
  for (int dim = 1; dim <= 2; ++dim) {
    const PeriodicGrid g(dim, 16, 2.0);
    const auto b = random_field(g, gen);
    const auto x = div_a_grad_b(ScalarField(g, 1.0), b);
    const auto y = laplacian(b);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(x[i], y[i], 1e-12 * (1 + std::abs(y[i])));
  }
}

TEST(DivAGradB, ConstantBIsZero) {
  std::mt19937_64 gen(4);
  const PeriodicGrid g(2, 8, 1.0);
  const auto out = div_a_grad_b(random_field(g, gen), ScalarField(g, 3.0));
  for (double v : out.values()) EXPECT_EQ(v, 0.0);
}

TEST(DivAGradB, DiscreteDivergenceTheoremAndSymmetry) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 20; ++trial) {
    const int dim = 1 + trial % 2;
    const PeriodicGrid g(dim, 8 + trial, 0.5 + trial);
    const auto a = random_field(g, gen);
    const auto b = random_field(g, gen);
    const auto c = random_field(g, gen);
    EXPECT_NEAR(total(div_a_grad_b(a, b)), 0.0, 1e-12);
    const auto ab = div_a_grad_b(a, b);
    const auto ac = div_a_grad_b(a, c);
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      s1 += b[i] * ac[i];
      s2 += c[i] * ab[i];
    }
    EXPECT_NEAR(s1, s2, 1e-10);
  }
}

TEST(Operators, SecondOrderConvergenceOnSineMode) {
  const double L = 2.0;
  const double k = 2.0 * std::numbers::pi / L;
  std::vector<double> lap_err, grad_err;
  for (int n : {32, 64, 128, 256}) {
    const PeriodicGrid g(1, n, L);
    const auto f = ScalarField::sample(g, [&](double x) { return std::sin(k * x); });
    const auto lap = laplacian(f);
    const auto grad = gradient(f);
    double el = 0.0, eg = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double x = g.coordinate(i, 0);
      el = std::max(el, std::abs(lap[i] + k * k * std::sin(k * x)));
      eg = std::max(eg, std::abs(grad[0][i] - k * std::cos(k * x)));
    }
    lap_err.push_back(el);
    grad_err.push_back(eg);
  }
  for (std::size_t i = 0; i + 1 < lap_err.size(); ++i) {
    EXPECT_GE(lap_err[i] / lap_err[i + 1], 3.5);
    EXPECT_LE(lap_err[i] / lap_err[i + 1], 4.5);
    EXPECT_GE(grad_err[i] / grad_err[i + 1], 3.5);
    EXPECT_LE(grad_err[i] / grad_err[i + 1], 4.5);
  }
}

TEST(Operators, GradientAndTotal) {
  const PeriodicGrid g(2, 8, 3.0);
  const auto grad = gradient(ScalarField(g, 2.0));
  ASSERT_EQ(grad.size(), 2u);
  for (const auto& c : grad) {
    for (double v : c.values()) EXPECT_EQ(v, 0.0);
  }
  EXPECT_NEAR(total(ScalarField(g, 2.5)), 2.5 * 9.0, 1e-12);
  EXPECT_NEAR(total(ScalarField(PeriodicGrid(1, 10, 3.0), 2.5)), 7.5, 1e-12);
  // y-gradient of f = y picks up the periodic jump only at the wrap.
  const auto f = ScalarField::sample(g, [](double, double y) { return y; });
  const auto gy = gradient(f)[1];
  EXPECT_NEAR(gy[3], 1.0, 1e-12);
}

TEST(Snapshot, RoundTripIsBitExact) {
  const auto dir = std::filesystem::temp_directory_path() / "thermoflux_snapshot_test";
  std::filesystem::create_directories(dir);
  const PeriodicGrid g(2, 8, 1.5);
  const auto f = ScalarField::sample(g, [](double x, double y) { return std::exp(x) / 3.0 - y * 1e-300; });
  const std::string base = (dir / "field").string();
  write_snapshot(base, f, 0.125, "rho");
  const Snapshot s = read_snapshot(base);
  EXPECT_EQ(s.field, f);
  EXPECT_EQ(s.time, 0.125);
  EXPECT_EQ(s.name, "rho");
  EXPECT_EQ(std::filesystem::file_size(base + ".bin"), 64u * 8u);

  // First value decoded byte by byte as little endian.
  std::ifstream bin(base + ".bin", std::ios::binary);
  unsigned char bytes[8];
  bin.read(reinterpret_cast<char*>(bytes), 8);
  std::uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) bits = (bits << 8) | bytes[i];
  double first = 0.0;
  std::memcpy(&first, &bits, 8);
  EXPECT_EQ(first, f[0]);

  std::filesystem::resize_file(base + ".bin", 100);
  EXPECT_THROW(read_snapshot(base), Error);
  std::filesystem::remove_all(dir);
}
