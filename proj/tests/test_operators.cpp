#include <gtest/gtest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

#include "dlp/operators.hpp"

using dlp::cplx;
using dlp::Curve2D;
using dlp::Surface3D;

namespace {

// Kernel straight from the defining formula, no chord tricks.
double naive_kernel(const Curve2D& c, double s, double t) {
  const cplx x = c.position(s), y = c.position(t), d = c.derivative(t, 1);
  const cplx nu = cplx(0.0, -1.0) * d / std::abs(d);
  const cplx r = x - y;
  return (r.real() * nu.real() + r.imag() * nu.imag()) / (dlp::pi * std::norm(r));
}

Curve2D bumpy() { return Curve2D::fourier({{1, {1.0, 0.0}}, {3, {0.0, 0.1}}, {-2, {0.04, 0.01}}}); }

}  // namespace

TEST(Kernel, CircleClosedForm) {
  // on a circle of radius R the kernel is the constant -1/(2 pi R)
  for (double R : {0.25, 1.0, 3.0}) {
    const auto c = Curve2D::circle(R);
    for (double s : {0.0, 1.0, 2.0})
      for (double t : {0.5, 3.0, 3.1})
        EXPECT_NEAR(dlp::dlp_kernel_2d(c, s, t), -1.0 / (dlp::two_pi * R), 1e-12 / R);
  }
}

TEST(Kernel, AgreesWithNaiveFormulaAwayFromDiagonal) {
  const auto c = bumpy();
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.0, dlp::two_pi);
  for (int i = 0; i < 200; ++i) {
    const double s = u(rng), t = u(rng);
    if (std::abs(dlp::wrap_angle(s - t)) < 0.05) continue;
    EXPECT_NEAR(dlp::dlp_kernel_2d(c, s, t), naive_kernel(c, s, t), 1e-11);
  }
}

TEST(Kernel, DiagonalLimitMatchesApproach) {
  const auto c = bumpy();
  for (double t : {0.3, 2.0, 4.7}) {
    const double lim = dlp::dlp_kernel_2d(c, t, t);
    EXPECT_NEAR(lim, -c.curvature(t) / dlp::two_pi, 1e-14);
    // kernel(t + d, t) -> limit linearly in d; Richardson over d and d/2
    const double d = 1e-3;
    const double k1 = dlp::dlp_kernel_2d(c, t + d, t), k2 = dlp::dlp_kernel_2d(c, t + 0.5 * d, t);
    EXPECT_NEAR(2.0 * k2 - k1, lim, 1e-6);
  }
}

TEST(Assembly, CircleMatrixIsConstant) {
  const int n = 64;
  const auto m = dlp::assemble_dlp_2d(Curve2D::circle(1.0), n);
  EXPECT_LT((m.entries.array() + 1.0 / n).abs().maxCoeff(), 1e-14);
  EXPECT_NEAR(m.weights.sum(), dlp::two_pi, 1e-13);
}

TEST(Assembly, RowSumsAreMinusOne) {
  // K1 = -1 on any closed curve (Gauss), resolved spectrally on smooth curves
  for (const auto& c : {Curve2D::ellipse(2.0, 0.5), bumpy()}) {
    const auto m = dlp::assemble_dlp_2d(c, 128);
    const Eigen::VectorXd rows = m.entries.rowwise().sum();
    EXPECT_LT((rows.array() + 1.0).abs().maxCoeff(), 1e-12) << c.id();
  }
}

TEST(Assembly, SymmetrizedTwinIsSimilar) {
  const auto m = dlp::assemble_dlp_2d(Curve2D::ellipse(2.0, 0.5), 64);
  const Eigen::MatrixXd s = m.symmetrized();
  // similarity: same trace, and undoing the scaling recovers A
  EXPECT_NEAR(s.trace(), m.entries.trace(), 1e-13);
  const Eigen::VectorXd w = m.weights;
  const Eigen::MatrixXd back = w.cwiseSqrt().cwiseInverse().asDiagonal() * s * w.cwiseSqrt().asDiagonal();
  EXPECT_LT((back - m.entries).norm(), 1e-13);
}

TEST(Assembly, ScaleInvariance) {
  const auto c = bumpy();
  const auto a = dlp::assemble_dlp_2d(c, 64);
  const auto b = dlp::assemble_dlp_2d(c.scaled(2.5), 64);
  EXPECT_LT((a.entries - b.entries).norm(), 1e-12);
}

TEST(Assembly, RejectsBadSizes) {
  EXPECT_THROW(dlp::assemble_dlp_2d(Curve2D::circle(1.0), 15), dlp::InvalidArgument);
  EXPECT_THROW(dlp::assemble_dlp_2d(Curve2D::circle(1.0), 33), dlp::InvalidArgument);
  EXPECT_THROW(dlp::assemble_dlp_3d(Surface3D::sphere(1.0), 8, 32), dlp::InvalidArgument);
}

TEST(SingleLayer, CircleConstantDensity) {
  // S1 = -2R log R on a circle of radius R
  for (double R : {0.25, 0.5, 2.0}) {
    const auto m = dlp::assemble_slp_2d(Curve2D::circle(R), 64);
    const Eigen::VectorXd s1 = m * Eigen::VectorXd::Ones(64);
    EXPECT_LT((s1.array() + 2.0 * R * std::log(R)).abs().maxCoeff(), 1e-13) << R;
  }
  EXPECT_NEAR(dlp::assemble_slp_2d(Curve2D::circle(0.25), 32).row(0).sum(), 0.5 * std::log(4.0), 1e-13);
}

TEST(SingleLayer, EllipseAgainstAdaptiveQuadrature) {
  const auto c = Curve2D::ellipse(0.6, 0.4);
  const int n = 64;
  const auto m = dlp::assemble_slp_2d(c, n);
  auto density = [](double t) { return 1.0 + 0.3 * std::cos(t) + 0.2 * std::sin(2 * t); };
  Eigen::VectorXd psi(n);
  for (int j = 0; j < n; ++j) psi[j] = density(dlp::two_pi * j / n);
  const Eigen::VectorXd approx = m * psi;
  boost::math::quadrature::tanh_sinh<double> ts;
  for (int i : {0, 5, 17, 40}) {
    const double s = dlp::two_pi * i / n;
    const cplx d1 = c.derivative(s, 1), d2 = c.derivative(s, 2), d3 = c.derivative(s, 3);
    // log|q(s+u) - q(s)| with a Taylor chord for tiny u
    auto g = [&](double u) {
      const cplx diff = std::abs(u) < 1e-5 ? u * (d1 + u * (d2 / 2.0 + u * d3 / 6.0)) : c.position(s + u) - c.position(s);
      return -std::log(std::abs(diff)) * density(s + u) * c.speed(s + u) / dlp::pi;
    };
    // fold the period onto (0, pi] so the only singularity sits at the left endpoint
    const double ref = ts.integrate([&](double u) { return g(u) + g(-u); }, 0.0, dlp::pi);
    EXPECT_NEAR(approx[i], ref, 1e-10) << "node " << i;
  }
}

TEST(Surface, SphereRowSumsAndWeights) {
  const auto m = dlp::assemble_dlp_3d(Surface3D::sphere(1.0), 16, 32);
  EXPECT_EQ(m.dimension, 3);
  ASSERT_TRUE(m.grid.has_value());
  EXPECT_NEAR(m.weights.sum(), 4.0 * dlp::pi, 1e-11);
  const Eigen::VectorXd rows = m.entries.rowwise().sum();
  EXPECT_LT((rows.array() + 1.0).abs().maxCoeff(), 1e-12);
}

TEST(Surface, EllipsoidAreaMatchesKnownValue) {
  // oblate spheroid a = b = 1, c = 0.5: 2 pi (1 + (c^2/e) atanh e), e = sqrt(1 - c^2)
  const auto m = dlp::assemble_dlp_3d(Surface3D::ellipsoid(1.0, 1.0, 0.5), 24, 48);
  const double e = std::sqrt(0.75);
  const double area = dlp::two_pi * (1.0 + 0.25 / e * std::atanh(e));
  EXPECT_NEAR(m.weights.sum(), area, 1e-9);
}

TEST(MatrixIo, BinaryRoundTripAndCsv) {
  const auto m = dlp::assemble_dlp_2d(Curve2D::ellipse(2.0, 0.5), 16);
  const auto dir = std::filesystem::temp_directory_path() / "dlp_test_io";
  std::filesystem::create_directories(dir);
  const auto path = dir / "m.bin";
  dlp::write_matrix_binary(m, path);
  const auto back = dlp::read_matrix_binary(path);
  EXPECT_EQ((back - m.entries).norm(), 0.0);
  std::ostringstream os;
  dlp::write_matrix_csv(m, os);
  EXPECT_FALSE(os.str().empty());
  EXPECT_THROW(dlp::read_matrix_binary(dir / "missing.bin"), dlp::IoError);
  std::filesystem::remove_all(dir);
}
