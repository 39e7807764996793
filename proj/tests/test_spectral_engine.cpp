#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "dlp/spectrum.hpp"

using dlp::cplx;
using dlp::Curve2D;

namespace {

Eigen::MatrixXd random_matrix(std::mt19937& rng, int n) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = g(rng);
  return a;
}

}  // namespace

TEST(Eigen, DiagonalMatrixOrderedByModulus) {
  Eigen::MatrixXd a = Eigen::VectorXd::LinSpaced(5, -2.0, 2.0).asDiagonal();
  const auto sp = dlp::eigenpairs(a);
  ASSERT_EQ(sp.size(), 5u);
  // moduli 2,2,1,1,0; ties by real part
  EXPECT_DOUBLE_EQ(sp.eigenvalues[0].real(), -2.0);
  EXPECT_DOUBLE_EQ(sp.eigenvalues[1].real(), 2.0);
  EXPECT_DOUBLE_EQ(sp.eigenvalues[2].real(), -1.0);
  EXPECT_DOUBLE_EQ(sp.eigenvalues[4].real(), 0.0);
  EXPECT_EQ(sp.status, dlp::SolverStatus::ok);
}

TEST(Eigen, RotationGivesComplexPair) {
  Eigen::MatrixXd a(2, 2);
  a << 0.0, -1.0, 1.0, 0.0;
  const auto sp = dlp::eigenpairs(a);
  EXPECT_FALSE(sp.real_flags[0]);
  EXPECT_FALSE(sp.real_flags[1]);
  EXPECT_NEAR(std::abs(sp.eigenvalues[0]), 1.0, 1e-15);
  EXPECT_NEAR(sp.eigenvalues[0].imag(), -sp.eigenvalues[1].imag(), 1e-15);
  EXPECT_LT(sp.residual_max(), 1e-14);
}

TEST(Eigen, RandomMatricesAgreeWithIndependentSolver) {
  std::mt19937 rng(1234);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_matrix(rng, 12);
    const auto sp = dlp::eigenpairs(a);
    const Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
    std::vector<double> mine = sp.moduli(), ref(12);
    for (int k = 0; k < 12; ++k) ref[k] = std::abs(es.eigenvalues()[k]);
    std::sort(ref.rbegin(), ref.rend());
    for (int k = 0; k < 12; ++k) EXPECT_NEAR(mine[k], ref[k], 1e-10);
    EXPECT_TRUE(std::is_sorted(mine.rbegin(), mine.rend()));
    EXPECT_LT(sp.residual_max(), dlp::residual_tolerance);
    for (int k = 0; k < 12; ++k) EXPECT_NEAR(sp.eigenvectors.col(k).norm(), 1.0, 1e-12);
  }
}

TEST(Eigen, RealVectorIsAnEigenvector) {
  std::mt19937 rng(5);
  Eigen::MatrixXd a = random_matrix(rng, 10);
  a = a + a.transpose().eval();
  const auto sp = dlp::eigenpairs(a);
  for (std::size_t j = 0; j < sp.size(); ++j) {
    ASSERT_TRUE(sp.real_flags[j]);
    const Eigen::VectorXd v = sp.real_vector(j);
    EXPECT_LT((a * v - sp.eigenvalues[j].real() * v).norm(), 1e-12);
  }
}

TEST(Eigen, VectorsCanBeSkipped) {
  std::mt19937 rng(9);
  const auto sp = dlp::eigenpairs(random_matrix(rng, 6), {.vectors = false});
  EXPECT_FALSE(sp.has_vectors());
  EXPECT_THROW(sp.real_vector(0), dlp::InvalidArgument);
}

TEST(Eigen, NonFiniteInputIsRejected) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(3, 3);
  a(1, 2) = std::nan("");
  EXPECT_THROW(dlp::eigenpairs(a), dlp::InvalidArgument);
}

TEST(Singular, MatchJacobiSvd) {
  std::mt19937 rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = random_matrix(rng, 9);
    const auto s = dlp::singular_values(a);
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    for (int k = 0; k < 9; ++k) EXPECT_NEAR(s[k], svd.singularValues()[k], 1e-12);
  }
}

TEST(Singular, SquaresSumToFrobeniusOfTwin) {
  const auto m = dlp::assemble_dlp_2d(Curve2D::ellipse(2.0, 0.5), 64);
  const auto s = dlp::singular_values(m);
  double sum = 0.0;
  for (double v : s) sum += v * v;
  EXPECT_NEAR(sum, m.symmetrized().squaredNorm(), 1e-12);
  EXPECT_NEAR(dlp::schatten_sum(s, 2.0), sum, 1e-14);
}

TEST(Spectrum, CircleIsRankOne) {
  const auto sp = dlp::compute_spectrum(dlp::assemble_dlp_2d(Curve2D::circle(1.0), 32));
  EXPECT_NEAR(sp.eigenvalues[0].real(), -1.0, 1e-12);
  EXPECT_LT(std::abs(sp.eigenvalues[1]), 1e-12);
  EXPECT_NEAR(sp.singular_values[0], 1.0, 1e-12);
  EXPECT_LT(sp.singular_values[1], 1e-12);
  EXPECT_EQ(sp.n, 32);
}

TEST(Spectrum, EllipseClosedForm) {
  // eigenvalues -1 and +-e^{-2kR}, k >= 1
  const double R = 0.5;
  const auto sp = dlp::eigenpairs(dlp::assemble_dlp_2d(Curve2D::ellipse(2.0, R), 128), {.vectors = false});
  for (int k = 1; k <= 6; ++k)
    for (double sg : {1.0, -1.0}) {
      const double target = sg * std::exp(-2.0 * k * R);
      double best = 1.0;
      for (cplx l : sp.eigenvalues) best = std::min(best, std::abs(l - target));
      EXPECT_LT(best, 1e-10) << k << " " << sg;
    }
}

TEST(Cluster, GroupsNearTies) {
  const std::vector<cplx> v{{1.0, 0}, {1.0 + 1e-9, 0}, {0.5, 0}, {-0.5, 0}, {-0.5 - 1e-8, 0}};
  const auto cl = dlp::cluster_eigenvalues(v, 1e-6);
  ASSERT_EQ(cl.size(), 3u);
  EXPECT_EQ(cl[0].multiplicity, 2);
  EXPECT_EQ(cl[1].multiplicity, 1);
  EXPECT_EQ(cl[2].multiplicity, 2);
}

TEST(Output, JsonAndCsvLayouts) {
  const auto sp = dlp::compute_spectrum(dlp::assemble_dlp_2d(Curve2D::circle(1.0), 16));
  const auto j = dlp::to_json(sp);
  EXPECT_EQ(j["N"], 16);
  EXPECT_EQ(j["eigenvalues"].size(), 16u);
  EXPECT_EQ(j["singular_values"].size(), 16u);
  EXPECT_EQ(j["status"], "ok");
  std::ostringstream os;
  dlp::write_spectrum_csv(sp, os);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "index,re,im,alpha,shape_id,N");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 16);
}

TEST(Schatten, RejectsExponentBelowOne) {
  const std::vector<double> s{1.0, 0.5};
  EXPECT_THROW(dlp::schatten_sum(s, 0.5), dlp::InvalidArgument);
}
