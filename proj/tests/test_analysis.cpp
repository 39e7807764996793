#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dlp/analysis.hpp"

using dlp::cplx;
using dlp::Curve2D;

TEST(Trace, CircleHasZeroDefect) {
  const auto tr = dlp::trace_report(Curve2D::circle(1.0), 64);
  EXPECT_NEAR(tr.trace_K, -1.0, 1e-12);
  EXPECT_NEAR(tr.trace_KstarK_quadrature, 1.0, 1e-12);
  EXPECT_NEAR(tr.trace_KstarK_svd, 1.0, 1e-12);
  EXPECT_NEAR(tr.defect, 0.0, 1e-12);
}

TEST(Trace, EllipseDefectFromClosedFormSpectrum) {
  // tr K = -1 + sum(+-e^{-2kR}) = -1
  const auto tr = dlp::trace_report(Curve2D::ellipse(2.0, 0.5), 128);
  EXPECT_NEAR(tr.trace_K, -1.0, 1e-12);
  EXPECT_NEAR(tr.trace_KstarK_quadrature, tr.trace_KstarK_svd, 1e-10);
  EXPECT_GT(tr.defect, 0.0);
  // sum |lambda|^2 <= tr(K*K) (Weyl): 1 + 2 sum e^{-4kR} = 1 + 2/(e^{4R}-1)
  EXPECT_GE(tr.trace_KstarK_quadrature, 1.0 + 2.0 / (std::exp(2.0) - 1.0) - 1e-10);
}

TEST(Trace, DefectIsScaleInvariant) {
  const auto c = Curve2D::fourier({{1, {1.0, 0.0}}, {3, {0.0, 0.1}}});
  const double d1 = dlp::trace_report(c, 128).defect;
  const double d2 = dlp::trace_report(c.scaled(0.2), 128).defect;
  EXPECT_NEAR(d1, d2, 1e-12);
}

TEST(Trace, JsonCarriesAllFields) {
  const auto j = dlp::to_json(dlp::trace_report(Curve2D::circle(1.0), 32));
  for (const char* k : {"trace_K", "trace_KstarK_quadrature", "trace_KstarK_svd", "defect"}) EXPECT_TRUE(j.contains(k)) << k;
}

TEST(Constant, FindsMinusOneEigenpair) {
  const auto sp = dlp::eigenpairs(dlp::assemble_dlp_2d(Curve2D::ellipse(2.0, 0.5), 64));
  const auto j = dlp::find_constant_eigenpair(sp);
  ASSERT_TRUE(j.has_value());
  EXPECT_NEAR(sp.eigenvalues[*j].real(), -1.0, 1e-12);
}

TEST(Symmetry, EllipsePairsUp) {
  const auto sp = dlp::eigenpairs(dlp::assemble_dlp_2d(Curve2D::ellipse(2.0, 0.5), 128));
  const auto rep = dlp::symmetry_audit(sp);
  EXPECT_FALSE(rep.vacuous);
  EXPECT_LT(rep.worst_mismatch, 1e-10);
}

TEST(Symmetry, CircleIsVacuous) {
  const auto sp = dlp::eigenpairs(dlp::assemble_dlp_2d(Curve2D::circle(1.0), 32));
  EXPECT_TRUE(dlp::symmetry_audit(sp).vacuous);
}

TEST(Symmetry, RandomSpectraProperty) {
  // for random symmetric pairs {x, -x} the audit reports ~0; shifting one breaks it
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> u(0.01, 0.9);
  for (int trial = 0; trial < 50; ++trial) {
    dlp::Spectrum sp;
    sp.eigenvalues.emplace_back(-1.0, 0.0);
    sp.real_flags.push_back(true);
    sp.constant_index = 0;
    std::vector<double> xs(5);
    for (auto& x : xs) x = u(rng);
    std::sort(xs.rbegin(), xs.rend());
    for (double x : xs) {
      sp.eigenvalues.emplace_back(x, 0.0);
      sp.eigenvalues.emplace_back(-x, 0.0);
      sp.real_flags.insert(sp.real_flags.end(), 2, true);
    }
    EXPECT_LT(dlp::symmetry_audit(sp).worst_mismatch, 1e-15);
    sp.eigenvalues[1] += 1e-3;
    EXPECT_GT(dlp::symmetry_audit(sp).worst_mismatch, 5e-4);
  }
}

TEST(Weyl, HoldsOnRandomMatrices) {
  std::mt19937 rng(20240501);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::MatrixXd a(7, 7);
    for (int i = 0; i < 7; ++i)
      for (int j = 0; j < 7; ++j) a(i, j) = g(rng);
    const auto sp = dlp::eigenpairs(a, {.vectors = false});
    const auto s = dlp::singular_values(a);
    EXPECT_NO_THROW(dlp::weyl_audit(sp.eigenvalues, s));
  }
}

TEST(Weyl, ViolationThrows) {
  const std::vector<cplx> ev{{2.0, 0.0}};
  const std::vector<double> al{1.0};
  EXPECT_THROW(dlp::weyl_audit(ev, al), dlp::SolverFailure);
}

TEST(Weyl, ExactSphereIsEquality) {
  const auto sp = dlp::sphere_exact_spectrum(12);
  EXPECT_EQ(sp.size(), 169u);
  const auto w = dlp::weyl_audit(sp);
  EXPECT_NEAR(w.terms[0].eigen_sum, w.terms[0].singular_sum, 1e-14);
}

TEST(Decay, RecoversExponentialRate) {
  std::vector<double> m;
  for (int j = 1; j <= 40; ++j) m.push_back(0.5 * std::exp(-0.7 * j));
  const auto fit = dlp::fit_decay(m, dlp::DecayModel::exponential);
  ASSERT_TRUE(fit.ok);
  EXPECT_NEAR(fit.rate, 0.7, 1e-12);
  EXPECT_NEAR(fit.r2, 1.0, 1e-12);
}

TEST(Decay, RecoversPowerRate) {
  std::vector<double> m;
  for (int j = 1; j <= 200; ++j) m.push_back(0.05 * std::pow(j, -2.5));
  const auto fit = dlp::fit_decay(m, dlp::DecayModel::power);
  ASSERT_TRUE(fit.ok);
  EXPECT_NEAR(fit.rate, -2.5, 1e-10);
}

TEST(Decay, TooFewPointsIsReported) {
  const std::vector<double> m{0.05, 0.01, 1e-3};
  const auto fit = dlp::fit_decay(m, dlp::DecayModel::exponential);
  EXPECT_FALSE(fit.ok);
  EXPECT_FALSE(fit.diagnostic.empty());
}

TEST(Decay, PlusMinusPairsGiveEllipseRate) {
  const auto sp = dlp::eigenpairs(dlp::assemble_dlp_2d(Curve2D::ellipse(2.0, 0.5), 256), {.vectors = false});
  const auto fit = dlp::fit_decay(sp, dlp::DecayModel::exponential);
  ASSERT_TRUE(fit.ok);
  // pairs share a rank, so log|l| falls by 2R every two ranks
  EXPECT_NEAR(fit.rate, 0.5, 0.01);
  EXPECT_GT(fit.r2, 0.999);
}

TEST(Zeta, MatchesRiemannZeta) {
  for (double p : {1.5, 2.0, 3.0, 5.5}) {
    const double s = 2.0 * p - 1.0;
    const double ref = (1.0 - std::pow(2.0, -s)) * std::riemann_zeta(s);
    const auto z = dlp::zeta_bound_detail(p);
    EXPECT_NEAR(z.value, ref, 1e-13) << p;
    EXPECT_LT(z.tail_bound, 1e-14);
  }
  EXPECT_THROW(dlp::zeta_bound(1.0), dlp::InvalidArgument);
  EXPECT_THROW(dlp::zeta_bound(0.3), dlp::InvalidArgument);
}

TEST(Zeta, EqualsExactSphereSchattenSum) {
  // sum_j alpha_j^{2p} over the sphere: (2l+1) copies of (2l+1)^{-2p}
  const double p = 2.0;
  const auto sp = dlp::sphere_exact_spectrum(400);
  const double s = dlp::schatten_sum(sp.singular_values, 2.0 * p);
  EXPECT_NEAR(s, dlp::zeta_bound(p), 1e-6);
}

TEST(LinftyL1, CircleAndEllipse) {
  const auto c = Curve2D::ellipse(2.0, 0.5);
  const auto sp = dlp::eigenpairs(dlp::assemble_dlp_2d(c, 64));
  const auto rep = dlp::linfty_l1_constant(sp, c, 1e-8, 6);
  EXPECT_EQ(rep.ratios.size(), 6u);
  EXPECT_GT(rep.constant, 0.0);
  // constant eigenvector: |l| sup / L1 = 1 / perimeter
  const auto konst = dlp::find_constant_eigenpair(sp);
  ASSERT_TRUE(konst.has_value());
  double perimeter = 0.0;
  for (int k = 0; k < 4096; ++k) perimeter += c.speed(dlp::two_pi * k / 4096) * dlp::two_pi / 4096;
  for (const auto& [j, r] : rep.ratios)
    if (j == *konst) EXPECT_NEAR(r, 1.0 / perimeter, 1e-10);
}
