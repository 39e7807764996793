#pragma once

// The acceptance suite: eleven numbered criteria, each with its tolerance and
// runtime budget. Quick mode shrinks 2D grids to N=32 (64 where a doubling is
// checked) and 3D grids to 16x32, and multiplies every tolerance by 10.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dlp/analysis.hpp"
#include "dlp/common.hpp"
#include "dlp/eigenfunctions.hpp"
#include "dlp/explorer.hpp"
#include "dlp/geometry.hpp"
#include "dlp/operators.hpp"
#include "dlp/spectrum.hpp"

namespace dlp {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  double seconds = 0.0;
  double budget = 0.0;  // seconds
  std::vector<std::string> notes;  // measured vs expected
};

struct VerifyOptions {
  bool quick = false;
  bool inject_fault = false;  // flips the sign of every 2D diagonal entry
  std::set<int> only;         // empty: all
  std::function<void(const CriterionResult&)> on_result;
};

inline Curve2D decay_test_curve() {
  std::vector<FourierTerm> terms{{1, cplx(1.0, 0.0)}};
  for (int k = 2; k <= 128; ++k) {
    const double a = std::pow(double(k), -5.0);
    terms.push_back({k, cplx(0.1 * a, 0.0)});
    terms.push_back({-k, cplx(0.05 * a, 0.0)});
  }
  return Curve2D::fourier(std::move(terms));
}

inline Curve2D perturbed_test_curve() { return Curve2D::fourier({{1, cplx(1.0, 0.0)}, {3, cplx(0.0, 0.1)}}); }

namespace detail {

class Checker {
 public:
  explicit Checker(CriterionResult& r) : r_(r) {}

  // |measured - expected| <= tol
  void near(const std::string& what, double measured, double expected, double tol) {
    record(what, std::abs(measured - expected) <= tol, measured, "expected " + num(expected) + " +- " + num(tol));
  }
  void at_most(const std::string& what, double measured, double bound) {
    record(what, measured <= bound, measured, "bound <= " + num(bound));
  }
  void at_least(const std::string& what, double measured, double bound) {
    record(what, measured >= bound, measured, "bound >= " + num(bound));
  }
  void greater(const std::string& what, double measured, double bound) {
    record(what, measured > bound, measured, "bound > " + num(bound));
  }
  void equal(const std::string& what, long measured, long expected) {
    record(what, measured == expected, double(measured), "expected " + std::to_string(expected));
  }
  void truth(const std::string& what, bool ok, const std::string& detail = {}) {
    ok_ = ok_ && ok;
    r_.notes.push_back(std::string(ok ? "ok   " : "FAIL ") + what + (detail.empty() ? "" : ": " + detail));
  }
  bool ok() const { return ok_; }

  static std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
  }

 private:
  void record(const std::string& what, bool ok, double measured, const std::string& expect) {
    truth(what, ok, "measured " + num(measured) + ", " + expect);
  }
  CriterionResult& r_;
  bool ok_ = true;
};

struct Suite {
  VerifyOptions opt;

  double tol(double t) const { return opt.quick ? 10.0 * t : t; }
  int n2d(int full) const { return opt.quick ? (full > 256 ? 64 : 32) : full; }
  int nth(int full) const { return opt.quick ? full / 2 : full; }

  OperatorMatrix dlp2(const Curve2D& c, int n) const {
    auto m = assemble_dlp_2d(c, n);
    if (opt.inject_fault) m.entries.diagonal() *= -1.0;
    return m;
  }

  // ---- 1
  void circle(Checker& ck) const {
    const int n = opt.quick ? 32 : 64;
    const auto m = dlp2(Curve2D::circle(1.0), n);
    ck.at_most("max |A_ij + 1/N|", (m.entries.array() + 1.0 / n).abs().maxCoeff(), tol(1e-14));
    const auto sp = compute_spectrum(m);
    ck.near("lambda_0", sp.eigenvalues[0].real(), -1.0, tol(1e-10));
    double rest = 0.0;
    for (std::size_t j = 1; j < sp.size(); ++j) rest = std::max(rest, std::abs(sp.eigenvalues[j]));
    ck.at_most("max |lambda_j|, j >= 1", rest, tol(1e-10));
    ck.near("alpha_1", sp.singular_values[0], 1.0, tol(1e-10));
    ck.at_most("alpha_2", sp.singular_values[1], tol(1e-10));
    ck.near("tr(K*K)", m.symmetrized().squaredNorm(), 1.0, tol(1e-12));
  }

  // ---- 2
  void ellipse_spectrum(Checker& ck) const {
    const double R = 0.5;
    const auto sp = compute_spectrum(dlp2(Curve2D::ellipse(2.0, R), n2d(256)));
    double worst = 0.0;
    for (int m = 1; m <= 5; ++m)
      for (double sg : {1.0, -1.0}) {
        const double target = sg * std::exp(-2.0 * m * R);
        const auto j = nearest_eigenvalue(sp, target);
        worst = std::max(worst, std::abs(sp.eigenvalues[*j] - target));
      }
    ck.at_most("max |lambda - (+-e^{-2mR})|, m=1..5", worst, tol(1e-8));
    ck.at_most("symmetry audit worst mismatch", symmetry_audit(sp).worst_mismatch, tol(1e-7));
    const auto fit = fit_decay(sp, DecayModel::exponential);
    ck.truth("decay fit available", fit.ok, fit.diagnostic);
    ck.near("exponential rate", fit.rate, R, tol(0.05) * R);
  }

  // ---- 3
  void traces(Checker& ck) const {
    // the trapezoid error of tr K on the ellipse is 2e-7 at N=32, so quick mode stays at 64
    const int n = opt.quick ? 64 : 256;
    const Curve2D shapes[] = {Curve2D::circle(1.0), Curve2D::ellipse(2.0, 0.5), perturbed_test_curve()};
    for (const auto& c : shapes) {
      const auto m = dlp2(c, n);
      const auto tr = trace_report(m);
      const std::string id = c.id();
      ck.near(id + " tr(K)", tr.trace_K, -1.0, tol(1e-10));
      ck.at_most(id + " |quadrature - svd|", std::abs(tr.trace_KstarK_quadrature - tr.trace_KstarK_svd), tol(1e-8));
      if (c.kind() == CurveKind::circle)
        ck.at_most(id + " |defect|", std::abs(tr.defect), tol(1e-10));
      else
        ck.greater(id + " defect", tr.defect, tol(1e-10));
    }
  }

  // ---- 4
  void weyl(Checker& ck) const {
    const int n = n2d(256);
    const Curve2D shapes[] = {Curve2D::circle(1.0), Curve2D::ellipse(2.0, 0.5), perturbed_test_curve()};
    for (const auto& c : shapes) {
      const auto sp = compute_spectrum(dlp2(c, n), {.vectors = false});
      try {
        const auto w = weyl_audit(sp);
        ck.truth(c.id() + " Weyl r=2,4", true,
                 "sum|l|^2=" + Checker::num(w.terms[0].eigen_sum) + " <= " + Checker::num(w.terms[0].singular_sum));
      } catch (const SolverFailure& e) {
        ck.truth(c.id() + " Weyl r=2,4", false, e.what());
      }
    }
    const auto sphere = sphere_exact_spectrum(20);
    try {
      weyl_audit(sphere);
      ck.truth("exact sphere spectrum Weyl r=2,4", true);
    } catch (const SolverFailure& e) {
      ck.truth("exact sphere spectrum Weyl r=2,4", false, e.what());
    }
    std::mt19937 rng(20240501);
    std::normal_distribution<double> g;
    int violations = 0;
    double disagreement = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      Eigen::MatrixXd a(8, 8);
      for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) a(i, j) = g(rng);
      // brute force: Eigen's own QR eigen solver and one-sided Jacobi SVD
      const Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
      const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
      for (double r : {2.0, 4.0}) {
        double lhs = 0.0, rhs = 0.0;
        for (int k = 0; k < 8; ++k) {
          lhs += std::pow(std::abs(es.eigenvalues()[k]), r);
          rhs += std::pow(svd.singularValues()[k], r);
        }
        if (lhs > rhs * (1.0 + 1e-12)) ++violations;
      }
      const auto sp = eigenpairs(a, {.vectors = false});
      const auto sv = singular_values(a);
      for (int k = 0; k < 8; ++k) {
        disagreement = std::max(disagreement, std::abs(sv[k] - svd.singularValues()[k]));
        double best = std::numeric_limits<double>::infinity();
        for (int q = 0; q < 8; ++q) best = std::min(best, std::abs(sp.eigenvalues[k] - es.eigenvalues()[q]));
        disagreement = std::max(disagreement, best);
      }
      try {
        weyl_audit(sp.eigenvalues, sv);
      } catch (const SolverFailure&) {
        ++violations;
      }
    }
    ck.equal("random 8x8 Weyl violations (100 seeds, r=2,4)", violations, 0);
    ck.at_most("LAPACK vs brute-force eigen/singular values", disagreement, 1e-10);
  }

  // ---- 5
  void nodal(Checker& ck) const {
    const double R = 0.5;
    const auto curve = Curve2D::ellipse(2.0, R);
    const int n1 = n2d(256), n2 = 2 * n1;
    const auto s1 = eigenpairs(dlp2(curve, n1));
    const auto s2 = eigenpairs(dlp2(curve, n2));
    double worst_ratio = 0.0;
    for (int m = 1; m <= 4; ++m)
      for (double sg : {1.0, -1.0}) {
        const double target = sg * std::exp(-2.0 * m * R);
        const auto e1 = real_eigenpair(s1, *nearest_eigenvalue(s1, target));
        const auto e2 = real_eigenpair(s2, *nearest_eigenvalue(s2, target));
        const auto r1 = nodal_report(curve, e1, 0.1, false);
        const int z2 = nodal_count(Eigenpair{e2.lambda, normalize_eigenfunction(curve, e2.values)});
        const std::string tag = "m=" + std::to_string(m) + (sg > 0 ? " (+)" : " (-)");
        ck.equal(tag + " zeros at N=" + std::to_string(n1), r1.real_zeros, 2 * m);
        ck.equal(tag + " zeros at N=" + std::to_string(n2), z2, 2 * m);
        worst_ratio = std::max(worst_ratio, std::abs(r1.ratio * R - 1.0));
      }
    ck.at_most("max relative deviation of #N/|log lambda| from 1/R", worst_ratio, tol(0.02));
  }

  // ---- 6
  void extension(Checker& ck) const {
    const double R = 0.5;
    const auto curve = Curve2D::ellipse(2.0, R);
    const int n = n2d(256);
    const auto sp = eigenpairs(dlp2(curve, n));
    double worst = 0.0;
    for (int m = 1; m <= 3; ++m)
      for (double sg : {1.0, -1.0}) {
        const double target = sg * std::exp(-2.0 * m * R);
        const auto raw = real_eigenpair(sp, *nearest_eigenvalue(sp, target));
        const Eigenpair ep{raw.lambda, normalize_eigenfunction(curve, raw.values)};
        const HolomorphicExtension ext(curve, ep, 0.1);
        const TrigInterpolant interp(std::span<const double>(ep.values.data(), std::size_t(n)));
        const double sup = ep.values.cwiseAbs().maxCoeff();
        double diff = 0.0;
        for (int k = 0; k < 4 * n; ++k) {
          const double t = two_pi * (k + 0.37) / (4 * n);
          diff = std::max(diff, std::abs(ext(cplx(t, 0.0)) - interp(cplx(t, 0.0))));
        }
        worst = std::max(worst, diff / sup);
        const int real_zeros = nodal_count(ep);
        const auto a1 = annulus_zero_count(curve, ep, 0.1);
        const auto a2 = annulus_zero_count(curve, ep, 0.05);
        const std::string tag = "m=" + std::to_string(m) + (sg > 0 ? " (+)" : " (-)");
        ck.equal(tag + " annulus zeros, eps=0.1 vs real zeros " + std::to_string(real_zeros), a1.zeros, real_zeros);
        ck.equal(tag + " annulus zeros, eps=0.05", a2.zeros, a1.zeros);
      }
    ck.at_most("max |extension - interpolant| / ||e||_inf on real t", worst, tol(1e-6));
  }

  // ---- 7
  void sign_orthogonality(Checker& ck) const {
    const auto curve = Curve2D::ellipse(2.0, 0.5);
    const int n = n2d(256);
    const auto sp = eigenpairs(dlp2(curve, n));
    const auto ctx = single_layer_context(curve, n);
    const auto konst = find_constant_eigenpair(sp);
    ck.truth("constant eigenpair identified", konst.has_value());
    ck.truth("S1 > 0 on the diameter-0.9 rescaling", ctx.s1.minCoeff() > 0.0);
    int tested = 0, sign_fail = 0, orth_fail = 0;
    double worst_s1 = 0.0, worst_eq = 0.0, worst_lambda = 0.0;
    for (std::size_t j = 0; j < sp.size(); ++j) {
      if (!sp.real_flags[j] || std::abs(sp.eigenvalues[j]) < 1e-6 || (konst && j == *konst)) continue;
      const auto r = sign_and_orthogonality_check(ctx, real_eigenpair(sp, j), false, tol(1e-6));
      ++tested;
      if (!r.sign_ok) ++sign_fail;
      if (!r.orthogonality_ok) ++orth_fail;
      if (r.s1_inner > worst_s1) {
        worst_s1 = r.s1_inner;
        worst_lambda = r.lambda;
      }
      worst_eq = std::max(worst_eq, r.equilibrium_inner);
    }
    ck.greater("non-constant eigenpairs with |lambda| >= 1e-6", tested, 0);
    ck.equal("eigenpairs missing a sign change", sign_fail, 0);
    ck.equal("eigenpairs with |<e,S1>|/(|e||S1|) > " + Checker::num(tol(1e-6)), orth_fail, 0);
    ck.at_most("worst |<e,S1>|/(|e||S1|) (at lambda=" + Checker::num(worst_lambda) + ")", worst_s1, tol(1e-6));
    ck.truth("diagnostic: worst |<e,S^-1 1>| normalized = " + Checker::num(worst_eq), true);
  }

  // ---- 8
  void sphere(Checker& ck) const {
    auto errors = [&](int nt, bool report) {
      const auto m = assemble_dlp_3d(Surface3D::sphere(1.0), nt, 2 * nt);
      const auto sp = eigenpairs(m, {.vectors = false});
      const auto clusters = cluster_eigenvalues(sp.eigenvalues, 1e-2);
      std::vector<double> err;
      const std::string grid = std::to_string(nt) + "x" + std::to_string(2 * nt);
      if (report) ck.near(grid + " lambda_0", sp.eigenvalues[0].real(), -1.0, tol(1e-3));
      for (int l : {1, 2}) {
        const double target = -1.0 / (2 * l + 1);
        const EigenCluster* best = nullptr;
        for (const auto& c : clusters)
          if (!best || std::abs(c.center - target) < std::abs(best->center - target)) best = &c;
        err.push_back(std::abs(best->center - target));
        if (report) {
          ck.near(grid + " cluster mean near " + Checker::num(target), best->center.real(), target, tol(2e-2));
          ck.equal(grid + " multiplicity near " + Checker::num(target), best->multiplicity, 2 * l + 1);
        }
      }
      return err;
    };
    const auto coarse = errors(nth(32), true);
    const auto fine = errors(nth(48), false);
    for (int k = 0; k < 2; ++k)
      ck.truth("l=" + std::to_string(k + 1) + " error shrinks on refinement", fine[k] < coarse[k],
               Checker::num(coarse[k]) + " -> " + Checker::num(fine[k]));
  }

  // ---- 9
  void martensen(Checker& ck) const {
    const int nt = nth(32);
    {
      const auto m = assemble_dlp_3d(Surface3D::ellipsoid(1.0, 1.1, 1.2), nt, 2 * nt);
      const auto sp = eigenpairs(m);
      const auto cl = ellipsoid_cluster_sums(sp, 2, m.grid);
      ck.equal("(1,1.1,1.2) l=1 members", cl.clusters[1].members, 3);
      ck.near("(1,1.1,1.2) l=1 cluster sum", cl.clusters[1].sum, -1.0, tol(5e-2));
    }
    {
      const auto m = assemble_dlp_3d(Surface3D::ellipsoid(1.0, 1.05, 1.1), nt, 2 * nt);
      const auto sp = eigenpairs(m);
      const auto cl = ellipsoid_cluster_sums(sp, 1, m.grid);
      const auto& vals = cl.clusters[1].values;
      ck.equal("(1,1.05,1.1) l=1 members", long(vals.size()), 3);
      std::vector<cplx> cv(vals.begin(), vals.end());
      const auto groups = cluster_eigenvalues(cv, 1e-2);
      std::string shown;
      for (double v : vals) shown += Checker::num(v) + " ";
      ck.equal("(1,1.05,1.1) distinct l=1 eigenvalues [" + shown + "]", long(groups.size()), 3);
    }
  }

  // ---- 10
  void conjectures(Checker& ck) const {
    EllipsoidFamily fam;
    fam.n_theta = nth(32);
    fam.n_phi = 2 * fam.n_theta;
    fam.p = 2.0;
    const auto rows = sweep(fam);
    const auto s = summarize_ellipsoid_sweep(rows, fam.p, tol(2e-2), tol(0.05));
    for (const auto& r : rows)
      if (r.status == "error") ck.truth("row " + r.key(), false, r.message);
    const SweepRow* sphere = nullptr;
    for (const auto& r : rows)
      if (r.is_sphere()) sphere = &r;
    ck.truth("argmax lambda_floor at the sphere", s.pass_flags.at("argmax_lambda_floor_at_sphere"),
             s.argmax_lambda_floor ? s.argmax_lambda_floor->key() : "none");
    ck.near("sphere lambda_floor", sphere ? sphere->lambda_floor : NAN, -1.0 / 3.0, tol(2e-2));
    ck.truth("min sum alpha^4 at the sphere", s.pass_flags.at("min_schatten_at_sphere"),
             s.min_schatten ? s.min_schatten->key() : "none");
    ck.near("sphere sum alpha^4", sphere ? sphere->schatten : NAN, s.zeta_target, tol(0.05) * s.zeta_target);
    double worst = -1.0;
    for (const auto& r : rows)
      if (!r.is_sphere()) worst = std::max(worst, r.lambda_floor);
    ck.truth("all non-sphere rows have lambda_floor < -1/3", s.pass_flags.at("non_sphere_below_minus_third"),
             "largest non-sphere value " + Checker::num(worst));
  }

  // ---- 11
  void decay(Checker& ck) const {
    const auto sp = eigenpairs(dlp2(decay_test_curve(), n2d(512)), {.vectors = false});
    const auto fit = fit_decay(sp, DecayModel::power);
    ck.truth("power fit available", fit.ok, fit.diagnostic);
    ck.at_most("fitted power exponent", fit.rate, -2.0);
  }
};

struct CriterionSpec {
  int id;
  const char* name;
  double budget;
  void (Suite::*run)(Checker&) const;
};

inline const std::vector<CriterionSpec>& criteria() {
  static const std::vector<CriterionSpec> list{
      {1, "circle exactness", 1.0, &Suite::circle},
      {2, "ellipse spectrum", 10.0, &Suite::ellipse_spectrum},
      {3, "trace identities", 30.0, &Suite::traces},
      {4, "Weyl audit", 5.0, &Suite::weyl},
      {5, "nodal law on the ellipse", 20.0, &Suite::nodal},
      {6, "holomorphic extension", 30.0, &Suite::extension},
      {7, "sign and S-orthogonality", 20.0, &Suite::sign_orthogonality},
      {8, "sphere spectrum", 120.0, &Suite::sphere},
      {9, "cluster sums", 120.0, &Suite::martensen},
      {10, "ellipsoid conjecture instances", 900.0, &Suite::conjectures},
      {11, "decay-rate property", 60.0, &Suite::decay},
  };
  return list;
}

}  // namespace detail

inline std::vector<CriterionResult> run_acceptance(const VerifyOptions& opt) {
  const detail::Suite suite{opt};
  std::vector<CriterionResult> out;
  for (const auto& spec : detail::criteria()) {
    if (!opt.only.empty() && !opt.only.count(spec.id)) continue;
    CriterionResult r;
    r.id = spec.id;
    r.name = spec.name;
    r.budget = spec.budget;
    detail::Checker ck(r);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      (suite.*spec.run)(ck);
    } catch (const std::exception& e) {
      ck.truth("exception", false, e.what());
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool in_time = true;
    if (!opt.quick) {
      in_time = r.seconds < r.budget;
      ck.truth("runtime " + detail::Checker::num(r.seconds) + " s within " + detail::Checker::num(r.budget) + " s",
               in_time);
    }
    r.passed = ck.ok();
    if (opt.on_result) opt.on_result(r);
    out.push_back(std::move(r));
  }
  return out;
}

inline std::string format_result_line(const CriterionResult& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "[%s] %2d  %-32s %8.2f s (budget %g s)", r.passed ? "PASS" : "FAIL", r.id,
                r.name.c_str(), r.seconds, r.budget);
  return buf;
}

}  // namespace dlp
