#pragma once

// Quantities derived from spectra: traces and the isoperimetric defect,
// +/- pairing, Weyl sums, decay fits, the closed-form sphere spectrum and
// the odd-zeta Schatten target.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "dlp/common.hpp"
#include "dlp/geometry.hpp"
#include "dlp/operators.hpp"
#include "dlp/spectrum.hpp"
#include "dlp/trig.hpp"

namespace dlp {

struct TraceReport {
  double trace_K = 0.0;
  double trace_KstarK_quadrature = 0.0;  // ||D^{1/2} A D^{-1/2}||_F^2, the discrete double integral
  double trace_KstarK_svd = 0.0;         // sum alpha_j^2
  double defect = 0.0;                   // trace_KstarK_quadrature - 1
  std::string shape_id;
  int n = 0;
};

inline TraceReport trace_report(const OperatorMatrix& m, std::span<const double> alphas) {
  TraceReport r;
  r.shape_id = m.shape_id;
  r.n = static_cast<int>(m.size());
  r.trace_K = m.entries.trace();
  r.trace_KstarK_quadrature = m.symmetrized().squaredNorm();
  double s = 0.0;
  for (double a : alphas) s += a * a;
  r.trace_KstarK_svd = s;
  r.defect = r.trace_KstarK_quadrature - 1.0;
  return r;
}

inline TraceReport trace_report(const OperatorMatrix& m) {
  const auto alphas = singular_values(m);
  return trace_report(m, alphas);
}

inline TraceReport trace_report(const Curve2D& curve, int n) { return trace_report(assemble_dlp_2d(curve, n)); }

inline nlohmann::json to_json(const TraceReport& r) {
  return {{"shape", r.shape_id},
          {"N", r.n},
          {"trace_K", r.trace_K},
          {"trace_KstarK_quadrature", r.trace_KstarK_quadrature},
          {"trace_KstarK_svd", r.trace_KstarK_svd},
          {"defect", r.defect}};
}

// Coefficient of variation std/|mean| of a vector's entries.
inline double coefficient_of_variation(const Eigen::VectorXd& v) {
  const double mean = v.mean();
  if (mean == 0.0) return std::numeric_limits<double>::infinity();
  const double var = (v.array() - mean).square().mean();
  return std::sqrt(var) / std::abs(mean);
}

inline constexpr double constancy_tolerance = 1e-6;

// The -1 eigenpair, recognised by its constant eigenvector.
inline std::optional<std::size_t> find_constant_eigenpair(const Spectrum& sp, double tol = constancy_tolerance) {
  if (sp.constant_index) return sp.constant_index;
  if (!sp.has_vectors()) return std::nullopt;
  std::optional<std::size_t> best;
  double best_cv = tol;
  for (std::size_t j = 0; j < sp.size(); ++j) {
    if (!sp.real_flags[j]) continue;
    const double cv = coefficient_of_variation(sp.real_vector(j));
    if (cv <= best_cv) {
      best_cv = cv;
      best = j;
    }
  }
  return best;
}

struct SymmetryPair {
  std::size_t index = 0;
  cplx value;
  std::size_t partner = 0;
  double mismatch = 0.0;  // |lambda + mu|
};

struct SymmetryReport {
  std::vector<SymmetryPair> pairs;  // in spectrum order
  double worst_mismatch = 0.0;      // over the leading 2*top_pairs entries
  double worst_overall = 0.0;
  bool vacuous = true;
};

inline SymmetryReport symmetry_audit(const Spectrum& sp, double threshold = 1e-6, int top_pairs = 10) {
  const auto skip = find_constant_eigenpair(sp);
  std::vector<std::size_t> cand;
  for (std::size_t j = 0; j < sp.size(); ++j)
    if (std::abs(sp.eigenvalues[j]) >= threshold && (!skip || j != *skip)) cand.push_back(j);
  SymmetryReport rep;
  rep.vacuous = cand.size() < 2;
  if (rep.vacuous) return rep;
  for (std::size_t a : cand) {
    SymmetryPair p{a, sp.eigenvalues[a], a, std::numeric_limits<double>::infinity()};
    for (std::size_t b : cand) {
      if (b == a) continue;
      const double d = std::abs(sp.eigenvalues[a] + sp.eigenvalues[b]);
      if (d < p.mismatch) {
        p.mismatch = d;
        p.partner = b;
      }
    }
    rep.pairs.push_back(p);
  }
  for (std::size_t k = 0; k < rep.pairs.size(); ++k) {
    rep.worst_overall = std::max(rep.worst_overall, rep.pairs[k].mismatch);
    if (k < 2 * static_cast<std::size_t>(top_pairs)) rep.worst_mismatch = std::max(rep.worst_mismatch, rep.pairs[k].mismatch);
  }
  return rep;
}

struct WeylTerm {
  double r = 2.0;
  double eigen_sum = 0.0;     // sum |lambda_j|^r
  double singular_sum = 0.0;  // sum alpha_j^r
  bool holds = true;
};

struct WeylReport {
  std::vector<WeylTerm> terms;
  double max_j_lambda_sq = 0.0;  // max_j j |lambda_j|^2, j >= 1
};

inline WeylReport weyl_audit(std::span<const cplx> eigenvalues, std::span<const double> alphas,
                             std::span<const double> rs = std::vector<double>{2.0, 4.0}) {
  WeylReport rep;
  for (double r : rs) {
    WeylTerm t;
    t.r = r;
    for (cplx l : eigenvalues) t.eigen_sum += std::pow(std::abs(l), r);
    t.singular_sum = schatten_sum(alphas, r);
    t.holds = t.eigen_sum <= t.singular_sum * (1.0 + 1e-10) + 1e-12;
    rep.terms.push_back(t);
    if (!t.holds) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "Weyl inequality violated for r=%g: sum|lambda|^r=%.15g > sum alpha^r=%.15g", r,
                    t.eigen_sum, t.singular_sum);
      throw SolverFailure(buf);
    }
  }
  for (std::size_t j = 1; j < eigenvalues.size(); ++j)
    rep.max_j_lambda_sq = std::max(rep.max_j_lambda_sq, double(j) * std::norm(eigenvalues[j]));
  return rep;
}

inline WeylReport weyl_audit(const Spectrum& sp, std::span<const double> rs = std::vector<double>{2.0, 4.0}) {
  if (sp.singular_values.empty()) throw InvalidArgument("weyl_audit: spectrum has no singular values");
  return weyl_audit(sp.eigenvalues, sp.singular_values, rs);
}

enum class DecayModel { exponential, power };

struct DecayFit {
  DecayModel model = DecayModel::exponential;
  bool ok = false;
  double rate = 0.0;       // exponential: -slope of log|l_j| vs j; power: slope of log|l_j| vs log j
  double intercept = 0.0;
  double r2 = 0.0;
  double window_lo = 1e-12;
  double window_hi = 1e-1;
  int points = 0;
  std::string diagnostic;
};

// Least squares on the moduli inside [lo, hi]. j is the 1-based position in
// descending order; moduli equal to 1e-6 relative share their mean position
// (2D spectra come in +/- pairs).
inline DecayFit fit_decay(std::span<const double> moduli, DecayModel model, double lo = 1e-12, double hi = 1e-1) {
  std::vector<double> m(moduli.begin(), moduli.end());
  std::sort(m.begin(), m.end(), std::greater<>());
  std::vector<double> rank(m.size());
  for (std::size_t a = 0; a < m.size();) {
    std::size_t b = a + 1;
    while (b < m.size() && m[a] - m[b] <= 1e-6 * m[a]) ++b;
    for (std::size_t k = a; k < b; ++k) rank[k] = 0.5 * double(a + 1 + b);
    a = b;
  }
  DecayFit fit;
  fit.model = model;
  fit.window_lo = lo;
  fit.window_hi = hi;
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < m.size(); ++k) {
    if (m[k] < lo || m[k] > hi) continue;
    const double j = rank[k];
    xs.push_back(model == DecayModel::exponential ? j : std::log(j));
    ys.push_back(std::log(m[k]));
  }
  fit.points = static_cast<int>(xs.size());
  if (fit.points < 8) {
    fit.diagnostic = "only " + std::to_string(fit.points) + " values inside the fit window; need 8";
    return fit;
  }
  const double n = double(xs.size());
  double sx = 0, sy = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sx += xs[k];
    sy += ys[k];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ys[k] - my);
    syy += (ys[k] - my) * (ys[k] - my);
  }
  if (sxx == 0.0) {
    fit.diagnostic = "degenerate abscissae";
    return fit;
  }
  const double slope = sxy / sxx;
  fit.intercept = my - slope * mx;
  fit.rate = model == DecayModel::exponential ? -slope : slope;
  fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  fit.ok = true;
  return fit;
}

inline DecayFit fit_decay(const Spectrum& sp, DecayModel model, double lo = 1e-12, double hi = 1e-1) {
  const auto m = sp.moduli();
  return fit_decay(m, model, lo, hi);
}

inline Spectrum sphere_exact_spectrum(int lmax) {
  if (lmax < 0) throw InvalidArgument("sphere_exact_spectrum: lmax must be >= 0");
  Spectrum sp;
  sp.shape_id = "sphere(exact,lmax=" + std::to_string(lmax) + ")";
  for (int l = 0; l <= lmax; ++l)
    for (int m = 0; m < 2 * l + 1; ++m) {
      const double v = -1.0 / (2 * l + 1);
      sp.eigenvalues.emplace_back(v, 0.0);
      sp.real_flags.push_back(true);
      sp.singular_values.push_back(-v);
    }
  sp.n = static_cast<int>(sp.eigenvalues.size());
  sp.constant_index = 0;
  return sp;
}

struct ZetaBound {
  double value = 0.0;
  double tail_bound = 0.0;  // bound on the error of the Euler-Maclaurin tail
};

// sum_{l>=0} (2l+1)^{-(2p-1)} = (1 - 2^{1-2p}) zeta(2p-1).
inline ZetaBound zeta_bound_detail(double p) {
  if (!(p > 1.0)) throw InvalidArgument("zeta_bound: p must exceed 1 (the series diverges otherwise)");
  const double s = 2.0 * p - 1.0;
  constexpr int L = 2000;
  double head = 0.0;
  for (int l = L - 1; l >= 0; --l) head += std::pow(2.0 * l + 1.0, -s);
  // tail sum_{l>=L} f(l), f(x) = (2x+1)^{-s}: integral + f/2 - f'/12 + f'''/720
  const double u = 2.0 * L + 1.0;
  const double f = std::pow(u, -s);
  const double integral = std::pow(u, 1.0 - s) / (2.0 * (s - 1.0));
  const double d1 = -2.0 * s * f / u;
  const double d3 = -8.0 * s * (s + 1.0) * (s + 2.0) * f / (u * u * u);
  ZetaBound z;
  z.value = head + integral + 0.5 * f - d1 / 12.0 + d3 / 720.0;
  z.tail_bound = 32.0 * s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * f / std::pow(u, 5) / 30240.0;
  return z;
}

inline double zeta_bound(double p) { return zeta_bound_detail(p).value; }

struct LinftyL1Report {
  double constant = 0.0;
  std::size_t argmax = 0;
  std::vector<std::pair<std::size_t, double>> ratios;  // (eigen index, |lambda| ||e||_inf / ||e||_L1)
};

// max over real eigenpairs with |lambda| >= min_modulus of |lambda| ||e||_inf / ||e||_{L1(ds)},
// norms taken on the 16N trigonometric refinement. max_pairs < 0 means all.
inline LinftyL1Report linfty_l1_constant(const Spectrum& sp, const Curve2D& curve, double min_modulus = 1e-8,
                                         int max_pairs = -1) {
  if (!sp.has_vectors()) throw InvalidArgument("linfty_l1_constant: spectrum carries no eigenvectors");
  const int n = sp.n;
  const int m = 16 * n;
  std::vector<double> speed(m);
  for (int k = 0; k < m; ++k) speed[k] = curve.speed(two_pi * k / m);
  LinftyL1Report rep;
  int used = 0;
  for (std::size_t j = 0; j < sp.size(); ++j) {
    if (max_pairs >= 0 && used >= max_pairs) break;
    if (!sp.real_flags[j] || std::abs(sp.eigenvalues[j]) < min_modulus) continue;
    const Eigen::VectorXd e = sp.real_vector(j);
    const TrigInterpolant interp(std::span<const double>(e.data(), static_cast<std::size_t>(e.size())));
    const auto fine = interp.resample(m);
    double sup = 0.0, l1 = 0.0;
    for (int k = 0; k < m; ++k) {
      sup = std::max(sup, std::abs(fine[k]));
      l1 += std::abs(fine[k]) * speed[k];
    }
    l1 *= two_pi / m;
    if (!(l1 > 0.0)) continue;
    const double ratio = std::abs(sp.eigenvalues[j]) * sup / l1;
    rep.ratios.emplace_back(j, ratio);
    if (ratio > rep.constant) {
      rep.constant = ratio;
      rep.argmax = j;
    }
    ++used;
  }
  return rep;
}

}  // namespace dlp
