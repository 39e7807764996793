#pragma once

// Eigenfunction post-processing on 2D curves: L2 normalisation, real zero
// counts, holomorphic continuation off the real parameter line, complex zero
// counts by the argument principle, and the sign / S-orthogonality checks.
//
// Eigenfunctions are node samples e_j = e(t_j) on the N-point periodic grid.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dlp/analysis.hpp"
#include "dlp/common.hpp"
#include "dlp/geometry.hpp"
#include "dlp/operators.hpp"
#include "dlp/spectrum.hpp"
#include "dlp/trig.hpp"

namespace dlp {

struct Eigenpair {
  double lambda = 0.0;
  Eigen::VectorXd values;  // samples at t_j = 2 pi j / N
};

inline Eigenpair real_eigenpair(const Spectrum& sp, std::size_t j) {
  if (!sp.real_flags.at(j))
    throw InvalidArgument("eigenpair " + std::to_string(j) + " is complex");
  return {sp.eigenvalues[j].real(), sp.real_vector(j)};
}

// Index of the eigenvalue closest to target.
inline std::optional<std::size_t> nearest_eigenvalue(const Spectrum& sp, double target) {
  std::optional<std::size_t> best;
  double dist = 0.0;
  for (std::size_t j = 0; j < sp.size(); ++j) {
    const double d = std::abs(sp.eigenvalues[j] - cplx(target, 0.0));
    if (!best || d < dist) {
      best = j;
      dist = d;
    }
  }
  return best;
}

inline double l2_norm_ds(const Curve2D& curve, const Eigen::VectorXd& e) {
  const int n = static_cast<int>(e.size());
  double s = 0.0;
  for (int j = 0; j < n; ++j) s += e[j] * e[j] * curve.speed(two_pi * j / n);
  return std::sqrt(s * two_pi / n);
}

// Scales e so that ||e||_{L2(ds)} = 2 pi.
inline Eigen::VectorXd normalize_eigenfunction(const Curve2D& curve, const Eigen::VectorXd& e) {
  const double nrm = l2_norm_ds(curve, e);
  if (!(nrm > 0.0) || !std::isfinite(nrm)) throw InvalidArgument("eigenfunction is numerically zero");
  return e * (two_pi / nrm);
}

// Sign changes of the trigonometric interpolant on a refine*N point grid.
// Samples with |e| <= 1e-9 ||e||_inf are resolved by sampling the interpolant
// densely between the neighbouring clearly signed samples.
inline int nodal_count(std::span<const double> samples, int refine = 16) {
  const int n = static_cast<int>(samples.size());
  if (n < 2) throw InvalidArgument("nodal_count: need at least two samples");
  double sup = 0.0;
  for (double v : samples) sup = std::max(sup, std::abs(v));
  if (!(sup > 0.0) || !std::isfinite(sup)) throw InvalidArgument("nodal_count: eigenvector is numerically zero");
  const TrigInterpolant interp(samples);
  const int m = refine * n;
  const auto f = interp.resample(m);
  const double tiny = 1e-9 * sup;

  std::vector<int> signed_idx;
  for (int k = 0; k < m; ++k)
    if (std::abs(f[k]) > tiny) signed_idx.push_back(k);
  if (signed_idx.empty()) throw InvalidArgument("nodal_count: eigenvector is numerically zero");

  int count = 0;
  const double dt = two_pi / m;
  for (std::size_t a = 0; a < signed_idx.size(); ++a) {
    const int i0 = signed_idx[a];
    const int i1 = signed_idx[(a + 1) % signed_idx.size()];
    const int gap = ((i1 - i0) % m + m) % m;
    if (gap == 1 || (signed_idx.size() == 1 && gap == 0)) {
      if (gap == 1 && (f[i0] > 0) != (f[i1] > 0)) ++count;
      continue;
    }
    // near-zero run between i0 and i1: isolate the roots on a finer local grid
    const int sub = 64 * gap;
    double prev = f[i0];
    for (int s = 1; s <= sub; ++s) {
      const double t = (i0 + double(s) * gap / sub) * dt;
      const double v = s == sub ? f[i1] : interp(t);
      if (v == 0.0) continue;
      if ((v > 0) != (prev > 0)) ++count;
      prev = v;
    }
  }
  return count;
}

inline int nodal_count(const Eigenpair& ep, int refine = 16) {
  return nodal_count(std::span<const double>(ep.values.data(), static_cast<std::size_t>(ep.values.size())), refine);
}

inline constexpr double extension_lambda_floor = 1e-8;

// e^C(t) = -(1/lambda) (1/2 pi i) int e(s) [q'(s)/(q(s) - q^C(t)) - q*'(s)/(q*(s) - q^{C*}(t))] ds,
// trapezoid on the eigenvector grid. The bracket is regular at s = t.
class HolomorphicExtension {
 public:
  HolomorphicExtension(const Curve2D& curve, const Eigenpair& ep, double epsilon)
      : curve_(curve), lambda_(ep.lambda), eps_(epsilon), e_(ep.values) {
    if (std::abs(lambda_) < extension_lambda_floor)
      throw InvalidArgument("holomorphic extension undefined for |lambda| < 1e-8");
    if (!(epsilon > 0.0)) throw InvalidArgument("holomorphic extension: epsilon must be positive");
    n_ = static_cast<int>(e_.size());
    if (n_ < 16) throw InvalidArgument("holomorphic extension: need at least 16 samples");
    s_.resize(n_);
    dq_.resize(n_);
    dqs_.resize(n_);
    lim_.resize(n_);
    for (int j = 0; j < n_; ++j) {
      s_[j] = two_pi * j / n_;
      dq_[j] = curve.derivative(s_[j], 1);
      dqs_[j] = curve.conj_derivative(s_[j], 1);
      lim_[j] = curve.derivative(s_[j], 2) / (2.0 * dq_[j]) - curve.conj_derivative(s_[j], 2) / (2.0 * dqs_[j]);
    }
    validate_annulus();
  }

  double epsilon() const { return eps_; }
  double lambda() const { return lambda_; }

  cplx operator()(cplx t) const {
    if (std::abs(t.imag()) > eps_ * (1.0 + 1e-12)) throw InvalidArgument("extension evaluated outside the annulus");
    cplx sum(0.0, 0.0);
    for (int j = 0; j < n_; ++j) {
      const cplx d(wrap_angle(s_[j] - t.real()), -t.imag());
      cplx term;
      if (std::abs(d) < 1e-8)
        term = lim_[j];
      else
        term = dq_[j] / curve_.chord(s_[j], t) - dqs_[j] / curve_.conj_chord(s_[j], t);
      sum += e_[j] * term;
    }
    const double h = two_pi / n_;
    return -(h * sum) / (cplx(0.0, two_pi) * lambda_);
  }

 private:
  // q^C' must stay away from zero and the continued points must stay off the
  // real curve, checked on a grid over the closed strip |Im t| <= epsilon.
  void validate_annulus() const {
    constexpr int m = 256, levels = 8;
    double real_min = std::numeric_limits<double>::infinity();
    std::vector<cplx> ring(4 * n_);
    for (int j = 0; j < 4 * n_; ++j) {
      const double t = two_pi * j / (4 * n_);
      ring[j] = curve_.position(t);
      real_min = std::min(real_min, curve_.speed(t));
    }
    for (int lv = 1; lv <= levels; ++lv) {
      const double y = eps_ * lv / levels;
      for (double sign : {-1.0, 1.0}) {
        for (int k = 0; k < m; ++k) {
          const cplx t(two_pi * k / m, sign * y);
          if (std::abs(curve_.derivative(t, 1)) < 1e-3 * real_min) fail(y);
          const cplx z = curve_.position(t);
          double dmin = std::numeric_limits<double>::infinity();
          for (const cplx& p : ring) dmin = std::min(dmin, std::abs(p - z));
          // a continued point landing on the curve itself marks loss of injectivity
          if (dmin < 1e-3 * y * real_min) fail(y);
        }
      }
    }
  }

  [[noreturn]] void fail(double y) const {
    char buf[160];
    std::snprintf(buf, sizeof buf, "epsilon=%g too large: continued parametrization degenerates at |Im t|=%g", eps_, y);
    throw InvalidArgument(buf);
  }

  Curve2D curve_;
  double lambda_;
  double eps_;
  Eigen::VectorXd e_;
  int n_ = 0;
  std::vector<double> s_;
  std::vector<cplx> dq_, dqs_, lim_;
};

inline cplx holomorphic_extension(const Curve2D& curve, const Eigenpair& ep, cplx t, double epsilon = 0.1) {
  return HolomorphicExtension(curve, ep, epsilon)(t);
}

struct AnnulusCount {
  int zeros = 0;
  double epsilon = 0.0;  // the value actually used after any nudging
  int evaluations = 0;
  int retries = 0;
};

namespace detail {

struct ContourTrace {
  double phase = 0.0;
  double vmax = 0.0;
  double vmin = std::numeric_limits<double>::infinity();
  int evaluations = 0;
};

// Phase change of f along t(u) = u + i y for u from a to b, bisecting until every step turns < pi/2.
template <class F>
void accumulate_phase(const F& f, double y, double a, double b, cplx fa, cplx fb, int depth, ContourTrace& tr) {
  const double step = std::arg(fb / fa);
  if (std::abs(step) < 0.5 * pi || depth >= 40) {
    tr.phase += step;
    return;
  }
  const double mid = 0.5 * (a + b);
  const cplx fm = f(cplx(mid, y));
  ++tr.evaluations;
  tr.vmax = std::max(tr.vmax, std::abs(fm));
  tr.vmin = std::min(tr.vmin, std::abs(fm));
  accumulate_phase(f, y, a, mid, fa, fm, depth + 1, tr);
  accumulate_phase(f, y, mid, b, fm, fb, depth + 1, tr);
}

template <class F>
ContourTrace strip_winding(const F& f, double half_width, int base_points) {
  ContourTrace tr;
  // bottom edge left to right, top edge right to left; the vertical sides cancel by periodicity
  for (double y : {-half_width, half_width}) {
    const double dir = y < 0 ? 1.0 : -1.0;
    std::vector<cplx> vals(base_points + 1);
    for (int k = 0; k <= base_points; ++k) {
      const double u = dir > 0 ? two_pi * k / base_points : two_pi * (base_points - k) / base_points;
      vals[k] = k == base_points ? vals[0] : f(cplx(u, y));
      if (k < base_points) {
        ++tr.evaluations;
        tr.vmax = std::max(tr.vmax, std::abs(vals[k]));
        tr.vmin = std::min(tr.vmin, std::abs(vals[k]));
      }
    }
    for (int k = 0; k < base_points; ++k) {
      const double u0 = dir > 0 ? two_pi * k / base_points : two_pi * (base_points - k) / base_points;
      const double u1 = dir > 0 ? two_pi * (k + 1) / base_points : two_pi * (base_points - k - 1) / base_points;
      if (std::abs(vals[k]) == 0.0 || std::abs(vals[k + 1]) == 0.0) {
        tr.vmin = 0.0;
        return tr;
      }
      accumulate_phase(f, y, u0, u1, vals[k], vals[k + 1], 0, tr);
    }
  }
  return tr;
}

}  // namespace detail

// Number of zeros of an analytic 2 pi periodic f in the strip |Im t| < half_width.
template <class F>
int strip_zero_count(const F& f, double half_width, int base_points, double* vmin_rel = nullptr) {
  const auto tr = detail::strip_winding(f, half_width, base_points);
  if (vmin_rel) *vmin_rel = tr.vmax > 0 ? tr.vmin / tr.vmax : 0.0;
  return static_cast<int>(std::lround(tr.phase / two_pi));
}

// Zeros of e^C inside the parameter annulus |Im t| < epsilon/2.
inline AnnulusCount annulus_zero_count(const Curve2D& curve, const Eigenpair& ep, double epsilon = 0.1) {
  AnnulusCount out;
  double eps = epsilon;
  const double factors[] = {1.0, 1.1, 0.9, 1.2};
  for (int attempt = 0; attempt < 4; ++attempt) {
    eps = epsilon * factors[attempt];
    const HolomorphicExtension ext(curve, ep, eps);
    const int base = std::max(64, 2 * static_cast<int>(ep.values.size()));
    const auto tr = detail::strip_winding(ext, 0.5 * eps, base);
    out.evaluations += tr.evaluations;
    if (tr.vmin > 1e-12 * tr.vmax) {
      out.zeros = static_cast<int>(std::lround(tr.phase / two_pi));
      out.epsilon = eps;
      out.retries = attempt;
      return out;
    }
  }
  throw SolverFailure("annulus_zero_count: contour passes through a zero for every nudged epsilon");
}

struct NodalReport {
  std::string shape_id;
  int n = 0;
  double lambda = 0.0;
  int real_zeros = 0;
  std::optional<int> annulus_zeros;  // absent for lambda = 0 pairs
  double ratio = 0.0;                // real_zeros / |log|lambda||
  double epsilon = 0.0;
  bool normalized = false;  // ||e||_{L2(ds)} = 2 pi
  bool zero_eigenvalue = false;
};

inline NodalReport nodal_report(const Curve2D& curve, const Eigenpair& ep, double epsilon = 0.1, bool with_annulus = true) {
  NodalReport r;
  r.shape_id = curve.id();
  r.n = static_cast<int>(ep.values.size());
  r.lambda = ep.lambda;
  const Eigenpair normed{ep.lambda, normalize_eigenfunction(curve, ep.values)};
  r.normalized = std::abs(l2_norm_ds(curve, normed.values) - two_pi) <= 1e-10 * two_pi;
  r.real_zeros = nodal_count(normed);
  r.zero_eigenvalue = std::abs(ep.lambda) < extension_lambda_floor;
  const double lg = std::abs(std::log(std::abs(ep.lambda)));
  r.ratio = (r.zero_eigenvalue || lg == 0.0) ? 0.0 : r.real_zeros / lg;
  if (with_annulus && !r.zero_eigenvalue) {
    const auto ac = annulus_zero_count(curve, normed, epsilon);
    r.annulus_zeros = ac.zeros;
    r.epsilon = ac.epsilon;
  }
  return r;
}

inline void write_nodal_csv(std::span<const NodalReport> rows, std::ostream& out) {
  out << "shape_id,N,lambda,real_zeros,annulus_zeros,ratio,epsilon\n";
  char buf[160];
  for (const auto& r : rows) {
    out << '"' << r.shape_id << "\"," << r.n << ',';
    std::snprintf(buf, sizeof buf, "%.17g,%d,", r.lambda, r.real_zeros);
    out << buf;
    if (r.annulus_zeros) out << *r.annulus_zeros;
    std::snprintf(buf, sizeof buf, ",%.17g,%.17g\n", r.ratio, r.epsilon);
    out << buf;
  }
}

struct NodalBoundRow {
  double lambda = 0.0;
  int zeros = 0;
  double ratio = 0.0;
  double running_max = 0.0;
};

struct NodalBoundReport {
  std::vector<NodalBoundRow> rows;  // ordered by decreasing |lambda|
  double empirical_constant = 0.0;
  bool super_logarithmic = false;  // ratios in the smallest-|lambda| third exceed the largest third by > 25%
};

inline NodalBoundReport nodal_bound_report(std::vector<std::pair<double, int>> pairs) {
  std::vector<std::pair<double, int>> use;
  for (auto p : pairs)
    if (std::abs(p.first) > 1e-10 && std::abs(p.first) < 1.0) use.push_back(p);
  if (use.size() < 3) throw InvalidArgument("nodal_bound_report: need at least 3 eigenpairs with |lambda| in (1e-10, 1)");
  std::stable_sort(use.begin(), use.end(), [](auto a, auto b) { return std::abs(a.first) > std::abs(b.first); });
  NodalBoundReport rep;
  for (auto [l, z] : use) {
    NodalBoundRow row{l, z, z / std::abs(std::log(std::abs(l))), 0.0};
    rep.empirical_constant = std::max(rep.empirical_constant, row.ratio);
    row.running_max = rep.empirical_constant;
    rep.rows.push_back(row);
  }
  const std::size_t third = std::max<std::size_t>(1, rep.rows.size() / 3);
  double head = 0.0, tail = 0.0;
  for (std::size_t k = 0; k < third; ++k) {
    head += rep.rows[k].ratio;
    tail += rep.rows[rep.rows.size() - 1 - k].ratio;
  }
  rep.super_logarithmic = tail > 1.25 * head;
  return rep;
}

inline NodalBoundReport nodal_bound_report(std::span<const NodalReport> reports) {
  std::vector<std::pair<double, int>> pairs;
  for (const auto& r : reports) pairs.emplace_back(r.lambda, r.real_zeros);
  return nodal_bound_report(std::move(pairs));
}

inline constexpr double orthogonality_diameter = 0.9;

struct SignOrthogonalityReport {
  double lambda = 0.0;
  double min_value = 0.0;
  double max_value = 0.0;
  bool constant = false;        // the -1 eigenpair, exempt from both checks
  bool both_signs = false;
  double s1_inner = 0.0;        // |<e, S1>| / (||e|| ||S1||) in L2(ds) of the rescaled curve
  double equilibrium_inner = 0.0;  // |<e, S^{-1}1>| / (||e|| ||S^{-1}1||)
  bool s1_positive = false;
  bool diameter_warning = false;
  bool sign_ok = true;
  bool orthogonality_ok = true;
};

struct SingleLayerContext {
  Curve2D scaled;
  Eigen::VectorXd weights;  // h |q'| on the rescaled curve
  Eigen::VectorXd s1;
  Eigen::VectorXd equilibrium;  // S^{-1} 1
  bool diameter_warning = false;
};

// Builds S on the curve rescaled to diameter 0.9; shared by all eigenpairs of one spectrum.
inline SingleLayerContext single_layer_context(const Curve2D& curve, int n) {
  SingleLayerContext ctx{curve.scaled(orthogonality_diameter / curve.diameter()), {}, {}, {}, false};
  const double h = two_pi / n;
  ctx.weights.resize(n);
  for (int j = 0; j < n; ++j) ctx.weights[j] = h * ctx.scaled.speed(two_pi * j / n);
  const Eigen::MatrixXd s = assemble_slp_2d(ctx.scaled, n);
  ctx.s1 = s * Eigen::VectorXd::Ones(n);
  ctx.diameter_warning = ctx.scaled.diameter() >= 1.0;
  ctx.equilibrium = s.partialPivLu().solve(Eigen::VectorXd::Ones(n));
  return ctx;
}

inline SignOrthogonalityReport sign_and_orthogonality_check(const SingleLayerContext& ctx, const Eigenpair& ep,
                                                            bool is_constant, double tol = 1e-6) {
  SignOrthogonalityReport r;
  r.lambda = ep.lambda;
  r.constant = is_constant;
  r.min_value = ep.values.minCoeff();
  r.max_value = ep.values.maxCoeff();
  r.both_signs = r.min_value < 0.0 && r.max_value > 0.0;
  r.s1_positive = ctx.s1.minCoeff() > 0.0;
  r.diameter_warning = ctx.diameter_warning;
  const auto& w = ctx.weights;
  auto inner = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return (w.array() * a.array() * b.array()).sum(); };
  const double ne = std::sqrt(inner(ep.values, ep.values));
  r.s1_inner = std::abs(inner(ep.values, ctx.s1)) / (ne * std::sqrt(inner(ctx.s1, ctx.s1)));
  r.equilibrium_inner =
      std::abs(inner(ep.values, ctx.equilibrium)) / (ne * std::sqrt(inner(ctx.equilibrium, ctx.equilibrium)));
  if (!is_constant) {
    r.sign_ok = std::abs(ep.lambda) < 1e-6 || r.both_signs;
    r.orthogonality_ok = r.s1_inner <= tol;
  }
  return r;
}

inline SignOrthogonalityReport sign_and_orthogonality_check(const Curve2D& curve, const Eigenpair& ep, bool is_constant) {
  return sign_and_orthogonality_check(single_layer_context(curve, static_cast<int>(ep.values.size())), ep, is_constant);
}

}  // namespace dlp
