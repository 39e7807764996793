#pragma once

// Closed parametrized curves in the plane and axis-aligned ellipsoids in space.
//
// Every curve is stored as a finite complex Fourier series
//
//     q(t) = sum_k a_k e^{ikt},    t in [0, 2pi),
//
// so positions, derivatives and their holomorphic continuations to complex t
// are all closed form. Circles and ellipses are the one- and two-term cases.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dlp/common.hpp"

namespace dlp {

enum class CurveKind { circle, ellipse, fourier };

struct FourierTerm {
  int k = 0;
  cplx a;
};

struct CurveFrame {
  Eigen::Vector2d point;
  Eigen::Vector2d normal;  // unit, outward
  double speed = 0.0;      // |q'(t)|
  double curvature = 0.0;
};

namespace detail {

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// Proper intersection test for segments p1p2 and p3p4 (shared endpoints excluded by caller).
inline bool segments_intersect(cplx p1, cplx p2, cplx p3, cplx p4) {
  auto cross = [](cplx u, cplx v) { return u.real() * v.imag() - u.imag() * v.real(); };
  const double d1 = cross(p4 - p3, p1 - p3);
  const double d2 = cross(p4 - p3, p2 - p3);
  const double d3 = cross(p2 - p1, p3 - p1);
  const double d4 = cross(p2 - p1, p4 - p1);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

}  // namespace detail

class Curve2D {
 public:
  static constexpr int validation_points = 4096;

  static Curve2D circle(double radius) {
    if (!(radius > 0.0) || !std::isfinite(radius))
      throw InvalidShape("circle: radius must be positive, got R=" + detail::format_double(radius));
    Curve2D c(CurveKind::circle, {{1, cplx(radius, 0.0)}});
    c.params_ = {radius};
    c.validate();
    return c;
  }

  // x = c/2 cosh R cos t, y = c/2 sinh R sin t.
  static Curve2D ellipse(double c, double R) {
    if (!(c > 0.0) || !std::isfinite(c))
      throw InvalidShape("ellipse: c must be positive, got c=" + detail::format_double(c));
    if (!(R > 0.0) || !std::isfinite(R))
      throw InvalidShape("ellipse: R must be positive, got R=" + detail::format_double(R));
    Curve2D e(CurveKind::ellipse,
              {{-1, cplx(0.25 * c * std::exp(-R), 0.0)}, {1, cplx(0.25 * c * std::exp(R), 0.0)}});
    e.params_ = {c, R};
    e.validate();
    return e;
  }

  static Curve2D fourier(std::vector<FourierTerm> terms) {
    if (terms.empty()) throw InvalidShape("fourier: coefficient list is empty");
    std::sort(terms.begin(), terms.end(), [](const auto& x, const auto& y) { return x.k < y.k; });
    for (std::size_t i = 0; i < terms.size(); ++i) {
      if (!std::isfinite(terms[i].a.real()) || !std::isfinite(terms[i].a.imag()))
        throw InvalidShape("fourier: non-finite coefficient at k=" + std::to_string(terms[i].k));
      if (i > 0 && terms[i].k == terms[i - 1].k)
        throw InvalidShape("fourier: duplicate coefficient index k=" + std::to_string(terms[i].k));
    }
    Curve2D f(CurveKind::fourier, std::move(terms));
    f.validate();
    return f;
  }

  CurveKind kind() const { return kind_; }
  const std::vector<FourierTerm>& terms() const { return terms_; }

  std::string id() const {
    std::ostringstream os;
    switch (kind_) {
      case CurveKind::circle:
        os << "circle(R=" << detail::format_double(params_[0]) << ")";
        break;
      case CurveKind::ellipse:
        os << "ellipse(c=" << detail::format_double(params_[0])
           << ",R=" << detail::format_double(params_[1]) << ")";
        break;
      case CurveKind::fourier:
        os << "fourier(";
        for (std::size_t i = 0; i < terms_.size(); ++i) {
          if (i) os << ";";
          os << terms_[i].k << ":" << detail::format_double(terms_[i].a.real()) << ","
             << detail::format_double(terms_[i].a.imag());
        }
        os << ")";
        break;
    }
    return os.str();
  }

  // Holomorphic continuation of q and its derivatives to complex t.
  cplx derivative(cplx t, int order = 0) const {
    cplx sum(0.0, 0.0);
    for (const auto& [k, a] : terms_) sum += a * ipow(k, order) * std::exp(cplx(0.0, k) * t);
    return sum;
  }
  cplx position(cplx t) const { return derivative(t, 0); }

  // Continuation of the conjugate parametrization: q*(t) = sum conj(a_k) e^{-ikt}.
  cplx conj_derivative(cplx t, int order = 0) const {
    cplx sum(0.0, 0.0);
    for (const auto& [k, a] : terms_) sum += std::conj(a) * ipow(-k, order) * std::exp(cplx(0.0, -k) * t);
    return sum;
  }
  cplx conj_position(cplx t) const { return conj_derivative(t, 0); }

  // q(s) - q(t) without cancellation when s is close to t.
  cplx chord(cplx s, cplx t) const {
    const cplx d = reduce(s - t);
    if (std::abs(d) >= near_band) return position(t + d) - position(t);
    const cplx mid = t + 0.5 * d;
    cplx sum(0.0, 0.0);
    for (const auto& [k, a] : terms_)
      if (k != 0) sum += a * std::exp(cplx(0.0, k) * mid) * cplx(0.0, 2.0) * std::sin(0.5 * double(k) * d);
    return sum;
  }

  // q*(s) - q*(t), same treatment.
  cplx conj_chord(cplx s, cplx t) const {
    const cplx d = reduce(s - t);
    if (std::abs(d) >= near_band) return conj_position(t + d) - conj_position(t);
    const cplx mid = t + 0.5 * d;
    cplx sum(0.0, 0.0);
    for (const auto& [k, a] : terms_)
      if (k != 0)
        sum += std::conj(a) * std::exp(cplx(0.0, -k) * mid) * cplx(0.0, -2.0) * std::sin(0.5 * double(k) * d);
    return sum;
  }

  double speed(double t) const { return std::abs(derivative(t, 1)); }

  double curvature(double t) const {
    const cplx d1 = derivative(t, 1), d2 = derivative(t, 2);
    const double sp = std::abs(d1);
    return (std::conj(d1) * d2).imag() / (sp * sp * sp);
  }

  CurveFrame frame(double t) const {
    const cplx p = position(t), d1 = derivative(t, 1), d2 = derivative(t, 2);
    const double sp = std::abs(d1);
    const cplx n = cplx(0.0, -1.0) * d1 / sp;
    CurveFrame f;
    f.point = {p.real(), p.imag()};
    f.normal = {n.real(), n.imag()};
    f.speed = sp;
    f.curvature = (std::conj(d1) * d2).imag() / (sp * sp * sp);
    return f;
  }

  Curve2D scaled(double factor) const {
    if (!(factor > 0.0)) throw InvalidArgument("scale factor must be positive");
    Curve2D c = *this;
    for (auto& term : c.terms_) term.a *= factor;
    if (kind_ == CurveKind::circle) c.params_[0] *= factor;
    if (kind_ == CurveKind::ellipse) c.params_[0] *= factor;
    return c;
  }

  // Maximum distance between two points of the curve, sampled on 2048 points.
  double diameter() const {
    constexpr int n = 2048;
    std::vector<cplx> pts(n);
    for (int i = 0; i < n; ++i) pts[i] = position(two_pi * i / n);
    double best = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) best = std::max(best, std::abs(pts[i] - pts[j]));
    return best;
  }

  double signed_area() const {
    constexpr int n = validation_points;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double t = two_pi * i / n;
      sum += (std::conj(position(t)) * derivative(t, 1)).imag();
    }
    return 0.5 * sum * two_pi / n;
  }

 private:
  Curve2D(CurveKind kind, std::vector<FourierTerm> terms) : kind_(kind), terms_(std::move(terms)) {}

  static constexpr double near_band = 0.1;

  static cplx ipow(int k, int order) {
    cplx r(1.0, 0.0);
    for (int i = 0; i < order; ++i) r *= cplx(0.0, double(k));
    return r;
  }

  // Shift the real part of a parameter difference into (-pi, pi].
  static cplx reduce(cplx d) { return {wrap_angle(d.real()), d.imag()}; }

  void validate() const {
    constexpr int n = validation_points;
    std::vector<cplx> pts(n);
    double max_speed = 0.0, min_speed = std::numeric_limits<double>::infinity();
    double t_min = 0.0;
    for (int i = 0; i < n; ++i) {
      const double t = two_pi * i / n;
      pts[i] = position(t);
      const double sp = speed(t);
      max_speed = std::max(max_speed, sp);
      if (sp < min_speed) {
        min_speed = sp;
        t_min = t;
      }
    }
    if (!(min_speed > 1e-10 * max_speed) || max_speed == 0.0)
      throw InvalidShape(id() + ": parametrization is not regular, |q'(t)| vanishes near t=" +
                         detail::format_double(t_min));
    if (!(signed_area() > 0.0))
      throw InvalidShape(id() + ": curve is not positively oriented (signed area " +
                         detail::format_double(signed_area()) + ")");

    // Sweep over segments sorted by their left x-extent; only overlapping boxes are tested.
    struct Seg {
      double x0, x1, y0, y1;
      int i;
    };
    std::vector<Seg> segs(n);
    for (int i = 0; i < n; ++i) {
      const cplx a = pts[i], b = pts[(i + 1) % n];
      segs[i] = {std::min(a.real(), b.real()), std::max(a.real(), b.real()), std::min(a.imag(), b.imag()),
                 std::max(a.imag(), b.imag()), i};
    }
    std::sort(segs.begin(), segs.end(), [](const Seg& u, const Seg& v) { return u.x0 < v.x0; });
    for (int u = 0; u < n; ++u) {
      for (int v = u + 1; v < n && segs[v].x0 <= segs[u].x1; ++v) {
        const int i = segs[u].i, j = segs[v].i;
        const int gap = std::abs(i - j);
        if (gap <= 1 || gap == n - 1) continue;
        if (segs[v].y0 > segs[u].y1 || segs[u].y0 > segs[v].y1) continue;
        if (detail::segments_intersect(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n]))
          throw InvalidShape(id() + ": curve self-intersects near t=" + detail::format_double(two_pi * i / n) +
                             " and t=" + detail::format_double(two_pi * j / n));
      }
    }
  }

  CurveKind kind_;
  std::vector<FourierTerm> terms_;
  std::vector<double> params_;
};

// ---------------------------------------------------------------------------

enum class SurfaceKind { sphere, ellipsoid };

struct SurfaceFrame {
  Eigen::Vector3d point;
  Eigen::Vector3d normal;  // unit, outward
  double area_element = 0.0;  // |r_theta x r_phi|
};

// Axis-aligned ellipsoid x^2/a^2 + y^2/b^2 + z^2/c^2 = 1 parametrized by
// r(theta, phi) = (a sin(theta) cos(phi), b sin(theta) sin(phi), c cos(theta)).
class Surface3D {
 public:
  static Surface3D sphere(double radius) {
    if (!(radius > 0.0) || !std::isfinite(radius))
      throw InvalidShape("sphere: radius must be positive, got R=" + detail::format_double(radius));
    return Surface3D(SurfaceKind::sphere, radius, radius, radius);
  }

  static Surface3D ellipsoid(double a, double b, double c) {
    for (auto [name, v] : {std::pair{"a", a}, std::pair{"b", b}, std::pair{"c", c}})
      if (!(v > 0.0) || !std::isfinite(v))
        throw InvalidShape(std::string("ellipsoid: semi-axis ") + name + " must be positive, got " +
                           detail::format_double(v));
    Surface3D s(SurfaceKind::ellipsoid, a, b, c);
    s.validate();
    return s;
  }

  SurfaceKind kind() const { return kind_; }
  double a() const { return a_; }
  double b() const { return b_; }
  double c() const { return c_; }
  bool is_sphere() const { return a_ == b_ && b_ == c_; }

  std::string id() const {
    if (kind_ == SurfaceKind::sphere) return "sphere(R=" + detail::format_double(a_) + ")";
    return "ellipsoid(a=" + detail::format_double(a_) + ",b=" + detail::format_double(b_) +
           ",c=" + detail::format_double(c_) + ")";
  }

  Eigen::Vector3d point(double theta, double phi) const {
    const double st = std::sin(theta);
    return {a_ * st * std::cos(phi), b_ * st * std::sin(phi), c_ * std::cos(theta)};
  }

  // (r_theta x r_phi) / sin(theta): outward, smooth through the poles.
  Eigen::Vector3d reduced_normal(double theta, double phi) const {
    const double st = std::sin(theta);
    return {b_ * c_ * st * std::cos(phi), a_ * c_ * st * std::sin(phi), a_ * b_ * std::cos(theta)};
  }

  SurfaceFrame frame(double theta, double phi) const {
    const Eigen::Vector3d m = reduced_normal(theta, phi);
    const double len = m.norm();
    return {point(theta, phi), m / len, std::sin(theta) * len};
  }

 private:
  Surface3D(SurfaceKind kind, double a, double b, double c) : kind_(kind), a_(a), b_(b), c_(c) {}

  void validate() const {
    for (int i = 1; i < 64; ++i)
      for (int j = 0; j < 128; ++j) {
        const double th = pi * i / 64, ph = two_pi * j / 128;
        const SurfaceFrame f = frame(th, ph);
        if (!(f.point.dot(f.normal) > 0.0) || !(f.area_element > 0.0))
          throw InvalidShape(id() + ": outward normal check failed at theta=" + detail::format_double(th));
      }
  }

  SurfaceKind kind_;
  double a_, b_, c_;
};

}  // namespace dlp
