#pragma once

// Nystrom discretizations of the double layer potential
//
//   (K psi)(x) = int psi(y) d/dnu_y E(x, y) ds_y,
//   E = (1/pi) log(1/|x-y|) in 2D,  E = 1/(2 pi |x-y|) in 3D,
//
// and of the 2D single layer potential S with kernel E itself.
//
// 2D: the kernel is continuous (diagonal -kappa/(2pi)), so the plain
// trapezoid rule on the 2pi-periodic parameter is spectrally accurate.
// 3D: Gauss-Legendre in cos(theta) times uniform phi; the diagonal is set so
// that every row sums to -1, the discrete form of K1 = -1.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dlp/common.hpp"
#include "dlp/geometry.hpp"
#include "dlp/quadrature.hpp"

namespace dlp {

struct SurfaceGrid {
  int n_theta = 0;
  int n_phi = 0;
  std::vector<double> cos_theta;   // Gauss-Legendre nodes
  std::vector<double> gl_weights;  // matching weights

  int index(int i_theta, int j_phi) const { return i_theta * n_phi + j_phi; }
  double theta(int i) const { return std::acos(cos_theta[i]); }
  double phi(int j) const { return two_pi * j / n_phi; }
};

struct OperatorMatrix {
  Eigen::MatrixXd entries;   // A, eigenvalue-faithful
  Eigen::VectorXd nodes;     // parameter t_j (2D); flat theta-major index (3D)
  Eigen::VectorXd weights;   // w_j = h |q'(t_j)| (2D), product weight * area factor (3D)
  int dimension = 2;
  std::string shape_id;
  std::optional<SurfaceGrid> grid;
  std::vector<std::string> warnings;

  Eigen::Index size() const { return entries.rows(); }

  // D^{1/2} A D^{-1/2} with D = diag(w): the L2(ds)-isometric representative.
  Eigen::MatrixXd symmetrized() const {
    const Eigen::VectorXd s = weights.array().sqrt();
    return s.asDiagonal() * entries * s.cwiseInverse().asDiagonal();
  }
};

// (1/pi) d/dnu_y log(1/|x-y|) with x = q(s), y = q(t); at s = t the limit -kappa(t)/(2pi).
inline double dlp_kernel_2d(const Curve2D& curve, double s, double t) {
  const double d = wrap_angle(s - t);
  if (d == 0.0) return -curve.curvature(t) / two_pi;
  const cplx chord = curve.chord(cplx(s, 0.0), cplx(t, 0.0));
  const cplx dq = curve.derivative(t, 1);
  // (x - y) . nu_y with nu_y = -i q'(t)/|q'(t)|
  const double num = -(chord * std::conj(dq)).imag() / std::abs(dq);
  return num / (pi * std::norm(chord));
}

inline Eigen::VectorXd periodic_nodes(int n) {
  Eigen::VectorXd t(n);
  for (int j = 0; j < n; ++j) t[j] = two_pi * j / n;
  return t;
}

inline OperatorMatrix assemble_dlp_2d(const Curve2D& curve, int n) {
  if (n < 16 || n % 2 != 0) throw InvalidArgument("assemble_dlp_2d: N must be even and >= 16, got " + std::to_string(n));
  const double h = two_pi / n;
  OperatorMatrix m;
  m.dimension = 2;
  m.shape_id = curve.id();
  m.nodes = periodic_nodes(n);
  m.weights.resize(n);
  std::vector<cplx> pos(n), dq(n);
  std::vector<double> sp(n), kappa(n);
  for (int j = 0; j < n; ++j) {
    const double t = m.nodes[j];
    pos[j] = curve.position(t);
    dq[j] = curve.derivative(t, 1);
    sp[j] = std::abs(dq[j]);
    kappa[j] = curve.curvature(t);
    m.weights[j] = h * sp[j];
  }
  m.entries.resize(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      double kv;
      if (i == j) {
        kv = -kappa[j] / two_pi;
      } else {
        const int gap = std::min(std::abs(i - j), n - std::abs(i - j));
        const cplx chord = (gap * h < 0.1) ? curve.chord(m.nodes[i], m.nodes[j]) : pos[i] - pos[j];
        kv = -(chord * std::conj(dq[j])).imag() / (sp[j] * pi * std::norm(chord));
      }
      m.entries(i, j) = h * kv * sp[j];
    }
  }
  return m;
}

// Matrix of S at the nodes: S psi ~ M (psi_j), splitting
// log|q(s)-q(t)| = 1/2 log(4 sin^2((s-t)/2)) + smooth remainder and integrating
// the logarithmic part with the exact trigonometric weights.
inline Eigen::MatrixXd assemble_slp_2d(const Curve2D& curve, int n) {
  if (n < 16 || n % 2 != 0) throw InvalidArgument("assemble_slp_2d: N must be even and >= 16, got " + std::to_string(n));
  const double h = two_pi / n;
  const auto r = log_sine_weights(n);
  const Eigen::VectorXd t = periodic_nodes(n);
  std::vector<cplx> pos(n);
  std::vector<double> sp(n);
  for (int j = 0; j < n; ++j) {
    pos[j] = curve.position(t[j]);
    sp[j] = curve.speed(t[j]);
  }
  Eigen::MatrixXd m(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int k = std::abs(i - j);
      double rem;
      if (i == j) {
        rem = std::log(sp[i]);
      } else {
        const int gap = std::min(k, n - k);
        const double chord = std::abs(gap * h < 0.1 ? curve.chord(t[i], t[j]) : pos[i] - pos[j]);
        rem = std::log(chord / std::abs(2.0 * std::sin(0.5 * (t[i] - t[j]))));
      }
      m(i, j) = -(0.5 * r[k] + h * rem) * sp[j] / pi;
    }
  }
  return m;
}

struct SingleLayerResult {
  Eigen::VectorXd values;
  bool diameter_warning = false;  // diameter >= 1: positivity of S1 not guaranteed
};

inline SingleLayerResult apply_slp_2d(const Curve2D& curve, const Eigen::VectorXd& density) {
  const int n = static_cast<int>(density.size());
  if (n < 16 || n % 2 != 0) throw InvalidArgument("apply_slp_2d: density must have an even length >= 16");
  SingleLayerResult out;
  out.values = assemble_slp_2d(curve, n) * density;
  out.diameter_warning = curve.diameter() >= 1.0;
  return out;
}

inline OperatorMatrix assemble_dlp_3d(const Surface3D& surface, int n_theta, int n_phi) {
  if (n_theta < 16) throw InvalidArgument("assemble_dlp_3d: n_theta must be >= 16, got " + std::to_string(n_theta));
  if (n_phi < 8) throw InvalidArgument("assemble_dlp_3d: n_phi must be >= 8, got " + std::to_string(n_phi));
  const auto gl = gauss_legendre(n_theta);
  OperatorMatrix m;
  m.dimension = 3;
  m.shape_id = surface.id();
  m.grid = SurfaceGrid{n_theta, n_phi, gl.nodes, gl.weights};
  if (n_phi < 2 * n_theta) m.warnings.push_back("n_phi < 2 n_theta: azimuthal resolution below recommendation");
  const int n = n_theta * n_phi;
  const double dphi = two_pi / n_phi;

  std::vector<Eigen::Vector3d> pts(n), nrm(n);
  m.nodes.resize(n);
  m.weights.resize(n);
  for (int i = 0; i < n_theta; ++i) {
    const double th = std::acos(gl.nodes[i]);
    for (int j = 0; j < n_phi; ++j) {
      const int idx = i * n_phi + j;
      const double ph = dphi * j;
      const Eigen::Vector3d red = surface.reduced_normal(th, ph);
      const double len = red.norm();
      if (!(len > 0.0)) throw InvalidArgument("assemble_dlp_3d: degenerate area element at node " + std::to_string(idx));
      pts[idx] = surface.point(th, ph);
      nrm[idx] = red / len;
      // dA = sin(theta) |red| dtheta dphi = |red| d(cos theta) dphi
      m.weights[idx] = gl.weights[i] * dphi * len;
      m.nodes[idx] = idx;
    }
  }
  m.entries.resize(n, n);
  constexpr double scale = 1.0 / two_pi;
  for (int j = 0; j < n; ++j) {
    const double wj = m.weights[j] * scale;
    for (int i = 0; i < n; ++i) {
      if (i == j) continue;
      const Eigen::Vector3d d = pts[i] - pts[j];
      const double r2 = d.squaredNorm();
      m.entries(i, j) = wj * d.dot(nrm[j]) / (r2 * std::sqrt(r2));
    }
  }
  for (int i = 0; i < n; ++i) {
    m.entries(i, i) = 0.0;
    m.entries(i, i) = -1.0 - m.entries.row(i).sum();
  }
  return m;
}

// Flat binary: one int64 N, then N*N row-major float64, native byte order.
inline void write_matrix_binary(const OperatorMatrix& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  const std::int64_t n = m.size();
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const double v = m.entries(i, j);
      out.write(reinterpret_cast<const char*>(&v), sizeof v);
    }
  if (!out) throw IoError("write failed for " + path.string());
}

inline Eigen::MatrixXd read_matrix_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::int64_t n = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  if (!in || n < 0) throw IoError("corrupt matrix header in " + path.string());
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) in.read(reinterpret_cast<char*>(&a(i, j)), sizeof(double));
  if (!in) throw IoError("truncated matrix data in " + path.string());
  return a;
}

inline void write_matrix_csv(const OperatorMatrix& m, std::ostream& out) {
  char buf[32];
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    for (Eigen::Index j = 0; j < m.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m.entries(i, j));
      if (j) out << ',';
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace dlp
