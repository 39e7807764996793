#pragma once

// Dense eigen/singular value contract on top of LAPACK.
//
// Eigenvalues come back ordered by descending modulus |l0| >= |l1| >= ...
// (ties broken by real then imaginary part, so the order is deterministic),
// each with the relative residual ||A v - l v||_2 / ||A||_F of its unit
// eigenvector. Eigenvalues with |Im l| <= 1e-8 max(1, |l|) are flagged real;
// the others are kept, never dropped.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "json.hpp"

#include "dlp/common.hpp"
#include "dlp/operators.hpp"

namespace dlp {

inline constexpr double residual_tolerance = 1e-10;

enum class SolverStatus { ok, convergence_failure, residual_exceeded };

inline const char* to_string(SolverStatus s) {
  switch (s) {
    case SolverStatus::ok: return "ok";
    case SolverStatus::convergence_failure: return "convergence_failure";
    case SolverStatus::residual_exceeded: return "residual_exceeded";
  }
  return "unknown";
}

inline bool is_real_eigenvalue(cplx l) { return std::abs(l.imag()) <= 1e-8 * std::max(1.0, std::abs(l)); }

struct Spectrum {
  std::vector<cplx> eigenvalues;
  std::vector<bool> real_flags;
  Eigen::MatrixXcd eigenvectors;  // column j belongs to eigenvalues[j]; empty if not requested
  std::vector<double> residuals;
  std::vector<double> singular_values;
  std::string shape_id;
  int n = 0;
  SolverStatus status = SolverStatus::ok;
  std::string message;
  // Index of the eigenvalue -1 when it is known without eigenvectors (closed-form spectra).
  std::optional<std::size_t> constant_index;

  std::size_t size() const { return eigenvalues.size(); }
  bool has_vectors() const { return eigenvectors.cols() > 0; }

  double residual_max() const {
    double r = 0.0;
    for (double v : residuals) r = std::max(r, v);
    return r;
  }

  // Real eigenvector of a real-flagged eigenpair.
  Eigen::VectorXd real_vector(std::size_t j) const {
    if (!has_vectors()) throw InvalidArgument("spectrum carries no eigenvectors");
    if (!real_flags.at(j)) throw InvalidArgument("eigenpair " + std::to_string(j) + " is not real");
    Eigen::VectorXcd v = eigenvectors.col(j);
    // rotate so the largest component is real
    Eigen::Index k;
    v.cwiseAbs().maxCoeff(&k);
    const cplx phase = std::abs(v[k]) > 0 ? std::conj(v[k]) / std::abs(v[k]) : cplx(1.0, 0.0);
    return (v * phase).real();
  }

  std::vector<double> moduli() const {
    std::vector<double> out(eigenvalues.size());
    std::transform(eigenvalues.begin(), eigenvalues.end(), out.begin(), [](cplx l) { return std::abs(l); });
    return out;
  }
};

struct EigenOptions {
  bool vectors = true;
};

inline Spectrum eigenpairs(const Eigen::MatrixXd& a, EigenOptions opts = {}) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  if (a.cols() != a.rows()) throw InvalidArgument("eigenpairs: matrix must be square");
  if (!a.allFinite()) throw InvalidArgument("eigenpairs: matrix has non-finite entries");
  Spectrum sp;
  sp.n = n;
  if (n == 0) return sp;

  Eigen::MatrixXd work = a;
  std::vector<double> wr(n), wi(n);
  Eigen::MatrixXd vr;
  if (opts.vectors) vr.resize(n, n);
  const lapack_int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', opts.vectors ? 'V' : 'N', n, work.data(), n,
                                        wr.data(), wi.data(), nullptr, 1, opts.vectors ? vr.data() : nullptr, n);
  if (info < 0) throw SolverFailure("dgeev: illegal argument " + std::to_string(-info));

  // On failure only eigenvalues info..n-1 are valid and no eigenvectors are returned.
  const lapack_int first = info > 0 ? info : 0;
  if (info > 0) {
    sp.status = SolverStatus::convergence_failure;
    sp.message = "dgeev: QR iteration failed; " + std::to_string(first) + " eigenvalues did not converge";
    opts.vectors = false;
  }

  std::vector<cplx> vals;
  Eigen::MatrixXcd vecs;
  if (opts.vectors) vecs.resize(n, n);
  for (lapack_int j = first; j < n; ++j) {
    vals.emplace_back(wr[j], wi[j]);
    if (!opts.vectors) continue;
    if (wi[j] == 0.0) {
      vecs.col(j) = vr.col(j).cast<cplx>();
    } else if (wi[j] > 0.0 && j + 1 < n) {
      vecs.col(j) = vr.col(j).cast<cplx>() + cplx(0.0, 1.0) * vr.col(j + 1).cast<cplx>();
      vecs.col(j + 1) = vecs.col(j).conjugate();
    }
  }

  std::vector<std::size_t> order(vals.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    const double mx = std::abs(vals[x]), my = std::abs(vals[y]);
    if (mx != my) return mx > my;
    if (vals[x].real() != vals[y].real()) return vals[x].real() < vals[y].real();
    return vals[x].imag() < vals[y].imag();
  });

  sp.eigenvalues.resize(vals.size());
  sp.real_flags.resize(vals.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    sp.eigenvalues[k] = vals[order[k]];
    sp.real_flags[k] = is_real_eigenvalue(vals[order[k]]);
  }
  if (!opts.vectors) return sp;

  sp.eigenvectors.resize(n, n);
  for (std::size_t k = 0; k < order.size(); ++k) {
    Eigen::VectorXcd v = vecs.col(static_cast<Eigen::Index>(order[k]));
    v /= v.norm();
    sp.eigenvectors.col(static_cast<Eigen::Index>(k)) = v;
  }

  // A V - V diag(l), real and imaginary parts through real products.
  const double fro = a.norm();
  const Eigen::MatrixXd av_re = a * sp.eigenvectors.real();
  const Eigen::MatrixXd av_im = a * sp.eigenvectors.imag();
  sp.residuals.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::VectorXcd lv = sp.eigenvalues[k] * sp.eigenvectors.col(k);
    const double re = (av_re.col(k) - lv.real()).squaredNorm();
    const double im = (av_im.col(k) - lv.imag()).squaredNorm();
    sp.residuals[k] = fro > 0.0 ? std::sqrt(re + im) / fro : 0.0;
  }
  if (sp.residual_max() > residual_tolerance) {
    sp.status = SolverStatus::residual_exceeded;
    char buf[96];
    std::snprintf(buf, sizeof buf, "max relative residual %.3e exceeds %.0e", sp.residual_max(), residual_tolerance);
    sp.message = buf;
  }
  return sp;
}

inline Spectrum eigenpairs(const OperatorMatrix& m, EigenOptions opts = {}) {
  Spectrum sp = eigenpairs(m.entries, opts);
  sp.shape_id = m.shape_id;
  return sp;
}

inline std::vector<double> singular_values(const Eigen::MatrixXd& a) {
  if (!a.allFinite()) throw InvalidArgument("singular_values: matrix has non-finite entries");
  const lapack_int rows = static_cast<lapack_int>(a.rows()), cols = static_cast<lapack_int>(a.cols());
  std::vector<double> s(std::min(rows, cols));
  if (s.empty()) return s;
  Eigen::MatrixXd work = a;
  const lapack_int info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'N', rows, cols, work.data(), rows, s.data(), nullptr, 1,
                                         nullptr, 1);
  if (info != 0) throw SolverFailure("dgesdd failed with info=" + std::to_string(info));
  for (double& v : s) v = std::max(v, 0.0);
  std::sort(s.begin(), s.end(), std::greater<>());
  return s;
}

// Singular values of the symmetrized twin, i.e. of K on L2(ds).
inline std::vector<double> singular_values(const OperatorMatrix& m) { return singular_values(m.symmetrized()); }

inline Spectrum compute_spectrum(const OperatorMatrix& m, EigenOptions opts = {}) {
  Spectrum sp = eigenpairs(m, opts);
  sp.singular_values = singular_values(m);
  return sp;
}

inline double schatten_sum(std::span<const double> values, double r) {
  if (!(r >= 1.0)) throw InvalidArgument("schatten_sum: exponent must be >= 1");
  double sum = 0.0;
  for (double a : values) sum += std::pow(std::abs(a), r);
  return sum;
}

struct EigenCluster {
  cplx center;
  int multiplicity = 0;
  std::vector<std::size_t> members;
};

// Groups eigenvalues whose consecutive distance (sorted by real part) is below
// rel_gap * max(1e-12, |value|). Suggested: 1e-6 for 2D spectra, 1e-2 for 3D.
inline std::vector<EigenCluster> cluster_eigenvalues(std::span<const cplx> values, double rel_gap) {
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto x, auto y) {
    return values[x].real() != values[y].real() ? values[x].real() < values[y].real()
                                                 : values[x].imag() < values[y].imag();
  });
  std::vector<EigenCluster> out;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const cplx v = values[idx[k]];
    if (!out.empty()) {
      const cplx prev = values[out.back().members.back()];
      if (std::abs(v - prev) <= rel_gap * std::max(1e-12, std::abs(v))) {
        out.back().members.push_back(idx[k]);
        continue;
      }
    }
    out.push_back({v, 0, {idx[k]}});
  }
  for (auto& c : out) {
    cplx sum(0.0, 0.0);
    for (auto m : c.members) sum += values[m];
    c.multiplicity = static_cast<int>(c.members.size());
    c.center = sum / double(c.multiplicity);
  }
  return out;
}

inline nlohmann::json to_json(const Spectrum& sp) {
  nlohmann::json j;
  j["shape"] = sp.shape_id;
  j["N"] = sp.n;
  auto& ev = j["eigenvalues"] = nlohmann::json::array();
  for (cplx l : sp.eigenvalues) ev.push_back({l.real(), l.imag()});
  j["singular_values"] = sp.singular_values;
  if (sp.residuals.empty())
    j["residual_max"] = nullptr;
  else
    j["residual_max"] = sp.residual_max();
  j["status"] = to_string(sp.status);
  return j;
}

// One row per eigenvalue: index,re,im,alpha,shape_id,N (alpha empty past the singular values).
inline void write_spectrum_csv(const Spectrum& sp, std::ostream& out) {
  out << "index,re,im,alpha,shape_id,N\n";
  char buf[128];
  for (std::size_t j = 0; j < sp.eigenvalues.size(); ++j) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,", j, sp.eigenvalues[j].real(), sp.eigenvalues[j].imag());
    out << buf;
    if (j < sp.singular_values.size()) {
      std::snprintf(buf, sizeof buf, "%.17g", sp.singular_values[j]);
      out << buf;
    }
    out << ",\"" << sp.shape_id << "\"," << sp.n << '\n';
  }
}

}  // namespace dlp
