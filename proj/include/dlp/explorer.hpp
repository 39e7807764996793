#pragma once

// Shape families: ellipsoid cluster sums, the lambda floor, resumable sweeps
// over ellipsoid and ellipse grids, and the search for positive eigenvalues
// on oblate spheroids.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "dlp/analysis.hpp"
#include "dlp/common.hpp"
#include "dlp/geometry.hpp"
#include "dlp/operators.hpp"
#include "dlp/spectrum.hpp"

namespace dlp {

// ---------------------------------------------------------------- harmonic content

struct ModeContent {
  std::vector<double> degree_fractions;  // energy share of spherical-harmonic degree l, l = 0..lmax
  double high_m_fraction = 0.0;          // share at |m| > n_phi/4
  double high_degree_fraction = 0.0;     // share above degree lmax = n_theta/2
  bool resolved = false;
  int top_degree = -1;  // largest l with share >= 1e-3, -1 when unresolved
};

inline constexpr double resolution_threshold = 0.1;
inline constexpr double degree_share_floor = 1e-3;

// Projects grid functions (theta-major, index i*n_phi + j) onto spherical
// harmonics of the parameter sphere using the grid's own quadrature.
class HarmonicAnalyzer {
 public:
  explicit HarmonicAnalyzer(const SurfaceGrid& g) : g_(g), lmax_(g.n_theta / 2) {
    const int np = g.n_phi;
    dft_.resize(np, np);
    for (int j = 0; j < np; ++j)
      for (int m = 0; m < np; ++m) dft_(j, m) = std::polar(1.0, -two_pi * double(j) * m / np);
    ylm_.assign((lmax_ + 1) * (lmax_ + 1), std::vector<double>(g.n_theta));
    for (int l = 0; l <= lmax_; ++l)
      for (int m = 0; m <= l; ++m)
        for (int i = 0; i < g.n_theta; ++i) ylm_[l * (lmax_ + 1) + m][i] = std::sph_legendre(l, m, g.theta(i));
  }

  int lmax() const { return lmax_; }

  ModeContent analyze(const Eigen::VectorXcd& f) const {
    const int nt = g_.n_theta, np = g_.n_phi;
    if (f.size() != nt * np) throw InvalidArgument("HarmonicAnalyzer: vector does not match the grid");
    const Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> grid(f.data(), nt, np);
    const Eigen::MatrixXcd fh = grid * dft_;  // fh(i, m) = sum_j f_ij e^{-i m phi_j}
    const double dphi = two_pi / np;

    ModeContent c;
    double total = 0.0, high_m = 0.0;
    for (int i = 0; i < nt; ++i)
      for (int m = 0; m < np; ++m) {
        const double e = g_.gl_weights[i] * std::norm(fh(i, m)) * dphi / np;
        total += e;
        const int am = std::min(m, np - m);
        if (4 * am > np) high_m += e;
      }
    if (!(total > 0.0)) return c;
    c.high_m_fraction = high_m / total;

    c.degree_fractions.assign(lmax_ + 1, 0.0);
    double low = 0.0;
    for (int l = 0; l <= lmax_; ++l) {
      double el = 0.0;
      for (int m = -l; m <= l; ++m) {
        if (2 * std::abs(m) >= np) continue;
        const int col = (m % np + np) % np;
        const auto& p = ylm_[l * (lmax_ + 1) + std::abs(m)];
        cplx sum(0.0, 0.0);
        for (int i = 0; i < nt; ++i) sum += g_.gl_weights[i] * p[i] * fh(i, col);
        el += std::norm(sum * dphi);
      }
      c.degree_fractions[l] = el / total;
      low += el;
    }
    c.high_degree_fraction = std::max(0.0, 1.0 - low / total);
    c.resolved = c.high_m_fraction < resolution_threshold && c.high_degree_fraction < resolution_threshold;
    if (c.resolved)
      for (int l = lmax_; l >= 0; --l)
        if (c.degree_fractions[l] >= degree_share_floor) {
          c.top_degree = l;
          break;
        }
    return c;
  }

 private:
  SurfaceGrid g_;
  int lmax_;
  Eigen::MatrixXcd dft_;
  std::vector<std::vector<double>> ylm_;
};

// ---------------------------------------------------------------- cluster sums

enum class ClusterMethod { degree, proximity };

struct ClusterSum {
  int l = 0;
  double sum = 0.0;
  int members = 0;  // 2l+1 when the cluster is complete
  std::vector<double> values;
};

struct ClusterReport {
  std::vector<ClusterSum> clusters;
  ClusterMethod method = ClusterMethod::proximity;
  std::vector<std::string> warnings;
  bool partial = false;

  // sum over clusters of (cluster sum + 1)
  double total_deviation() const {
    double s = 0.0;
    for (const auto& c : clusters) s += c.sum + 1.0;
    return s;
  }
};

// Greedy: for l = 0..lmax take the 2l+1 unused eigenvalues nearest -1/(2l+1).
inline ClusterReport cluster_sums_by_proximity(const Spectrum& sp, int lmax) {
  ClusterReport rep;
  rep.method = ClusterMethod::proximity;
  std::vector<bool> used(sp.size(), false);
  for (int l = 0; l <= lmax; ++l) {
    const double target = -1.0 / (2 * l + 1);
    std::vector<std::size_t> idx;
    for (std::size_t j = 0; j < sp.size(); ++j)
      if (!used[j]) idx.push_back(j);
    const std::size_t take = std::min<std::size_t>(2 * l + 1, idx.size());
    std::partial_sort(idx.begin(), idx.begin() + take, idx.end(), [&](auto x, auto y) {
      return std::abs(sp.eigenvalues[x] - target) < std::abs(sp.eigenvalues[y] - target);
    });
    ClusterSum cs;
    cs.l = l;
    double lo = 0.0, hi = 0.0;
    for (std::size_t k = 0; k < take; ++k) {
      used[idx[k]] = true;
      const double v = sp.eigenvalues[idx[k]].real();
      cs.values.push_back(v);
      cs.sum += v;
      lo = k == 0 ? v : std::min(lo, v);
      hi = k == 0 ? v : std::max(hi, v);
    }
    cs.members = static_cast<int>(take);
    if (take < std::size_t(2 * l + 1)) rep.partial = true;
    // overlap: the nearest outsider is closer to the cluster than its own spread
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t k = take; k < idx.size(); ++k) {
      const double v = sp.eigenvalues[idx[k]].real();
      gap = std::min(gap, v < lo ? lo - v : (v > hi ? v - hi : 0.0));
    }
    if (take > 0 && gap < hi - lo) {
      rep.partial = true;
      rep.warnings.push_back("cluster l=" + std::to_string(l) + " overlaps its neighbours");
    }
    rep.clusters.push_back(cs);
  }
  return rep;
}

// Groups eigenpairs by the top spherical-harmonic degree of their eigenvectors.
inline ClusterReport cluster_sums_by_degree(const Spectrum& sp, const SurfaceGrid& grid, int lmax) {
  if (!sp.has_vectors()) throw InvalidArgument("cluster_sums_by_degree: spectrum carries no eigenvectors");
  const HarmonicAnalyzer an(grid);
  ClusterReport rep;
  rep.method = ClusterMethod::degree;
  rep.clusters.resize(lmax + 1);
  for (int l = 0; l <= lmax; ++l) rep.clusters[l].l = l;
  for (std::size_t j = 0; j < sp.size(); ++j) {
    const auto c = an.analyze(sp.eigenvectors.col(static_cast<Eigen::Index>(j)));
    if (c.top_degree < 0 || c.top_degree > lmax) continue;
    auto& cs = rep.clusters[c.top_degree];
    cs.values.push_back(sp.eigenvalues[j].real());
    cs.sum += sp.eigenvalues[j].real();
    ++cs.members;
  }
  for (const auto& cs : rep.clusters)
    if (cs.members != 2 * cs.l + 1) {
      rep.partial = true;
      rep.warnings.push_back("degree " + std::to_string(cs.l) + " holds " + std::to_string(cs.members) +
                             " eigenpairs, expected " + std::to_string(2 * cs.l + 1));
    }
  return rep;
}

inline ClusterReport ellipsoid_cluster_sums(const Spectrum& sp, int lmax, const std::optional<SurfaceGrid>& grid = {},
                                            ClusterMethod method = ClusterMethod::degree) {
  if (method == ClusterMethod::degree && grid && sp.has_vectors()) return cluster_sums_by_degree(sp, *grid, lmax);
  return cluster_sums_by_proximity(sp, lmax);
}

// ---------------------------------------------------------------- lambda floor

struct LambdaFloor {
  double value = 0.0;
  std::size_t index = 0;
  bool applicable = false;  // false when nothing above threshold remains besides -1
};

inline LambdaFloor lambda_floor(const Spectrum& sp, double threshold = 1e-6) {
  const auto skip = find_constant_eigenpair(sp);
  if (!skip) throw SolverFailure("lambda_floor: constant eigenvector not found (discretization too coarse?)");
  LambdaFloor lf;
  for (std::size_t j = 0; j < sp.size(); ++j) {
    if (j == *skip || !sp.real_flags[j] || std::abs(sp.eigenvalues[j]) < threshold) continue;
    const double v = sp.eigenvalues[j].real();
    if (!lf.applicable || v < lf.value) {
      lf.value = v;
      lf.index = j;
      lf.applicable = true;
    }
  }
  return lf;
}

inline double lambda_max(const Spectrum& sp) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < sp.size(); ++j)
    if (sp.real_flags[j]) best = std::max(best, sp.eigenvalues[j].real());
  return best;
}

// ---------------------------------------------------------------- sweeps

namespace detail {

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (char ch : line) {
    if (ch == '"') {
      quoted = !quoted;
    } else if (ch == ',' && !quoted) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace detail

// Writes through a temporary sibling and renames it into place.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

struct SweepRow {
  std::string family;  // "ellipsoid" or "ellipse"
  std::vector<double> params;  // (a, b, c) or (c, R)
  int n1 = 0, n2 = 0;          // (n_theta, n_phi) or (N, 0)
  double p = 2.0;
  double lambda_floor = std::numeric_limits<double>::quiet_NaN();
  double lambda_max = std::numeric_limits<double>::quiet_NaN();
  double defect = std::numeric_limits<double>::quiet_NaN();    // 2D
  double schatten = std::numeric_limits<double>::quiet_NaN();  // 3D sum alpha^{2p}
  double schatten2 = std::numeric_limits<double>::quiet_NaN(); // 3D sum alpha^2, grows with the grid
  std::vector<double> cluster_sums;                            // 3D, l = 0..2
  std::string status = "ok";
  std::string message;

  std::string key() const {
    std::string k = family;
    for (double v : params) k += "|" + detail::fmt17(v);
    k += "|" + std::to_string(n1) + "x" + std::to_string(n2) + "|p=" + detail::fmt17(p);
    return k;
  }

  bool is_sphere() const {
    return family == "ellipsoid" && params.size() == 3 && params[0] == params[1] && params[1] == params[2];
  }
};

inline constexpr const char* sweep_csv_header =
    "family,p1,p2,p3,n1,n2,p,lambda_floor,lambda_max,defect,schatten,schatten2,cluster_l0,cluster_l1,cluster_l2,status,"
    "message";

inline std::string to_csv(const SweepRow& r) {
  std::ostringstream os;
  os << r.family;
  for (int k = 0; k < 3; ++k) os << ',' << (k < int(r.params.size()) ? detail::fmt17(r.params[k]) : "");
  os << ',' << r.n1 << ',' << r.n2 << ',' << detail::fmt17(r.p);
  for (double v : {r.lambda_floor, r.lambda_max, r.defect, r.schatten, r.schatten2})
    os << ',' << (std::isnan(v) ? std::string() : detail::fmt17(v));
  for (int l = 0; l < 3; ++l) os << ',' << (l < int(r.cluster_sums.size()) ? detail::fmt17(r.cluster_sums[l]) : "");
  std::string msg = r.message;
  std::replace(msg.begin(), msg.end(), '"', '\'');
  os << ',' << r.status << ",\"" << msg << '"';
  return os.str();
}

inline SweepRow sweep_row_from_csv(const std::string& line) {
  const auto f = detail::split_csv_line(line);
  if (f.size() != 17) throw IoError("sweep ledger: malformed row '" + line + "'");
  auto num = [](const std::string& s) { return s.empty() ? std::numeric_limits<double>::quiet_NaN() : std::stod(s); };
  SweepRow r;
  r.family = f[0];
  for (int k = 1; k <= 3; ++k)
    if (!f[k].empty()) r.params.push_back(std::stod(f[k]));
  r.n1 = std::stoi(f[4]);
  r.n2 = std::stoi(f[5]);
  r.p = std::stod(f[6]);
  r.lambda_floor = num(f[7]);
  r.lambda_max = num(f[8]);
  r.defect = num(f[9]);
  r.schatten = num(f[10]);
  r.schatten2 = num(f[11]);
  for (int k = 12; k <= 14; ++k)
    if (!f[k].empty()) r.cluster_sums.push_back(std::stod(f[k]));
  r.status = f[15];
  r.message = f[16];
  return r;
}

struct EllipsoidFamily {
  std::vector<double> bs{1.0, 1.1, 1.25, 1.5};
  std::vector<double> cs{1.0, 1.1, 1.25, 1.5};
  double a = 1.0;
  int n_theta = 32;
  int n_phi = 64;
  double p = 2.0;
};

struct EllipseFamily {
  double c = 2.0;
  std::vector<double> Rs{0.25, 0.5, 1.0, 2.0};
  int n = 256;
};

inline SweepRow evaluate_ellipsoid(double a, double b, double c, int n_theta, int n_phi, double p) {
  SweepRow row;
  row.family = "ellipsoid";
  row.params = {a, b, c};
  row.n1 = n_theta;
  row.n2 = n_phi;
  row.p = p;
  const auto surface = a == b && b == c ? Surface3D::sphere(a) : Surface3D::ellipsoid(a, b, c);
  const auto m = assemble_dlp_3d(surface, n_theta, n_phi);
  const auto sp = compute_spectrum(m);
  const auto lf = lambda_floor(sp);
  row.lambda_floor = lf.value;
  row.lambda_max = lambda_max(sp);
  row.schatten = schatten_sum(sp.singular_values, 2.0 * p);
  row.schatten2 = schatten_sum(sp.singular_values, 2.0);
  const auto cl = ellipsoid_cluster_sums(sp, 2, m.grid);
  for (const auto& cs : cl.clusters) row.cluster_sums.push_back(cs.sum);
  if (!cl.warnings.empty()) {
    row.status = "partial";
    row.message = cl.warnings.front();
  }
  if (sp.status != SolverStatus::ok) {
    row.status = to_string(sp.status);
    row.message = sp.message;
  }
  return row;
}

inline SweepRow evaluate_ellipse(double c, double R, int n) {
  SweepRow row;
  row.family = "ellipse";
  row.params = {c, R};
  row.n1 = n;
  const auto m = assemble_dlp_2d(Curve2D::ellipse(c, R), n);
  const auto sp = compute_spectrum(m);
  const auto lf = lambda_floor(sp);
  row.lambda_floor = lf.applicable ? lf.value : std::numeric_limits<double>::quiet_NaN();
  row.lambda_max = lambda_max(sp);
  row.defect = trace_report(m, sp.singular_values).defect;
  if (sp.status != SolverStatus::ok) {
    row.status = to_string(sp.status);
    row.message = sp.message;
  }
  return row;
}

struct SweepOptions {
  std::optional<std::filesystem::path> ledger;  // CSV ledger; rows already present are reused
  std::function<void(const SweepRow&, bool reused)> on_row;
};

namespace detail {

inline std::map<std::string, SweepRow> load_ledger(const std::filesystem::path& path) {
  std::map<std::string, SweepRow> rows;
  std::ifstream in(path);
  if (!in) return rows;
  std::string line;
  if (!std::getline(in, line)) return rows;
  if (line != sweep_csv_header) throw IoError("sweep ledger " + path.string() + " has an unexpected header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto r = sweep_row_from_csv(line);
    rows[r.key()] = r;
  }
  return rows;
}

inline void store_ledger(const std::filesystem::path& path, const std::vector<SweepRow>& rows) {
  std::string text = std::string(sweep_csv_header) + "\n";
  for (const auto& r : rows) text += to_csv(r) + "\n";
  atomic_write(path, text);
}

template <class Eval>
std::vector<SweepRow> run_jobs(const std::vector<SweepRow>& jobs, const SweepOptions& opt, Eval eval) {
  std::map<std::string, SweepRow> done;
  if (opt.ledger) done = load_ledger(*opt.ledger);
  std::vector<SweepRow> out;
  for (const auto& job : jobs) {
    auto it = done.find(job.key());
    const bool reuse = it != done.end() && it->second.status != "error";
    SweepRow row;
    if (reuse) {
      row = it->second;
    } else {
      try {
        row = eval(job);
      } catch (const std::exception& ex) {
        row = job;
        row.status = "error";
        row.message = ex.what();
      }
    }
    out.push_back(row);
    if (opt.ledger && !reuse) {
      // rows of other sweeps sharing the ledger are kept; file order is key order
      done[row.key()] = row;
      std::vector<SweepRow> all;
      for (const auto& kv : done) all.push_back(kv.second);
      store_ledger(*opt.ledger, all);
    }
    if (opt.on_row) opt.on_row(row, reuse);
  }
  return out;
}

}  // namespace detail

inline std::vector<SweepRow> sweep(const EllipsoidFamily& fam, const SweepOptions& opt = {}) {
  if (!(fam.p > 1.0)) throw InvalidArgument("sweep: Schatten exponent p must exceed 1");
  std::vector<SweepRow> jobs;
  for (double b : fam.bs)
    for (double c : fam.cs) {
      SweepRow r;
      r.family = "ellipsoid";
      r.params = {fam.a, b, c};
      r.n1 = fam.n_theta;
      r.n2 = fam.n_phi;
      r.p = fam.p;
      jobs.push_back(r);
    }
  return detail::run_jobs(jobs, opt, [](const SweepRow& j) {
    return evaluate_ellipsoid(j.params[0], j.params[1], j.params[2], j.n1, j.n2, j.p);
  });
}

inline std::vector<SweepRow> sweep(const EllipseFamily& fam, const SweepOptions& opt = {}) {
  std::vector<SweepRow> jobs;
  for (double R : fam.Rs) {
    SweepRow r;
    r.family = "ellipse";
    r.params = {fam.c, R};
    r.n1 = fam.n;
    jobs.push_back(r);
  }
  return detail::run_jobs(jobs, opt, [](const SweepRow& j) { return evaluate_ellipse(j.params[0], j.params[1], j.n1); });
}

struct SweepSummary {
  std::optional<SweepRow> argmax_lambda_floor;
  std::optional<SweepRow> min_schatten;
  double zeta_target = std::numeric_limits<double>::quiet_NaN();
  std::map<std::string, bool> pass_flags;
};

inline SweepSummary summarize_ellipsoid_sweep(const std::vector<SweepRow>& rows, double p,
                                              double lambda_tol = 2e-2, double schatten_rel = 0.05) {
  SweepSummary s;
  s.zeta_target = zeta_bound(p);
  for (const auto& r : rows) {
    if (r.status == "error" || std::isnan(r.lambda_floor)) continue;
    if (!s.argmax_lambda_floor || r.lambda_floor > s.argmax_lambda_floor->lambda_floor) s.argmax_lambda_floor = r;
    if (!s.min_schatten || r.schatten < s.min_schatten->schatten) s.min_schatten = r;
  }
  const SweepRow* sphere = nullptr;
  for (const auto& r : rows)
    if (r.is_sphere() && r.status != "error") sphere = &r;
  s.pass_flags["sphere_present"] = sphere != nullptr;
  s.pass_flags["argmax_lambda_floor_at_sphere"] = s.argmax_lambda_floor && s.argmax_lambda_floor->is_sphere();
  s.pass_flags["sphere_lambda_floor_value"] =
      sphere && std::abs(sphere->lambda_floor + 1.0 / 3.0) <= lambda_tol;
  s.pass_flags["min_schatten_at_sphere"] = s.min_schatten && s.min_schatten->is_sphere();
  s.pass_flags["sphere_schatten_value"] =
      sphere && std::abs(sphere->schatten - s.zeta_target) <= schatten_rel * s.zeta_target;
  bool below = true, clusters = true, complete = true;
  for (const auto& r : rows) {
    if (r.status == "error") complete = false;
    if (!r.is_sphere() && !(r.lambda_floor < -1.0 / 3.0)) below = false;
    double dev = 0.0;
    for (double v : r.cluster_sums) dev += v + 1.0;
    if (r.cluster_sums.size() != 3 || std::abs(dev) > 0.15) clusters = false;
  }
  s.pass_flags["non_sphere_below_minus_third"] = below;
  s.pass_flags["cluster_deviation_within_0.15"] = clusters;
  s.pass_flags["all_rows_computed"] = complete;
  return s;
}

inline SweepSummary summarize_ellipse_sweep(const std::vector<SweepRow>& rows) {
  SweepSummary s;
  std::vector<SweepRow> sorted = rows;
  std::sort(sorted.begin(), sorted.end(), [](auto& x, auto& y) { return x.params[1] < y.params[1]; });
  bool decreasing = true, positive = true;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    if (!(sorted[k].defect > 0.0)) positive = false;
    if (k > 0 && !(sorted[k].defect < sorted[k - 1].defect)) decreasing = false;
  }
  s.pass_flags["defect_decreasing_in_R"] = decreasing;
  s.pass_flags["defect_positive"] = positive;
  return s;
}

inline nlohmann::json row_json(const SweepRow& r) {
  nlohmann::json j{{"family", r.family}, {"params", r.params}, {"grid", {r.n1, r.n2}}, {"status", r.status}};
  auto put = [&](const char* k, double v) {
    if (std::isnan(v))
      j[k] = nullptr;
    else
      j[k] = v;
  };
  put("lambda_floor", r.lambda_floor);
  put("lambda_max", r.lambda_max);
  put("defect", r.defect);
  put("schatten", r.schatten);
  return j;
}

inline nlohmann::json to_json(const SweepSummary& s) {
  nlohmann::json j;
  j["argmax_lambda_floor"] = s.argmax_lambda_floor ? row_json(*s.argmax_lambda_floor) : nlohmann::json(nullptr);
  j["min_schatten"] = s.min_schatten ? row_json(*s.min_schatten) : nlohmann::json(nullptr);
  if (std::isnan(s.zeta_target))
    j["zeta_target"] = nullptr;
  else
    j["zeta_target"] = s.zeta_target;
  j["pass_flags"] = s.pass_flags;
  return j;
}

// ---------------------------------------------------------------- positive eigenvalues

struct PositiveFinding {
  double aspect = 0.0;  // c of the spheroid (1, 1, c)
  double lambda = 0.0;
  double high_m_fraction = 0.0;
  double high_degree_fraction = 0.0;
};

struct PositiveSearch {
  std::vector<PositiveFinding> findings;  // resolved eigenpairs with lambda > threshold
  int rejected = 0;                       // positive eigenvalues whose eigenvectors fail the resolution filter
};

inline PositiveSearch positive_eigenvalue_search(std::span<const double> aspects, int n_theta = 32, int n_phi = 64,
                                                 double threshold = 1e-3) {
  PositiveSearch out;
  for (double c : aspects) {
    const auto surface = c == 1.0 ? Surface3D::sphere(1.0) : Surface3D::ellipsoid(1.0, 1.0, c);
    const auto m = assemble_dlp_3d(surface, n_theta, n_phi);
    const auto sp = eigenpairs(m);
    const HarmonicAnalyzer an(*m.grid);
    for (std::size_t j = 0; j < sp.size(); ++j) {
      if (!sp.real_flags[j] || sp.eigenvalues[j].real() <= threshold) continue;
      const auto content = an.analyze(sp.eigenvectors.col(static_cast<Eigen::Index>(j)));
      if (!content.resolved) {
        ++out.rejected;
        continue;
      }
      out.findings.push_back({c, sp.eigenvalues[j].real(), content.high_m_fraction, content.high_degree_fraction});
    }
  }
  return out;
}

}  // namespace dlp
