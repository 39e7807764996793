// dlp_lab: command-line front end for the double layer potential laboratory.
//
// Exit codes: 0 success, 1 acceptance failure, 2 usage or config error,
// 3 solver failure, 4 I/O error, 5 internal error. On failure one JSON
// error record goes to stderr; every run also logs one JSON line to stderr.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fftw3.h>

#include "dlp/analysis.hpp"
#include "dlp/config.hpp"
#include "dlp/eigenfunctions.hpp"
#include "dlp/explorer.hpp"
#include "dlp/spectrum.hpp"
#include "dlp/verify.hpp"

namespace {

enum Exit { ok = 0, verify_failed = 1, usage = 2, solver = 3, io = 4, internal = 5 };

struct RunError {
  Exit code;
  std::string kind;
  std::string message;
};

// Shape and run parameters in one flat config: file first, flags on top.
struct Options {
  std::string config_path;
  std::vector<std::pair<std::string, CLI::Option*>> flags;
  std::vector<std::pair<std::string, std::string>> values;
};

std::string output_path(const std::string& out) {
  if (out.empty() || out == "-") return out;
  const char* dir = std::getenv("DLP_LAB_OUTPUT_DIR");
  std::filesystem::path p(out);
  if (dir && *dir && p.is_relative()) p = std::filesystem::path(dir) / p;
  return p.string();
}

void emit(const std::string& out, const std::string& text) {
  const auto path = output_path(out);
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(parent, ec);
    if (ec) throw dlp::IoError("cannot create directory " + parent.string() + ": " + ec.message());
  }
  dlp::atomic_write(path, text);
}

std::string versions() {
  lapack_int maj = 0, min = 0, patch = 0;
  LAPACKE_ilaver(&maj, &min, &patch);
  std::ostringstream os;
  os << "dlp " << dlp::version << "; eigen " << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.'
     << EIGEN_MINOR_VERSION << "; lapack " << maj << '.' << min << '.' << patch << "; " << fftw_version;
  return os.str();
}

struct RunLog {
  std::string command;
  std::string shape = "-";
  std::string grid = "-";
};

dlp::KeyValueConfig gather(const Options& o) {
  dlp::KeyValueConfig cfg;
  if (!o.config_path.empty()) cfg = dlp::KeyValueConfig::load(o.config_path);
  dlp::KeyValueConfig flags;
  for (const auto& [key, opt] : o.flags)
    if (opt->count() > 0) {
      auto res = opt->results();
      std::string v;
      for (std::size_t i = 0; i < res.size(); ++i) v += (i ? "," : "") + res[i];
      flags.set(key, v);
    }
  cfg.merge(flags);
  return cfg;
}

void add_shape_flags(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config_path, "key=value config file (flags take precedence)");
  auto flag = [&](const std::string& name, const std::string& key, const std::string& help) {
    o.flags.emplace_back(key, sub->add_option(name, help));
  };
  flag("--shape", "shape", "circle | ellipse | fourier | sphere | ellipsoid");
  flag("--radius", "radius", "circle or sphere radius");
  flag("--R", "R", "ellipse parameter R (circle radius when --radius is absent)");
  flag("--c", "c", "ellipse focal scale c, or third ellipsoid semi-axis");
  flag("--a", "a", "first ellipsoid semi-axis");
  flag("--b", "b", "second ellipsoid semi-axis");
  flag("--axes", "axes", "ellipsoid semi-axes a,b,c");
  flag("--coeffs", "coeffs", "fourier coefficients k=1,2,... as re,im pairs");
  flag("--coeffs-neg", "coeffs_neg", "fourier coefficients k=-1,-2,... as re,im pairs");
  flag("--coeff0", "coeff0", "fourier translation re,im");
  flag("--n", "n", "2D node count N (default 256)");
  flag("--n-theta", "n_theta", "3D Gauss-Legendre nodes in cos(theta) (default 32)");
  flag("--n-phi", "n_phi", "3D uniform nodes in phi (default 64)");
  flag("--out", "out", "output path (default stdout)");
  flag("--format", "format", "json | csv");
}

std::string describe_grid(const dlp::KeyValueConfig& cfg, bool surface) {
  if (surface)
    return std::to_string(cfg.get_int("n_theta", 32)) + "x" + std::to_string(cfg.get_int("n_phi", 64));
  return "N=" + std::to_string(cfg.get_int("n", 256));
}

std::string format_of(const dlp::KeyValueConfig& cfg, const std::string& fallback) {
  const auto f = cfg.get_string("format", fallback);
  if (f != "json" && f != "csv") throw dlp::ConfigError("format must be json or csv, got '" + f + "'");
  return f;
}

dlp::OperatorMatrix assemble(const dlp::KeyValueConfig& cfg, RunLog& log) {
  const auto shape = dlp::make_shape(cfg);
  if (const auto* s = std::get_if<dlp::Surface3D>(&shape)) {
    log.shape = s->id();
    log.grid = describe_grid(cfg, true);
    auto m = dlp::assemble_dlp_3d(*s, cfg.get_int("n_theta", 32), cfg.get_int("n_phi", 64));
    for (const auto& w : m.warnings) std::cerr << "warning: " << w << '\n';
    return m;
  }
  const auto& c = std::get<dlp::Curve2D>(shape);
  log.shape = c.id();
  log.grid = describe_grid(cfg, false);
  return dlp::assemble_dlp_2d(c, cfg.get_int("n", 256));
}

void require_solver_ok(const dlp::Spectrum& sp) {
  if (sp.status != dlp::SolverStatus::ok) throw dlp::SolverFailure(std::string(dlp::to_string(sp.status)) + ": " + sp.message);
}

int cmd_spectrum(const Options& o, RunLog& log) {
  const auto cfg = gather(o);
  const auto m = assemble(cfg, log);
  const auto fmt = format_of(cfg, "json");
  const auto sp = dlp::compute_spectrum(m, {.vectors = true});
  require_solver_ok(sp);
  std::ostringstream os;
  if (fmt == "json")
    os << dlp::to_json(sp).dump(2) << '\n';
  else
    dlp::write_spectrum_csv(sp, os);
  emit(cfg.get_string("out", ""), os.str());
  return ok;
}

int cmd_trace(const Options& o, RunLog& log) {
  const auto cfg = gather(o);
  const auto shape = dlp::make_shape(cfg);
  if (!std::holds_alternative<dlp::Curve2D>(shape))
    throw dlp::ConfigError("trace works on 2D curves; the trace of K*K need not exist on surfaces");
  const auto m = assemble(cfg, log);
  const auto tr = dlp::trace_report(m);
  const auto fmt = format_of(cfg, "json");
  std::ostringstream os;
  if (fmt == "json") {
    os << dlp::to_json(tr).dump(2) << '\n';
  } else {
    char buf[256];
    std::snprintf(buf, sizeof buf, "shape_id,N,trace_K,trace_KstarK_quadrature,trace_KstarK_svd,defect\n\"%s\",%d,%.17g,%.17g,%.17g,%.17g\n",
                  tr.shape_id.c_str(), tr.n, tr.trace_K, tr.trace_KstarK_quadrature, tr.trace_KstarK_svd, tr.defect);
    os << buf;
  }
  emit(cfg.get_string("out", ""), os.str());
  return ok;
}

int cmd_nodal(const Options& o, RunLog& log) {
  const auto cfg = gather(o);
  const auto shape = dlp::make_shape(cfg);
  if (!std::holds_alternative<dlp::Curve2D>(shape)) throw dlp::ConfigError("nodal works on 2D curves only");
  const auto& curve = std::get<dlp::Curve2D>(shape);
  const auto m = assemble(cfg, log);
  const auto sp = dlp::eigenpairs(m);
  require_solver_ok(sp);
  const double eps = cfg.get_double("epsilon", 0.1);
  const int pairs = cfg.get_int("pairs", 8);
  const auto konst = dlp::find_constant_eigenpair(sp);
  std::vector<dlp::NodalReport> rows;
  for (std::size_t j = 0; j < sp.size() && int(rows.size()) < pairs; ++j) {
    if (!sp.real_flags[j] || (konst && j == *konst)) continue;
    if (std::abs(sp.eigenvalues[j]) < 1e-10) break;
    rows.push_back(dlp::nodal_report(curve, dlp::real_eigenpair(sp, j), eps));
  }
  const auto fmt = format_of(cfg, "csv");
  std::ostringstream os;
  if (fmt == "csv") {
    dlp::write_nodal_csv(rows, os);
  } else {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : rows) {
      j.push_back({{"shape", r.shape_id},
                   {"N", r.n},
                   {"lambda", r.lambda},
                   {"real_zeros", r.real_zeros},
                   {"annulus_zeros", r.annulus_zeros ? nlohmann::json(*r.annulus_zeros) : nlohmann::json(nullptr)},
                   {"ratio", r.ratio},
                   {"epsilon", r.epsilon}});
    }
    nlohmann::json doc{{"pairs", j}};
    if (rows.size() >= 3) {
      const auto b = dlp::nodal_bound_report(rows);
      doc["empirical_constant"] = b.empirical_constant;
      doc["super_logarithmic"] = b.super_logarithmic;
    }
    os << doc.dump(2) << '\n';
  }
  emit(cfg.get_string("out", ""), os.str());
  return ok;
}

struct SweepArgs {
  std::string family = "ellipsoid";
  std::vector<double> bs{1.0, 1.1, 1.25, 1.5};
  std::vector<double> cs{1.0, 1.1, 1.25, 1.5};
  std::vector<double> Rs{0.25, 0.5, 1.0, 2.0};
  double ellipse_c = 2.0;
  int n = 256, n_theta = 32, n_phi = 64;
  double p = 2.0;
  std::string ledger = "sweep.csv";
  std::string summary = "sweep_summary.json";
};

int cmd_sweep(const SweepArgs& a, RunLog& log) {
  dlp::SweepOptions opt;
  opt.ledger = output_path(a.ledger);
  const auto parent = opt.ledger->parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  opt.on_row = [](const dlp::SweepRow& r, bool reused) {
    std::cerr << (reused ? "reused " : "done   ") << r.key() << " status=" << r.status << '\n';
  };
  nlohmann::json summary;
  if (a.family == "ellipsoid") {
    dlp::EllipsoidFamily fam;
    fam.bs = a.bs;
    fam.cs = a.cs;
    fam.n_theta = a.n_theta;
    fam.n_phi = a.n_phi;
    fam.p = a.p;
    log.shape = "ellipsoid family";
    log.grid = std::to_string(a.n_theta) + "x" + std::to_string(a.n_phi);
    const auto rows = dlp::sweep(fam, opt);
    summary = dlp::to_json(dlp::summarize_ellipsoid_sweep(rows, a.p));
  } else if (a.family == "ellipse") {
    dlp::EllipseFamily fam;
    fam.c = a.ellipse_c;
    fam.Rs = a.Rs;
    fam.n = a.n;
    log.shape = "ellipse family";
    log.grid = "N=" + std::to_string(a.n);
    const auto rows = dlp::sweep(fam, opt);
    summary = dlp::to_json(dlp::summarize_ellipse_sweep(rows));
  } else {
    throw dlp::ConfigError("unknown family '" + a.family + "' (expected ellipsoid or ellipse)");
  }
  emit(a.summary, summary.dump(2) + "\n");
  return ok;
}

struct VerifyArgs {
  bool quick = false;
  bool inject_fault = false;
  std::vector<int> only;
  std::string out;
};

int cmd_verify(const VerifyArgs& a, RunLog& log) {
  dlp::VerifyOptions opt;
  opt.quick = a.quick;
  opt.inject_fault = a.inject_fault;
  opt.only.insert(a.only.begin(), a.only.end());
  log.shape = "acceptance suite";
  log.grid = a.quick ? "quick" : "full";
  opt.on_result = [](const dlp::CriterionResult& r) {
    std::cout << dlp::format_result_line(r) << '\n';
    if (!r.passed)
      for (const auto& n : r.notes) std::cout << "        " << n << '\n';
    std::cout.flush();
  };
  const auto results = dlp::run_acceptance(opt);
  bool all = true;
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : results) {
    all = all && r.passed;
    j.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"seconds", r.seconds}, {"notes", r.notes}});
  }
  std::cout << (all ? "overall: PASS" : "overall: FAIL") << '\n';
  if (!a.out.empty()) emit(a.out, nlohmann::json{{"criteria", j}, {"passed", all}}.dump(2) + "\n");
  return all ? ok : verify_failed;
}

void error_record(const RunError& e) {
  std::cerr << nlohmann::json{{"error", {{"kind", e.kind}, {"message", e.message}, {"exit_code", int(e.code)}}}}.dump()
            << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Double layer potential laboratory"};
  app.set_version_flag("--version", std::string(dlp::version));
  app.require_subcommand(1);

  Options spec_o, trace_o, nodal_o;
  auto* spectrum = app.add_subcommand("spectrum", "eigenvalues, singular values and residuals of one shape");
  add_shape_flags(spectrum, spec_o);
  auto* trace = app.add_subcommand("trace", "trace identities and the isoperimetric defect of a curve");
  add_shape_flags(trace, trace_o);
  auto* nodal = app.add_subcommand("nodal", "zero counts of the leading eigenfunctions of a curve");
  add_shape_flags(nodal, nodal_o);
  nodal_o.flags.emplace_back("epsilon", nodal->add_option("--eps", "annulus width epsilon (default 0.1)"));
  nodal_o.flags.emplace_back("pairs", nodal->add_option("--pairs", "number of eigenpairs (default 8)"));

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "resumable parameter sweep over an ellipsoid or ellipse family");
  sweep->add_option("--family", sw.family, "ellipsoid | ellipse")->capture_default_str();
  sweep->add_option("--b-values", sw.bs, "ellipsoid b values")->delimiter(',');
  sweep->add_option("--c-values", sw.cs, "ellipsoid c values")->delimiter(',');
  sweep->add_option("--R-values", sw.Rs, "ellipse R values")->delimiter(',');
  sweep->add_option("--ellipse-c", sw.ellipse_c, "ellipse focal scale")->capture_default_str();
  sweep->add_option("--n", sw.n, "2D node count")->capture_default_str();
  sweep->add_option("--n-theta", sw.n_theta, "3D theta nodes")->capture_default_str();
  sweep->add_option("--n-phi", sw.n_phi, "3D phi nodes")->capture_default_str();
  sweep->add_option("--p", sw.p, "Schatten exponent, sums alpha^(2p)")->capture_default_str();
  sweep->add_option("--ledger", sw.ledger, "CSV ledger (rows already present are reused)")->capture_default_str();
  sweep->add_option("--summary", sw.summary, "JSON summary path")->capture_default_str();

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "run the acceptance suite");
  verify->add_flag("--quick", va.quick, "N=32 and 16x32 grids, tolerances x10");
  verify->add_flag("--inject-fault", va.inject_fault, "negate the 2D diagonal (the trace check must fail)");
  verify->add_option("--only", va.only, "criterion numbers")->delimiter(',');
  verify->add_option("--out", va.out, "JSON results path");

  RunLog log;
  const auto t0 = std::chrono::steady_clock::now();
  int code = ok;
  try {
    app.parse(argc, argv);
    if (*spectrum) {
      log.command = "spectrum";
      code = cmd_spectrum(spec_o, log);
    } else if (*trace) {
      log.command = "trace";
      code = cmd_trace(trace_o, log);
    } else if (*nodal) {
      log.command = "nodal";
      code = cmd_nodal(nodal_o, log);
    } else if (*sweep) {
      log.command = "sweep";
      code = cmd_sweep(sw, log);
    } else if (*verify) {
      log.command = "verify";
      code = cmd_verify(va, log);
    }
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    error_record({usage, "usage", e.what()});
    return usage;
  } catch (const dlp::InvalidArgument& e) {
    error_record({usage, "usage", e.what()});
    return usage;
  } catch (const dlp::SolverFailure& e) {
    error_record({solver, "solver_failure", e.what()});
    return solver;
  } catch (const dlp::IoError& e) {
    error_record({io, "io", e.what()});
    return io;
  } catch (const std::filesystem::filesystem_error& e) {
    error_record({io, "io", e.what()});
    return io;
  } catch (const std::exception& e) {
    error_record({internal, "internal", e.what()});
    return internal;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cerr << nlohmann::json{{"log",
                               {{"command", log.command},
                                {"shape", log.shape},
                                {"grid", log.grid},
                                {"versions", versions()},
                                {"wall_seconds", wall},
                                {"exit_code", code}}}}
                   .dump()
            << '\n';
  return code;
}
