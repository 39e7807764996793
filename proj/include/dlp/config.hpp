#pragma once

// Flat key=value configuration and shape construction from it.
//
//   shape=ellipse
//   c=2.0
//   R=0.5
//
// Fourier curves list complex coefficients as comma-separated re,im pairs:
// `coeffs` holds k = 1, 2, ...; `coeffs_neg` holds k = -1, -2, ...; `coeff0`
// is an optional translation. Blank lines and lines starting with '#' are ignored.

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dlp/common.hpp"
#include "dlp/geometry.hpp"

namespace dlp {

class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline double parse_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (trim(text.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("config: value of '" + key + "' is not a number: '" + text + "'");
}

inline std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_double(key, item));
  }
  return out;
}

}  // namespace detail

class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig parse(std::string_view text) {
    KeyValueConfig cfg;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::string t = detail::trim(line);
      if (t.empty() || t[0] == '#') continue;
      const auto eq = t.find('=');
      if (eq == std::string::npos)
        throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value, got '" + t + "'");
      const std::string key = detail::trim(t.substr(0, eq));
      if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
      cfg.values_[key] = detail::trim(t.substr(eq + 1));
    }
    return cfg;
  }

  static KeyValueConfig load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
  }

  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::optional<std::string> get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
  }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    return get(key).value_or(fallback);
  }

  double get_double(const std::string& key) const {
    auto v = get(key);
    if (!v) throw ConfigError("config: missing required key '" + key + "'");
    return detail::parse_double(key, *v);
  }
  double get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
  }

  int get_int(const std::string& key, int fallback) const {
    if (!has(key)) return fallback;
    const double v = get_double(key);
    if (v != static_cast<int>(v)) throw ConfigError("config: value of '" + key + "' must be an integer");
    return static_cast<int>(v);
  }

  std::vector<double> get_list(const std::string& key) const {
    auto v = get(key);
    return v ? detail::parse_list(key, *v) : std::vector<double>{};
  }

  const std::map<std::string, std::string>& entries() const { return values_; }

  // Entries of `overrides` replace ours.
  void merge(const KeyValueConfig& overrides) {
    for (const auto& [k, v] : overrides.values_) values_[k] = v;
  }

 private:
  std::map<std::string, std::string> values_;
};

inline bool is_surface_tag(const std::string& tag) { return tag == "sphere" || tag == "ellipsoid"; }

inline Curve2D make_curve(const KeyValueConfig& cfg) {
  const std::string tag = cfg.get_string("shape", "");
  if (tag == "circle") {
    const double r = cfg.has("radius") ? cfg.get_double("radius") : cfg.get_double("R", 1.0);
    return Curve2D::circle(r);
  }
  if (tag == "ellipse") return Curve2D::ellipse(cfg.get_double("c"), cfg.get_double("R"));
  if (tag == "fourier") {
    std::vector<FourierTerm> terms;
    auto add_pairs = [&](const std::string& key, int sign) {
      const auto vals = cfg.get_list(key);
      if (vals.size() % 2 != 0) throw ConfigError("config: '" + key + "' must hold re,im pairs");
      for (std::size_t i = 0; i < vals.size(); i += 2) {
        const cplx a(vals[i], vals[i + 1]);
        if (a != cplx(0.0, 0.0)) terms.push_back({sign * int(i / 2 + 1), a});
      }
    };
    add_pairs("coeffs", +1);
    add_pairs("coeffs_neg", -1);
    if (cfg.has("coeff0")) {
      const auto v = cfg.get_list("coeff0");
      if (v.size() != 2) throw ConfigError("config: 'coeff0' must be one re,im pair");
      terms.push_back({0, cplx(v[0], v[1])});
    }
    return Curve2D::fourier(std::move(terms));
  }
  throw ConfigError("config: unknown curve shape '" + tag + "' (expected circle, ellipse or fourier)");
}

inline Surface3D make_surface(const KeyValueConfig& cfg) {
  const std::string tag = cfg.get_string("shape", "");
  if (tag == "sphere") {
    const double r = cfg.has("radius") ? cfg.get_double("radius") : cfg.get_double("R", 1.0);
    return Surface3D::sphere(r);
  }
  if (tag == "ellipsoid") {
    if (cfg.has("axes")) {
      const auto ax = cfg.get_list("axes");
      if (ax.size() != 3) throw ConfigError("config: 'axes' must list three semi-axes");
      return Surface3D::ellipsoid(ax[0], ax[1], ax[2]);
    }
    return Surface3D::ellipsoid(cfg.get_double("a"), cfg.get_double("b"), cfg.get_double("c"));
  }
  throw ConfigError("config: unknown surface shape '" + tag + "' (expected sphere or ellipsoid)");
}

using Shape = std::variant<Curve2D, Surface3D>;

inline Shape make_shape(const KeyValueConfig& cfg) {
  if (is_surface_tag(cfg.get_string("shape", ""))) return make_surface(cfg);
  return make_curve(cfg);
}

}  // namespace dlp
