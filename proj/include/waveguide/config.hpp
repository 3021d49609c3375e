#pragma once

// Run configuration: a small INI dialect.
//
//   # comment            ; comment
//   [section]
//   key = value          lists are comma separated
//
// Every key must be known; every error names the file and line.  The schema is
// documented in README.md and the canonical text written back by to_ini()
// parses to the same configuration.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "waveguide/errors.hpp"
#include "waveguide/profile.hpp"
#include "waveguide/transverse.hpp"

namespace waveguide {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& file, int line, const std::string& msg)
      : std::runtime_error(file + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + msg),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct IniValue {
  std::string text;
  int line = 0;
};

/// section -> key -> value, with line numbers of sections and keys.
struct IniDocument {
  std::string file;
  std::map<std::string, std::map<std::string, IniValue>> sections;
  std::map<std::string, int> section_lines;
  int last_line = 0;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  if (!s.empty() && s.back() == ',') out.emplace_back();
  return out;
}

}  // namespace detail

inline IniDocument parse_ini(const std::string& text, const std::string& file) {
  IniDocument doc;
  doc.file = file;
  std::istringstream in(text);
  std::string raw, section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    for (char c : {'#', ';'})
      if (auto p = s.find(c); p != std::string::npos) s.erase(p);
    s = detail::trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(file, line, "unterminated section header");
      section = detail::trim(s.substr(1, s.size() - 2));
      if (section.empty()) throw ConfigError(file, line, "empty section name");
      if (doc.section_lines.count(section))
        throw ConfigError(file, line, "duplicate section [" + section + "]");
      doc.section_lines[section] = line;
      doc.sections[section];
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(file, line, "expected 'key = value'");
    if (section.empty()) throw ConfigError(file, line, "key outside of any section");
    const std::string key = detail::trim(s.substr(0, eq));
    const std::string value = detail::trim(s.substr(eq + 1));
    if (key.empty()) throw ConfigError(file, line, "empty key");
    auto& sec = doc.sections[section];
    if (sec.count(key)) throw ConfigError(file, line, "duplicate key '" + key + "'");
    sec[key] = {value, line};
  }
  doc.last_line = line;
  return doc;
}

enum class ProfileKind { RectWell, Piecewise, Table };
enum class SweepAxis { None, Lambda, Sigma, A, Alpha0, Alpha1 };

inline const std::vector<std::string>& known_tasks() {
  static const std::vector<std::string> t{"modes",  "spectrum",        "asymptotics",
                                          "bounds", "oracle-validate", "hs-scaling"};
  return t;
}

struct RunConfig {
  std::string source = "<config>";
  std::filesystem::path base_dir;  // relative table paths resolve against this

  // [geometry]
  double d1 = 1.0, d2 = 1.0, alpha0 = 0.0;

  // [profile]
  ProfileKind kind = ProfileKind::RectWell;
  double a = 1.0, alpha1 = -1.0;
  std::vector<double> breaks, values;
  std::string table_file;
  std::vector<double> table_x, table_delta;  // loaded table
  double lambda = 1.0, sigma = 1.0;

  // [sweep]
  SweepAxis axis = SweepAxis::None;
  std::vector<double> sweep_values;

  // [numerics]
  std::size_t n_max = 0;  // 0 selects the count from the cell width
  std::size_t n_cells = 400;
  double kappa_tol = 1e-10;
  double multiplicity_tol = 1e-6;
  std::size_t modes_report = 10;
  double fd_h = 0.05;
  double fd_X = 8.0;
  double fd_margin = 1e-3;
  double fd_x_tol = 1e-3;
  std::string skn_strategy = "quadrature";
  std::size_t mc_samples = 1000000;
  double hs_kappa1 = 0.1;
  std::vector<double> hs_kappa_ladder{0.1, 0.03, 0.01, 0.003, 0.001};

  // [run]
  std::vector<std::string> tasks;
  std::string out = "results";
  std::uint64_t seed = 1;
  unsigned jobs = 1;

  Geometry geometry() const { return Geometry(d1, d2); }
};

inline std::string to_string(ProfileKind k) {
  switch (k) {
    case ProfileKind::RectWell: return "rectwell";
    case ProfileKind::Piecewise: return "piecewise";
    case ProfileKind::Table: return "table";
  }
  return "?";
}

inline std::string to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::None: return "none";
    case SweepAxis::Lambda: return "lambda";
    case SweepAxis::Sigma: return "sigma";
    case SweepAxis::A: return "a";
    case SweepAxis::Alpha0: return "alpha0";
    case SweepAxis::Alpha1: return "alpha1";
  }
  return "?";
}

namespace detail {

// Typed access with line-precise errors and tracking of consumed keys.
class Reader {
 public:
  explicit Reader(const IniDocument& d) : doc_(d) {}

  const IniValue* find(const std::string& sec, const std::string& key) {
    auto s = doc_.sections.find(sec);
    if (s == doc_.sections.end()) return nullptr;
    auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    used_.insert(sec + "." + key);
    return &k->second;
  }

  [[noreturn]] void fail(int line, const std::string& msg) const { throw ConfigError(doc_.file, line, msg); }

  int where(const std::string& sec) const {
    auto it = doc_.section_lines.find(sec);
    return it == doc_.section_lines.end() ? doc_.last_line : it->second;
  }

  double num(const IniValue& v, const std::string& key) const {
    double x = 0.0;
    const char* b = v.text.data();
    const char* e = b + v.text.size();
    auto [p, ec] = std::from_chars(b, e, x);
    if (ec != std::errc() || p != e || !std::isfinite(x))
      fail(v.line, "key '" + key + "': expected a finite number, got '" + v.text + "'");
    return x;
  }

  std::uint64_t integer(const IniValue& v, const std::string& key) const {
    std::uint64_t x = 0;
    const char* b = v.text.data();
    const char* e = b + v.text.size();
    auto [p, ec] = std::from_chars(b, e, x);
    if (ec != std::errc() || p != e)
      fail(v.line, "key '" + key + "': expected a non-negative integer, got '" + v.text + "'");
    return x;
  }

  void get(const std::string& sec, const std::string& key, double& out) {
    if (auto v = find(sec, key)) out = num(*v, key);
  }
  void get_positive(const std::string& sec, const std::string& key, double& out) {
    if (auto v = find(sec, key)) {
      out = num(*v, key);
      if (!(out > 0.0)) fail(v->line, "key '" + key + "' must be positive");
    }
  }
  template <class I>
  void get_count(const std::string& sec, const std::string& key, I& out, std::uint64_t min_value) {
    if (auto v = find(sec, key)) {
      const auto x = integer(*v, key);
      if (x < min_value) fail(v->line, "key '" + key + "' must be at least " + std::to_string(min_value));
      out = static_cast<I>(x);
    }
  }
  void get_list(const std::string& sec, const std::string& key, std::vector<double>& out) {
    if (auto v = find(sec, key)) {
      out.clear();
      for (const auto& item : split_list(v->text)) {
        if (item.empty()) fail(v->line, "key '" + key + "': empty list element");
        out.push_back(num({item, v->line}, key));
      }
      if (out.empty()) fail(v->line, "key '" + key + "': list is empty");
    }
  }

  void reject_unknown() const {
    for (const auto& [sec, keys] : doc_.sections) {
      static const std::set<std::string> sections{"geometry", "profile", "sweep", "numerics", "run"};
      if (!sections.count(sec)) fail(doc_.section_lines.at(sec), "unknown section [" + sec + "]");
      for (const auto& [key, v] : keys)
        if (!used_.count(sec + "." + key)) fail(v.line, "unknown key '" + key + "' in [" + sec + "]");
    }
  }

 private:
  const IniDocument& doc_;
  std::set<std::string> used_;
};

inline void load_table(RunConfig& c, int line) {
  const std::filesystem::path p = std::filesystem::path(c.table_file).is_absolute()
                                       ? std::filesystem::path(c.table_file)
                                       : c.base_dir / c.table_file;
  std::ifstream in(p);
  if (!in) throw ConfigError(c.source, line, "cannot open table file '" + p.string() + "'");
  std::string raw;
  int ln = 0;
  c.table_x.clear();
  c.table_delta.clear();
  while (std::getline(in, raw)) {
    ++ln;
    if (auto h = raw.find('#'); h != std::string::npos) raw.erase(h);
    std::istringstream row(raw);
    double x, v;
    if (!(row >> x)) {
      if (trim(raw).empty()) continue;
      throw ConfigError(p.string(), ln, "expected two numeric columns 'x delta'");
    }
    std::string extra;
    if (!(row >> v) || (row >> extra) || !std::isfinite(x) || !std::isfinite(v))
      throw ConfigError(p.string(), ln, "expected two numeric columns 'x delta'");
    if (!c.table_x.empty() && !(x > c.table_x.back()))
      throw ConfigError(p.string(), ln, "x must be strictly increasing");
    c.table_x.push_back(x);
    c.table_delta.push_back(v);
  }
  if (c.table_x.size() < 2) throw ConfigError(c.source, line, "table file needs at least two rows");
}

}  // namespace detail

/// Parses and validates a configuration document.
inline RunConfig load_config(const IniDocument& doc, const std::filesystem::path& base_dir = {}) {
  RunConfig c;
  c.source = doc.file;
  c.base_dir = base_dir;
  detail::Reader r(doc);

  for (const char* s : {"geometry", "profile", "run"})
    if (!doc.sections.count(s)) r.fail(doc.last_line, std::string("missing section [") + s + "]");

  r.get_positive("geometry", "d1", c.d1);
  r.get_positive("geometry", "d2", c.d2);
  r.get("geometry", "alpha0", c.alpha0);

  const IniValue* kind = r.find("profile", "kind");
  if (!kind) r.fail(r.where("profile"), "missing key 'kind' in [profile]");
  if (kind->text == "rectwell") {
    c.kind = ProfileKind::RectWell;
    r.get_positive("profile", "a", c.a);
    r.get("profile", "alpha1", c.alpha1);
  } else if (kind->text == "piecewise") {
    c.kind = ProfileKind::Piecewise;
    const IniValue* b = r.find("profile", "breaks");
    const IniValue* v = r.find("profile", "values");
    if (!b || !v) r.fail(kind->line, "piecewise profile needs 'breaks' and 'values'");
    r.get_list("profile", "breaks", c.breaks);
    r.get_list("profile", "values", c.values);
    if (c.breaks.size() != c.values.size() + 1)
      r.fail(v->line, "piecewise profile: need one more break than values");
    for (std::size_t i = 0; i + 1 < c.breaks.size(); ++i)
      if (!(c.breaks[i + 1] > c.breaks[i])) r.fail(b->line, "piecewise profile: breaks must increase");
  } else if (kind->text == "table") {
    c.kind = ProfileKind::Table;
    const IniValue* f = r.find("profile", "file");
    if (!f || f->text.empty()) r.fail(kind->line, "table profile needs 'file'");
    c.table_file = f->text;
    detail::load_table(c, f->line);
  } else {
    r.fail(kind->line, "unknown profile kind '" + kind->text + "' (rectwell, piecewise, table)");
  }
  if (auto v = r.find("profile", "lambda")) {
    c.lambda = r.num(*v, "lambda");
    if (!(c.lambda >= 0.0)) r.fail(v->line, "lambda must be >= 0");
  }
  if (auto v = r.find("profile", "sigma")) {
    c.sigma = r.num(*v, "sigma");
    if (!(c.sigma > 0.0 && c.sigma <= 1.0)) r.fail(v->line, "sigma must lie in (0, 1]");
  }

  if (auto v = r.find("sweep", "axis")) {
    static const std::map<std::string, SweepAxis> axes{
        {"none", SweepAxis::None},   {"lambda", SweepAxis::Lambda}, {"sigma", SweepAxis::Sigma},
        {"a", SweepAxis::A},         {"alpha0", SweepAxis::Alpha0}, {"alpha1", SweepAxis::Alpha1}};
    auto it = axes.find(v->text);
    if (it == axes.end()) r.fail(v->line, "unknown sweep axis '" + v->text + "'");
    c.axis = it->second;
    if ((c.axis == SweepAxis::A || c.axis == SweepAxis::Alpha1) && c.kind != ProfileKind::RectWell)
      r.fail(v->line, "sweep axis '" + v->text + "' requires a rectwell profile");
    const IniValue* vals = r.find("sweep", "values");
    if (c.axis != SweepAxis::None && !vals) r.fail(v->line, "sweep axis given without 'values'");
    if (vals) {
      r.get_list("sweep", "values", c.sweep_values);
      for (double x : c.sweep_values) {
        if (c.axis == SweepAxis::Lambda && !(x >= 0.0)) r.fail(vals->line, "lambda values must be >= 0");
        if (c.axis == SweepAxis::Sigma && !(x > 0.0 && x <= 1.0))
          r.fail(vals->line, "sigma values must lie in (0, 1]");
        if (c.axis == SweepAxis::A && !(x > 0.0)) r.fail(vals->line, "a values must be positive");
      }
      std::sort(c.sweep_values.begin(), c.sweep_values.end());
      if (std::adjacent_find(c.sweep_values.begin(), c.sweep_values.end()) != c.sweep_values.end())
        r.fail(vals->line, "duplicate sweep value");
    }
  } else if (r.find("sweep", "values")) {
    r.fail(r.where("sweep"), "sweep 'values' given without 'axis'");
  }

  r.get_count("numerics", "n_max", c.n_max, 0);
  if (c.n_max == 1) r.fail(r.find("numerics", "n_max")->line, "n_max must be 0 (automatic) or >= 2");
  r.get_count("numerics", "n_cells", c.n_cells, 16);
  if (c.n_cells % 2) r.fail(r.find("numerics", "n_cells")->line, "n_cells must be even");
  r.get_positive("numerics", "kappa_tol", c.kappa_tol);
  r.get_positive("numerics", "multiplicity_tol", c.multiplicity_tol);
  r.get_count("numerics", "modes_report", c.modes_report, 1);
  r.get_positive("numerics", "fd_h", c.fd_h);
  r.get_positive("numerics", "fd_X", c.fd_X);
  r.get_positive("numerics", "fd_margin", c.fd_margin);
  r.get_positive("numerics", "fd_x_tol", c.fd_x_tol);
  if (auto v = r.find("numerics", "skn_strategy")) {
    if (v->text != "quadrature" && v->text != "montecarlo")
      r.fail(v->line, "skn_strategy must be 'quadrature' or 'montecarlo'");
    c.skn_strategy = v->text;
  }
  r.get_count("numerics", "mc_samples", c.mc_samples, 2);
  r.get_positive("numerics", "hs_kappa1", c.hs_kappa1);
  if (auto v = r.find("numerics", "hs_kappa_ladder")) {
    r.get_list("numerics", "hs_kappa_ladder", c.hs_kappa_ladder);
    for (double k : c.hs_kappa_ladder)
      if (!(k > 0.0)) r.fail(v->line, "hs_kappa_ladder entries must be positive");
  }

  const IniValue* tasks = r.find("run", "tasks");
  if (!tasks) r.fail(r.where("run"), "missing key 'tasks' in [run]");
  for (const auto& t : detail::split_list(tasks->text)) {
    if (std::find(known_tasks().begin(), known_tasks().end(), t) == known_tasks().end())
      r.fail(tasks->line, "unknown task '" + t + "'");
    if (std::find(c.tasks.begin(), c.tasks.end(), t) != c.tasks.end())
      r.fail(tasks->line, "duplicate task '" + t + "'");
    c.tasks.push_back(t);
  }
  if (c.tasks.empty()) r.fail(tasks->line, "task list is empty");
  if (auto v = r.find("run", "out")) {
    if (v->text.empty()) r.fail(v->line, "'out' must not be empty");
    c.out = v->text;
  }
  if (auto v = r.find("run", "seed")) c.seed = r.integer(*v, "seed");
  r.get_count("run", "jobs", c.jobs, 1);

  // Task/axis compatibility.
  auto has = [&](const char* t) { return std::find(c.tasks.begin(), c.tasks.end(), t) != c.tasks.end(); };
  if (has("asymptotics") && c.axis != SweepAxis::Lambda && c.axis != SweepAxis::Sigma)
    r.fail(tasks->line, "task 'asymptotics' requires sweep axis lambda or sigma");
  if (has("hs-scaling") && c.axis != SweepAxis::Sigma)
    r.fail(tasks->line, "task 'hs-scaling' requires sweep axis sigma");

  r.reject_unknown();
  return c;
}

inline RunConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), 0, "cannot open configuration file");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_config(parse_ini(ss.str(), path.string()), path.parent_path());
}

namespace detail {

inline std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt17(v[i]);
  return s;
}

}  // namespace detail

/// Canonical INI text of a configuration; parsing it yields the same values.
inline std::string to_ini(const RunConfig& c) {
  using detail::fmt17;
  std::ostringstream o;
  o << "[geometry]\nd1 = " << fmt17(c.d1) << "\nd2 = " << fmt17(c.d2) << "\nalpha0 = " << fmt17(c.alpha0)
    << "\n\n[profile]\nkind = " << to_string(c.kind) << "\n";
  switch (c.kind) {
    case ProfileKind::RectWell: o << "a = " << fmt17(c.a) << "\nalpha1 = " << fmt17(c.alpha1) << "\n"; break;
    case ProfileKind::Piecewise:
      o << "breaks = " << detail::join(c.breaks) << "\nvalues = " << detail::join(c.values) << "\n";
      break;
    case ProfileKind::Table: o << "file = " << c.table_file << "\n"; break;
  }
  o << "lambda = " << fmt17(c.lambda) << "\nsigma = " << fmt17(c.sigma) << "\n\n[sweep]\naxis = "
    << to_string(c.axis) << "\n";
  if (!c.sweep_values.empty()) o << "values = " << detail::join(c.sweep_values) << "\n";
  o << "\n[numerics]\nn_max = " << c.n_max << "\nn_cells = " << c.n_cells << "\nkappa_tol = " << fmt17(c.kappa_tol)
    << "\nmultiplicity_tol = " << fmt17(c.multiplicity_tol) << "\nmodes_report = " << c.modes_report
    << "\nfd_h = " << fmt17(c.fd_h) << "\nfd_X = " << fmt17(c.fd_X) << "\nfd_margin = " << fmt17(c.fd_margin)
    << "\nfd_x_tol = " << fmt17(c.fd_x_tol) << "\nskn_strategy = " << c.skn_strategy
    << "\nmc_samples = " << c.mc_samples << "\nhs_kappa1 = " << fmt17(c.hs_kappa1)
    << "\nhs_kappa_ladder = " << detail::join(c.hs_kappa_ladder) << "\n\n[run]\ntasks = ";
  for (std::size_t i = 0; i < c.tasks.size(); ++i) o << (i ? ", " : "") << c.tasks[i];
  o << "\nout = " << c.out << "\nseed = " << c.seed << "\njobs = " << c.jobs << "\n";
  return o.str();
}

}  // namespace waveguide
