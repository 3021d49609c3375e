#pragma once

// Orchestration behind the command-line tool: sweep construction, the task
// computations, a worker pool over (task, sweep point) pairs, and the CSV,
// JSON and plot-data writers.  Output is assembled in sweep order, so files are
// byte-identical for identical configurations regardless of scheduling.

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include <boost/version.hpp>
#include <nlohmann/json.hpp>

#include "waveguide/asymptotics.hpp"
#include "waveguide/bounds.hpp"
#include "waveguide/bskernel.hpp"
#include "waveguide/config.hpp"
#include "waveguide/oracle.hpp"
#include "waveguide/spectrum.hpp"
#include "waveguide/transverse.hpp"

namespace waveguide {

inline constexpr const char* kVersion = "1.0.0";

/// An output path could not be created or written (exit status 2).
class OutputError : public std::runtime_error {
 public:
  explicit OutputError(const std::string& what) : std::runtime_error(what) {}
};

struct Check {
  std::string name;
  bool passed = true;
  std::string detail;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct TaskResult {
  std::string task;
  Table csv;
  std::vector<std::pair<std::string, Table>> plots;  // file stem -> data
  std::vector<Check> checks;
  std::map<std::string, double> metrics;
};

struct RunResult {
  std::vector<TaskResult> tasks;
  bool all_passed() const {
    for (const auto& t : tasks)
      for (const auto& c : t.checks)
        if (!c.passed) return false;
    return true;
  }
};

/// One point of the sweep with everything the tasks need.
struct SweepPoint {
  double value = std::numeric_limits<double>::quiet_NaN();  // sweep coordinate (NaN without a sweep)
  double alpha0 = 0.0;
  double a = 0.0;       // rectwell half-width (bare)
  double alpha1 = 0.0;  // rectwell inner coupling (bare)
  double lambda = 1.0;
  double sigma = 1.0;
};

inline CouplingProfile make_profile(const RunConfig& c, const SweepPoint& p) {
  CouplingProfile prof = [&]() -> CouplingProfile {
    switch (c.kind) {
      case ProfileKind::RectWell: return CouplingProfile(p.alpha0, RectWell{p.a, p.alpha1});
      case ProfileKind::Piecewise: return CouplingProfile(p.alpha0, PiecewiseAlpha{c.breaks, c.values});
      case ProfileKind::Table: {
        const auto xs = c.table_x, vs = c.table_delta;
        auto f = [xs, vs](double x) {
          if (x < xs.front() || x > xs.back()) return 0.0;
          const auto it = std::upper_bound(xs.begin(), xs.end(), x);
          const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - xs.begin()), xs.size() - 1);
          const double t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
          return vs[i - 1] + t * (vs[i] - vs[i - 1]);
        };
        return CouplingProfile(p.alpha0, SampledDelta{f, std::max(std::abs(xs.front()), std::abs(xs.back()))});
      }
    }
    throw InternalError("unknown profile kind");
  }();
  return prof.with_lambda(p.lambda).with_sigma(p.sigma);
}

inline std::vector<SweepPoint> sweep_points(const RunConfig& c) {
  const SweepPoint base{std::numeric_limits<double>::quiet_NaN(), c.alpha0, c.a, c.alpha1, c.lambda, c.sigma};
  if (c.axis == SweepAxis::None) return {base};
  std::vector<SweepPoint> pts;
  for (double v : c.sweep_values) {
    SweepPoint p = base;
    p.value = v;
    switch (c.axis) {
      case SweepAxis::Lambda: p.lambda = v; break;
      case SweepAxis::Sigma: p.sigma = v; break;
      case SweepAxis::A: p.a = v; break;
      case SweepAxis::Alpha0: p.alpha0 = v; break;
      case SweepAxis::Alpha1: p.alpha1 = v; break;
      case SweepAxis::None: break;
    }
    pts.push_back(p);
  }
  return pts;
}

/// Least-squares slope of log y against log x over the finite positive pairs.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0) || !std::isfinite(y[i])) continue;
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace detail {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct PointOutput {
  std::vector<std::vector<double>> rows;
  std::vector<Check> checks;
};

// Per-run context shared read-only by the workers.
struct Context {
  const RunConfig& cfg;
  Geometry geometry;
  BSNumerics num;
};

inline std::size_t mode_count(const Context& ctx, const CouplingProfile& prof) {
  if (ctx.cfg.n_max) return ctx.cfg.n_max;
  const double h = 2.0 * prof.support() / static_cast<double>(ctx.cfg.n_cells);
  return recommended_mode_count(ctx.geometry, h);
}

inline PointOutput task_modes(const Context& ctx, const SweepPoint& p) {
  PointOutput out;
  const ModeBasis b = solve_modes(ctx.geometry, p.alpha0, std::max<std::size_t>(ctx.cfg.modes_report, 2));
  bool bound_ok = true, sorted = true;
  for (std::size_t i = 0; i < ctx.cfg.modes_report; ++i) {
    const auto& m = b.modes[i];
    const double u = std::sqrt(std::max(m.nu, 0.0));
    const double hb = 2.0 * h_bound(u, ctx.geometry.d1) * h_bound(u, ctx.geometry.d2);
    if (m.nu > 0.0 && m.chi0_sq > hb + 1e-12) bound_ok = false;
    if (i && !(m.nu > b.modes[i - 1].nu)) sorted = false;
    out.rows.push_back({p.value, static_cast<double>(m.index), m.nu, m.chi0_sq, m.nu > 0.0 ? hb : kNaN});
  }
  out.checks.push_back({"modes.chi_bound", bound_ok, "chi_n(0)^2 <= 2 h1 h2"});
  out.checks.push_back({"modes.ordering", sorted, "nu_n strictly increasing"});
  return out;
}

inline PointOutput task_spectrum(const Context& ctx, const SweepPoint& p) {
  PointOutput out;
  const CouplingProfile prof = make_profile(ctx.cfg, p);
  const ModeBasis b = solve_modes(ctx.geometry, p.alpha0, mode_count(ctx, prof));
  const SpectralReport rep = find_bound_states(prof, b, ctx.num);
  const double n = rep.count(), nt = rep.threshold_count;
  if (rep.eigenvalues.empty()) out.rows.push_back({p.value, n, nt, 0.0, kNaN, kNaN, kNaN, kNaN});
  int j = 0;
  for (const auto& s : rep.eigenvalues)
    out.rows.push_back({p.value, n, nt, static_cast<double>(++j), s.point.E, s.point.kappa1,
                        static_cast<double>(s.multiplicity), s.residual});
  out.checks.push_back({"spectrum.count_consistency", rep.count() == rep.threshold_count,
                        "crossings found = count at threshold"});
  out.checks.push_back({"spectrum.threshold_stable", rep.threshold_count_stable,
                        "threshold count unchanged under eps/10"});
  return out;
}

inline PointOutput task_asymptotics(const Context& ctx, const SweepPoint& p) {
  PointOutput out;
  const CouplingProfile prof = make_profile(ctx.cfg, p);
  const ModeBasis b = solve_modes(ctx.geometry, p.alpha0, mode_count(ctx, prof));
  const bool by_lambda = ctx.cfg.axis == SweepAxis::Lambda;
  const ExpansionCoefficients c = by_lambda ? weak_coupling_expansion(prof, b) : scaled_expansion(prof, b, p.sigma);
  const double s = by_lambda ? p.lambda : p.sigma;
  const double k1 = by_lambda ? c.kappa_lambda(s, 1) : c.kappa_sigma(1);
  const double k2 = by_lambda ? c.kappa_lambda(s, 2) : c.kappa_sigma(2);
  const double c2 = by_lambda ? c.c2_lambda : c.c2_sigma;
  const double nu1 = b.nu1();
  const SpectralReport rep = find_bound_states(prof, b, ctx.num);
  const double ks = rep.ground_state ? rep.ground_state->kappa1 : kNaN;
  const double es = rep.ground_state ? rep.ground_state->E : kNaN;
  auto energy = [&](double k) { return k > 0.0 ? nu1 - k * k : kNaN; };
  out.rows.push_back({s, es, energy(k1), energy(k2), std::abs(ks - k2), ks, k2, c.c1_lambda, c2});
  return out;
}

inline PointOutput task_bounds(const Context& ctx, const SweepPoint& p) {
  PointOutput out;
  const CouplingProfile prof = make_profile(ctx.cfg, p);
  const ModeBasis b = solve_modes(ctx.geometry, p.alpha0, mode_count(ctx, prof));
  const SpectralReport rep = find_bound_states(prof, b, ctx.num);
  const int n = rep.threshold_count;

  double lower = kNaN, upper = kNaN, rect = kNaN, gen = kNaN, gen_err = kNaN, a_eff = kNaN;
  if (ctx.cfg.kind == ProfileKind::RectWell) {
    a_eff = p.sigma * p.a;
    const double a1_eff = p.alpha0 + p.lambda * (p.alpha1 - p.alpha0);
    if (a1_eff < p.alpha0) {
      const ModeBasis b1 = solve_modes(ctx.geometry, a1_eff, 4);
      const BracketingBound br = bracketing_bound(a_eff, b, b1);
      lower = br.lower;
      upper = br.upper;
      rect = skn_bound_rectwell(a_eff, p.alpha0 - a1_eff, b);
    }
  }
  if (prof.negative_part().l1_norm() > 0.0) {
    const auto strat = ctx.cfg.skn_strategy == "montecarlo" ? SknStrategy::MonteCarlo : SknStrategy::Quadrature;
    const SknResult r = skn_bound_general(prof, b, strat, ctx.cfg.seed, ctx.cfg.mc_samples);
    gen = r.value;
    gen_err = r.error;
  }
  bool chain = true;
  if (std::isfinite(lower)) chain = chain && lower <= n && n <= upper;
  if (std::isfinite(rect)) chain = chain && n <= rect;
  if (std::isfinite(gen)) chain = chain && n <= gen + 3.0 * gen_err;
  out.rows.push_back({p.value, a_eff, static_cast<double>(n), lower, upper, gen, gen_err, rect, chain ? 1.0 : 0.0});
  out.checks.push_back({"bounds.chain", chain, "brack_lower <= N <= min(brack_upper, skn)"});
  if (std::isfinite(rect) && std::isfinite(gen)) {
    const double rel = std::abs(rect - gen) / rect;
    out.checks.push_back({"bounds.skn_agreement", rel <= 1e-4, "closed form vs general, relative " + fmt17(rel)});
  }
  return out;
}

inline PointOutput task_oracle(const Context& ctx, const SweepPoint& p) {
  PointOutput out;
  const CouplingProfile prof = make_profile(ctx.cfg, p);
  const ModeBasis b = solve_modes(ctx.geometry, p.alpha0, mode_count(ctx, prof));
  const SpectralReport rep = find_bound_states(prof, b, ctx.num);
  BSNumerics coarse = ctx.num;
  coarse.n_cells = std::max<std::size_t>(16, ctx.num.n_cells / 2 + (ctx.num.n_cells / 2) % 2);
  const SpectralReport rep_c = find_bound_states(prof, b, coarse);

  std::vector<double> bs, bs_err;
  for (std::size_t i = 0; i < rep.eigenvalues.size(); ++i) {
    const auto& s = rep.eigenvalues[i];
    const double err = i < rep_c.eigenvalues.size() ? std::abs(s.point.E - rep_c.eigenvalues[i].point.E) : kNaN;
    if (s.point.E < b.nu1() - ctx.cfg.fd_margin)
      for (int m = 0; m < s.multiplicity; ++m) {
        bs.push_back(s.point.E);
        bs_err.push_back(err);
      }
  }
  StripOracle o;
  try {
    o = strip_oracle(ctx.geometry, prof, ctx.cfg.fd_h, ctx.cfg.fd_X, bs.size() + 2, ctx.cfg.fd_margin,
                     ctx.cfg.fd_x_tol);
  } catch (const RegimeError& e) {
    out.checks.push_back({"oracle.truncation", false, e.what()});
    return out;
  }
  const bool counts = o.count == static_cast<int>(bs.size()) && o.count_stable;
  out.checks.push_back({"oracle.count", counts,
                        "BS " + std::to_string(bs.size()) + " vs FD " + std::to_string(o.count)});
  bool agree = true;
  const std::size_t n = std::max(bs.size(), o.eigenvalues.size());
  for (std::size_t j = 0; j < n; ++j) {
    const double eb = j < bs.size() ? bs[j] : kNaN;
    const double eo = j < o.eigenvalues.size() ? o.eigenvalues[j] : kNaN;
    const double eerr = j < o.error.size() ? o.error[j] : kNaN;
    const double tol = std::max(eerr, j < bs_err.size() ? bs_err[j] : 0.0);
    const bool ok = std::abs(eb - eo) <= tol;
    agree = agree && ok;
    out.rows.push_back({p.value, static_cast<double>(j + 1), eb, eo, eerr, std::abs(eb - eo), ok ? 1.0 : 0.0});
  }
  out.checks.push_back({"oracle.agreement", agree, "|E_bs - E_fd| <= max(oracle error, BS grid error)"});
  return out;
}

inline PointOutput task_hs(const Context& ctx, const SweepPoint& p) {
  PointOutput out;
  const CouplingProfile prof = make_profile(ctx.cfg, p);
  const ModeBasis b = solve_modes(ctx.geometry, p.alpha0, mode_count(ctx, prof));
  const KernelAssembler asmb(b, prof, make_grid(prof, ctx.cfg.n_cells));
  const double m = hs_norm(asmb.assemble(KernelKind::M, ctx.cfg.hs_kappa1));
  const double nn = hs_norm(asmb.assemble(KernelKind::N, ctx.cfg.hs_kappa1));
  out.rows.push_back({p.sigma, m * m, nn * nn});
  return out;
}

inline void write_file(const std::filesystem::path& path, const std::string& data) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw OutputError("cannot write '" + path.string() + "'");
  f << data;
  if (!f) throw OutputError("write failed for '" + path.string() + "'");
}

}  // namespace detail

inline std::string to_csv(const Table& t) {
  std::string s;
  for (std::size_t i = 0; i < t.columns.size(); ++i) s += (i ? "," : "") + t.columns[i];
  s += "\n";
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + detail::fmt17(r[i]);
    s += "\n";
  }
  return s;
}

/// Whitespace columns with '#' header comments.
inline std::string to_plotdata(const Table& t, const std::string& title) {
  std::string s = "# " + title + "\n#";
  for (const auto& c : t.columns) s += " " + c;
  s += "\n";
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) s += (i ? " " : "") + detail::fmt17(r[i]);
    s += "\n";
  }
  return s;
}

/// Runs every task of the configuration over the sweep with `jobs` workers.
inline RunResult run(const RunConfig& cfg) {
  using detail::PointOutput;
  detail::Context ctx{cfg, cfg.geometry(), {}};
  ctx.num.n_cells = cfg.n_cells;
  ctx.num.kappa_tol = cfg.kappa_tol;
  ctx.num.multiplicity_tol = cfg.multiplicity_tol;

  const std::vector<SweepPoint> pts = sweep_points(cfg);
  using TaskFn = std::function<PointOutput(const detail::Context&, const SweepPoint&)>;
  const std::map<std::string, TaskFn> fns{{"modes", detail::task_modes},
                                          {"spectrum", detail::task_spectrum},
                                          {"asymptotics", detail::task_asymptotics},
                                          {"bounds", detail::task_bounds},
                                          {"oracle-validate", detail::task_oracle},
                                          {"hs-scaling", detail::task_hs}};

  const std::size_t nt = cfg.tasks.size(), np = pts.size();
  std::vector<PointOutput> results(nt * np);
  std::vector<std::string> errors(nt * np);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < nt * np;) {
      try {
        results[i] = fns.at(cfg.tasks[i / np])(ctx, pts[i % np]);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(cfg.jobs, static_cast<unsigned>(nt * np)));
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  RunResult rr;
  for (std::size_t t = 0; t < nt; ++t) {
    TaskResult tr;
    tr.task = cfg.tasks[t];
    const std::string sweep = "sweep_" + to_string(cfg.axis);
    if (tr.task == "modes") tr.csv.columns = {sweep, "n", "nu", "chi0_sq", "chi_bound"};
    if (tr.task == "spectrum")
      tr.csv.columns = {sweep, "count", "threshold_count", "index", "E", "kappa1", "multiplicity", "residual"};
    if (tr.task == "asymptotics")
      tr.csv.columns = {to_string(cfg.axis), "E_solver", "E_expansion_1", "E_expansion_2", "remainder",
                        "kappa_solver", "kappa_expansion_2", "c1", "c2"};
    if (tr.task == "bounds")
      tr.csv.columns = {sweep, "a", "N_computed", "brack_lower", "brack_upper", "skn_general",
                        "skn_general_error", "skn_rectwell", "chain_ok"};
    if (tr.task == "oracle-validate")
      tr.csv.columns = {sweep, "index", "E_bs", "E_oracle", "oracle_error", "abs_diff", "agree"};
    if (tr.task == "hs-scaling") tr.csv.columns = {"sigma", "M_hs2", "N_hs2", "slope_M", "slope_N"};

    std::map<std::string, bool> seen;
    for (std::size_t k = 0; k < np; ++k) {
      const auto& po = results[t * np + k];
      if (!errors[t * np + k].empty()) {
        tr.checks.push_back({tr.task + ".evaluation", false,
                             "sweep point " + detail::fmt17(pts[k].value) + ": " + errors[t * np + k]});
        continue;
      }
      for (const auto& r : po.rows) tr.csv.rows.push_back(r);
      // Merge per-point checks: one entry per name, failing if any point fails.
      for (const auto& c : po.checks) {
        auto it = std::find_if(tr.checks.begin(), tr.checks.end(), [&](const Check& x) { return x.name == c.name; });
        if (it == tr.checks.end()) {
          tr.checks.push_back(c);
          if (!c.passed) tr.checks.back().detail = "sweep point " + detail::fmt17(pts[k].value) + ": " + c.detail;
        } else if (it->passed && !c.passed) {
          *it = c;
          it->detail = "sweep point " + detail::fmt17(pts[k].value) + ": " + c.detail;
        }
      }
    }

    if (tr.task == "asymptotics") {
      std::vector<double> x, rem;
      for (const auto& r : tr.csv.rows) {
        x.push_back(r[0]);
        rem.push_back(r[4]);
      }
      const double slope = loglog_slope(x, rem);
      tr.metrics["remainder_slope"] = slope;
      if (x.size() >= 3) {
        const bool ok = std::isfinite(slope) && std::abs(slope - 3.0) <= 0.4;
        tr.checks.push_back({"asymptotics.remainder_order", ok, "log-log slope " + detail::fmt17(slope)});
      }
      tr.plots.push_back({"asymptotics", tr.csv});
    }
    if (tr.task == "hs-scaling") {
      std::vector<double> s, m, n;
      for (const auto& r : tr.csv.rows) {
        s.push_back(r[0]);
        m.push_back(r[1]);
        n.push_back(r[2]);
      }
      const double sm = loglog_slope(s, m), sn = loglog_slope(s, n);
      for (auto& r : tr.csv.rows) {
        r.push_back(sm);
        r.push_back(sn);
      }
      tr.metrics["slope_M"] = sm;
      tr.metrics["slope_N"] = sn;
      if (s.size() >= 2)
        tr.checks.push_back({"hs.slope_M", std::abs(sm - 4.0) <= 0.3, "slope " + detail::fmt17(sm)});
      tr.plots.push_back({"hs_scaling", tr.csv});

      // Threshold limits of the bare profile: ||A - A0|| and ||N - N0^1|| along the kappa ladder.
      try {
        SweepPoint bare = pts.front();
        bare.sigma = cfg.sigma;
        const CouplingProfile prof = make_profile(cfg, bare);
        const ModeBasis b = solve_modes(ctx.geometry, bare.alpha0, detail::mode_count(ctx, prof));
        const KernelAssembler asmb(b, prof, make_grid(prof, cfg.n_cells));
        const Eigen::MatrixXd a0 = asmb.assemble(KernelKind::A0, 0.0).matrix;
        const Eigen::MatrixXd n0 = asmb.assemble(KernelKind::N0Beta, 0.0, 1.0).matrix;
        Table lim{{"kappa1", "A_minus_A0_hs", "N_minus_N0_hs"}, {}};
        std::vector<double> ladder = cfg.hs_kappa_ladder;
        std::sort(ladder.rbegin(), ladder.rend());
        bool mono = true;
        for (double k : ladder) {
          const double da = hs_norm(asmb.assemble(KernelKind::A, k).matrix - a0);
          const double dn = hs_norm(asmb.assemble(KernelKind::N, k).matrix - n0);
          if (!lim.rows.empty() && (da > lim.rows.back()[1] || dn > lim.rows.back()[2])) mono = false;
          lim.rows.push_back({k, da, dn});
        }
        tr.checks.push_back({"hs.threshold_limits_monotone", mono, "HS distances decrease as kappa1 -> 0"});
        tr.plots.push_back({"hs_limits", lim});
      } catch (const std::exception& e) {
        tr.checks.push_back({"hs.threshold_limits", false, e.what()});
      }
    }
    if (tr.task == "bounds" || tr.task == "modes" || tr.task == "spectrum") tr.plots.push_back({tr.task, tr.csv});
    if (tr.task == "oracle-validate") tr.plots.push_back({"oracle_validate", tr.csv});
    rr.tasks.push_back(std::move(tr));
  }
  return rr;
}

/// Summary JSON: versions, tolerances, canonical config echo, checks and metrics.
inline nlohmann::ordered_json summary_json(const RunConfig& cfg, const RunResult& rr) {
  nlohmann::ordered_json j;
  j["tool"] = "waveguide";
  j["version"] = kVersion;
  j["eigen_version"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                       std::to_string(EIGEN_MINOR_VERSION);
  j["boost_version"] = BOOST_LIB_VERSION;
  j["seed"] = cfg.seed;
  j["tolerances"] = {{"kappa_tol", cfg.kappa_tol},   {"multiplicity_tol", cfg.multiplicity_tol},
                     {"fd_h", cfg.fd_h},             {"fd_X", cfg.fd_X},
                     {"fd_margin", cfg.fd_margin},   {"fd_x_tol", cfg.fd_x_tol},
                     {"n_cells", cfg.n_cells},       {"n_max", cfg.n_max}};
  j["config"] = to_ini(cfg);
  j["passed"] = rr.all_passed();
  for (const auto& t : rr.tasks) {
    nlohmann::ordered_json jt;
    jt["csv"] = t.task + ".csv";
    jt["rows"] = t.csv.rows.size();
    for (const auto& [k, v] : t.metrics) jt["metrics"][k] = std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
    jt["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : t.checks) jt["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    j["tasks"][t.task] = jt;
  }
  return j;
}

/// Writes <task>.csv, <stem>.dat and summary.json into `dir`.
inline void write_outputs(const std::filesystem::path& dir, const RunConfig& cfg, const RunResult& rr) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw OutputError("cannot create output directory '" + dir.string() + "'");
  for (const auto& t : rr.tasks) {
    detail::write_file(dir / (t.task + ".csv"), to_csv(t.csv));
    for (const auto& [stem, table] : t.plots) detail::write_file(dir / (stem + ".dat"), to_plotdata(table, stem));
  }
  detail::write_file(dir / "summary.json", summary_json(cfg, rr).dump(2) + "\n");
}

}  // namespace waveguide
