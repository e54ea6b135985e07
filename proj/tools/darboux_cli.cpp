// darboux: command-line front end for the displacement library.
//
// Exit codes: 0 success, 1 usage, 2 numerical failure, 3 verification failure.

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "darboux/darboux.hpp"
#include "svg_plot.hpp"

namespace {

using namespace darboux;
using io::fmt17;

constexpr int kUsage = 1;
constexpr int kNumerical = 2;
constexpr int kVerification = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct VerificationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  if (s.empty()) return out;
  for (const auto& f : io::split(s)) {
    try {
      out.push_back(io::parse_double(f));
    } catch (const ParseError&) {
      throw UsageError("bad number in list: '" + f + "'");
    }
  }
  return out;
}

// Output goes to a file when a path is given, otherwise to stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw UsageError("cannot write " + path);
    }
  }
  std::ostream& os() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

struct GridArgs {
  std::vector<double> grid;  // xmin xmax n

  std::optional<Grid> get() const {
    if (grid.empty()) return std::nullopt;
    if (grid.size() != 3) throw UsageError("--grid takes xmin xmax n");
    const double n = grid[2];
    if (n < 16 || n != std::floor(n)) throw UsageError("--grid: n must be an integer >= 16");
    if (!(grid[1] > grid[0])) throw UsageError("--grid: xmin must be below xmax");
    return Grid::linspace(grid[0], grid[1], static_cast<std::size_t>(n));
  }
};

double default_half_width(const LameSystem& sys) {
  return std::isfinite(sys.inv.omega) ? 3.0 * sys.inv.omega : 10.0;
}

// --- elliptic -----------------------------------------------------------------

struct EllipticCmd {
  double m = 0.5;
  std::string fn = "wp";
  std::optional<double> re;
  double im = 0.0;
  GridArgs grid;
  std::optional<int> periods;
  std::size_t n = 4001;
  double pole_radius = Weierstrass::kDefaultPoleRadius;
  std::string out;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("elliptic", "Evaluate wp, wpp, zeta, sigma, sn or the Lame potential");
    c->add_option("--m", m, "Lame modulus in [0, 1]")->required();
    c->add_option("--fn", fn, "Function")->check(CLI::IsMember({"wp", "wpp", "zeta", "sigma", "sn", "lame"}));
    auto* r = c->add_option("--re", re, "Real part of a single argument");
    c->add_option("--im", im, "Imaginary part of the argument");
    auto* g = c->add_option("--grid", grid.grid, "xmin xmax n (real-axis table)")->expected(3);
    auto* p = c->add_option("--periods", periods, "Tabulate the Lame potential over this many periods");
    c->add_option("--n", n, "Samples for --periods");
    c->add_option("--pole-radius", pole_radius, "Pole-exclusion radius");
    c->add_option("--out", out, "Output file (default stdout)");
    r->excludes(g);
    r->excludes(p);
    g->excludes(p);
    c->callback([this] { run(); });
  }

  cplx eval(const Weierstrass& w, cplx z) const {
    if (fn == "wp") return w.p(z);
    if (fn == "wpp") return w.dp(z);
    if (fn == "zeta") return w.zeta(z);
    if (fn == "sigma") return w.sigma(z);
    return {};
  }

  void run() const {
    if (m < 0.0 || m > 1.0) throw UsageError("--m must lie in [0, 1]");
    const LameSystem sys = make_lame(m);
    const Weierstrass w(sys.inv, pole_radius);
    const bool real_fn = fn == "sn" || fn == "lame";
    auto value = [&](double x) -> cplx {
      if (fn == "sn") return jacobi_sn(x, m);
      if (fn == "lame") return lame_potential(x, sys);
      return eval(w, cplx(x, im));
    };
    Sink sink(out);
    if (re) {
      const cplx v = value(*re);
      sink.os() << fmt17(v.real()) << ',' << fmt17(v.imag()) << '\n';
      return;
    }
    std::optional<Grid> g = grid.get();
    std::vector<std::string> comments;
    if (periods) {
      if (fn != "lame") throw UsageError("--periods applies to --fn lame only");
      if (*periods < 1 || n < 16) throw UsageError("--periods needs a positive count and --n >= 16");
      if (!std::isfinite(sys.inv.omega)) throw UsageError("--periods: m = 1 has no finite period");
      g = Grid::linspace(0.0, *periods * sys.period(), n);
      comments.push_back("period=" + fmt17(sys.period()));
    }
    if (!g) throw UsageError("elliptic: give --re (single point), --grid or --periods");
    std::vector<double> xs(g->n), a(g->n), b(g->n);
    for (std::size_t i = 0; i < g->n; ++i) {
      xs[i] = g->x(i);
      const cplx v = value(xs[i]);
      a[i] = v.real();
      b[i] = v.imag();
    }
    if (fn == "lame") {
      io::write_csv(sink.os(), {"x", "V"}, {xs, a}, comments);
    } else if (real_fn) {
      io::write_csv(sink.os(), {"x", fn}, {xs, a});
    } else {
      io::write_csv(sink.os(), {"x", "re", "im"}, {xs, a, b});
    }
  }
};

// --- verify -------------------------------------------------------------------

struct Check {
  std::string suite;
  std::string name;
  double value;
  double tol;
  bool below;  // pass when value < tol (otherwise value > tol)
  bool pass() const { return below ? value < tol : value > tol; }
};

struct VerifyCmd {
  double m = 0.5;
  std::string deltas = "0.3,0.7,1.1";
  std::string potential = "lame";
  bool golden = false;
  std::size_t n = 2001;
  double tol_addition = 1e-8;
  double tol_displacement = 1e-8;
  double tol_riccati = 1e-7;
  double tol_intertwining = 1e-6;
  double tol_golden = 1e-12;
  double negative_spread = 0.1;
  std::string report;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("verify", "Run the residual suites");
    c->add_option("--m", m, "Lame modulus in [0, 1]");
    c->add_option("--deltas", deltas, "Comma-separated real displacements");
    c->add_option("--potential", potential, "lame, or harmonic (negative control)")
        ->check(CLI::IsMember({"lame", "harmonic"}));
    c->add_flag("--golden", golden, "Also compare against the golden vectors named by DARBOUX_GOLDEN");
    c->add_option("--n", n, "Grid points");
    c->add_option("--tol-addition", tol_addition);
    c->add_option("--tol-displacement", tol_displacement);
    c->add_option("--tol-riccati", tol_riccati);
    c->add_option("--tol-intertwining", tol_intertwining);
    c->add_option("--tol-golden", tol_golden);
    c->add_option("--report", report, "Write a JSON report to this file");
    c->callback([this] { run(); });
  }

  std::vector<Check> lame_checks(const std::vector<double>& ds) const {
    const LameSystem sys = make_lame(m);
    const Weierstrass w(sys.inv);
    const double half = default_half_width(sys);
    const Grid g = Grid::linspace(-half, half, n);
    const PotentialFunction v = lame_function(sys);
    std::vector<Check> out;

    // addition laws on 100 pairs per branch
    const double span = std::isfinite(sys.inv.omega) ? sys.inv.omega : 3.0;
    for (Branch br : {Branch::singular, Branch::regular}) {
      double worst = 0.0;
      for (int i = 0; i < 10; ++i) {
        for (int j = 0; j < 10; ++j) {
          const double u = span * (0.05 + 0.9 * (i + 0.25) / 10.0);
          const double vv = span * (0.05 + 0.9 * (j + 0.75) / 10.0);
          try {
            worst = std::max(worst, addition_residual(u, vv, w, br));
          } catch (const DegeneratePairError&) {
          }
        }
      }
      out.push_back({"addition", br == Branch::singular ? "singular branch" : "regular branch", worst,
                     tol_addition, true});
    }

    const TestFunction tests[] = {gaussian(0.0, 0.6), windowed_wave(0.5, 0.8, 2.0)};
    SampledPotential base = sample(v, g);
    for (double d : ds) {
      const std::string tag = "delta=" + short_num(d);
      const auto dr = displacement_residual(v, d, g);
      out.push_back({"functional", tag + " spread", dr.spread, tol_displacement, true});
      out.push_back({"functional", tag + " energy", std::abs(dr.epsilon_recovered - factorization_energy(d, w)),
                     tol_displacement, true});
      const Superpotential s = Superpotential::zeta_form(sys, d);
      const SuperpotentialSamples a = s.sample(g);
      const SampledPotential shifted_v = sample(shifted(v, d), g);
      double disp = 0.0;
      for (std::size_t i = 0; i < g.n; ++i) {
        disp = std::max(disp, std::abs(shifted_v.values[i] - base.values[i] - a.derivative[i]));
      }
      out.push_back({"displacement", tag, disp, tol_displacement, true});
      out.push_back({"riccati", tag + " forward", riccati_residual(a, base, s.epsilon()).max, tol_riccati, true});
      out.push_back({"riccati", tag + " backward",
                     riccati_residual(a, shifted_v, s.epsilon(), RiccatiDirection::backward).max, tol_riccati, true});
      out.push_back({"intertwining", tag, intertwining_residual(s, tests, g), tol_intertwining, true});
    }
    return out;
  }

  std::vector<Check> harmonic_checks(const std::vector<double>& ds) const {
    const Grid g = Grid::linspace(-3.0, 3.0, n);
    std::vector<Check> out;
    for (double d : ds) {
      const auto dr = displacement_residual(harmonic_potential(), d, g);
      out.push_back({"functional", "harmonic delta=" + short_num(d) + " spread", dr.spread, tol_displacement, true});
    }
    return out;
  }

  std::vector<Check> golden_checks() const {
    const char* path = std::getenv("DARBOUX_GOLDEN");
    if (!path || !*path) throw UsageError("--golden needs DARBOUX_GOLDEN to name the golden-vector file");
    const auto recs = io::read_golden(path);
    double worst = 0.0;
    std::string where = "none";
    for (const auto& r : recs) {
      const double e = io::golden_error(r);
      if (e >= worst) {
        worst = e;
        where = r.fn + " m=" + short_num(r.m) + " z=" + short_num(r.z.real()) + "+" + short_num(r.z.imag()) + "i";
      }
    }
    return {{"golden", std::to_string(recs.size()) + " records, worst " + where, worst, tol_golden, true}};
  }

  void run() const {
    const std::vector<double> ds = parse_list(deltas);
    if (ds.empty()) throw UsageError("--deltas must name at least one displacement");
    if (n < 16) throw UsageError("--n must be at least 16");
    if (m < 0.0 || m > 1.0) throw UsageError("--m must lie in [0, 1]");
    std::vector<Check> checks = potential == "harmonic" ? harmonic_checks(ds) : lame_checks(ds);
    if (golden) {
      const auto gc = golden_checks();
      checks.insert(checks.end(), gc.begin(), gc.end());
    }
    const Check* worst = nullptr;
    double worst_ratio = -1.0;
    io::ordered_json j = io::ordered_json::array();
    for (const auto& c : checks) {
      std::cout << (c.pass() ? "PASS " : "FAIL ") << c.suite << ": " << c.name << "  " << short_num(c.value)
                << (c.below ? " < " : " > ") << short_num(c.tol) << '\n';
      j.push_back({{"suite", c.suite}, {"name", c.name}, {"value", c.value}, {"tol", c.tol}, {"pass", c.pass()}});
      const double ratio = c.below ? c.value / c.tol : c.tol / std::max(c.value, 1e-300);
      if (!c.pass() && ratio > worst_ratio) {
        worst_ratio = ratio;
        worst = &c;
      }
    }
    if (!report.empty()) {
      Sink s(report);
      s.os() << j.dump(2) << '\n';
    }
    if (worst) throw VerificationFailure("worst offender: " + worst->suite + ": " + worst->name);
  }
};

// --- displace -----------------------------------------------------------------

struct DisplaceCmd {
  double m = 0.5;
  double delta = 0.7;
  std::string form = "zeta";
  double gamma = 0.0;
  int sign = 1;
  GridArgs grid;
  std::string out;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("displace", "Tabulate a superpotential and its partner potential");
    c->add_option("--m", m, "Lame modulus in [0, 1]");
    c->add_option("--delta", delta, "Real displacement");
    c->add_option("--form", form, "zeta, sqrt or general")->check(CLI::IsMember({"zeta", "sqrt", "general"}));
    c->add_option("--gamma", gamma, "Mixing parameter of the general form");
    c->add_option("--sign", sign, "Branch of the sqrt form (+1 or -1)");
    c->add_option("--grid", grid.grid, "xmin xmax n")->expected(3);
    c->add_option("--out", out, "Output CSV (default stdout)");
    c->callback([this] { run(); });
  }

  void run() const {
    if (m < 0.0 || m > 1.0) throw UsageError("--m must lie in [0, 1]");
    const LameSystem sys = make_lame(m);
    const Grid g = grid.get().value_or(Grid::linspace(-default_half_width(sys), default_half_width(sys), 601));
    const Superpotential s = form == "zeta"    ? Superpotential::zeta_form(sys, delta)
                             : form == "sqrt"  ? Superpotential::sqrt_form(sys, delta, sign)
                                               : Superpotential::general(sys, delta, gamma);
    const SuperpotentialSamples a = s.sample(g);
    const PotentialFunction v = lame_function(sys);
    const SampledPotential base = sample(v, g);
    const SampledPotential vt = displaced_potential(base, a);
    std::vector<double> xs(g.n), vs(g.n), res(g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
      xs[i] = g.x(i);
      vs[i] = v.value(xs[i] + delta);
      const double al = a.value[i];
      res[i] = std::abs(-a.derivative[i] + al * al - 2.0 * (base.values[i] - s.epsilon()));
    }
    Sink sink(out);
    io::write_csv(sink.os(), {"x", "V", "V_shifted", "alpha", "alpha_prime", "V_tilde", "residual"},
                  {xs, base.values, vs, a.value, a.derivative, vt.values, res});
  }
};

// --- chain --------------------------------------------------------------------

io::ordered_json chain_json(const TransformedPotential& tp) {
  io::ordered_json j;
  j["energies"] = tp.energies;
  j["deltas"] = io::ordered_json::array();
  for (const auto& d : tp.deltas) j["deltas"].push_back(io::complex_json(d));
  j["gammas"] = io::ordered_json::array();
  for (const auto& g : tp.gammas) j["gammas"].push_back(io::complex_json(g));
  j["stage_singularities"] = tp.stage_singularities;
  j["singularities"] = tp.singularities;
  j["stage_residuals"] = tp.stage_residuals;
  return j;
}

void write_chain_csv(std::ostream& os, const TransformedPotential& tp) {
  const Grid g = tp.base.grid();
  std::vector<double> xs(g.n);
  for (std::size_t i = 0; i < g.n; ++i) xs[i] = g.x(i);
  const std::vector<std::string> comments =
      tp.final.period ? std::vector<std::string>{"period=" + fmt17(*tp.final.period)} : std::vector<std::string>{};
  io::write_csv(os, {"x", "V_base", "V_stage1", "V_final"}, {xs, tp.base.values, tp.stages.front().values, tp.final.values},
                comments);
}

struct ChainCmd {
  double m = 0.5;
  std::string eps;
  std::string gammas;
  GridArgs grid;
  std::string out;
  std::string json;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("chain", "Build a Backlund chain from stage energies");
    c->add_option("--m", m, "Lame modulus in [0, 1]");
    c->add_option("--eps", eps, "Comma-separated stage energies")->required();
    c->add_option("--gamma", gammas, "Comma-separated mixing parameters per stage (0 = pure zeta form)");
    c->add_option("--grid", grid.grid, "xmin xmax n")->expected(3);
    c->add_option("--out", out, "Output CSV (default stdout)");
    c->add_option("--json", json, "JSON summary file");
    c->callback([this] { run(); });
  }

  void run() const {
    if (m < 0.0 || m > 1.0) throw UsageError("--m must lie in [0, 1]");
    const std::vector<double> es = parse_list(eps);
    const std::vector<double> gs = parse_list(gammas);
    if (es.empty()) throw UsageError("--eps must name at least one energy");
    if (!gs.empty() && gs.size() != es.size()) throw UsageError("--gamma needs one value per stage");
    ChainSpec spec;
    spec.sys = make_lame(m);
    spec.grid = grid.get().value_or(
        Grid::linspace(-default_half_width(spec.sys), default_half_width(spec.sys), 601));
    for (std::size_t i = 0; i < es.size(); ++i) {
      ChainStage st{es[i], {}};
      const double gm = gs.empty() ? 0.0 : gs[i];
      st.source.kind = gm == 0.0 ? StageSource::Kind::zeta : StageSource::Kind::general;
      st.source.gamma = gm;
      spec.stages.push_back(st);
    }
    const TransformedPotential tp = chain_potential(spec);
    Sink sink(out);
    write_chain_csv(sink.os(), tp);
    if (!json.empty()) {
      Sink js(json);
      js.os() << chain_json(tp).dump(2) << '\n';
    }
  }
};

// --- spectrum -----------------------------------------------------------------

struct SpectrumCmd {
  std::string input;
  std::string column = "V";
  std::optional<double> period;
  std::optional<std::size_t> bands;
  std::vector<double> edge_range;
  std::vector<double> window;
  std::size_t samples = 0;
  std::string boundary = "floquet";
  std::string out;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("spectrum", "Band edges and bound states of a sampled potential");
    c->add_option("--input", input, "Potential CSV")->required();
    c->add_option("--column", column, "Potential column");
    c->add_option("--period", period, "Period (overrides the file's '# period=' comment)");
    c->add_option("--bands", bands, "Report the lowest N band edges");
    c->add_option("--edges", edge_range, "Report all band edges in [emin, emax]")->expected(2);
    c->add_option("--window", window, "Bound-state window elo ehi")->expected(2);
    c->add_option("--samples", samples, "Discriminant samples over the edge range");
    c->add_option("--boundary", boundary, "floquet or dirichlet")->check(CLI::IsMember({"floquet", "dirichlet"}));
    c->add_option("--out", out, "Output JSON (default stdout)");
    c->callback([this] { run(); });
  }

  void run() const {
    if (!bands && edge_range.empty() && window.empty()) {
      throw UsageError("spectrum: give --bands, --edges or --window");
    }
    SampledPotential v;
    try {
      v = io::read_potential_csv(input, column, period);
    } catch (const ParseError& e) {
      throw UsageError(e.what());
    }
    SpectralReport rep;
    if (bands) rep.band_edges = lowest_band_edges(v, *bands);
    if (!edge_range.empty()) {
      auto e = band_edges(v, edge_range[0], edge_range[1]);
      rep.band_edges.insert(rep.band_edges.end(), e.begin(), e.end());
      if (samples > 0) rep.discriminant_samples = sample_discriminant(v, edge_range[0], edge_range[1], samples);
    }
    if (!window.empty()) {
      BoundStateOptions opt;
      opt.boundary = boundary == "dirichlet" ? Boundary::dirichlet : Boundary::floquet;
      rep.bound_states = bound_states(v, window[0], window[1], opt);
    }
    Sink sink(out);
    sink.os() << io::to_json(rep).dump(2) << '\n';
  }
};

// --- figure -------------------------------------------------------------------

struct FigureCmd {
  std::string name;
  double m = 0.5;
  std::string eps;
  std::string gammas;
  std::optional<int> periods;
  std::size_t ppp = 400;
  double tol_energy = 1e-3;
  std::string out;
  std::string json;
  std::string plot;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("figure", "Defect (fig1) or two-level gap insertion (fig2) with spectral check");
    c->add_option("name", name, "fig1 or fig2")->required()->check(CLI::IsMember({"fig1", "fig2"}));
    c->add_option("--m", m, "Lame modulus in (0, 1)");
    c->add_option("--eps", eps, "Energy (fig1) or two comma-separated energies (fig2)")->required();
    c->add_option("--gamma", gammas, "Mixing parameter(s); searched when omitted");
    c->add_option("--periods", periods, "Background periods on each side (default: sized for decay)");
    c->add_option("--ppp", ppp, "Samples per period");
    c->add_option("--tol-energy", tol_energy, "Bound-state energy tolerance");
    c->add_option("--out", out, "Output CSV (default stdout)");
    c->add_option("--json", json, "JSON summary file");
    c->add_option("--plot", plot, "SVG file for a static plot");
    c->callback([this] { run(); });
  }

  void run() const {
    if (!(m > 0.0 && m < 1.0)) throw UsageError("figure: --m must lie in (0, 1)");
    const std::vector<double> es = parse_list(eps);
    const std::vector<double> gs = parse_list(gammas);
    FigureOptions opt;
    opt.periods_each_side = periods;
    opt.points_per_period = ppp;
    FigureResult fr;
    double win_lo = 0.0, win_hi = 0.0;
    if (name == "fig1") {
      if (es.size() != 1) throw UsageError("fig1 takes one energy");
      if (gs.size() > 1) throw UsageError("fig1 takes at most one --gamma");
      fr = fig1_construction(m, es[0], gs.empty() ? std::nullopt : std::optional<double>(gs[0]), opt);
      const auto mn = *std::min_element(fr.tp.final.values.begin(), fr.tp.final.values.end());
      win_lo = mn - 0.01;
      win_hi = fr.sys.E0 - 1e-6;
    } else {
      if (es.size() != 2) throw UsageError("fig2 takes two energies");
      if (!gs.empty() && gs.size() != 2) throw UsageError("fig2 takes two --gamma values");
      std::optional<std::pair<double, double>> gp;
      if (!gs.empty()) gp = std::make_pair(gs[0], gs[1]);
      fr = fig2_construction(m, es[0], es[1], gp, opt);
      win_lo = fr.sys.E1 + 1e-6;
      win_hi = fr.sys.E1p - 1e-6;
    }
    const auto states = bound_states(fr.tp.final, win_lo, win_hi);

    std::vector<double> want = fr.energies;
    std::sort(want.begin(), want.end());
    bool ok = states.size() == want.size();
    for (std::size_t i = 0; ok && i < want.size(); ++i) ok = std::abs(states[i].energy - want[i]) <= tol_energy;

    Sink sink(out);
    write_chain_csv(sink.os(), fr.tp);
    io::ordered_json j = chain_json(fr.tp);
    j["figure"] = name;
    j["m"] = m;
    j["periods_each_side"] = fr.periods_each_side;
    j["candidates_tried"] = fr.candidates_tried;
    j["imag_spread"] = fr.max_imag_spread;
    j["window"] = {win_lo, win_hi};
    SpectralReport rep;
    rep.bound_states = states;
    j["spectrum"] = io::to_json(rep);
    j["confirmed"] = ok;
    if (!json.empty()) {
      Sink js(json);
      js.os() << j.dump(2) << '\n';
    }
    std::cerr << name << ": " << states.size() << " bound state(s) in (" << fmt17(win_lo) << ", " << fmt17(win_hi)
              << "):";
    for (const auto& s : states) std::cerr << ' ' << fmt17(s.energy);
    std::cerr << '\n';
    if (!plot.empty()) {
      const Grid g = fr.tp.base.grid();
      std::vector<double> xs(g.n);
      for (std::size_t i = 0; i < g.n; ++i) xs[i] = g.x(i);
      std::vector<double> lines;
      for (const auto& s : states) lines.push_back(s.energy);
      tools::write_svg(plot, xs,
                       {{fr.tp.base.values, "#999999", "Lame background"}, {fr.tp.final.values, "black", "partner"}},
                       lines, name);
    }
    if (!ok) throw VerificationFailure(name + ": bound states do not match the inserted energies");
  }
};

// key=value lines become flags of the chosen subcommand unless given on the command line.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config needs a file");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      out.push_back(args[i]);
    }
  }
  if (path.empty()) return out;
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path);
  std::set<std::string> given;
  for (const auto& a : out) {
    if (a.rfind("--", 0) == 0) given.insert(a.substr(2, a.find('=') == std::string::npos ? std::string::npos : a.find('=') - 2));
  }
  std::string line;
  while (std::getline(in, line)) {
    line = io::trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError("config line without '=': " + line);
    const std::string key = io::trim(line.substr(0, eq));
    const std::string val = io::trim(line.substr(eq + 1));
    if (given.count(key)) continue;
    if (val == "true") {
      out.push_back("--" + key);
    } else if (val == "false") {
      continue;
    } else {
      out.push_back("--" + key);
      std::istringstream ws(val);
      std::string tok;
      while (ws >> tok) out.push_back(tok);
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Darboux displacements of Lame potentials", "darboux"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");
  EllipticCmd elliptic;
  VerifyCmd verify;
  DisplaceCmd displace;
  ChainCmd chain;
  SpectrumCmd spectrum;
  FigureCmd figure;
  elliptic.add(app);
  verify.add(app);
  displace.add(app);
  chain.add(app);
  spectrum.add(app);
  figure.add(app);

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    args = expand_config(args);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  }
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n' << app.help();
    return kUsage;
  } catch (const VerificationFailure& e) {
    std::cerr << "verification failed: " << e.what() << '\n';
    return kVerification;
  } catch (const SingularTransformationError& e) {
    std::cerr << "numerical failure: " << e.what();
    if (!e.abscissae().empty()) {
      std::cerr << " at x =";
      const std::size_t shown = std::min<std::size_t>(e.abscissae().size(), 10);
      for (std::size_t i = 0; i < shown; ++i) std::cerr << ' ' << fmt17(e.abscissae()[i]);
      if (shown < e.abscissae().size()) std::cerr << " ...";
    }
    std::cerr << '\n';
    return kNumerical;
  } catch (const darboux::Error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  }
  return 0;
}
