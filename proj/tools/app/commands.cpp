#include "app/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include "app/svg.hpp"
#include "kinexch/abm.hpp"
#include "kinexch/analysis.hpp"
#include "kinexch/chaos.hpp"
#include "kinexch/errors.hpp"
#include "kinexch/io.hpp"
#include "kinexch/meanfield.hpp"
#include "kinexch/version.hpp"

namespace kinexch::app {

using nlohmann::json;
namespace an = kinexch::analysis;
namespace mf = kinexch::meanfield;
namespace ch = kinexch::chaos;
namespace fs = std::filesystem;

namespace {

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

class Outputs {
 public:
  Outputs(const Config& cfg, std::ostream& log) : cfg_(cfg), log_(log), dir_(cfg.out) {
    fs::create_directories(dir_);
    config_line_ = "config " + to_json(cfg).dump();
  }

  const std::string& config_line() const { return config_line_; }

  void write(const std::string& name, const std::string& kind, const std::string& content) {
    std::ofstream os(dir_ / name, std::ios::binary);
    if (!os) throw Error("cannot write " + (dir_ / name).string());
    os << content;
    files_.push_back({{"path", name}, {"kind", kind}});
    log_ << "wrote " << (dir_ / name).string() << '\n';
  }

  void csv(const std::string& name, const std::string& kind, const std::function<void(std::ostream&)>& body) {
    std::ostringstream os;
    body(os);
    write(name, kind, os.str());
  }

  void svg(const std::string& name, const Chart& chart) { write(name, "svg", render_svg(chart, config_line_)); }

  json report(const std::string& kind) const {
    return {{"kind", kind}, {"version", kVersion}, {"config", to_json(cfg_)}};
  }

  void finish(const std::vector<CheckResult>& checks) {
    json m = report("manifest");
    m["files"] = files_;
    json cj = json::array();
    for (const auto& c : checks) cj.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    m["checks"] = cj;
    std::ofstream os(dir_ / "manifest.json", std::ios::binary);
    os << m.dump(2) << '\n';
    log_ << "wrote " << (dir_ / "manifest.json").string() << '\n';
  }

 private:
  const Config& cfg_;
  std::ostream& log_;
  fs::path dir_;
  std::string config_line_;
  json files_ = json::array();
};

std::vector<double> grid(double t_end, std::size_t count) {
  std::vector<double> t(count + 1);
  for (std::size_t i = 0; i <= count; ++i) t[i] = t_end * static_cast<double>(i) / static_cast<double>(count);
  return t;
}

void write_rows(std::ostream& os, const std::string& header, const std::vector<std::vector<double>>& columns) {
  os << header << '\n';
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << io::format_double(columns[c][r]);
    os << '\n';
  }
}

std::string slug(Model m) {
  std::string s(to_string(m));
  std::replace(s.begin(), s.end(), '-', '_');
  return s;
}

std::vector<CheckResult> cmd_abm(const Config& cfg, Outputs& out) {
  std::vector<CheckResult> checks;
  Chart chart{"Gini index of the agent-based model", "time", "Gini index", false, false, {}};
  const auto times = grid(cfg.t_end, cfg.snapshots);
  for (Model m : cfg.models()) {
    const ModelParams p = cfg.params(m);
    abm::RunOptions opt;
    std::ostringstream events;
    events << "# " << out.config_line() << '\n' << "giver,receiver,t\n";
    if (cfg.event_log) {
      opt.event_sink = [&](const abm::Event& e, double t) {
        events << e.giver << ',' << e.receiver << ',' << io::format_double(t) << '\n';
      };
    }
    const TrajectoryRecord rec = abm::run(p, cfg.t_end, times, opt);
    const std::string base = "abm_" + slug(m);
    out.csv(base + "_pmfs.csv", "trajectory",
            [&](std::ostream& os) { io::write_trajectory_pmfs_csv(os, rec, out.config_line()); });
    out.csv(base + "_stats.csv", "gini-series",
            [&](std::ostream& os) { io::write_trajectory_stats_csv(os, rec, out.config_line()); });
    if (cfg.event_log) out.write(base + "_events.csv", "event-log", events.str());

    const auto totals = rec.column("total");
    const double expected = static_cast<double>(p.n_agents * p.mu);
    const bool conserved = std::all_of(totals.begin(), totals.end(), [&](double v) { return v == expected; });
    checks.push_back({std::string(to_string(m)) + " conservation", conserved,
                      fmt("total %.0f at every one of %.0f snapshots", expected, static_cast<double>(totals.size()))});
    const auto gini = rec.column("gini");
    chart.series.push_back({std::string(to_string(m)), std::vector<double>(rec.times().begin(), rec.times().end()), gini});
    if (rec.truncated) checks.push_back({std::string(to_string(m)) + " horizon", true, "absorbed early: " + rec.note});
  }
  out.svg("abm_gini.svg", chart);
  return checks;
}

std::vector<CheckResult> cmd_ode(const Config& cfg, Outputs& out) {
  const Model m = parse_model(cfg.model);
  const double mu = static_cast<double>(cfg.mu);
  const std::size_t n_max = cfg.n_max ? cfg.n_max : mf::default_n_max(mu);
  const Pmf p0 = cfg.init == "dirac" ? dirac_pmf(static_cast<std::size_t>(cfg.mu), n_max) : mf::equilibrium(m, mu, n_max);

  mf::OdeConfig oc;
  oc.dt = cfg.dt;
  oc.t_end = cfg.t_end;
  oc.n_max = n_max;
  oc.record_times = grid(cfg.t_end, cfg.snapshots);
  oc.keep_pmfs = true;

  std::vector<mf::Observer> observers = {
      {"gini", [](const Pmf& p) { return an::gini_pmf(p); }},
      {"entropy", [](const Pmf& p) { return an::entropy(p.probs()); }},
  };
  std::string distance = "p0";
  std::shared_ptr<Pmf> eq;
  if (m == Model::PoorBiased) {
    distance = "h0_distance";
    eq = std::make_shared<Pmf>(mf::poisson_equilibrium(mu, n_max));
    observers.push_back({distance, [eq](const Pmf& p) { return an::h0_distance(p.probs(), eq->probs(), eq->probs()); }});
  } else if (m == Model::Unbiased) {
    distance = "l1_distance";
    eq = std::make_shared<Pmf>(mf::geometric_equilibrium(mu, n_max));
    observers.push_back({distance, [eq](const Pmf& p) { return an::l1_distance(p.probs(), eq->probs()); }});
  } else {
    observers.push_back({distance, [](const Pmf& p) { return p[0]; }});
  }

  const TrajectoryRecord rec = mf::integrate(mf::Generator::for_model(m, cfg.lambda, mu), p0, oc, observers);
  const std::string base = "ode_" + slug(m);
  out.csv(base + "_pmfs.csv", "trajectory",
          [&](std::ostream& os) { io::write_trajectory_pmfs_csv(os, rec, out.config_line()); });
  out.csv(base + "_stats.csv", "observers",
          [&](std::ostream& os) { io::write_trajectory_stats_csv(os, rec, out.config_line()); });

  const std::vector<double> t(rec.times().begin(), rec.times().end());
  const auto dist = rec.column(distance);
  Chart chart{"Limit equation: " + cfg.model, "time", distance, false, m == Model::PoorBiased, {{distance, t, dist}}};
  out.svg(base + "_" + distance + ".svg", chart);

  std::vector<CheckResult> checks;
  const auto means = rec.column("mean");
  double drift = 0.0;
  for (double v : means) drift = std::max(drift, std::abs(v - mu));
  checks.push_back({"mean conservation", drift < 1e-9, fmt("max |mean - mu| = %.3g (< 1e-9)", drift)});
  if (m == Model::PoorBiased) {
    checks.push_back({"H0 distance at t_end", dist.back() < 1e-10,
                      fmt("||p(%g) - Poisson||_H0 = %.3g (< 1e-10)", t.back(), dist.back())});
  }
  if (cfg.init == "equilibrium") {
    double spread = 0.0;
    for (const auto& name : rec.stat_names()) {
      const auto col = rec.column(name);
      const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
      spread = std::max(spread, *hi - *lo);
    }
    checks.push_back({"stationary observers", spread < 1e-12, fmt("max observer variation %.3g (< 1e-12)", spread)});
  }
  return checks;
}

std::vector<CheckResult> cmd_wave(const Config& cfg, Outputs& out) {
  const double mu = static_cast<double>(cfg.mu);
  const std::size_t n_max = cfg.n_max ? cfg.n_max : mf::default_n_max(mu);
  mf::OdeConfig oc;
  oc.dt = cfg.dt;
  oc.t_end = cfg.t_end;
  oc.n_max = n_max;
  oc.record_times = grid(cfg.t_end, cfg.snapshots);
  oc.keep_pmfs = true;
  const TrajectoryRecord rec =
      mf::integrate(mf::Generator::rich_biased(cfg.lambda), dirac_pmf(static_cast<std::size_t>(cfg.mu), n_max), oc);

  std::vector<double> t, r, c, sigma, cut, resid, degenerate, gini, approx;
  for (std::size_t row = 0; row < rec.size(); ++row) {
    const Pmf& p = *rec.pmf(row);
    const an::WaveFit fit = an::wave_decompose(p.probs());
    t.push_back(rec.times()[row]);
    r.push_back(fit.r);
    c.push_back(fit.c);
    sigma.push_back(fit.sigma);
    cut.push_back(static_cast<double>(fit.n_cut));
    resid.push_back(fit.residual);
    degenerate.push_back(fit.degenerate ? 1.0 : 0.0);
    gini.push_back(an::gini_pmf(p));
    approx.push_back(fit.degenerate || !(fit.c > 0.0) ? std::nan("") : an::gini_wave_approx(mu, fit.c, fit.sigma));
  }
  out.csv("wave.csv", "wave-decomposition", [&](std::ostream& os) {
    os << "# " << out.config_line() << '\n';
    write_rows(os, "t,r,c,sigma,n_cut,residual,degenerate,gini,gini_approx",
               {t, r, c, sigma, cut, resid, degenerate, gini, approx});
  });

  // power laws on a uniform 10-unit grid from t = 10
  std::vector<double> ft, fc, fs_;
  const double spacing = t.size() > 1 ? t[1] - t[0] : 1.0;
  for (double target = 10.0; target <= cfg.t_end + 1e-9; target += 10.0) {
    const auto it = std::min_element(t.begin(), t.end(), [&](double a, double b) {
      return std::abs(a - target) < std::abs(b - target);
    });
    const std::size_t i = static_cast<std::size_t>(it - t.begin());
    if (std::abs(t[i] - target) > 0.5 * spacing + 1e-9 || degenerate[i] != 0.0) continue;
    if (!ft.empty() && ft.back() == t[i]) continue;
    ft.push_back(t[i]);
    fc.push_back(c[i]);
    fs_.push_back(sigma[i]);
  }

  std::vector<CheckResult> checks;
  json report = out.report("wave-fit");
  if (ft.size() >= 5) {
    const auto cf = an::fit_power_law(ft, fc), sf = an::fit_power_law(ft, fs_);
    report["c_fit"] = {{"amplitude", cf.amplitude}, {"exponent", cf.exponent}, {"r_squared", cf.r_squared}};
    report["sigma_fit"] = {{"amplitude", sf.amplitude}, {"exponent", sf.exponent}, {"r_squared", sf.r_squared}};
    checks.push_back({"c exponent", cf.exponent >= 0.42 && cf.exponent <= 0.51,
                      fmt("c(t) ~ %.4f t^%.4f (exponent in [0.42, 0.51])", cf.amplitude, cf.exponent)});
    checks.push_back({"sigma exponent", sf.exponent >= 0.35 && sf.exponent <= 0.45,
                      fmt("sigma(t) ~ %.4f t^%.4f (exponent in [0.35, 0.45])", sf.amplitude, sf.exponent)});
    std::vector<double> cl, sl;
    for (double x : t) {
      cl.push_back(x > 0.0 ? cf.amplitude * std::pow(x, cf.exponent) : std::nan(""));
      sl.push_back(x > 0.0 ? sf.amplitude * std::pow(x, sf.exponent) : std::nan(""));
    }
    out.svg("wave_c_sigma.svg", {"Wave centre and width", "time", "dollars", true, true,
                                 {{"c(t)", t, c}, {"sigma(t)", t, sigma}, {"c fit", t, cl, true}, {"sigma fit", t, sl, true}}});
  } else {
    checks.push_back({"power-law fit", false, "fewer than 5 non-degenerate samples on t >= 10"});
  }
  double worst_gini = 0.0, worst_rc = 0.0;
  std::size_t late = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < 50.0 || degenerate[i] != 0.0) continue;
    ++late;
    worst_gini = std::max(worst_gini, std::abs(approx[i] - gini[i]));
    worst_rc = std::max(worst_rc, std::abs(r[i] * c[i] - mu) / mu);
  }
  checks.push_back({"Gini approximation", late > 0 && worst_gini < 0.03,
                    fmt("max |G_approx - G| on t >= 50: %.4f over %.0f samples (< 0.03)", worst_gini, static_cast<double>(late))});
  checks.push_back({"r c = mu", late > 0 && worst_rc < 0.05, fmt("max |r c - mu| / mu on t >= 50: %.4f (< 0.05)", worst_rc)});
  const std::size_t flagged = static_cast<std::size_t>(std::count(degenerate.begin(), degenerate.end(), 1.0));
  report["degenerate_samples"] = flagged;
  out.write("wave_fit.json", "wave-fit", report.dump(2) + "\n");
  out.svg("wave_gini.svg", {"Gini index and wave approximation", "time", "Gini index", false, false,
                            {{"G(t)", t, gini}, {"wave approximation", t, approx, true}}});
  return checks;
}

std::vector<CheckResult> cmd_chaos(const Config& cfg, Outputs& out, std::ostream& log) {
  std::vector<CheckResult> checks;
  if (cfg.part != "coupling") {
    const Model m = parse_model(cfg.model);
    ModelParams p = cfg.params(m);
    p.n_agents = cfg.n_values.front();
    ch::EmpiricalOptions opt;
    opt.replicas = cfg.replicas;
    opt.jobs = cfg.jobs;
    const ch::ScalingReport rep = ch::scaling_scan(p, cfg.n_values, cfg.t_end, opt);
    json j = out.report("scaling");
    j["slope"] = rep.slope;
    j["r_squared"] = rep.r_squared;
    json entries = json::array();
    std::vector<double> n, err, se, ref;
    for (const auto& e : rep.entries) {
      entries.push_back({{"n_agents", e.n_agents}, {"t", e.t}, {"mean_error", e.mean_error}, {"std_error", e.std_error},
                         {"replicas", e.replicas}, {"absorbed", e.absorbed}});
      n.push_back(static_cast<double>(e.n_agents));
      err.push_back(e.mean_error);
      se.push_back(e.std_error);
    }
    for (double x : n) ref.push_back(err.front() * std::sqrt(n.front() / x));
    j["entries"] = entries;
    out.write("chaos_scaling.json", "scaling-report", j.dump(2) + "\n");
    out.csv("chaos_scaling.csv", "scaling-report", [&](std::ostream& os) {
      os << "# " << out.config_line() << '\n';
      write_rows(os, "n_agents,mean_error,std_error", {n, err, se});
    });
    out.svg("chaos_scaling.svg", {"Empirical measure vs limit equation, t = " + io::format_double(cfg.t_end), "N",
                                  "E ||p_emp - p||_1", true, true, {{"measured", n, err}, {"N^-1/2", n, ref, true}}});
    if (cfg.t_end == 0.0) {
      const bool zero = std::all_of(err.begin(), err.end(), [](double e) { return e == 0.0; });
      checks.push_back({"zero error at t = 0", zero, "empirical and limit laws both start at the Dirac mass"});
    } else {
      checks.push_back({"scaling slope", rep.slope >= -0.6 && rep.slope <= -0.4,
                        fmt("log-log slope %.4f, r2 %.4f (in [-0.6, -0.4])", rep.slope, rep.r_squared)});
    }
  }
  if (cfg.part != "scaling") {
    ch::CouplingOptions opt;
    opt.replicas = cfg.replicas;
    opt.jobs = cfg.jobs;
    json traces = json::array();
    std::vector<double> cn, ct, cd, cse, cb;
    Chart chart{"Coupled unbiased dynamics, k = " + std::to_string(cfg.k), "time", "E |S_i - S_bar_i|", false, true, {}};
    std::size_t points = 0, held = 0;
    for (std::int64_t n : cfg.coupling_n_values) {
      ModelParams p = cfg.params(Model::Unbiased);
      p.n_agents = n;
      p.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(n));
      const ch::CouplingTrace tr = ch::coupled_unbiased_run(p, cfg.k, cfg.coupling_t_end, opt);
      traces.push_back({{"n_agents", n}, {"k", tr.k}, {"t", tr.t}, {"mean_abs_diff", tr.mean_abs_diff},
                        {"std_error", tr.std_error}, {"bound", tr.bound}, {"within_bound", tr.within_bound()}});
      for (std::size_t i = 0; i < tr.t.size(); ++i) {
        cn.push_back(static_cast<double>(n));
        ct.push_back(tr.t[i]);
        cd.push_back(tr.mean_abs_diff[i]);
        cse.push_back(tr.std_error[i]);
        cb.push_back(tr.bound[i]);
        ++points;
        held += tr.mean_abs_diff[i] - 1.96 * tr.std_error[i] <= tr.bound[i];
      }
      chart.series.push_back({"N = " + std::to_string(n), tr.t, tr.mean_abs_diff});
    }
    json j = out.report("coupling");
    j["traces"] = traces;
    out.write("chaos_coupling.json", "coupling-trace", j.dump(2) + "\n");
    out.csv("chaos_coupling.csv", "coupling-trace", [&](std::ostream& os) {
      os << "# " << out.config_line() << '\n';
      write_rows(os, "n_agents,t,mean_abs_diff,std_error,bound", {cn, ct, cd, cse, cb});
    });
    out.svg("chaos_coupling.svg", chart);
    const bool ok = held == points;
    log << "bound check: " << (ok ? "PASS" : "FAIL") << " (" << held << "/" << points << " grid points)\n";
    checks.push_back({"coupling bound", ok,
                      fmt("bound holds at %.0f of %.0f (N, t) points", static_cast<double>(held), static_cast<double>(points))});
  }
  return checks;
}

std::vector<double> random_pmf(Rng& rng, std::size_t n_max, std::size_t support) {
  std::vector<double> p(n_max + 1, 0.0);
  double s = 0.0;
  for (std::size_t n = 0; n <= support; ++n) s += (p[n] = rng.uniform() + 1e-3);
  for (double& v : p) v /= s;
  return p;
}

// Fast invariant suite; seconds at most.
std::vector<CheckResult> cmd_selftest(const Config& cfg, Outputs& out) {
  std::vector<CheckResult> checks;
  for (Model m : {Model::Unbiased, Model::PoorBiased, Model::RichBiased}) {
    ModelParams p;
    p.model = m;
    p.n_agents = 100;
    p.mu = 5;
    p.seed = cfg.seed;
    abm::Engine e(p);
    bool ok = true;
    e.set_event_sink([&](const abm::Event&, double) {
      ok = ok && e.state().recount() == 500 &&
           std::all_of(e.state().values().begin(), e.state().values().end(), [](Dollars v) { return v >= 0; });
    });
    e.advance_events(20000);
    checks.push_back({std::string(to_string(m)) + " conservation", ok, "20000 events, recount after each"});
  }

  Rng rng(derive_seed(cfg.seed, 1));
  double mass = 0.0, mean = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = random_pmf(rng, 200, 2 + rng.index(140));
    double mp = 0.0;
    for (std::size_t n = 0; n < p.size(); ++n) mp += static_cast<double>(n) * p[n];
    for (const auto& q : {mf::q_unbias(p), mf::q_poor(p, mp), mf::q_rich(p)}) {
      double s = 0.0, m1 = 0.0;
      for (std::size_t n = 0; n < q.size(); ++n) {
        s += q[n];
        m1 += static_cast<double>(n) * q[n];
      }
      mass = std::max(mass, std::abs(s));
      mean = std::max(mean, std::abs(m1));
    }
  }
  checks.push_back({"generator mass", mass < 1e-12, fmt("max |sum Q[p]| = %.3g", mass)});
  checks.push_back({"generator mean", mean < 1e-10, fmt("max |sum n Q[p]_n| = %.3g", mean)});

  double stat = 0.0;
  for (double v : mf::q_unbias(mf::geometric_equilibrium(5.0, 1000).probs())) stat = std::max(stat, std::abs(v));
  for (double v : mf::q_poor(mf::poisson_equilibrium(5.0, 1000).probs(), 5.0)) stat = std::max(stat, std::abs(v));
  checks.push_back({"equilibria", stat < 1e-10, fmt("sup |Q[p*]| = %.3g", stat)});

  const auto values = mf::poor_spectrum(5.0, 100, 4);
  double eig = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) eig = std::max(eig, std::abs(values[i] - static_cast<double>(i)));
  checks.push_back({"poor-biased spectrum", eig < 1e-6, fmt("max |alpha_n - n| = %.3g", eig)});

  double gini = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Dollars> s(2 + rng.index(100));
    for (auto& v : s) v = static_cast<Dollars>(rng.index(30));
    s[0] += 1;
    const WealthVector w(s);
    gini = std::max(gini, std::abs(an::gini_samples(w) - an::gini_pmf(empirical_pmf(w, static_cast<std::size_t>(w.max())))));
  }
  checks.push_back({"Gini formulas", gini < 1e-12, fmt("max difference %.3g", gini)});

  int differ = 0;
  const int draws = 200000;
  for (int i = 0; i < draws; ++i) {
    const auto pair = ch::bernoulli_couple(0.2, 0.7, rng.uniform());
    differ += pair.x != pair.y;
  }
  const double freq = static_cast<double>(differ) / draws, sd = std::sqrt(0.25 / draws);
  checks.push_back({"Bernoulli coupling", std::abs(freq - 0.5) < 4.0 * sd, fmt("P(x != y) = %.5f vs 0.5", freq)});

  json j = out.report("selftest");
  json cj = json::array();
  for (const auto& c : checks) cj.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  j["checks"] = cj;
  out.write("selftest.json", "selftest", j.dump(2) + "\n");
  return checks;
}

}  // namespace

std::vector<CheckResult> run_command(const Config& cfg, std::ostream& log) {
  Outputs out(cfg, log);
  std::vector<CheckResult> checks;
  if (cfg.command == "abm") checks = cmd_abm(cfg, out);
  else if (cfg.command == "ode") checks = cmd_ode(cfg, out);
  else if (cfg.command == "wave") checks = cmd_wave(cfg, out);
  else if (cfg.command == "chaos") checks = cmd_chaos(cfg, out, log);
  else if (cfg.command == "selftest") checks = cmd_selftest(cfg, out);
  else throw InvalidArgument("unknown command '" + cfg.command + "'");
  out.finish(checks);
  return checks;
}

}  // namespace kinexch::app
