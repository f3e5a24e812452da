#include <doctest.h>

#include <cmath>
#include <vector>

#include "kinexch/analysis.hpp"
#include "kinexch/errors.hpp"
#include "kinexch/meanfield.hpp"
#include "oracles.hpp"

using namespace kinexch;
namespace mf = kinexch::meanfield;

TEST_CASE("unbiased operator examples") {
  const Pmf geo = mf::geometric_equilibrium(5.0, 1000);
  const auto q = mf::q_unbias(geo.probs());
  CHECK(oracle::sup_norm(std::span(q).first(900)) < 1e-12);

  CHECK(oracle::sup_norm(mf::q_unbias(dirac_pmf(0, 10).probs())) == 0.0);

  const std::vector<double> p = {0.5, 0.5, 0.0, 0.0};
  const auto h = mf::q_unbias(p);
  CHECK(h[0] == doctest::Approx(0.25));
  CHECK(h[1] == doctest::Approx(-0.5));
  CHECK(h[2] == doctest::Approx(0.25));
  CHECK(h[3] == 0.0);
}

TEST_CASE("poor-biased operator examples") {
  const auto q = mf::q_poor(mf::poisson_equilibrium(5.0, 1000).probs(), 5.0);
  CHECK(oracle::sup_norm(std::span(q).first(900)) < 1e-10);
  CHECK(oracle::sup_norm(mf::q_poor(dirac_pmf(0, 10).probs(), 0.0)) == 0.0);

  const auto d = mf::q_poor(dirac_pmf(1, 5).probs(), 1.0);
  CHECK(d[0] == 1.0);
  CHECK(d[1] == -2.0);
  CHECK(d[2] == 1.0);
  CHECK(d[3] == 0.0);
}

TEST_CASE("rich-biased operator examples") {
  CHECK(oracle::sup_norm(mf::q_rich(dirac_pmf(0, 10).probs())) == 0.0);
  const std::vector<double> p = {0.5, 0.0, 0.5, 0.0, 0.0};
  const auto q = mf::q_rich(p);
  CHECK(q[0] == doctest::Approx(-0.125));
  CHECK(q[1] == doctest::Approx(0.375));
  CHECK(std::abs(oracle::first_moment(q)) < 1e-15);
}

TEST_CASE("operators agree with the term-by-term oracle") {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = oracle::random_pmf(rng, 60, 60);
    const double mu = oracle::first_moment(p);
    const auto pairs = {std::pair{mf::q_unbias(p), oracle::q_unbias(p)},
                        std::pair{mf::q_poor(p, mu), oracle::q_poor(p, mu)},
                        std::pair{mf::q_rich(p), oracle::q_rich(p)}};
    for (const auto& [got, want] : pairs) {
      REQUIRE(got.size() == want.size());
      for (std::size_t n = 0; n < got.size(); ++n) CHECK(got[n] == doctest::Approx(want[n]).epsilon(1e-12));
    }
  }
}

TEST_CASE("generators conserve mass and mean away from the boundary") {
  Rng rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const auto p = oracle::random_pmf(rng, 200, 1 + rng.index(150));
    const double mu = oracle::first_moment(p);
    for (const auto& q : {mf::q_unbias(p), mf::q_poor(p, mu), mf::q_rich(p)}) {
      CHECK(std::abs(oracle::sum(q)) < 1e-12);
      CHECK(std::abs(oracle::first_moment(q)) < 1e-10);
    }
  }
}

TEST_CASE("boundary flux accounts exactly for the truncation") {
  Rng rng(8);
  for (const auto& gen : {mf::Generator::unbiased(1.3), mf::Generator::poor_biased(4.0, 0.7),
                          mf::Generator::rich_biased(2.0)}) {
    for (int trial = 0; trial < 50; ++trial) {
      const auto p = oracle::random_pmf(rng, 30, 30);  // full support, heavy boundary mass
      std::vector<double> out(p.size());
      const double flux = gen.apply(p, out);
      CHECK(flux > 0.0);
      CHECK(oracle::sum(out) == doctest::Approx(-flux).epsilon(1e-12));
      if (gen.model() != Model::PoorBiased) {
        // unbiased and rich conserve the mean of a normalized pmf up to the flux
        CHECK(oracle::first_moment(out) == doctest::Approx(-31.0 * flux).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("poor-biased operator: Fokker-Planck form, H0 symmetry, Dirichlet identity") {
  Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = oracle::random_pmf(rng, 100, 2 + rng.index(58));
    const auto r = oracle::random_pmf(rng, 100, 2 + rng.index(58));
    // keeps mu^n e^{-mu} / n! above the double range for n <= 100
    const double mu = 1.0 + 9.0 * rng.uniform();
    const auto ps = oracle::poisson(mu, 100);

    // mu D^-(p* D^+(p / p*))
    const auto qp = mf::q_poor(p, mu);
    std::vector<double> flux(201);
    for (std::size_t n = 0; n <= 100; ++n) {
      const double next = n < 100 ? p[n + 1] / ps[n + 1] : 0.0;
      flux[n] = ps[n] * (next - p[n] / ps[n]);
    }
    double scale = oracle::sup_norm(qp);
    for (std::size_t n = 0; n <= 100; ++n) {
      const double fp = mu * (flux[n] - (n > 0 ? flux[n - 1] : 0.0));
      CHECK(std::abs(fp - qp[n]) <= 1e-12 * std::max(1.0, scale));
    }

    const auto qr = mf::q_poor(r, mu);
    const double lhs = analysis::h0_inner(qp, r, ps), rhs = analysis::h0_inner(p, qr, ps);
    CHECK(std::abs(lhs - rhs) <= 1e-9 * std::max(std::abs(lhs), std::abs(rhs)));

    const double dirichlet = analysis::h0_inner(qp, p, ps);
    const double h1 = analysis::h1_norm(p, ps);
    CHECK(std::abs(dirichlet + mu * h1 * h1) <= 1e-9 * std::abs(dirichlet));
  }
}

TEST_CASE("equilibria") {
  const Pmf geo = mf::geometric_equilibrium(5.0, 1000);
  CHECK(geo[0] == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(std::abs(geo.mean() - 5.0) < 1e-9);
  CHECK(mf::geometric_equilibrium(1e4, 200000)[0] < 2e-4);
  // renormalized on {0..10}: nearly uniform for huge mu
  CHECK(std::abs(mf::geometric_equilibrium(1e6, 10)[0] - 1.0 / 11.0) < 1e-5);
  CHECK_THROWS_AS(mf::geometric_equilibrium(-1.0, 10), InvalidArgument);

  const Pmf poi = mf::poisson_equilibrium(5.0, 1000);
  CHECK(poi[0] == doctest::Approx(6.7379469990854670e-3).epsilon(1e-14));
  CHECK(std::abs(poi.mean() - 5.0) < 1e-9);
  CHECK(mf::poisson_equilibrium(0.0, 10)[0] == 1.0);

  CHECK_THROWS_AS(mf::equilibrium(Model::RichBiased, 5.0, 100), InvalidArgument);
}

TEST_CASE("equilibria are stationary under integration") {
  mf::OdeConfig cfg;
  cfg.t_end = 1.0;
  cfg.n_max = 1000;
  cfg.record_times = {0.0, 0.25, 0.5, 0.75, 1.0};
  cfg.keep_pmfs = true;
  const std::vector<std::pair<mf::Generator, Pmf>> cases = {
      {mf::Generator::unbiased(), mf::geometric_equilibrium(5.0, 1000)},
      {mf::Generator::poor_biased(5.0), mf::poisson_equilibrium(5.0, 1000)},
      {mf::Generator::rich_biased(), dirac_pmf(0, 1000)}};
  for (const auto& [gen, eq] : cases) {
    const TrajectoryRecord rec = mf::integrate(gen, eq, cfg);
    REQUIRE(rec.size() == 5);
    for (std::size_t row = 0; row < rec.size(); ++row) {
      CHECK(analysis::l1_distance(rec.pmf(row)->probs(), eq.probs()) < 1e-12);
    }
  }
}

TEST_CASE("unbiased mean stays at 5 up to t = 100") {
  mf::OdeConfig cfg;
  cfg.t_end = 100.0;
  cfg.n_max = 1000;
  for (int i = 0; i <= 100; ++i) cfg.record_times.push_back(i);
  const TrajectoryRecord rec = mf::integrate(mf::Generator::unbiased(), dirac_pmf(5, 1000), cfg);
  for (double m : rec.column("mean")) CHECK(std::abs(m - 5.0) < 1e-9);
}

TEST_CASE("poor-biased solution reaches Poisson(5) in H0 by t = 12") {
  mf::OdeConfig cfg;
  cfg.t_end = 12.0;
  cfg.n_max = 1000;
  mf::Integrator in(mf::Generator::poor_biased(5.0), dirac_pmf(5, 1000), cfg);
  in.advance_to(12.0);
  const Pmf ps = mf::poisson_equilibrium(5.0, 1000);
  CHECK(analysis::h0_distance(in.state(), ps.probs(), ps.probs()) < 1e-10);
  CHECK(in.time() == doctest::Approx(12.0));
}

TEST_CASE("RK4 converges at fourth order") {
  // Small truncation so the coarsest step is inside the stability region.
  auto solve = [](double dt) {
    mf::OdeConfig cfg;
    cfg.dt = dt;
    cfg.t_end = 1.0;
    cfg.n_max = 40;
    mf::Integrator in(mf::Generator::poor_biased(5.0), dirac_pmf(5, 40), cfg);
    in.advance_to(1.0);
    return std::vector<double>(in.state().begin(), in.state().end());
  };
  const double dt = 0.02;
  const auto coarse = solve(dt), fine = solve(dt / 2), ref = solve(dt / 8);
  const double ratio = analysis::l1_distance(coarse, ref) / analysis::l1_distance(fine, ref);
  CHECK(ratio >= 12.0);
  CHECK(ratio <= 20.0);
}

TEST_CASE("integration aborts on leak and on instability") {
  mf::OdeConfig cfg;
  cfg.t_end = 10.0;
  cfg.n_max = 8;
  mf::Integrator leaky(mf::Generator::unbiased(), dirac_pmf(5, 8), cfg);
  CHECK_THROWS_AS(leaky.advance_to(10.0), IntegrationError);

  mf::OdeConfig big;
  big.dt = 1.0;
  big.t_end = 50.0;
  big.n_max = 60;
  mf::Integrator unstable(mf::Generator::poor_biased(5.0), dirac_pmf(5, 60), big);
  CHECK_THROWS_AS(unstable.advance_to(50.0), IntegrationError);

  mf::OdeConfig bad;
  bad.dt = 0.0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  mf::OdeConfig small;
  small.n_max = 3;
  CHECK_THROWS_AS(mf::Integrator(mf::Generator::unbiased(), dirac_pmf(5, 10), small), TruncationError);
}

TEST_CASE("integrate records observers at the requested times") {
  mf::OdeConfig cfg;
  cfg.t_end = 2.0;
  cfg.record_times = {2.0, 0.0, 1.0};
  cfg.n_max = 200;
  const std::vector<mf::Observer> obs = {{"gini", [](const Pmf& p) { return analysis::gini_pmf(p); }}};
  const TrajectoryRecord rec = mf::integrate(mf::Generator::unbiased(), dirac_pmf(5, 200), cfg, obs);
  CHECK(rec.size() == 3);
  CHECK(rec.times()[1] == doctest::Approx(1.0));
  const auto g = rec.column("gini");
  CHECK(g[0] == 0.0);
  CHECK(g[1] > 0.0);
  CHECK(g[2] > g[1]);
  CHECK_FALSE(rec.pmf(0).has_value());
}

TEST_CASE("spectrum of the poor-biased operator") {
  const auto pairs = mf::poor_eigenpairs(5.0, 400, 5);
  for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(pairs.values[i] - static_cast<double>(i)) < 1e-6);

  // kernel is the Poisson equilibrium
  const Pmf ps = mf::poisson_equilibrium(5.0, 400);
  const auto& v0 = pairs.vectors[0];
  const double scale = v0[5] / ps[5];
  for (std::size_t n = 0; n < 60; ++n) CHECK(v0[n] == doctest::Approx(scale * ps[n]).epsilon(1e-8));

  CHECK_THROWS_AS(mf::poor_spectrum(5.0, 40, 5), InvalidArgument);
  CHECK_THROWS_AS(mf::poor_spectrum(5.0, 400, 51), InvalidArgument);
  CHECK_THROWS_AS(mf::poor_spectrum(5.0, 400, 0), InvalidArgument);
}

TEST_CASE("closed-form eigenfunctions") {
  const double e5 = std::exp(-5.0);
  const auto p1 = mf::poor_eigenfunction(1, 5.0, 400);
  const auto ps = oracle::poisson(5.0, 400);
  for (std::size_t n = 0; n < 100; ++n) CHECK(p1[n] == doctest::Approx(ps[n]).epsilon(1e-12));

  const auto p2 = mf::poor_eigenfunction(2, 5.0, 400);
  CHECK(p2[1] == doctest::Approx(4.0 * e5).epsilon(1e-14));
  // -Q p2 = 1 * p2
  const auto q2 = mf::q_poor(p2, 5.0);
  for (std::size_t n = 0; n < 300; ++n) CHECK(std::abs(-q2[n] - p2[n]) < 1e-8);

  const auto pstar = mf::poisson_equilibrium(5.0, 400);
  std::vector<std::vector<double>> fs;
  for (std::size_t k = 1; k <= 5; ++k) fs.push_back(mf::poor_eigenfunction(k, 5.0, 400));
  for (std::size_t m = 0; m < 5; ++m) {
    for (std::size_t k = m + 1; k < 5; ++k) {
      CHECK(std::abs(analysis::h0_inner(fs[m], fs[k], pstar.probs())) < 1e-10);
    }
  }
}
