#include <doctest.h>

#include <sstream>

#include <json.hpp>

#include "kinexch/errors.hpp"
#include "kinexch/io.hpp"
#include "kinexch/rng.hpp"
#include "kinexch/types.hpp"

using namespace kinexch;

TEST_CASE("empirical pmf counts agents per wealth level") {
  const Pmf p = empirical_pmf(WealthVector({0, 0, 1, 3}), 3);
  CHECK(p.size() == 4);
  CHECK(p[0] == 0.5);
  CHECK(p[1] == 0.25);
  CHECK(p[2] == 0.0);
  CHECK(p[3] == 0.25);
}

TEST_CASE("identical agents give a point mass") {
  const Pmf p = empirical_pmf(WealthVector({5, 5, 5, 5}), 5);
  CHECK(p[5] == 1.0);
  CHECK(p.sum() == 1.0);

  const Pmf q = empirical_pmf(WealthVector::uniform(500, 10), 10);
  CHECK(q[10] == 1.0);
  for (std::size_t n = 0; n < 10; ++n) CHECK(q[n] == 0.0);
}

TEST_CASE("empirical pmf rejects a truncation below the richest agent") {
  CHECK_THROWS_AS(empirical_pmf(WealthVector({0, 7}), 6), TruncationError);
  CHECK_NOTHROW(empirical_pmf(WealthVector({0, 7}), 7));
}

TEST_CASE("empirical pmf of random states is a valid pmf with the exact mean") {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.index(40);
    std::vector<Dollars> s(n);
    Dollars total = 0;
    for (auto& v : s) total += (v = static_cast<Dollars>(rng.index(30)));
    const WealthVector w(s);
    const Pmf p = empirical_pmf(w, static_cast<std::size_t>(w.max()) + rng.index(5));
    CHECK(std::abs(p.sum() - 1.0) < 1e-12);
    for (double v : p.probs()) CHECK(v >= 0.0);
    // mean * N equals the total; counts are integers so compare after rounding
    std::int64_t weighted = 0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      weighted += static_cast<std::int64_t>(k) * std::llround(p[k] * static_cast<double>(n));
    }
    CHECK(weighted == total);
    CHECK(std::abs(p.mean() * static_cast<double>(n) - static_cast<double>(total)) < 1e-9);
  }
}

TEST_CASE("dirac pmf") {
  const Pmf p = dirac_pmf(5, 1000);
  CHECK(p.size() == 1001);
  CHECK(p[5] == 1.0);
  CHECK(dirac_pmf(0, 10)[0] == 1.0);
  CHECK(dirac_pmf(7, 20).mean() == 7.0);
  CHECK_THROWS_AS(dirac_pmf(11, 10), RangeError);
}

TEST_CASE("wealth vector validation and transfers") {
  CHECK_THROWS_AS(WealthVector({1, -1}), InvalidArgument);
  WealthVector w({2, 0, 1});
  CHECK(w.total() == 3);
  w.transfer(0, 1);
  CHECK(w[0] == 1);
  CHECK(w[1] == 1);
  CHECK(w.total() == 3);
  CHECK(w.recount() == 3);
  CHECK_THROWS_AS(WealthVector({0, 1}).transfer(0, 1), InvalidArgument);
  CHECK(WealthVector::uniform(4, 3).total() == 12);
}

TEST_CASE("pmf validation") {
  CHECK_THROWS_AS(Pmf({0.5, 0.4}), InvalidArgument);
  CHECK_THROWS_AS(Pmf({1.1, -0.1}), InvalidArgument);
  CHECK_THROWS_AS(Pmf({}), InvalidArgument);
  CHECK_NOTHROW(Pmf({1.0 + 5e-10, -5e-13}));
  const Pmf p({0.25, 0.5, 0.25});
  CHECK(p.mean() == doctest::Approx(1.0));
  CHECK(p.variance() == doctest::Approx(0.5));
  const Pmf q = p.extended(6);
  CHECK(q.size() == 7);
  CHECK(q[6] == 0.0);
  CHECK_THROWS_AS(p.extended(1), TruncationError);
}

TEST_CASE("model params validation") {
  ModelParams p;
  CHECK_NOTHROW(p.validate());
  p.lambda = 0.0;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  p = {};
  p.n_agents = 1;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  p = {};
  p.mu = 0;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
}

TEST_CASE("model names") {
  CHECK(parse_model("unbiased") == Model::Unbiased);
  CHECK(parse_model("poor-biased") == Model::PoorBiased);
  CHECK(parse_model("poor") == Model::PoorBiased);
  CHECK(parse_model("rich-biased") == Model::RichBiased);
  CHECK(parse_model(to_string(Model::RichBiased)) == Model::RichBiased);
  CHECK_THROWS_AS(parse_model("greedy"), InvalidArgument);
}

TEST_CASE("trajectory record keeps times strictly increasing") {
  TrajectoryRecord r({"a", "b"});
  r.append(0.0, {1.0, 2.0});
  r.append(0.5, {3.0, 4.0}, dirac_pmf(1, 2));
  CHECK_THROWS_AS(r.append(0.5, {0.0, 0.0}), InvalidArgument);
  CHECK_THROWS_AS(r.append(1.0, {0.0}), InvalidArgument);
  CHECK(r.column("b") == std::vector<double>{2.0, 4.0});
  CHECK_THROWS_AS(r.column("c"), InvalidArgument);
  CHECK_FALSE(r.pmf(0).has_value());
  CHECK(r.pmf(1).has_value());
}

TEST_CASE("csv round trips are exact") {
  Rng rng(3);
  std::vector<double> v(50);
  double s = 0.0;
  for (double& x : v) s += (x = rng.uniform());
  for (double& x : v) x /= s;
  const Pmf p(v);
  std::stringstream ss;
  io::write_pmf_csv(ss, p, "config {}");
  CHECK(ss.str().rfind("# config {}\nindex,value\n", 0) == 0);
  const Pmf back = io::read_pmf_csv(ss);
  REQUIRE(back.size() == p.size());
  for (std::size_t n = 0; n < p.size(); ++n) CHECK(back[n] == p[n]);

  const WealthVector w({3, 0, 9, 1});
  std::stringstream ws;
  io::write_state_csv(ws, w);
  CHECK(io::read_state_csv(ws) == w);
}

TEST_CASE("doubles print with 17 significant digits") {
  CHECK(io::format_double(0.1) == "0.10000000000000001");
  CHECK(io::format_double(1.0) == "1");
  CHECK(std::stod(io::format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("params json round trip and envelope") {
  ModelParams p;
  p.model = Model::RichBiased;
  p.lambda = 0.75;
  p.n_agents = 1234;
  p.mu = 7;
  p.seed = 0xFFFFFFFFFFFFFFFFULL;
  const ModelParams q = io::model_params_from_json(io::to_json(p));
  CHECK(q.model == p.model);
  CHECK(q.lambda == p.lambda);
  CHECK(q.n_agents == p.n_agents);
  CHECK(q.mu == p.mu);
  CHECK(q.seed == p.seed);
  CHECK_THROWS_AS(io::model_params_from_json(R"({"mu": 0})"), InvalidArgument);

  const auto env = nlohmann::json::parse(io::pmf_envelope_json("equilibrium", p, dirac_pmf(2, 3)));
  CHECK(env["kind"] == "equilibrium");
  CHECK(env["params"]["seed"].get<std::uint64_t>() == p.seed);
  CHECK(env["pmf"].size() == 4);
  CHECK(env.contains("version"));
}
