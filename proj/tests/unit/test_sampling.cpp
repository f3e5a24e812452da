#include <doctest.h>

#include <cmath>
#include <vector>

#include "kinexch/fenwick.hpp"
#include "kinexch/rng.hpp"

using namespace kinexch;

TEST_CASE("fenwick prefix sums match a linear scan") {
  Rng rng(1);
  std::vector<std::int64_t> w(37);
  for (auto& x : w) x = static_cast<std::int64_t>(rng.index(10));
  FenwickTree<std::int64_t> tree(w);
  for (int round = 0; round < 200; ++round) {
    const std::size_t i = rng.index(w.size());
    const auto delta = static_cast<std::int64_t>(rng.index(7)) - 3;
    if (w[i] + delta < 0) continue;
    w[i] += delta;
    tree.add(i, delta);
    std::int64_t acc = 0;
    for (std::size_t p = 0; p <= w.size(); ++p) {
      CHECK(tree.prefix(p) == acc);
      if (p < w.size()) acc += w[p];
    }
  }
}

TEST_CASE("fenwick find inverts the cumulative weights") {
  const std::vector<std::int64_t> w = {0, 3, 0, 0, 1, 2, 0};
  FenwickTree<std::int64_t> tree(w);
  std::vector<std::size_t> expected;
  for (std::size_t i = 0; i < w.size(); ++i) {
    for (std::int64_t k = 0; k < w[i]; ++k) expected.push_back(i);
  }
  for (std::int64_t x = 0; x < tree.total(); ++x) CHECK(tree.find(x) == expected[static_cast<std::size_t>(x)]);
  CHECK(tree.find(tree.total()) == w.size());
}

TEST_CASE("fenwick find never lands on a zero weight") {
  Rng rng(5);
  for (std::size_t n : {1u, 2u, 3u, 8u, 13u, 64u, 100u}) {
    std::vector<double> w(n);
    for (auto& x : w) x = rng.uniform() < 0.3 ? 0.0 : rng.uniform();
    w[rng.index(n)] = 1.0;
    FenwickTree<double> tree(w);
    for (int k = 0; k < 500; ++k) {
      const std::size_t i = tree.find(rng.uniform() * tree.total());
      REQUIRE(i < n);
      CHECK(w[i] > 0.0);
    }
  }
}

TEST_CASE("rng is reproducible and derived streams differ") {
  Rng a(99), b(99);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(7, 3) == derive_seed(7, 3));
}

TEST_CASE("rng variates have the right moments") {
  Rng rng(2024);
  const int n = 200000;
  double su = 0.0, se = 0.0;
  std::vector<int> counts(6, 0);
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    CHECK((u >= 0.0 && u < 1.0));
    su += u;
    se += rng.exponential(2.0);
    ++counts[rng.index(6)];
  }
  // 5 sigma windows
  CHECK(std::abs(su / n - 0.5) < 5.0 * std::sqrt(1.0 / 12.0 / n));
  CHECK(std::abs(se / n - 0.5) < 5.0 * 0.5 / std::sqrt(n));
  for (int c : counts) CHECK(std::abs(c - n / 6.0) < 5.0 * std::sqrt(n * (1.0 / 6.0) * (5.0 / 6.0)));
}
