#include "dyadlab/haar.hpp"

#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"

using namespace dyadlab;

TEST_CASE("cube sums match brute accumulation") {
  for (int d : {1, 2, 3}) {
    GridSpec g = make_grid(d, d == 1 ? 4 : 2);
    StepFunction f = oracle::random_cells(g, 11 + uint64_t(d), -2.0, 2.0);
    CubeSumCache cache(f);
    for (int l = 0; l <= g.L; ++l)
      for (uint64_t m = 0; m < uint64_t(g.cubes_at(l)); ++m) {
        Cube cube = oracle::cube_at(g, l, m);
        double want = 0.0;
        int64_t count = 0;
        for (int64_t i = 0; i < g.cell_count(); ++i)
          if (oracle::cell_in_cube(g, oracle::cell_at(g, i), cube)) {
            want += f.cells[size_t(i)];
            ++count;
          }
        CHECK(cache.cell_sum(l, m) == doctest::Approx(want).epsilon(1e-13));
        CHECK(cache.average_cube(l, m) ==
              doctest::Approx(want / double(count)).epsilon(1e-13));
        CHECK(cache.integral_cube(l, m) ==
              doctest::Approx(want * g.cell_measure()).epsilon(1e-13));
      }
  }
}

TEST_CASE("node sums fold children in heap order") {
  GridSpec g = make_grid(2, 1);
  StepFunction f{g, {1.0, 2.0, 4.0, 8.0}};
  CubeSumCache cache(f);
  double ns[8];
  cache.node_sums(0, 0, ns);
  CHECK(ns[4] == 1.0);
  CHECK(ns[5] == 2.0);
  CHECK(ns[6] == 4.0);
  CHECK(ns[7] == 8.0);
  CHECK(ns[2] == 3.0);
  CHECK(ns[3] == 12.0);
  CHECK(ns[1] == 15.0);
  CHECK(cache.set_sum(0, 0, 1) == 15.0);
  CHECK(cache.set_sum(0, 0, 2) == 3.0);
  CHECK(cache.set_sum(0, 0, 3) == 12.0);
  CHECK(cache.average_set(0, 0, 3) == 6.0);
  CHECK(cache.integral_set(0, 0, 2) == 0.75);
}

TEST_CASE("set measure formulas") {
  GridSpec g = make_grid(3, 2);
  CHECK(set_measure(g, 0, 1) == 1.0);
  CHECK(set_measure(g, 0, 2) == 0.5);
  CHECK(set_measure(g, 0, 7) == 0.25);
  CHECK(set_measure(g, 1, 1) == 0.125);
  CHECK(set_cell_count(g, 0, 1) == 64);
  CHECK(set_cell_count(g, 0, 5) == 16);
  CHECK(set_cell_count(g, 1, 7) == 2);
  for (int l = 0; l < g.L; ++l)
    for (AlphaIndex a = 1; a < AlphaIndex(g.fanout()); ++a)
      CHECK(set_measure(g, l, a) == oracle::set_abs_measure(g, l, a));
}

TEST_CASE("analyze matches the coordinate oracle") {
  for (int d : {1, 2, 3}) {
    GridSpec g = make_grid(d, d == 1 ? 3 : (d == 2 ? 2 : 1));
    StepFunction f = oracle::random_cells(g, 23 + uint64_t(d), -1.0, 3.0);
    HaarSpectrum got = analyze(f);
    oracle::BruteSpectrum want = oracle::brute_analyze(f);
    CHECK(std::abs(got.mean - want.mean) < 1e-13);
    REQUIRE(got.coeffs.size() == want.coeffs.size());
    CHECK(oracle::max_abs_diff(got.coeffs, want.coeffs) < 1e-13);
    HaarSpectrum from_cache = analyze(CubeSumCache(f));
    CHECK(oracle::max_abs_diff(from_cache.coeffs, want.coeffs) < 1e-13);
  }
}

TEST_CASE("analyze and synthesize invert each other") {
  for (int d : {1, 2, 4}) {
    GridSpec g = make_grid(d, d == 1 ? 6 : 2);
    StepFunction f = oracle::random_cells(g, 31 + uint64_t(d), -5.0, 5.0);
    StepFunction back = synthesize(analyze(f));
    CHECK(oracle::max_abs_diff(back.cells, f.cells) < 1e-12);
  }
}

TEST_CASE("parseval on the unit-volume domain") {
  GridSpec g = make_grid(2, 3);
  StepFunction f = oracle::random_cells(g, 41, -2.0, 2.0);
  HaarSpectrum s = analyze(f);
  double rhs = s.mean * s.mean;
  for (double c : s.coeffs) rhs += c * c;
  double lhs = inner_product(f, f);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("averages over sets and halves") {
  GridSpec g = make_grid(2, 2);
  StepFunction f = oracle::random_cells(g, 43, 0.0, 4.0);
  CubeSumCache cache(f);
  for (int l = 0; l < g.L; ++l)
    for (uint64_t m = 0; m < uint64_t(g.cubes_at(l)); ++m) {
      Cube cube = oracle::cube_at(g, l, m);
      CHECK(average(cache, cube) ==
            doctest::Approx(cache.average_cube(l, m)).epsilon(1e-13));
      for (AlphaIndex a = 1; a < AlphaIndex(g.fanout()); ++a) {
        // halves are the nodes 2a and 2a+1
        for (int half : {1, 2}) {
          uint32_t beta = 2 * a + uint32_t(half - 1);
          std::vector<char> sup = oracle::node_support(g, cube, beta);
          double sum = 0.0;
          int64_t n = 0;
          for (int64_t i = 0; i < g.cell_count(); ++i)
            if (sup[size_t(i)]) {
              sum += f.cells[size_t(i)];
              ++n;
            }
          CHECK(average_half(cache, cube, a, half) ==
                doctest::Approx(sum / double(n)).epsilon(1e-13));
        }
        CHECK(average(cache, cube, a) ==
              doctest::Approx((average_half(cache, cube, a, 1) +
                               average_half(cache, cube, a, 2)) /
                              2.0)
                  .epsilon(1e-13));
      }
    }
}

TEST_CASE("nested sums agree with the quadratic definition") {
  for (int d : {1, 2}) {
    GridSpec g = make_grid(d, d == 1 ? 4 : 2);
    std::mt19937_64 eng(71);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> q(size_t(g.pair_count()));
    for (double& v : q) v = dist(eng);

    std::vector<double> inc = nested_inclusive_sums(g, q);
    std::vector<double> want = oracle::brute_nested_inclusive(g, q);
    CHECK(oracle::max_abs_diff(inc, want) < 1e-13);

    NestedHalfSums hs = nested_half_sums(g, q);
    auto pairs = oracle::all_pairs(g);
    for (size_t p = 0; p < pairs.size(); ++p) {
      CHECK(q[p] + hs.half1[p] + hs.half2[p] ==
            doctest::Approx(inc[p]).epsilon(1e-12));
      // half sums split by the two halves of E_p
      const auto& [cube, alpha] = pairs[p];
      for (int half : {1, 2}) {
        std::vector<char> hsup = oracle::node_support(g, cube, 2 * alpha + uint32_t(half - 1));
        double want_half = 0.0;
        for (size_t r = 0; r < pairs.size(); ++r) {
          std::vector<char> rs = oracle::node_support(g, pairs[r].first, pairs[r].second);
          if (oracle::support_subset(rs, hsup)) want_half += q[r];
        }
        double got = half == 1 ? hs.half1[p] : hs.half2[p];
        CHECK(got == doctest::Approx(want_half).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("spectrum coefficient addressing") {
  GridSpec g = make_grid(2, 2);
  const GridTables& t = grid_tables(g);
  HaarSpectrum s = zero_spectrum(g);
  REQUIRE(s.coeffs.size() == size_t(g.pair_count()));
  s.at(t, 1, 2, 3) = 5.0;
  CHECK(s.coeffs[size_t(3 + 2 * 3 + (3 - 1))] == 5.0);
}
