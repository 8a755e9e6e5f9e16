#include "dyadlab/wilson.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"

using namespace dyadlab;

TEST_CASE("wilson sets of a planar cube") {
  GridSpec g = make_grid(2, 1);
  auto sets = build_wilson_sets(g, root_cube());
  REQUIRE(sets.size() == 3);
  // alpha 1 splits by coordinate 0, its children split by coordinate 1
  CHECK(sets[0].alpha == 1);
  CHECK(sets[0].e1 == std::vector<uint32_t>{0, 1});
  CHECK(sets[0].e2 == std::vector<uint32_t>{2, 3});
  CHECK(sets[0].measure == 1.0);
  CHECK(sets[1].alpha == 2);
  CHECK(sets[1].e1 == std::vector<uint32_t>{0});
  CHECK(sets[1].e2 == std::vector<uint32_t>{1});
  CHECK(sets[1].measure == 0.5);
  CHECK(sets[2].alpha == 3);
  CHECK(sets[2].e1 == std::vector<uint32_t>{2});
  CHECK(sets[2].e2 == std::vector<uint32_t>{3});
  CHECK(sets[2].measure == 0.5);
  CHECK(offset_bits(2, 2) == "10");

  Cube leaf = oracle::cell_at(g, 0);
  CHECK_THROWS_AS(build_wilson_sets(g, leaf), std::invalid_argument);
}

TEST_CASE("haar functions match the coordinate oracle") {
  for (int d : {1, 2, 3}) {
    GridSpec g = make_grid(d, d == 3 ? 1 : 2);
    for (int l = 0; l < g.L; ++l)
      for (uint64_t m = 0; m < uint64_t(g.cubes_at(l)); ++m) {
        Cube cube = oracle::cube_at(g, l, m);
        for (AlphaIndex a = 1; a < AlphaIndex(g.fanout()); ++a) {
          StepFunction h = haar_function(g, cube, a);
          CHECK(oracle::max_abs_diff(h.cells, oracle::haar_cells(g, cube, a)) < 1e-13);
          CHECK(std::abs(integral(h)) < 1e-13);
          CHECK(l2_norm(h) == doctest::Approx(1.0).epsilon(1e-13));
        }
      }
  }
}

TEST_CASE("haar orthogonality across sampled pairs") {
  GridSpec g = make_grid(2, 2);
  auto pairs = oracle::all_pairs(g);
  for (size_t i = 0; i < pairs.size(); ++i)
    for (size_t j = i + 1; j < pairs.size(); j += 3) {
      StepFunction a = haar_function(g, pairs[i].first, pairs[i].second);
      StepFunction b = haar_function(g, pairs[j].first, pairs[j].second);
      CHECK(std::abs(inner_product(a, b)) < 1e-13);
    }
}

TEST_CASE("weighted haar fixture on two cells") {
  // w = 4 on [0,1/2), 1 on [1/2,1): w(E1) = 2, w(E2) = 1/2, w(E) = 5/2
  GridSpec g = make_grid(1, 1);
  StepFunction w{g, {4.0, 1.0}};
  StepFunction hw = haar_function(w, root_cube(), 1);
  CHECK(hw.cells[0] == doctest::Approx(-std::sqrt(0.1)).epsilon(1e-15));
  CHECK(hw.cells[1] == doctest::Approx(std::sqrt(1.6)).epsilon(1e-15));
  // unit in L2(w), mean zero against w
  CHECK(weighted_l2_norm(hw, w) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(weighted_inner_product(hw, constant_function(g, 1.0), w)) < 1e-14);

  Disbalance db = disbalanced_coeffs(w, root_cube(), 1);
  CHECK(db.C == doctest::Approx(std::sqrt(1.6)).epsilon(1e-15));
  CHECK(db.D == doctest::Approx(-0.6).epsilon(1e-15));
}

TEST_CASE("weighted haar properties on random weights") {
  for (int d : {1, 2}) {
    GridSpec g = make_grid(d, 2);
    StepFunction w = oracle::random_cells(g, 57 + uint64_t(d), 0.25, 4.0);
    CubeSumCache cw(w);
    for (int l = 0; l < g.L; ++l)
      for (uint64_t m = 0; m < uint64_t(g.cubes_at(l)); ++m) {
        Cube cube = oracle::cube_at(g, l, m);
        for (AlphaIndex a = 1; a < AlphaIndex(g.fanout()); ++a) {
          StepFunction hw = haar_function(cw, cube, a);
          std::vector<char> sup = oracle::node_support(g, cube, a);
          // supported where the set is, unit norm and mean zero in L2(w)
          for (int64_t i = 0; i < g.cell_count(); ++i)
            if (!sup[size_t(i)]) CHECK(hw.cells[size_t(i)] == 0.0);
          CHECK(weighted_l2_norm(hw, w) == doctest::Approx(1.0).epsilon(1e-13));
          CHECK(std::abs(weighted_inner_product(hw, constant_function(g, 1.0), w)) <
                1e-13);
          // reconstruction h = C h^w + D 1_E/|E|
          Disbalance db = disbalanced_coeffs(cw, cube, a);
          StepFunction h = haar_function(g, cube, a);
          StepFunction ind = set_indicator_l1(g, cube, a);
          for (int64_t i = 0; i < g.cell_count(); ++i)
            CHECK(h.cells[size_t(i)] ==
                  doctest::Approx(db.C * hw.cells[size_t(i)] +
                                  db.D * ind.cells[size_t(i)])
                      .epsilon(1e-12));
        }
      }
  }
}

TEST_CASE("set indicator is L1 normalized") {
  GridSpec g = make_grid(2, 2);
  for (AlphaIndex a : {AlphaIndex(1), AlphaIndex(2), AlphaIndex(3)}) {
    StepFunction ind = set_indicator_l1(g, root_cube(), a);
    CHECK(integral(ind) == doctest::Approx(1.0).epsilon(1e-14));
    std::vector<char> sup = oracle::node_support(g, root_cube(), a);
    for (int64_t i = 0; i < g.cell_count(); ++i) {
      if (sup[size_t(i)])
        CHECK(ind.cells[size_t(i)] ==
              doctest::Approx(1.0 / oracle::set_abs_measure(g, 0, a)).epsilon(1e-14));
      else
        CHECK(ind.cells[size_t(i)] == 0.0);
    }
  }
}

TEST_CASE("containment predicate agrees with painted supports") {
  GridSpec g = make_grid(2, 2);
  auto pairs = oracle::all_pairs(g);
  std::vector<std::vector<char>> supp;
  for (const auto& [cube, alpha] : pairs) supp.push_back(oracle::node_support(g, cube, alpha));
  for (size_t i = 0; i < pairs.size(); ++i)
    for (size_t j = 0; j < pairs.size(); ++j) {
      PairRef pi = pair_ref(g, pairs[i].first, pairs[i].second);
      PairRef pj = pair_ref(g, pairs[j].first, pairs[j].second);
      bool painted = oracle::support_subset(supp[i], supp[j]);
      CHECK(set_contains(g, pj, pi) == painted);
    }
}

TEST_CASE("haar value on a nested set") {
  GridSpec g = make_grid(2, 2);
  auto pairs = oracle::all_pairs(g);
  for (size_t i = 0; i < pairs.size(); ++i)
    for (size_t j = 0; j < pairs.size(); ++j) {
      PairRef small = pair_ref(g, pairs[i].first, pairs[i].second);
      PairRef big = pair_ref(g, pairs[j].first, pairs[j].second);
      if (!set_strictly_contains(g, big, small)) {
        CHECK_THROWS_AS(haar_value_on_set(g, big, small), std::invalid_argument);
        continue;
      }
      double got = haar_value_on_set(g, big, small);
      StepFunction h = haar_function(g, pairs[j].first, pairs[j].second);
      std::vector<char> sup = oracle::node_support(g, pairs[i].first, pairs[i].second);
      for (int64_t k = 0; k < g.cell_count(); ++k)
        if (sup[size_t(k)]) CHECK(h.cells[size_t(k)] == doctest::Approx(got).epsilon(1e-14));
    }
}

TEST_CASE("pointwise product of nested haar functions collapses") {
  GridSpec g = make_grid(1, 3);
  Cube big = root_cube();
  Cube small = oracle::cube_at(g, 2, 1);
  ProductFact pf = haar_pointwise_product_fact(g, small, 1, big, 1);
  CHECK(pf.max_deviation < 1e-13);
  CHECK(pf.factor ==
        doctest::Approx(haar_value_on_set(g, pair_ref(g, big, 1), pair_ref(g, small, 1)))
            .epsilon(1e-14));
  CHECK_THROWS_AS(haar_pointwise_product_fact(g, big, 1, small, 1), std::invalid_argument);
}

TEST_CASE("weighted coefficients reproduce the weighted expansion") {
  GridSpec g = make_grid(1, 3);
  StepFunction w = oracle::random_cells(g, 91, 0.5, 3.0);
  StepFunction f = oracle::random_cells(g, 92, -2.0, 2.0);
  std::vector<double> coeffs = weighted_coefficients(f, w);
  auto pairs = oracle::all_pairs(g);
  REQUIRE(coeffs.size() == pairs.size());
  CubeSumCache cw(w);
  // brute inner products in L2(w)
  for (size_t p = 0; p < pairs.size(); ++p) {
    StepFunction hw = haar_function(cw, pairs[p].first, pairs[p].second);
    CHECK(coeffs[p] == doctest::Approx(weighted_inner_product(f, hw, w)).epsilon(1e-12));
  }
  // expansion converges back to f around the weighted mean
  double wmean = weighted_inner_product(f, constant_function(g, 1.0), w) /
                 weighted_inner_product(constant_function(g, 1.0), constant_function(g, 1.0), w);
  StepFunction back = constant_function(g, wmean);
  for (size_t p = 0; p < pairs.size(); ++p) {
    StepFunction hw = haar_function(cw, pairs[p].first, pairs[p].second);
    back = added(back, scaled(hw, coeffs[p]));
  }
  CHECK(oracle::max_abs_diff(back.cells, f.cells) < 1e-11);
}

TEST_CASE("paint fills halves with requested values") {
  GridSpec g = make_grid(2, 2);
  StepFunction out = constant_function(g, 0.0);
  paint_set(g, 0, 0, 2, -3.0, 5.0, out);
  std::vector<char> h1 = oracle::node_support(g, root_cube(), 4);
  std::vector<char> h2 = oracle::node_support(g, root_cube(), 5);
  for (int64_t i = 0; i < g.cell_count(); ++i) {
    if (h1[size_t(i)])
      CHECK(out.cells[size_t(i)] == -3.0);
    else if (h2[size_t(i)])
      CHECK(out.cells[size_t(i)] == 5.0);
    else
      CHECK(out.cells[size_t(i)] == 0.0);
  }
}
