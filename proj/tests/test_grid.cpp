#include "dyadlab/grid.hpp"

#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "oracles.hpp"

using namespace dyadlab;

TEST_CASE("grid validation") {
  CHECK_NOTHROW(make_grid(1, 1));
  CHECK_NOTHROW(make_grid(1, 20));
  CHECK_NOTHROW(make_grid(4, 5));
  CHECK_THROWS_AS(make_grid(0, 3), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(5, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(1, 0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(1, 21), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(4, 6), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(2, 11), std::invalid_argument);
}

TEST_CASE("grid arithmetic") {
  GridSpec g = make_grid(2, 3);
  CHECK(g.cell_count() == 64);
  CHECK(g.fanout() == 4);
  CHECK(g.pair_count() == 63);
  CHECK(g.cubes_at(0) == 1);
  CHECK(g.cubes_at(2) == 16);
  CHECK(g.cell_measure() == 1.0 / 64);
  CHECK(cube_measure(g, 1) == 0.25);
  CHECK(cube_measure(g, 3) == 1.0 / 64);
}

TEST_CASE("morton encoding round trip and hand values") {
  GridSpec g = make_grid(2, 2);
  // coord (1,2): level-1 ancestor (0,1) gives digit 0b01, last step bits
  // (1,0) give digit 0b10; morton = 1*4 + 2
  Cube c;
  c.level = 2;
  c.coord = {1, 2, 0, 0};
  CHECK(morton_from_cube(g, c) == 6);
  CHECK(cell_index(g, c) == 6);
  Cube c2;
  c2.level = 2;
  c2.coord = {1, 0, 0, 0};
  CHECK(morton_from_cube(g, c2) == 2);
  CHECK(cell_index(g, c2) == 4);

  for (int d = 1; d <= 3; ++d) {
    GridSpec gg = make_grid(d, d == 3 ? 2 : 3);
    for (int l = 0; l <= gg.L; ++l)
      for (uint64_t m = 0; m < uint64_t(gg.cubes_at(l)); ++m) {
        Cube k = cube_from_morton(gg, l, m);
        CHECK(morton_from_cube(gg, k) == m);
        Cube o = oracle::cube_at(gg, l, m);
        CHECK(k.level == o.level);
        for (int i = 0; i < gg.d; ++i) CHECK(k.coord[size_t(i)] == o.coord[size_t(i)]);
      }
  }
}

TEST_CASE("children are lexicographic in offset order") {
  GridSpec g = make_grid(2, 2);
  auto kids = children(g, root_cube());
  REQUIRE(kids.size() == 4);
  // offset bit for coordinate i sits at position d-1-i
  int32_t want[4][2] = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  for (int o = 0; o < 4; ++o) {
    CHECK(kids[size_t(o)].level == 1);
    CHECK(kids[size_t(o)].coord[0] == want[o][0]);
    CHECK(kids[size_t(o)].coord[1] == want[o][1]);
  }
  Cube leaf = oracle::cell_at(g, 5);
  CHECK_THROWS_AS(children(g, leaf), std::invalid_argument);
}

TEST_CASE("grid tables invert each other and order pairs level-major") {
  GridSpec g = make_grid(3, 2);
  const GridTables& t = grid_tables(g);
  REQUIRE(t.cell_from_morton.size() == size_t(g.cell_count()));
  for (int64_t m = 0; m < g.cell_count(); ++m)
    CHECK(t.morton_from_cell[size_t(t.cell_from_morton[size_t(m)])] == m);
  REQUIRE(t.pair_level_offset.size() == size_t(g.L + 1));
  CHECK(t.pair_level_offset[0] == 0);
  CHECK(t.pair_level_offset[1] == 7);
  CHECK(t.pair_level_offset[2] == 7 + 8 * 7);
  CHECK(t.pair_level_offset[2] == g.pair_count());
  // canonical order agrees with the oracle enumeration
  auto pairs = oracle::all_pairs(g);
  for (size_t p = 0; p < pairs.size(); ++p) {
    const auto& [cube, alpha] = pairs[p];
    CHECK(pair_index(t, cube.level, morton_from_cube(g, cube), alpha) == int64_t(p));
  }
}

TEST_CASE("step function reductions") {
  GridSpec g = make_grid(1, 2);
  StepFunction f{g, {1.0, 2.0, 3.0, 4.0}};
  StepFunction h{g, {2.0, 0.0, -1.0, 1.0}};
  CHECK(integral(f) == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(mean_value(f) == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(inner_product(f, h) == doctest::Approx((2.0 - 3.0 + 4.0) / 4).epsilon(1e-15));
  CHECK(l2_norm(f) == doctest::Approx(std::sqrt((1 + 4 + 9 + 16) / 4.0)).epsilon(1e-15));
  StepFunction w{g, {1.0, 1.0, 2.0, 2.0}};
  CHECK(weighted_inner_product(f, h, w) ==
        doctest::Approx((2.0 * 1 + 0 - 3.0 * 2 + 4.0 * 2) / 4).epsilon(1e-15));
  CHECK(weighted_l2_norm(f, w) ==
        doctest::Approx(std::sqrt((1 + 4 + 18 + 32) / 4.0)).epsilon(1e-15));
  StepFunction bad{g, {1.0, -1.0, 1.0, 1.0}};
  CHECK_THROWS_AS(weighted_l2_norm(f, bad), std::invalid_argument);

  CHECK(oracle::max_abs_diff(cellwise_product(f, h).cells, {2, 0, -3, 4}) == 0.0);
  CHECK(oracle::max_abs_diff(scaled(f, -2).cells, {-2, -4, -6, -8}) == 0.0);
  CHECK(oracle::max_abs_diff(added(f, h).cells, {3, 2, 2, 5}) == 0.0);
  CHECK(oracle::max_abs_diff(subtracted(f, h).cells, {-1, 2, 4, 3}) == 0.0);

  GridSpec g2 = make_grid(1, 3);
  StepFunction other = constant_function(g2, 1.0);
  CHECK_THROWS_AS(inner_product(f, other), std::invalid_argument);
}

TEST_CASE("work counter moves when caches build") {
  GridSpec g = make_grid(2, 3);
  stats::reset_cube_visits();
  StepFunction f = oracle::random_cells(g, 7, 0.5, 2.0);
  CubeSumCache cache(f);
  CHECK(stats::cube_visits() > 0);
}
