#include "dyadlab/haar.hpp"

#include <cmath>
#include <stdexcept>

namespace dyadlab {

CubeSumCache::CubeSumCache(const StepFunction& f) {
  grid = f.grid;
  if (int64_t(f.cells.size()) != grid.cell_count())
    throw std::invalid_argument("cell vector size does not match grid");
  const GridTables& t = grid_tables(grid);
  const int F = grid.fanout();
  sums.resize(size_t(grid.L) + 1);
  sums[size_t(grid.L)].resize(size_t(grid.cell_count()));
  for (int64_t m = 0; m < grid.cell_count(); ++m)
    sums[size_t(grid.L)][size_t(m)] = f.cells[size_t(t.cell_from_morton[size_t(m)])];
  for (int l = grid.L - 1; l >= 0; --l) {
    const std::vector<double>& fine = sums[size_t(l) + 1];
    std::vector<double>& coarse = sums[size_t(l)];
    coarse.resize(size_t(grid.cubes_at(l)));
    for (int64_t m = 0; m < grid.cubes_at(l); ++m) {
      double s = fine[size_t(m * F)];
      for (int o = 1; o < F; ++o) s += fine[size_t(m * F + o)];
      coarse[size_t(m)] = s;
    }
    stats::add_cube_visits(uint64_t(grid.cubes_at(l)));
  }
}

void CubeSumCache::node_sums(int level, uint64_t morton, double* ns) const {
  const int F = grid.fanout();
  const std::vector<double>& fine = sums[size_t(level) + 1];
  for (int o = 0; o < F; ++o) ns[F + o] = fine[size_t(morton * uint64_t(F) + uint64_t(o))];
  for (int a = F - 1; a >= 1; --a) ns[a] = ns[2 * a] + ns[2 * a + 1];
}

double CubeSumCache::set_sum(int level, uint64_t morton, AlphaIndex alpha) const {
  double ns[32];
  node_sums(level, morton, ns);
  return ns[alpha];
}

HaarSpectrum zero_spectrum(const GridSpec& g) {
  HaarSpectrum s;
  s.grid = g;
  s.coeffs.assign(size_t(g.pair_count()), 0.0);
  return s;
}

HaarSpectrum analyze(const StepFunction& f) { return analyze(CubeSumCache(f)); }

HaarSpectrum analyze(const CubeSumCache& cache) {
  const GridSpec& g = cache.grid;
  HaarSpectrum out = zero_spectrum(g);
  out.mean = cache.sums[0][0] / double(g.cell_count());
  const int F = g.fanout();
  int64_t idx = 0;
  double ns[32];
  for (int l = 0; l < g.L; ++l) {
    // coeff = (sum(E2) - sum(E1)) * cell_measure / sqrt(|E_alpha|)
    double sc[4];
    for (int j = 0; j < g.d; ++j)
      sc[j] = g.cell_measure() * std::sqrt(std::ldexp(1.0, j + g.d * l));
    for (int64_t m = 0; m < g.cubes_at(l); ++m) {
      cache.node_sums(l, uint64_t(m), ns);
      for (int a = 1; a < F; ++a)
        out.coeffs[size_t(idx++)] = (ns[2 * a + 1] - ns[2 * a]) * sc[alpha_depth(AlphaIndex(a))];
    }
    stats::add_cube_visits(uint64_t(g.cubes_at(l)));
  }
  return out;
}

StepFunction synthesize(const HaarSpectrum& s) {
  const GridSpec& g = s.grid;
  validate_grid(g);
  if (int64_t(s.coeffs.size()) != g.pair_count())
    throw std::invalid_argument("coefficient vector size does not match grid");
  const GridTables& t = grid_tables(g);
  const int F = g.fanout();
  std::vector<double> cur(1, s.mean), next;
  int64_t idx = 0;
  double nv[32];
  for (int l = 0; l < g.L; ++l) {
    next.assign(size_t(g.cubes_at(l + 1)), 0.0);
    double sc[4];
    // 1/sqrt(|E_alpha|) at this level, per alpha depth
    for (int j = 0; j < g.d; ++j) sc[j] = std::sqrt(std::ldexp(1.0, j + g.d * l));
    for (int64_t m = 0; m < g.cubes_at(l); ++m) {
      nv[1] = cur[size_t(m)];
      for (int a = 1; a < F; ++a) {
        double c = s.coeffs[size_t(idx++)] * sc[alpha_depth(AlphaIndex(a))];
        nv[2 * a] = nv[a] - c;
        nv[2 * a + 1] = nv[a] + c;
      }
      for (int o = 0; o < F; ++o) next[size_t(m * F + o)] = nv[F + o];
    }
    stats::add_cube_visits(uint64_t(g.cubes_at(l)));
    cur.swap(next);
  }
  StepFunction f;
  f.grid = g;
  f.cells.resize(size_t(g.cell_count()));
  for (int64_t m = 0; m < g.cell_count(); ++m)
    f.cells[size_t(t.cell_from_morton[size_t(m)])] = cur[size_t(m)];
  return f;
}

double average(const CubeSumCache& c, const Cube& cube) {
  return c.average_cube(cube.level, morton_from_cube(c.grid, cube));
}

double average(const CubeSumCache& c, const Cube& cube, AlphaIndex alpha) {
  if (cube.level >= c.grid.L) throw std::invalid_argument("leaf cube has no children in grid");
  return c.average_set(cube.level, morton_from_cube(c.grid, cube), alpha);
}

double average_half(const CubeSumCache& c, const Cube& cube, AlphaIndex alpha, int half) {
  if (cube.level >= c.grid.L) throw std::invalid_argument("leaf cube has no children in grid");
  if (half != 1 && half != 2) throw std::invalid_argument("half must be 1 or 2");
  AlphaIndex node = 2 * alpha + (half == 2 ? 1 : 0);
  uint64_t m = morton_from_cube(c.grid, cube);
  double ns[32];
  c.node_sums(cube.level, m, ns);
  // node may be a leaf (single child); alpha_depth is d there, still right.
  int64_t n_cells = int64_t(1) << (c.grid.d * (c.grid.L - cube.level) - alpha_depth(node));
  return ns[node] / double(n_cells);
}

NestedHalfSums nested_half_sums(const GridSpec& g, const std::vector<double>& q) {
  validate_grid(g);
  if (int64_t(q.size()) != g.pair_count())
    throw std::invalid_argument("pair vector size does not match grid");
  NestedHalfSums out;
  out.half1.assign(q.size(), 0.0);
  out.half2.assign(q.size(), 0.0);
  const GridTables& t = grid_tables(g);
  const int F = g.fanout();
  // G[m]: total q over all pairs whose cube lies inside cube m at the level
  // being processed; carried upward one level at a time.
  std::vector<double> G_below, G_here;
  double Tq[16], H[32];
  for (int l = g.L - 1; l >= 0; --l) {
    G_here.assign(size_t(g.cubes_at(l)), 0.0);
    for (int64_t m = 0; m < g.cubes_at(l); ++m) {
      for (int o = 0; o < F; ++o)
        H[F + o] = G_below.empty() ? 0.0 : G_below[size_t(m * F + o)];
      for (int a = F - 1; a >= 1; --a) H[a] = H[2 * a] + H[2 * a + 1];
      int64_t base = pair_index(t, l, uint64_t(m), 1);
      for (int a = F - 1; a >= 1; --a) {
        double below = (2 * a < F) ? Tq[2 * a] + Tq[2 * a + 1] : 0.0;
        Tq[a] = q[size_t(base + a - 1)] + below;
      }
      for (int a = 1; a < F; ++a) {
        int c1 = 2 * a, c2 = 2 * a + 1;
        out.half1[size_t(base + a - 1)] = (c1 < F) ? Tq[c1] + H[c1] : H[c1];
        out.half2[size_t(base + a - 1)] = (c2 < F) ? Tq[c2] + H[c2] : H[c2];
      }
      G_here[size_t(m)] = Tq[1] + H[1];
    }
    G_below.swap(G_here);
  }
  return out;
}

std::vector<double> nested_inclusive_sums(const GridSpec& g, const std::vector<double>& q) {
  NestedHalfSums h = nested_half_sums(g, q);
  std::vector<double> out(q.size());
  for (size_t i = 0; i < q.size(); ++i) out[i] = q[i] + h.half1[i] + h.half2[i];
  return out;
}

}  // namespace dyadlab
