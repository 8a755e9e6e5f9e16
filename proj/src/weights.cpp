#include "dyadlab/weights.hpp"

#include <cmath>
#include <stdexcept>

#include "dyadlab/rng.hpp"

namespace dyadlab {

static void require_positive_cells(const StepFunction& f) {
  for (double v : f.cells)
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument("weight must be positive");
}

Weight make_weight(const StepFunction& cells, WeightRecipe recipe) {
  validate_grid(cells.grid);
  if (int64_t(cells.cells.size()) != cells.grid.cell_count())
    throw std::invalid_argument("cell vector size does not match grid");
  require_positive_cells(cells);
  Weight wt;
  wt.recipe = std::move(recipe);
  wt.w = cells;
  wt.inv = cells;
  wt.root = cells;
  wt.inv_root = cells;
  for (size_t i = 0; i < cells.cells.size(); ++i) {
    double v = cells.cells[i];
    double r = std::sqrt(v);
    wt.inv.cells[i] = 1.0 / v;
    wt.root.cells[i] = r;
    wt.inv_root.cells[i] = 1.0 / r;
  }
  wt.cw = CubeSumCache(wt.w);
  wt.cinv = CubeSumCache(wt.inv);
  wt.croot = CubeSumCache(wt.root);
  wt.cinv_root = CubeSumCache(wt.inv_root);
  wt.a2 = a2_characteristic(wt.cw, wt.cinv);
  return wt;
}

double a2_characteristic(const CubeSumCache& cw, const CubeSumCache& cinv) {
  require_same_grid(cw.grid, cinv.grid);
  const GridSpec& g = cw.grid;
  double best = 0.0;
  for (int l = 0; l <= g.L; ++l) {
    double inv_cells = 1.0 / double(int64_t(1) << (g.d * (g.L - l)));
    for (int64_t m = 0; m < g.cubes_at(l); ++m) {
      double p = cw.cell_sum(l, uint64_t(m)) * inv_cells *
                 cinv.cell_sum(l, uint64_t(m)) * inv_cells;
      if (p > best) best = p;
    }
  }
  return best;
}

double a2_characteristic(const StepFunction& w) {
  require_positive_cells(w);
  StepFunction inv = w;
  for (double& v : inv.cells) v = 1.0 / v;
  return a2_characteristic(CubeSumCache(w), CubeSumCache(inv));
}

static StepFunction power_cells(const GridSpec& g, double a) {
  if (!(a > -1.0 && a < 1.0)) throw std::invalid_argument("power exponent must be in (-1,1)");
  StepFunction f = constant_function(g, 1.0);
  if (g.d == 1) {
    // exact cell averages of x^a
    int64_t n = g.cell_count();
    double na = std::pow(double(n), -a);
    for (int64_t k = 0; k < n; ++k) {
      double hi = std::pow(double(k + 1), a + 1.0), lo = std::pow(double(k), a + 1.0);
      f.cells[size_t(k)] = na * (hi - lo) / (a + 1.0);
    }
    return f;
  }
  // one refinement level of max-norm samples per cell
  const GridTables& t = grid_tables(g);
  const int F = g.fanout();
  double sub = std::ldexp(1.0, -(g.L + 1));
  for (int64_t m = 0; m < g.cell_count(); ++m) {
    Cube c = cube_from_morton(g, g.L, uint64_t(m));
    double acc = 0.0;
    for (int o = 0; o < F; ++o) {
      double mx = 0.0;
      for (int i = 0; i < g.d; ++i) {
        uint32_t bit = (uint32_t(o) >> (g.d - 1 - i)) & 1u;
        double x = (2.0 * c.coord[i] + bit + 0.5) * sub;
        if (x > mx) mx = x;
      }
      acc += std::pow(mx, a);
    }
    f.cells[size_t(t.cell_from_morton[size_t(m)])] = acc / double(F);
  }
  return f;
}

static StepFunction cascade_cells(const GridSpec& g, double spread, uint64_t seed) {
  if (!(spread >= 1.0)) throw std::invalid_argument("cascade spread must be >= 1");
  const GridTables& t = grid_tables(g);
  Rng rng(mix_seed(seed, /*purpose=*/0xCA5C));
  double lk = std::log(spread);
  std::vector<double> cur(1, 1.0), next;
  for (int l = 1; l <= g.L; ++l) {
    next.resize(size_t(g.cubes_at(l)));
    for (int64_t m = 0; m < g.cubes_at(l); ++m) {
      double u = rng.uniform(-1.0, 1.0);
      next[size_t(m)] = cur[size_t(m >> g.d)] * std::exp(lk * u);
    }
    cur.swap(next);
  }
  StepFunction f = constant_function(g, 1.0);
  for (int64_t m = 0; m < g.cell_count(); ++m)
    f.cells[size_t(t.cell_from_morton[size_t(m)])] = cur[size_t(m)];
  return f;
}

StepFunction generate_weight_cells(const GridSpec& g, const WeightRecipe& r) {
  validate_grid(g);
  if (r.family == "constant") {
    if (!(r.param > 0.0)) throw std::invalid_argument("weight must be positive");
    return constant_function(g, r.param);
  }
  if (r.family == "step") {
    if (!(r.param > 0.0)) throw std::invalid_argument("weight must be positive");
    StepFunction f = constant_function(g, 1.0);
    // row-major order puts the x_0 < 1/2 half first
    for (int64_t i = 0; i < g.cell_count() / 2; ++i) f.cells[size_t(i)] = r.param;
    return f;
  }
  if (r.family == "power") return power_cells(g, r.param);
  if (r.family == "cascade") return cascade_cells(g, r.param, r.seed);
  throw std::invalid_argument("unknown weight family: " + r.family);
}

Weight generate_weight(const GridSpec& g, const WeightRecipe& r) {
  return make_weight(generate_weight_cells(g, r), r);
}

double step_param_for_a2(double target) {
  if (!(target >= 1.0)) throw std::invalid_argument("characteristic target must be >= 1");
  return 2.0 * target - 1.0 + 2.0 * std::sqrt(target * (target - 1.0));
}

// measured characteristic of a family member, for calibration loops
static double measured_a2(const GridSpec& g, const WeightRecipe& r) {
  return a2_characteristic(generate_weight_cells(g, r));
}

CorpusResult weight_corpus(const GridSpec& g, int count, double a2_max, uint64_t seed) {
  validate_grid(g);
  if (count < 1) throw std::invalid_argument("corpus count must be positive");
  if (!(a2_max >= 1.0)) throw std::invalid_argument("characteristic target must be >= 1");
  CorpusResult out;
  const char* cycle[3] = {"step", "power", "cascade"};
  for (int i = 0; i < count; ++i) {
    WeightRecipe r;
    char buf[16];
    std::snprintf(buf, sizeof buf, "w%03d", i);
    r.id = buf;
    if (i == 0 || a2_max == 1.0) {
      r.family = "constant";
      r.param = 1.0;
      out.entries.push_back({r, 1.0});
      continue;
    }
    double target = std::exp(std::log(a2_max) * double(i) / double(count - 1));
    r.family = cycle[(i - 1) % 3];
    r.seed = mix_seed(seed, 0xC0, uint64_t(i));
    double achieved = 1.0;
    if (r.family == "step") {
      r.param = std::min(step_param_for_a2(target), 1e12);
      achieved = measured_a2(g, r);
    } else if (r.family == "power") {
      // bisect exponent in (-1, 0]; characteristic decreases in the exponent
      double lo = -1.0 + 1e-9, hi = 0.0;
      double alo = measured_a2(g, {r.id, "power", lo, 0});
      if (alo < target) {
        r.param = lo;
        achieved = alo;
      } else {
        for (int it = 0; it < 80; ++it) {
          double mid = 0.5 * (lo + hi);
          double am = measured_a2(g, {r.id, "power", mid, 0});
          if (am >= target)
            lo = mid;
          else
            hi = mid;
        }
        r.param = lo;
        achieved = measured_a2(g, r);
      }
    } else {
      // expand then bisect the spread against the measured characteristic
      double khi = 2.0, klo = 1.0;
      double ahi = measured_a2(g, {r.id, "cascade", khi, r.seed});
      int guard = 0;
      while (ahi < target && khi < 1e6 && guard++ < 40) {
        klo = khi;
        khi *= 2.0;
        ahi = measured_a2(g, {r.id, "cascade", khi, r.seed});
      }
      if (ahi >= target) {
        for (int it = 0; it < 60; ++it) {
          double mid = 0.5 * (klo + khi);
          double am = measured_a2(g, {r.id, "cascade", mid, r.seed});
          if (am >= target)
            khi = mid;
          else
            klo = mid;
        }
      }
      r.param = khi;
      achieved = measured_a2(g, r);
    }
    // families that cannot reach the target on this grid fall back to step
    if (std::abs(std::log(achieved / target)) > std::log(1.25)) {
      WeightRecipe alt{r.id, "step", std::min(step_param_for_a2(target), 1e12), 0};
      double a_alt = measured_a2(g, alt);
      if (std::abs(std::log(a_alt / target)) < std::abs(std::log(achieved / target))) {
        r = alt;
        achieved = a_alt;
      }
    }
    out.entries.push_back({r, achieved});
  }
  for (const CorpusEntry& e : out.entries)
    out.achieved_max = std::max(out.achieved_max, e.a2);
  if (out.achieved_max < 0.99 * a2_max)
    out.warning = "requested characteristic span not reached: achieved max " +
                  std::to_string(out.achieved_max) + " of " + std::to_string(a2_max);
  return out;
}

}  // namespace dyadlab
