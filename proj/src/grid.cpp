#include "dyadlab/grid.hpp"

#include <atomic>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace dyadlab {

double GridSpec::cell_measure() const { return std::ldexp(1.0, -d * L); }

void validate_grid(const GridSpec& g) {
  if (g.d < 1 || g.d > 4) throw std::invalid_argument("grid dimension must be 1..4");
  if (g.L < 1) throw std::invalid_argument("grid depth must be positive");
  if (g.d * g.L > 20) throw std::invalid_argument("grid too fine: 2^{dL} exceeds 2^20");
}

GridSpec make_grid(int d, int L) {
  GridSpec g{d, L};
  validate_grid(g);
  return g;
}

Cube root_cube() { return Cube{}; }

double cube_measure(const GridSpec& g, int level) {
  return std::ldexp(1.0, -g.d * level);
}

static void validate_cube(const GridSpec& g, const Cube& c) {
  if (c.level < 0 || c.level > g.L) throw std::invalid_argument("cube level out of range");
  for (int i = 0; i < g.d; ++i) {
    if (c.coord[i] < 0 || c.coord[i] >= (int32_t(1) << c.level))
      throw std::invalid_argument("cube coordinate out of range");
  }
}

uint64_t morton_from_cube(const GridSpec& g, const Cube& c) {
  validate_cube(g, c);
  uint64_t m = 0;
  for (int step = c.level - 1; step >= 0; --step) {
    uint32_t offset = 0;
    for (int i = 0; i < g.d; ++i) {
      uint32_t bit = (uint32_t(c.coord[i]) >> step) & 1u;
      offset |= bit << (g.d - 1 - i);
    }
    m = (m << g.d) | offset;
  }
  return m;
}

Cube cube_from_morton(const GridSpec& g, int level, uint64_t morton) {
  Cube c;
  c.level = level;
  for (int i = 0; i < g.d; ++i) c.coord[i] = 0;
  for (int step = level - 1; step >= 0; --step) {
    uint32_t offset = uint32_t(morton >> (uint64_t(g.d) * step)) & (uint32_t(g.fanout()) - 1);
    for (int i = 0; i < g.d; ++i) {
      uint32_t bit = (offset >> (g.d - 1 - i)) & 1u;
      c.coord[i] = int32_t((uint32_t(c.coord[i]) << 1) | bit);
    }
  }
  return c;
}

int64_t cell_index(const GridSpec& g, const Cube& cell) {
  if (cell.level != g.L) throw std::invalid_argument("cell_index expects a level-L cube");
  validate_cube(g, cell);
  int64_t idx = 0;
  for (int i = 0; i < g.d; ++i)
    idx += int64_t(cell.coord[i]) << (int64_t(g.L) * (g.d - 1 - i));
  return idx;
}

std::vector<Cube> children(const GridSpec& g, const Cube& c) {
  validate_cube(g, c);
  if (c.level >= g.L)
    throw std::invalid_argument("leaf cube has no children in grid");
  std::vector<Cube> out;
  out.reserve(size_t(g.fanout()));
  for (int o = 0; o < g.fanout(); ++o) {
    Cube ch;
    ch.level = c.level + 1;
    for (int i = 0; i < g.d; ++i) {
      uint32_t bit = (uint32_t(o) >> (g.d - 1 - i)) & 1u;
      ch.coord[i] = int32_t(uint32_t(c.coord[i]) * 2 + bit);
    }
    out.push_back(ch);
  }
  return out;
}

std::string cube_to_string(const Cube& c, int d) {
  std::string s = std::to_string(c.level);
  for (int i = 0; i < d; ++i) s += ":" + std::to_string(c.coord[i]);
  return s;
}

const GridTables& grid_tables(const GridSpec& g) {
  validate_grid(g);
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<GridTables>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(g.d, g.L);
  auto it = cache.find(key);
  if (it != cache.end()) return *it->second;

  auto t = std::make_unique<GridTables>();
  t->grid = g;
  const int64_t n = g.cell_count();
  t->cell_from_morton.resize(size_t(n));
  t->morton_from_cell.resize(size_t(n));
  for (int64_t m = 0; m < n; ++m) {
    Cube c = cube_from_morton(g, g.L, uint64_t(m));
    int64_t idx = cell_index(g, c);
    t->cell_from_morton[size_t(m)] = idx;
    t->morton_from_cell[size_t(idx)] = m;
  }
  t->pair_level_offset.resize(size_t(g.L) + 1);
  int64_t off = 0;
  for (int l = 0; l <= g.L; ++l) {
    t->pair_level_offset[size_t(l)] = off;
    if (l < g.L) off += g.cubes_at(l) * (g.fanout() - 1);
  }
  const GridTables& ref = *t;
  cache.emplace(key, std::move(t));
  return ref;
}

StepFunction constant_function(const GridSpec& g, double value) {
  validate_grid(g);
  StepFunction f;
  f.grid = g;
  f.cells.assign(size_t(g.cell_count()), value);
  return f;
}

void require_same_grid(const GridSpec& a, const GridSpec& b) {
  if (a != b) throw std::invalid_argument("grid mismatch");
}

static void require_sized(const StepFunction& f) {
  if (int64_t(f.cells.size()) != f.grid.cell_count())
    throw std::invalid_argument("cell vector size does not match grid");
}

double integral(const StepFunction& f) {
  require_sized(f);
  double s = 0.0;
  for (double v : f.cells) s += v;
  return s * f.grid.cell_measure();
}

double mean_value(const StepFunction& f) { return integral(f); }

double inner_product(const StepFunction& f, const StepFunction& g) {
  require_same_grid(f.grid, g.grid);
  require_sized(f);
  double s = 0.0;
  for (size_t i = 0; i < f.cells.size(); ++i) s += f.cells[i] * g.cells[i];
  return s * f.grid.cell_measure();
}

double l2_norm(const StepFunction& f) { return std::sqrt(inner_product(f, f)); }

double weighted_inner_product(const StepFunction& f, const StepFunction& g,
                              const StepFunction& w) {
  require_same_grid(f.grid, g.grid);
  require_same_grid(f.grid, w.grid);
  require_sized(f);
  for (double v : w.cells)
    if (!(v > 0.0)) throw std::invalid_argument("weight must be positive");
  double s = 0.0;
  for (size_t i = 0; i < f.cells.size(); ++i) s += f.cells[i] * g.cells[i] * w.cells[i];
  return s * f.grid.cell_measure();
}

double weighted_l2_norm(const StepFunction& f, const StepFunction& w) {
  return std::sqrt(weighted_inner_product(f, f, w));
}

StepFunction cellwise_product(const StepFunction& f, const StepFunction& g) {
  require_same_grid(f.grid, g.grid);
  StepFunction out = f;
  for (size_t i = 0; i < out.cells.size(); ++i) out.cells[i] *= g.cells[i];
  return out;
}

StepFunction cellwise_map(const StepFunction& f, double (*fn)(double)) {
  StepFunction out = f;
  for (double& v : out.cells) v = fn(v);
  return out;
}

StepFunction scaled(const StepFunction& f, double s) {
  StepFunction out = f;
  for (double& v : out.cells) v *= s;
  return out;
}

StepFunction added(const StepFunction& f, const StepFunction& g) {
  require_same_grid(f.grid, g.grid);
  StepFunction out = f;
  for (size_t i = 0; i < out.cells.size(); ++i) out.cells[i] += g.cells[i];
  return out;
}

StepFunction subtracted(const StepFunction& f, const StepFunction& g) {
  require_same_grid(f.grid, g.grid);
  StepFunction out = f;
  for (size_t i = 0; i < out.cells.size(); ++i) out.cells[i] -= g.cells[i];
  return out;
}

namespace stats {
static std::atomic<uint64_t> g_cube_visits{0};
uint64_t cube_visits() { return g_cube_visits.load(std::memory_order_relaxed); }
void add_cube_visits(uint64_t n) { g_cube_visits.fetch_add(n, std::memory_order_relaxed); }
void reset_cube_visits() { g_cube_visits.store(0, std::memory_order_relaxed); }
}  // namespace stats

}  // namespace dyadlab
