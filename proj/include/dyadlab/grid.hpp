#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace dyadlab {

// Dyadic grid on [0,1)^d truncated at depth L.  Cells are the 2^{dL} cubes at
// level L; every deeper structure in the library indexes into this grid.
struct GridSpec {
  int d = 1;  // 1..4
  int L = 1;  // >= 1 and 2^{dL} <= 2^20

  int64_t cell_count() const { return int64_t(1) << (d * L); }
  double cell_measure() const;
  int fanout() const { return 1 << d; }  // children per cube
  int64_t cubes_at(int level) const { return int64_t(1) << (d * level); }
  // pairs (cube, alpha) with cube level < L; equals cell_count() - 1
  int64_t pair_count() const { return cell_count() - 1; }

  bool operator==(const GridSpec& o) const { return d == o.d && L == o.L; }
  bool operator!=(const GridSpec& o) const { return !(*this == o); }
};

// Throws std::invalid_argument unless 1 <= d <= 4, L >= 1, 2^{dL} <= 2^20.
GridSpec make_grid(int d, int L);
void validate_grid(const GridSpec& g);

// Cube at `level` (0..L); coord[i] in [0, 2^level), coordinate 0 varies slowest.
struct Cube {
  int level = 0;
  std::array<int32_t, 4> coord{0, 0, 0, 0};
};

Cube root_cube();
double cube_measure(const GridSpec& g, int level);

// Digit index along the ancestor chain: base-2^d digits, root first.  Children
// of cube m are m*2^d + o for child offsets o; within an offset, the bit for
// coordinate i sits at position d-1-i (coordinate 0 most significant).
uint64_t morton_from_cube(const GridSpec& g, const Cube& c);
Cube cube_from_morton(const GridSpec& g, int level, uint64_t morton);

// Row-major cell index sum_i coord[i] * 2^{L(d-1-i)}; the on-disk cell order.
int64_t cell_index(const GridSpec& g, const Cube& cell);

// The 2^d children in lexicographic offset order.  Throws
// std::invalid_argument("leaf cube has no children in grid") at level L.
std::vector<Cube> children(const GridSpec& g, const Cube& c);

std::string cube_to_string(const Cube& c, int d);  // "level:k0:k1..."

// Per-grid lookup tables, built once and shared.
struct GridTables {
  GridSpec grid;
  std::vector<int64_t> cell_from_morton;   // row-major cell index per cell morton
  std::vector<int64_t> morton_from_cell;   // inverse
  std::vector<int64_t> pair_level_offset;  // size L+1; offsets into pair space
};
const GridTables& grid_tables(const GridSpec& g);

// Canonical pair order: level-major, cube morton, then alpha = 1..2^d-1.
inline int64_t pair_index(const GridTables& t, int level, uint64_t morton,
                          uint32_t alpha) {
  return t.pair_level_offset[level] +
         int64_t(morton) * (t.grid.fanout() - 1) + (alpha - 1);
}

// Piecewise-constant function on the grid cells, row-major cell order.
struct StepFunction {
  GridSpec grid;
  std::vector<double> cells;
};

StepFunction constant_function(const GridSpec& g, double value);
void require_same_grid(const GridSpec& a, const GridSpec& b);

double integral(const StepFunction& f);  // cell_measure * sum, left fold
double mean_value(const StepFunction& f);
double inner_product(const StepFunction& f, const StepFunction& g);
double l2_norm(const StepFunction& f);
// Throws std::invalid_argument("weight must be positive") on a nonpositive cell.
double weighted_inner_product(const StepFunction& f, const StepFunction& g,
                              const StepFunction& w);
double weighted_l2_norm(const StepFunction& f, const StepFunction& w);

StepFunction cellwise_product(const StepFunction& f, const StepFunction& g);
StepFunction cellwise_map(const StepFunction& f, double (*fn)(double));
StepFunction scaled(const StepFunction& f, double s);
StepFunction added(const StepFunction& f, const StepFunction& g);
StepFunction subtracted(const StepFunction& f, const StepFunction& g);

namespace stats {
// Coarse work counter: cubes touched by cache builds and transforms.
uint64_t cube_visits();
void add_cube_visits(uint64_t n);
void reset_cube_visits();
}  // namespace stats

}  // namespace dyadlab
