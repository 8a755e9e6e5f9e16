#include "dyadlab/symbols.hpp"

#include <cmath>
#include <stdexcept>

#include "dyadlab/rng.hpp"

namespace dyadlab {

SymbolSequence::SymbolSequence(GridSpec g, std::vector<double> values)
    : grid_(g), values_(std::move(values)) {
  validate_grid(grid_);
  if (int64_t(values_.size()) != grid_.pair_count())
    throw std::invalid_argument("symbol vector size does not match grid");
}

double SymbolSequence::sup_norm() const {
  if (sup_ < 0.0) {
    double s = 0.0;
    for (double v : values_) s = std::max(s, std::abs(v));
    sup_ = s;
  }
  return sup_;
}

SymbolSequence constant_symbol(const GridSpec& g, double value) {
  return SymbolSequence(g, std::vector<double>(size_t(g.pair_count()), value));
}

SymbolSequence random_sign_symbol(const GridSpec& g, uint64_t seed) {
  Rng rng(mix_seed(seed, /*purpose=*/0x5157));
  std::vector<double> v(size_t(g.pair_count()));
  for (double& x : v) x = rng.pm1();
  return SymbolSequence(g, std::move(v));
}

SymbolSequence coefficient_symbol(const StepFunction& g) {
  HaarSpectrum s = analyze(g);
  return SymbolSequence(g.grid, std::move(s.coeffs));
}

SymbolSequence set_average_symbol(const StepFunction& g) {
  CubeSumCache cache(g);
  const GridSpec& gr = g.grid;
  const int F = gr.fanout();
  std::vector<double> v(size_t(gr.pair_count()));
  double ns[32];
  int64_t idx = 0;
  for (int l = 0; l < gr.L; ++l) {
    int64_t cells_in_cube = int64_t(1) << (gr.d * (gr.L - l));
    for (int64_t m = 0; m < gr.cubes_at(l); ++m) {
      cache.node_sums(l, uint64_t(m), ns);
      for (int a = 1; a < F; ++a)
        v[size_t(idx++)] = ns[a] / double(cells_in_cube >> alpha_depth(AlphaIndex(a)));
    }
  }
  return SymbolSequence(gr, std::move(v));
}

}  // namespace dyadlab
