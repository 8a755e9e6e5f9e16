#pragma once

#include <cstdint>
#include <vector>

#include "dyadlab/grid.hpp"
#include "dyadlab/haar.hpp"

namespace dyadlab {

// Real multiplier per pair (cube, alpha), levels 0..L-1; entries never set
// stay 0.  Layout matches pair_index.
class SymbolSequence {
 public:
  SymbolSequence() = default;
  SymbolSequence(GridSpec g, std::vector<double> values);

  const GridSpec& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  double at(int64_t pair) const { return values_[size_t(pair)]; }
  void set(int64_t pair, double v) {
    values_[size_t(pair)] = v;
    sup_ = -1.0;
  }
  double sup_norm() const;  // cached

 private:
  GridSpec grid_;
  std::vector<double> values_;
  mutable double sup_ = -1.0;
};

SymbolSequence constant_symbol(const GridSpec& g, double value);
SymbolSequence random_sign_symbol(const GridSpec& g, uint64_t seed);
// Haar coefficients of g as a symbol.
SymbolSequence coefficient_symbol(const StepFunction& g);
// Set averages <g>_{E_{alpha,I}} as a symbol.
SymbolSequence set_average_symbol(const StepFunction& g);

}  // namespace dyadlab
