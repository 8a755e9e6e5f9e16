#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "dyadlab/grid.hpp"
#include "dyadlab/haar.hpp"
#include "dyadlab/symbols.hpp"
#include "dyadlab/weights.hpp"
#include "dyadlab/wilson.hpp"

namespace dyadlab {

// Linear map on step functions with an explicit adjoint; compositions keep
// the adjoint exact, so adjointness tests never rely on symmetry by accident.
struct LinearOperator {
  GridSpec grid;
  std::function<StepFunction(const StepFunction&)> fwd;
  std::function<StepFunction(const StepFunction&)> adj;
};

StepFunction apply(const LinearOperator& op, const StepFunction& f);
StepFunction apply_adjoint(const LinearOperator& op, const StepFunction& f);

LinearOperator adjoint(const LinearOperator& op);
LinearOperator compose(const LinearOperator& outer, const LinearOperator& inner);
LinearOperator add(const LinearOperator& a, const LinearOperator& b);
LinearOperator scale(double s, const LinearOperator& op);
LinearOperator identity_operator(const GridSpec& g);
LinearOperator zero_operator(const GridSpec& g);

// The three paraproduct shapes against a symbol b = {b_{alpha,I}}:
//   P00 f = sum b f_hat(pair) h_pair          (the Haar multiplier)
//   P01 f = sum b <f>_{E_pair} h_pair
//   P10 f = sum b f_hat(pair) 1_{E_pair} / |E_pair|
// Adjoints: P00* = P00, P01* = P10, P10* = P01 (same symbol).
enum class ParaKind { P00, P01, P10 };

LinearOperator paraproduct(ParaKind kind, const SymbolSequence& symbol);
LinearOperator haar_multiplier(const SymbolSequence& symbol);

// f -> m * f cellwise; self-adjoint.
LinearOperator pointwise_multiplier(const StepFunction& m);

// Diagonal in the Haar system: mean *= mean_factor, coeff[p] *= pair_factors[p].
LinearOperator haar_diagonal(const GridSpec& g, double mean_factor,
                             std::vector<double> pair_factors);

// Orthogonal projection onto the complement of span{u} in L2.
LinearOperator projection_orthogonal(const StepFunction& u);

// f -> factor * mean(f) * 1; self-adjoint on the unit-volume domain.
LinearOperator rank_one_mean(const GridSpec& g, double factor);

// Multiplication by g splits as P00 against the set averages of g plus P01
// and P10 against its coefficients plus the rank-one mean term; the split is
// exact on the truncation.
struct MultiplicationParts {
  SymbolSequence avg;  // <g>_{E_{alpha,I}}
  SymbolSequence hat;  // g_hat(alpha, I)
  double mean = 0.0;
};
MultiplicationParts decompose_multiplication(const StepFunction& g);
LinearOperator multiplication_as_paraproducts(const StepFunction& g);

// Coefficient of the pointwise product via the three-term expansion: the two
// paraproduct terms at the pair plus the collapsed strictly-inner sum.  Slow
// reference form; the spectrum version aggregates all pairs in one pass.
double product_formula_coefficient(const StepFunction& f, const StepFunction& g,
                                   const PairRef& where);
HaarSpectrum product_formula_spectrum(const StepFunction& f, const StepFunction& g);

// M_{w^{1/2}} T_sigma M_{w^{-1/2}} split into the nine paraproduct
// compositions Q_ab = P^a(w^{1/2}) T_sigma P^b(w^{-1/2}); the mean terms of
// both multiplications die against T_sigma, so the nine terms sum to the
// conjugated operator exactly.
struct NineTermResolution {
  GridSpec grid;
  std::array<std::string, 9> labels;  // q_01_01, q_01_10, ..., q_00_00
  std::array<LinearOperator, 9> terms;
  LinearOperator conjugated;
  LinearOperator sum;
};
NineTermResolution nine_term_resolution(const Weight& w, const SymbolSequence& sigma);

// Dense matrix of the operator, row-major n x n.  Cell basis: raw cell
// values (orthogonal, equal norms, so operator norms and adjoints carry
// over).  Haar basis: coordinates (mean, coeffs), orthonormal.  Throws
// std::length_error beyond `cap` columns.
enum class Basis { Cell, Haar };
std::vector<double> materialize(const LinearOperator& op, Basis basis, int64_t cap = 4096);

}  // namespace dyadlab
