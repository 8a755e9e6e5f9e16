#pragma once

#include <cstdint>
#include <string>

#include "dyadlab/operators.hpp"

namespace dyadlab {

enum class NormMethod { Auto, Dense, Power };

struct NormOptions {
  double tol = 1e-8;           // relative accuracy of the returned value
  NormMethod method = NormMethod::Auto;
  bool mean_zero = false;      // sandwich the operator between mean-zero projections
  uint64_t seed = 2024;        // start vector for the iterative paths
  int64_t dense_cap = 4096;    // Auto switches to Power above this many cells
};

struct NormResult {
  double value = 0.0;
  StepFunction witness;   // unit L2 vector; ||op witness|| = value - residual
  double residual = 0.0;  // value minus the Rayleigh value achieved at witness
  int iterations = 0;
  std::string method;     // "dense" | "power-iteration"
};

// L2 -> L2 operator norm.  Dense path materializes the cell-basis matrix,
// takes the top eigenvalue of the Gram matrix and recovers a witness by
// shift-inverted iteration; power path iterates op* op and throws
// std::runtime_error with the last bracket if it fails to settle within
// 10 * n steps.
NormResult operator_norm(const LinearOperator& op, const NormOptions& opt = {});

// Quadratic form Q(f) = <op f, f> with op self-adjoint.  The diagonal
// builders carry an exact inverse square root, which the generalized
// Rayleigh solver needs on the denominator side.
struct QuadraticForm {
  LinearOperator op;
  bool diagonal = false;
  LinearOperator inv_sqrt;      // exact on the positive span; diagonal only
  bool mean_in_kernel = false;  // true when the form vanishes on constants
};

QuadraticForm operator_form(const LinearOperator& op);
// cells > 0; throws std::invalid_argument("quadratic form must be positive").
QuadraticForm cell_diagonal_form(const StepFunction& b);
// pair factors > 0; mean_factor 0 restricts the form to the mean-zero span.
QuadraticForm haar_diagonal_form(const GridSpec& g, double mean_factor,
                                 std::vector<double> pair_factors);

double form_value(const QuadraticForm& q, const StepFunction& f);

// max over f of A(f)/B(f), as operator_norm of B^{-1/2} A B^{-1/2}; B must be
// one of the diagonal forms.  opt.mean_zero restricts the competitors f to
// mean zero (the restriction transports to a projection after the
// substitution g = B^{1/2} f).  A B whose kernel contains the constants is
// positive only on the mean-zero span and forces that restriction by itself.
NormResult generalized_max_rayleigh(const QuadraticForm& a, const QuadraticForm& b,
                                    const NormOptions& opt = {});

}  // namespace dyadlab
