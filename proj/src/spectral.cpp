#include "dyadlab/spectral.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "dyadlab/rng.hpp"

namespace dyadlab {

static LinearOperator with_projections(const LinearOperator& op, bool mean_zero) {
  if (!mean_zero) return op;
  LinearOperator pi0 = projection_orthogonal(constant_function(op.grid, 1.0));
  return compose(pi0, compose(op, pi0));
}

static StepFunction random_start(const GridSpec& g, uint64_t seed) {
  Rng rng(mix_seed(seed, 0x5eed));
  StepFunction x = constant_function(g, 0.0);
  for (double& v : x.cells) v = rng.uniform(-1.0, 1.0);
  return x;
}

static NormResult dense_norm(const LinearOperator& op, const NormOptions& opt) {
  const GridSpec& g = op.grid;
  const int64_t n = g.cell_count();
  std::vector<double> m = materialize(op, Basis::Cell, opt.dense_cap);
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
      a(m.data(), n, n);
  Eigen::MatrixXd gram = a.transpose() * a;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  double lmax = std::max(eig.eigenvalues()(n - 1), 0.0);
  NormResult out;
  out.method = "dense";
  out.value = std::sqrt(lmax);
  if (out.value < 1e-150) {
    out.witness = constant_function(g, 1.0);
    out.residual = 0.0;
    return out;
  }
  // witness by shift-inverted iteration; the shifted Gram is negative definite
  double mu = lmax * (1.0 + 1e-9) + 1e-300;
  Eigen::MatrixXd shifted = gram;
  shifted.diagonal().array() -= mu;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(shifted);
  StepFunction start = random_start(g, opt.seed);
  Eigen::VectorXd x = Eigen::Map<Eigen::VectorXd>(start.cells.data(), n);
  x.normalize();
  double achieved_sq = 0.0;
  for (int it = 0; it < 8; ++it) {
    x = ldlt.solve(x);
    x.normalize();
    ++out.iterations;
    achieved_sq = x.dot(gram * x);
    if (out.value - std::sqrt(std::max(achieved_sq, 0.0)) <= opt.tol * out.value) break;
  }
  out.residual = out.value - std::sqrt(std::max(achieved_sq, 0.0));
  out.witness = constant_function(g, 0.0);
  double cell_scale = 1.0 / std::sqrt(g.cell_measure());
  for (int64_t i = 0; i < n; ++i) out.witness.cells[size_t(i)] = x(i) * cell_scale;
  return out;
}

static NormResult power_norm(const LinearOperator& op, const NormOptions& opt) {
  const GridSpec& g = op.grid;
  StepFunction x = random_start(g, opt.seed);
  double nx = l2_norm(x);
  x = scaled(x, 1.0 / nx);
  double rho_prev = -1.0, rho = 0.0;
  NormResult out;
  out.method = "power-iteration";
  const int64_t cap = 10 * g.cell_count();
  for (int64_t it = 0; it < cap; ++it) {
    StepFunction y = op.fwd(x);
    rho = inner_product(y, y);
    ++out.iterations;
    if (rho == 0.0) {
      out.value = 0.0;
      out.witness = x;
      out.residual = 0.0;
      return out;
    }
    StepFunction z = op.adj(y);
    double nz = l2_norm(z);
    if (nz == 0.0) {
      out.value = std::sqrt(rho);
      out.witness = x;
      out.residual = 0.0;
      return out;
    }
    x = scaled(z, 1.0 / nz);
    if (rho_prev >= 0.0 && std::abs(rho - rho_prev) <= opt.tol * rho) {
      out.value = std::sqrt(rho);
      out.witness = x;
      out.residual = std::abs(std::sqrt(rho) - std::sqrt(rho_prev));
      return out;
    }
    rho_prev = rho;
  }
  std::ostringstream msg;
  msg << "power iteration did not converge in " << cap
      << " steps; last Rayleigh bracket [" << std::sqrt(std::max(rho_prev, 0.0)) << ", "
      << std::sqrt(rho) << "]";
  throw std::runtime_error(msg.str());
}

NormResult operator_norm(const LinearOperator& op, const NormOptions& opt) {
  validate_grid(op.grid);
  LinearOperator eff = with_projections(op, opt.mean_zero);
  bool dense = opt.method == NormMethod::Dense ||
               (opt.method == NormMethod::Auto && op.grid.cell_count() <= opt.dense_cap);
  return dense ? dense_norm(eff, opt) : power_norm(eff, opt);
}

QuadraticForm operator_form(const LinearOperator& op) {
  QuadraticForm q;
  q.op = op;
  return q;
}

QuadraticForm cell_diagonal_form(const StepFunction& b) {
  for (double v : b.cells)
    if (!(v > 0.0)) throw std::invalid_argument("quadratic form must be positive");
  QuadraticForm q;
  q.op = pointwise_multiplier(b);
  q.diagonal = true;
  StepFunction is = b;
  for (double& v : is.cells) v = 1.0 / std::sqrt(v);
  q.inv_sqrt = pointwise_multiplier(is);
  return q;
}

QuadraticForm haar_diagonal_form(const GridSpec& g, double mean_factor,
                                 std::vector<double> pair_factors) {
  if (mean_factor < 0.0) throw std::invalid_argument("quadratic form must be positive");
  for (double v : pair_factors)
    if (!(v > 0.0)) throw std::invalid_argument("quadratic form must be positive");
  QuadraticForm q;
  q.diagonal = true;
  q.mean_in_kernel = mean_factor == 0.0;
  std::vector<double> inv(pair_factors.size());
  for (size_t p = 0; p < inv.size(); ++p) inv[p] = 1.0 / std::sqrt(pair_factors[p]);
  q.op = haar_diagonal(g, mean_factor, std::move(pair_factors));
  q.inv_sqrt = haar_diagonal(g, q.mean_in_kernel ? 0.0 : 1.0 / std::sqrt(mean_factor),
                             std::move(inv));
  return q;
}

double form_value(const QuadraticForm& q, const StepFunction& f) {
  return inner_product(q.op.fwd(f), f);
}

NormResult generalized_max_rayleigh(const QuadraticForm& a, const QuadraticForm& b,
                                    const NormOptions& opt) {
  if (!b.diagonal)
    throw std::invalid_argument("denominator form must be diagonal for exact inversion");
  require_same_grid(a.op.grid, b.op.grid);
  LinearOperator x = compose(b.inv_sqrt, compose(a.op, b.inv_sqrt));
  if (opt.mean_zero && !b.mean_in_kernel) {
    // mean-zero f maps to g orthogonal to B^{-1/2} 1 after g = B^{1/2} f
    StepFunction u = b.inv_sqrt.fwd(constant_function(a.op.grid, 1.0));
    LinearOperator proj = projection_orthogonal(u);
    x = compose(proj, compose(x, proj));
  }
  NormOptions inner = opt;
  inner.mean_zero = false;
  return operator_norm(x, inner);
}

}  // namespace dyadlab
