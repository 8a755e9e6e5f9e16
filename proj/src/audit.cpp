#include "dyadlab/audit.hpp"

#include <cmath>
#include <stdexcept>

#include "dyadlab/operators.hpp"
#include "dyadlab/rng.hpp"
#include "dyadlab/wilson.hpp"

namespace dyadlab {

namespace {

// Per-pair statistics of the weight and its powers; "half" averages feed the
// disbalance check.  Mirror audits read the same struct with roles swapped.
struct PairArrays {
  GridSpec g;
  std::vector<double> hat_w, hat_inv, hat_root, hat_invroot;
  std::vector<double> avg_w, avg_inv, avg_root, avg_invroot;
  std::vector<double> cubeavg_w, cubeavg_inv;
  std::vector<double> half1_w, half2_w, half1_inv, half2_inv;
  std::vector<double> meas;
};

PairArrays build_pairs(const Weight& w) {
  const GridSpec& g = w.w.grid;
  const GridTables& t = grid_tables(g);
  const size_t P = size_t(g.pair_count());
  PairArrays pa;
  pa.g = g;
  pa.hat_w = analyze(w.cw).coeffs;
  pa.hat_inv = analyze(w.cinv).coeffs;
  pa.hat_root = analyze(w.croot).coeffs;
  pa.hat_invroot = analyze(w.cinv_root).coeffs;
  for (auto* v : {&pa.avg_w, &pa.avg_inv, &pa.avg_root, &pa.avg_invroot, &pa.cubeavg_w,
                  &pa.cubeavg_inv, &pa.half1_w, &pa.half2_w, &pa.half1_inv, &pa.half2_inv,
                  &pa.meas})
    v->assign(P, 0.0);
  const int F = g.fanout();
  std::vector<double> nw(size_t(2 * F)), ni(size_t(2 * F)), nr(size_t(2 * F)),
      nir(size_t(2 * F));
  for (int l = 0; l < g.L; ++l) {
    double cube_cells = double(int64_t(1) << (g.d * (g.L - l)));
    for (int64_t m = 0; m < g.cubes_at(l); ++m) {
      w.cw.node_sums(l, uint64_t(m), nw.data());
      w.cinv.node_sums(l, uint64_t(m), ni.data());
      w.croot.node_sums(l, uint64_t(m), nr.data());
      w.cinv_root.node_sums(l, uint64_t(m), nir.data());
      int64_t base = pair_index(t, l, uint64_t(m), 1);
      for (int a = 1; a < F; ++a) {
        size_t p = size_t(base + a - 1);
        double cells = double(set_cell_count(g, l, AlphaIndex(a)));
        pa.avg_w[p] = nw[size_t(a)] / cells;
        pa.avg_inv[p] = ni[size_t(a)] / cells;
        pa.avg_root[p] = nr[size_t(a)] / cells;
        pa.avg_invroot[p] = nir[size_t(a)] / cells;
        pa.cubeavg_w[p] = nw[1] / cube_cells;
        pa.cubeavg_inv[p] = ni[1] / cube_cells;
        double hc = cells / 2.0;
        pa.half1_w[p] = nw[size_t(2 * a)] / hc;
        pa.half2_w[p] = nw[size_t(2 * a + 1)] / hc;
        pa.half1_inv[p] = ni[size_t(2 * a)] / hc;
        pa.half2_inv[p] = ni[size_t(2 * a + 1)] / hc;
        pa.meas[p] = set_measure(g, l, AlphaIndex(a));
      }
    }
  }
  return pa;
}

void pair_location(const GridSpec& g, int64_t p, int* level, uint64_t* morton,
                   AlphaIndex* alpha) {
  const GridTables& t = grid_tables(g);
  const int Fm1 = g.fanout() - 1;
  for (int l = 0; l < g.L; ++l)
    if (p < t.pair_level_offset[size_t(l + 1)]) {
      int64_t rel = p - t.pair_level_offset[size_t(l)];
      *level = l;
      *morton = uint64_t(rel / Fm1);
      *alpha = AlphaIndex(1 + rel % Fm1);
      return;
    }
  throw std::logic_error("pair index out of range");
}

AuditRecord make_record(const Weight& w, const char* id, const std::vector<double>& lhs,
                        const std::vector<double>& rhs) {
  const GridSpec& g = w.w.grid;
  AuditRecord rec;
  rec.inequality_id = id;
  rec.weight_id = w.recipe.id;
  rec.d = g.d;
  rec.L = g.L;
  rec.a2 = w.a2;
  int64_t best = 0;
  double best_ratio = -1.0;
  for (size_t p = 0; p < lhs.size(); ++p) {
    double r = lhs[p] / rhs[p];
    if (r > best_ratio) {
      best_ratio = r;
      best = int64_t(p);
    }
  }
  rec.ratio = best_ratio;
  rec.lhs_max = lhs[size_t(best)];
  rec.rhs_base = rhs[size_t(best)];
  int level = 0;
  uint64_t morton = 0;
  pair_location(g, best, &level, &morton, &rec.witness_alpha);
  rec.witness_cube = cube_to_string(cube_from_morton(g, level, morton), g.d);
  return rec;
}

}  // namespace

AuditReport audit_lemma_sums(const Weight& w) {
  const GridSpec& g = w.w.grid;
  PairArrays pa = build_pairs(w);
  const size_t P = pa.meas.size();
  const double A2 = w.a2;
  AuditReport out;

  // roles within one pass; the mirror pass swaps w and 1/w
  struct View {
    const std::vector<double>*hw, *hi, *hir, *aw, *ai, *ar, *cw, *h1, *h2;
  };
  View direct{&pa.hat_w,   &pa.hat_inv, &pa.hat_invroot, &pa.avg_w,  &pa.avg_inv,
              &pa.avg_root, &pa.cubeavg_w, &pa.half1_w,  &pa.half2_w};
  View mirror{&pa.hat_inv, &pa.hat_w,  &pa.hat_root,  &pa.avg_inv, &pa.avg_w,
              &pa.avg_invroot, &pa.cubeavg_inv, &pa.half1_inv, &pa.half2_inv};

  std::vector<double> q(P), rhs(P);
  auto emit_nested = [&](const std::string& id) {
    std::vector<double> s = nested_inclusive_sums(g, q);
    out.push_back(make_record(w, id.c_str(), s, rhs));
  };
  auto emit_pointwise = [&](const std::string& id) {
    out.push_back(make_record(w, id.c_str(), q, rhs));
  };

  for (int pass = 0; pass < 2; ++pass) {
    const View& v = pass ? mirror : direct;
    const std::string sfx = pass ? "_swap" : "";
    auto mass = [&](const std::vector<double>& avg, size_t p) { return avg[p] * pa.meas[p]; };
    const std::vector<double>&hw = *v.hw, &hi = *v.hi, &hir = *v.hir, &aw = *v.aw,
                             &ai = *v.ai, &ar = *v.ar, &cw = *v.cw, &h1 = *v.h1,
                             &h2 = *v.h2;
    for (size_t p = 0; p < P; ++p) {
      q[p] = hir[p] * hir[p] * cw[p];
      rhs[p] = A2 * A2 * pa.meas[p];
    }
    emit_nested("sq_invroot_cubeavg" + sfx);
    for (size_t p = 0; p < P; ++p) q[p] = hir[p] * hir[p] * aw[p];
    emit_nested("sq_invroot_setavg" + sfx);
    for (size_t p = 0; p < P; ++p) q[p] = hir[p] * hir[p] * ar[p] * ar[p];
    emit_nested("sq_invroot_rootavg2" + sfx);
    for (size_t p = 0; p < P; ++p) {
      q[p] = hi[p] * hi[p] * aw[p];
      rhs[p] = A2 * A2 * mass(ai, p);
    }
    emit_nested("sq_inverse_setavg" + sfx);
    for (size_t p = 0; p < P; ++p) {
      q[p] = hi[p] * hi[p] / (ai[p] * ai[p]);
      rhs[p] = A2 * pa.meas[p];
    }
    emit_nested("sq_inverse_over_avg2" + sfx);
    for (size_t p = 0; p < P; ++p) {
      q[p] = hi[p] * hi[p] / ai[p];
      rhs[p] = A2 * mass(ai, p);
    }
    emit_nested("sq_inverse_over_avg1" + sfx);
    for (size_t p = 0; p < P; ++p) {
      q[p] = hi[p] * hi[p] / (ai[p] * ai[p] * ai[p]);
      rhs[p] = mass(aw, p);
    }
    emit_nested("sq_inverse_over_avg3" + sfx);
    for (size_t p = 0; p < P; ++p) {
      q[p] = std::abs(hw[p] * hi[p]) / ai[p];
      rhs[p] = A2 * mass(aw, p);
    }
    emit_nested("prod_w_inverse_over_avg" + sfx);
    // pointwise disbalance and set-vs-cube averages
    for (size_t p = 0; p < P; ++p) {
      q[p] = h1[p] * h2[p] / aw[p];
      rhs[p] = 4.0 * aw[p];
    }
    emit_pointwise("disbalance_sq_vs_setavg" + sfx);
    for (size_t p = 0; p < P; ++p) {
      q[p] = aw[p];
      rhs[p] = std::ldexp(1.0, g.d - 1) * cw[p];
    }
    emit_pointwise("setavg_vs_cubeavg" + sfx);
  }

  // self-mirrored forms, one pass each
  for (size_t p = 0; p < P; ++p) {
    q[p] = std::abs(pa.hat_root[p] * pa.hat_invroot[p]);
    rhs[p] = std::sqrt(A2) * pa.meas[p];
  }
  emit_nested("prod_root_invroot");
  for (size_t p = 0; p < P; ++p) {
    q[p] = std::abs(pa.hat_w[p] * pa.hat_inv[p]);
    rhs[p] = A2 * pa.meas[p];
  }
  emit_nested("prod_w_inverse");
  for (size_t p = 0; p < P; ++p) {
    q[p] = pa.avg_w[p] * pa.avg_inv[p];
    rhs[p] = std::ldexp(1.0, 2 * g.d) * A2;
  }
  emit_pointwise("set_a2_product");
  return out;
}

CarlesonInput corpus_carleson_sequence(const Weight& w) {
  PairArrays pa = build_pairs(w);
  CarlesonInput in;
  in.a.resize(pa.meas.size());
  for (size_t p = 0; p < in.a.size(); ++p)
    in.a[p] = pa.hat_invroot[p] * pa.hat_invroot[p] * pa.cubeavg_w[p] /
              (w.a2 * w.a2 * pa.avg_w[p] * pa.avg_w[p]);
  return in;
}

CarlesonResult carleson_constants(const Weight& w, const CarlesonInput& input,
                                  const NormOptions& opt) {
  const GridSpec& g = w.w.grid;
  if (int64_t(input.a.size()) != g.pair_count())
    throw std::invalid_argument("carleson sequence size does not match grid");
  for (double v : input.a)
    if (!(v >= 0.0)) throw std::invalid_argument("carleson sequence must be nonnegative");
  PairArrays pa = build_pairs(w);
  const size_t P = pa.meas.size();
  std::vector<double> q(P);
  for (size_t p = 0; p < P; ++p) q[p] = input.a[p] * pa.avg_w[p] * pa.avg_w[p];
  std::vector<double> s = nested_inclusive_sums(g, q);
  CarlesonResult out;
  int64_t best = 0;
  for (size_t p = 0; p < P; ++p) {
    double r = s[p] / (pa.meas[p] * pa.avg_w[p]);
    if (r > out.testing_A) {
      out.testing_A = r;
      best = int64_t(p);
    }
  }
  int level = 0;
  uint64_t morton = 0;
  pair_location(g, best, &level, &morton, &out.witness_alpha);
  out.witness_cube = cube_to_string(cube_from_morton(g, level, morton), g.d);

  // embedding form M_{w^{1/2}} P10_1 P01_a M_{w^{1/2}}: nonnegative and
  // self-adjoint, so its norm is the best embedding constant
  LinearOperator mr = pointwise_multiplier(w.root);
  LinearOperator form =
      compose(mr, compose(paraproduct(ParaKind::P10, constant_symbol(g, 1.0)),
                          compose(paraproduct(ParaKind::P01, SymbolSequence(g, input.a)), mr)));
  out.embedding_B = operator_norm(form, opt).value;
  out.ratio = out.testing_A > 0.0 ? out.embedding_B / out.testing_A : 0.0;
  return out;
}

SquareFunctionResult square_function_constants(const Weight& w, const NormOptions& opt) {
  const GridSpec& g = w.w.grid;
  const GridTables& t = grid_tables(g);
  const size_t P = size_t(g.pair_count());
  std::vector<double> dw(P);
  for (int l = 0; l < g.L; ++l)
    for (int64_t m = 0; m < g.cubes_at(l); ++m) {
      double avg = w.cw.average_cube(l, uint64_t(m));
      int64_t base = pair_index(t, l, uint64_t(m), 1);
      for (int a = 1; a < g.fanout(); ++a) dw[size_t(base + a - 1)] = avg;
    }
  QuadraticForm d_form = haar_diagonal_form(g, 0.0, dw);
  QuadraticForm m_form = cell_diagonal_form(w.w);
  NormOptions o = opt;
  o.mean_zero = true;
  SquareFunctionResult out;
  out.c_plus = generalized_max_rayleigh(d_form, m_form, o).value;
  out.c_minus = generalized_max_rayleigh(m_form, d_form, o).value;
  return out;
}

double audit_weighted_haar_parseval(const Weight& w, int cases, uint64_t seed) {
  const GridSpec& g = w.w.grid;
  double wtot = integral(w.w);
  StepFunction one = constant_function(g, 1.0);
  double worst = 0.0;
  for (int c = 0; c < cases; ++c) {
    Rng rng(mix_seed(seed, 0xAB, uint64_t(c)));
    StepFunction f = constant_function(g, 0.0);
    for (double& v : f.cells) v = rng.uniform(-1.0, 1.0);
    std::vector<double> coeffs = weighted_coefficients(f, w.w);
    double wmean = weighted_inner_product(f, one, w.w) / wtot;
    double lhs = weighted_inner_product(f, f, w.w);
    double rhs = wmean * wmean * wtot;
    for (double cf : coeffs) rhs += cf * cf;
    double rel = std::abs(lhs - rhs) / std::max(lhs, 1e-300);
    worst = std::max(worst, rel);
  }
  return worst;
}

}  // namespace dyadlab
