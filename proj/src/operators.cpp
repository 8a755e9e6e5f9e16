#include "dyadlab/operators.hpp"

#include <cmath>
#include <stdexcept>

namespace dyadlab {

StepFunction apply(const LinearOperator& op, const StepFunction& f) {
  require_same_grid(op.grid, f.grid);
  return op.fwd(f);
}

StepFunction apply_adjoint(const LinearOperator& op, const StepFunction& f) {
  require_same_grid(op.grid, f.grid);
  return op.adj(f);
}

LinearOperator adjoint(const LinearOperator& op) { return {op.grid, op.adj, op.fwd}; }

LinearOperator compose(const LinearOperator& outer, const LinearOperator& inner) {
  require_same_grid(outer.grid, inner.grid);
  auto of = outer.fwd, inf = inner.fwd, oa = outer.adj, ina = inner.adj;
  return {outer.grid, [of, inf](const StepFunction& f) { return of(inf(f)); },
          [oa, ina](const StepFunction& f) { return ina(oa(f)); }};
}

LinearOperator add(const LinearOperator& a, const LinearOperator& b) {
  require_same_grid(a.grid, b.grid);
  auto af = a.fwd, bf = b.fwd, aa = a.adj, ba = b.adj;
  return {a.grid, [af, bf](const StepFunction& f) { return added(af(f), bf(f)); },
          [aa, ba](const StepFunction& f) { return added(aa(f), ba(f)); }};
}

LinearOperator scale(double s, const LinearOperator& op) {
  auto f = op.fwd, a = op.adj;
  return {op.grid, [s, f](const StepFunction& x) { return scaled(f(x), s); },
          [s, a](const StepFunction& x) { return scaled(a(x), s); }};
}

LinearOperator identity_operator(const GridSpec& g) {
  auto id = [](const StepFunction& f) { return f; };
  return {g, id, id};
}

LinearOperator zero_operator(const GridSpec& g) {
  auto z = [g](const StepFunction&) { return constant_function(g, 0.0); };
  return {g, z, z};
}

static StepFunction p00_apply(const SymbolSequence& s, const StepFunction& f) {
  HaarSpectrum sp = analyze(f);
  sp.mean = 0.0;
  for (size_t p = 0; p < sp.coeffs.size(); ++p) sp.coeffs[p] *= s.at(int64_t(p));
  return synthesize(sp);
}

static StepFunction p01_apply(const SymbolSequence& s, const StepFunction& f) {
  const GridSpec& g = f.grid;
  const GridTables& t = grid_tables(g);
  CubeSumCache cache(f);
  HaarSpectrum out = zero_spectrum(g);
  const int F = g.fanout();
  std::vector<double> ns(size_t(2 * F));
  for (int l = 0; l < g.L; ++l)
    for (int64_t m = 0; m < g.cubes_at(l); ++m) {
      cache.node_sums(l, uint64_t(m), ns.data());
      int64_t base = pair_index(t, l, uint64_t(m), 1);
      for (int a = 1; a < F; ++a) {
        double avg = ns[size_t(a)] / double(set_cell_count(g, l, AlphaIndex(a)));
        out.coeffs[size_t(base + a - 1)] = s.at(base + a - 1) * avg;
      }
    }
  return synthesize(out);
}

static StepFunction p10_apply(const SymbolSequence& s, const StepFunction& f) {
  const GridSpec& g = f.grid;
  const GridTables& t = grid_tables(g);
  HaarSpectrum sp = analyze(f);
  const int F = g.fanout();
  std::vector<double> carry(1, 0.0), next;
  std::vector<double> heap(size_t(2 * F), 0.0);
  for (int l = 0; l < g.L; ++l) {
    next.assign(size_t(g.cubes_at(l + 1)), 0.0);
    for (int64_t m = 0; m < g.cubes_at(l); ++m) {
      int64_t base = pair_index(t, l, uint64_t(m), 1);
      heap[1] = carry[size_t(m)] + s.at(base) * sp.coeffs[size_t(base)] /
                                       set_measure(g, l, 1);
      for (int a = 2; a < F; ++a)
        heap[size_t(a)] = heap[size_t(a >> 1)] +
                          s.at(base + a - 1) * sp.coeffs[size_t(base + a - 1)] /
                              set_measure(g, l, AlphaIndex(a));
      for (int k = F; k < 2 * F; ++k)
        next[size_t(m) * size_t(F) + size_t(k - F)] = heap[size_t(k >> 1)];
    }
    carry.swap(next);
  }
  StepFunction out = constant_function(g, 0.0);
  for (int64_t m = 0; m < g.cell_count(); ++m)
    out.cells[size_t(t.cell_from_morton[size_t(m)])] = carry[size_t(m)];
  return out;
}

LinearOperator paraproduct(ParaKind kind, const SymbolSequence& symbol) {
  SymbolSequence s = symbol;
  switch (kind) {
    case ParaKind::P00: {
      auto fn = [s](const StepFunction& f) { return p00_apply(s, f); };
      return {s.grid(), fn, fn};
    }
    case ParaKind::P01:
      return {s.grid(), [s](const StepFunction& f) { return p01_apply(s, f); },
              [s](const StepFunction& f) { return p10_apply(s, f); }};
    case ParaKind::P10:
      return {s.grid(), [s](const StepFunction& f) { return p10_apply(s, f); },
              [s](const StepFunction& f) { return p01_apply(s, f); }};
  }
  throw std::logic_error("unreachable paraproduct kind");
}

LinearOperator haar_multiplier(const SymbolSequence& symbol) {
  return paraproduct(ParaKind::P00, symbol);
}

LinearOperator pointwise_multiplier(const StepFunction& m) {
  StepFunction mm = m;
  auto fn = [mm](const StepFunction& f) { return cellwise_product(mm, f); };
  return {m.grid, fn, fn};
}

LinearOperator haar_diagonal(const GridSpec& g, double mean_factor,
                             std::vector<double> pair_factors) {
  if (int64_t(pair_factors.size()) != g.pair_count())
    throw std::invalid_argument("pair factor vector size does not match grid");
  auto fn = [mean_factor, pf = std::move(pair_factors)](const StepFunction& f) {
    HaarSpectrum sp = analyze(f);
    sp.mean *= mean_factor;
    for (size_t p = 0; p < sp.coeffs.size(); ++p) sp.coeffs[p] *= pf[p];
    return synthesize(sp);
  };
  return {g, fn, fn};
}

LinearOperator projection_orthogonal(const StepFunction& u) {
  double uu = inner_product(u, u);
  if (!(uu > 0.0)) throw std::invalid_argument("cannot project against the zero function");
  StepFunction uc = u;
  auto fn = [uc, uu](const StepFunction& f) {
    return subtracted(f, scaled(uc, inner_product(f, uc) / uu));
  };
  return {u.grid, fn, fn};
}

LinearOperator rank_one_mean(const GridSpec& g, double factor) {
  auto fn = [g, factor](const StepFunction& f) {
    return constant_function(g, factor * mean_value(f));
  };
  return {g, fn, fn};
}

MultiplicationParts decompose_multiplication(const StepFunction& g) {
  return {set_average_symbol(g), coefficient_symbol(g), mean_value(g)};
}

LinearOperator multiplication_as_paraproducts(const StepFunction& g) {
  MultiplicationParts parts = decompose_multiplication(g);
  LinearOperator op = add(paraproduct(ParaKind::P00, parts.avg),
                          add(paraproduct(ParaKind::P01, parts.hat),
                              paraproduct(ParaKind::P10, parts.hat)));
  return add(op, rank_one_mean(g.grid, parts.mean));
}

double product_formula_coefficient(const StepFunction& f, const StepFunction& g,
                                   const PairRef& where) {
  require_same_grid(f.grid, g.grid);
  const GridSpec& gr = f.grid;
  const GridTables& t = grid_tables(gr);
  HaarSpectrum ff = analyze(f), gg = analyze(g);
  CubeSumCache cf(f), cg(g);
  int64_t p = pair_index(t, where.level, where.morton, where.alpha);
  double out = ff.coeffs[size_t(p)] * cg.average_set(where.level, where.morton, where.alpha) +
               gg.coeffs[size_t(p)] * cf.average_set(where.level, where.morton, where.alpha);
  for (int l = where.level; l < gr.L; ++l)
    for (int64_t m = 0; m < gr.cubes_at(l); ++m)
      for (AlphaIndex a = 1; a < AlphaIndex(gr.fanout()); ++a) {
        PairRef q{l, uint64_t(m), a};
        if (!set_strictly_contains(gr, where, q)) continue;
        int64_t pq = pair_index(t, l, uint64_t(m), a);
        out += ff.coeffs[size_t(pq)] * gg.coeffs[size_t(pq)] *
               haar_value_on_set(gr, where, q);
      }
  return out;
}

HaarSpectrum product_formula_spectrum(const StepFunction& f, const StepFunction& g) {
  require_same_grid(f.grid, g.grid);
  const GridSpec& gr = f.grid;
  const GridTables& t = grid_tables(gr);
  HaarSpectrum ff = analyze(f), gg = analyze(g);
  CubeSumCache cf(f), cg(g);
  std::vector<double> q(ff.coeffs.size());
  for (size_t p = 0; p < q.size(); ++p) q[p] = ff.coeffs[p] * gg.coeffs[p];
  NestedHalfSums nested = nested_half_sums(gr, q);
  HaarSpectrum out = zero_spectrum(gr);
  out.mean = inner_product(f, g);
  const int F = gr.fanout();
  std::vector<double> nsf(size_t(2 * F)), nsg(size_t(2 * F));
  for (int l = 0; l < gr.L; ++l)
    for (int64_t m = 0; m < gr.cubes_at(l); ++m) {
      cf.node_sums(l, uint64_t(m), nsf.data());
      cg.node_sums(l, uint64_t(m), nsg.data());
      int64_t base = pair_index(t, l, uint64_t(m), 1);
      for (int a = 1; a < F; ++a) {
        int64_t p = base + a - 1;
        double cells = double(set_cell_count(gr, l, AlphaIndex(a)));
        out.coeffs[size_t(p)] =
            ff.coeffs[size_t(p)] * nsg[size_t(a)] / cells +
            gg.coeffs[size_t(p)] * nsf[size_t(a)] / cells +
            (nested.half2[size_t(p)] - nested.half1[size_t(p)]) /
                std::sqrt(set_measure(gr, l, AlphaIndex(a)));
      }
    }
  return out;
}

NineTermResolution nine_term_resolution(const Weight& w, const SymbolSequence& sigma) {
  require_same_grid(w.w.grid, sigma.grid());
  NineTermResolution out;
  out.grid = w.w.grid;
  MultiplicationParts left = decompose_multiplication(w.root);
  MultiplicationParts right = decompose_multiplication(w.inv_root);
  LinearOperator t_sigma = haar_multiplier(sigma);
  struct Piece {
    const char* tag;
    ParaKind kind;
  };
  const Piece pieces[3] = {{"01", ParaKind::P01}, {"10", ParaKind::P10}, {"00", ParaKind::P00}};
  auto part = [](const MultiplicationParts& p, ParaKind k) {
    return paraproduct(k, k == ParaKind::P00 ? p.avg : p.hat);
  };
  int idx = 0;
  for (const Piece& a : pieces)
    for (const Piece& b : pieces) {
      out.labels[size_t(idx)] = std::string("q_") + a.tag + "_" + b.tag;
      out.terms[size_t(idx)] =
          compose(part(left, a.kind), compose(t_sigma, part(right, b.kind)));
      ++idx;
    }
  out.conjugated = compose(pointwise_multiplier(w.root),
                           compose(t_sigma, pointwise_multiplier(w.inv_root)));
  out.sum = out.terms[0];
  for (int i = 1; i < 9; ++i) out.sum = add(out.sum, out.terms[i]);
  return out;
}

std::vector<double> materialize(const LinearOperator& op, Basis basis, int64_t cap) {
  const GridSpec& g = op.grid;
  int64_t n = g.cell_count();
  if (n > cap) throw std::length_error("matrix materialization over cap");
  std::vector<double> m(size_t(n) * size_t(n));
  if (basis == Basis::Cell) {
    StepFunction e = constant_function(g, 0.0);
    for (int64_t k = 0; k < n; ++k) {
      e.cells[size_t(k)] = 1.0;
      StepFunction col = op.fwd(e);
      for (int64_t r = 0; r < n; ++r) m[size_t(r) * size_t(n) + size_t(k)] = col.cells[size_t(r)];
      e.cells[size_t(k)] = 0.0;
    }
    return m;
  }
  HaarSpectrum sp = zero_spectrum(g);
  for (int64_t k = 0; k < n; ++k) {
    if (k == 0)
      sp.mean = 1.0;
    else
      sp.coeffs[size_t(k - 1)] = 1.0;
    HaarSpectrum col = analyze(op.fwd(synthesize(sp)));
    m[size_t(k)] = col.mean;
    for (int64_t r = 1; r < n; ++r)
      m[size_t(r) * size_t(n) + size_t(k)] = col.coeffs[size_t(r - 1)];
    if (k == 0)
      sp.mean = 0.0;
    else
      sp.coeffs[size_t(k - 1)] = 0.0;
  }
  return m;
}

}  // namespace dyadlab
