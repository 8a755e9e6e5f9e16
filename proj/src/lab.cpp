#include "dyadlab/lab.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "dyadlab/rng.hpp"
#include "dyadlab/wilson.hpp"

namespace fs = std::filesystem;

namespace dyadlab {

const std::array<const char*, 9> kNineLabels = {
    "q_01_01", "q_01_10", "q_01_00", "q_10_01", "q_10_10",
    "q_10_00", "q_00_01", "q_00_10", "q_00_00"};

ExperimentConfig config_from_map(const ConfigMap& cm) {
  static const std::set<std::string> known = {
      "d",     "L",      "seed",         "tol",   "corpus_count", "corpus_a2_max",
      "sigma", "weight", "inequalities", "cases", "svg"};
  for (const auto& kv : cm.entries)
    if (!known.count(kv.first))
      throw std::runtime_error("unknown config key: " + kv.first);
  ExperimentConfig cfg;
  cfg.grid = make_grid(int(cm.get_int("d", 1)), int(cm.get_int("L", 8)));
  cfg.seed = uint64_t(cm.get_int("seed", 2024));
  cfg.tol = cm.get_num("tol", 1e-8);
  if (!(cfg.tol > 0.0)) throw std::runtime_error("tol must be positive");
  cfg.corpus_count = int(cm.get_int("corpus_count", 20));
  cfg.corpus_a2_max = cm.get_num("corpus_a2_max", 100.0);
  cfg.sigma_spec = cm.get("sigma", "random");
  cfg.weight_spec = cm.get("weight", "");
  cfg.inequalities = cm.get("inequalities", "");
  cfg.cases = int(cm.get_int("cases", 20));
  std::string svg = cm.get("svg", "1");
  cfg.svg = !(svg == "0" || svg == "false" || svg == "off");
  cfg.raw = cm;
  return cfg;
}

SymbolSequence sigma_from_spec(const std::string& spec, const GridSpec& g, uint64_t seed) {
  if (spec == "random") return random_sign_symbol(g, seed);
  if (spec.rfind("constant:", 0) == 0) {
    try {
      return constant_symbol(g, std::stod(spec.substr(9)));
    } catch (const std::exception&) {
      throw std::runtime_error("bad sigma constant: " + spec);
    }
  }
  if (spec.rfind("file:", 0) == 0) return load_symbols(spec.substr(5), g);
  throw std::runtime_error("unknown sigma spec: " + spec);
}

Weight weight_from_spec(const std::string& spec, const GridSpec& g) {
  if (spec.empty())
    return make_weight(constant_function(g, 1.0), {"unit", "constant", 1.0, 0});
  if (spec.rfind("file:", 0) == 0) return load_weight(spec.substr(5));
  if (spec.rfind("family:", 0) == 0) {
    WeightRecipe r;
    std::istringstream ss(spec.substr(7));
    std::string tok;
    bool first = true;
    while (std::getline(ss, tok, ',')) {
      if (first) {
        r.family = tok;
        r.id = tok;
        first = false;
        continue;
      }
      size_t eq = tok.find('=');
      if (eq == std::string::npos)
        throw std::runtime_error("bad weight spec token: " + tok);
      std::string k = tok.substr(0, eq), v = tok.substr(eq + 1);
      if (k == "param")
        r.param = std::stod(v);
      else if (k == "seed")
        r.seed = std::stoull(v);
      else if (k == "id")
        r.id = v;
      else
        throw std::runtime_error("bad weight spec key: " + k);
    }
    return generate_weight(g, r);
  }
  throw std::runtime_error("unknown weight spec: " + spec);
}

// ---------------------------------------------------------------- verify --

namespace {

StepFunction random_function(const GridSpec& g, uint64_t seed, double lo, double hi) {
  Rng rng(seed);
  StepFunction f = constant_function(g, 0.0);
  for (double& v : f.cells) v = rng.uniform(lo, hi);
  return f;
}

double sup_abs(const StepFunction& f) {
  double s = 0.0;
  for (double v : f.cells) s = std::max(s, std::abs(v));
  return s;
}

void pair_from_index(const GridSpec& g, int64_t p, PairRef* ref) {
  const GridTables& t = grid_tables(g);
  const int Fm1 = g.fanout() - 1;
  for (int l = 0; l < g.L; ++l)
    if (p < t.pair_level_offset[size_t(l + 1)]) {
      int64_t rel = p - t.pair_level_offset[size_t(l)];
      ref->level = l;
      ref->morton = uint64_t(rel / Fm1);
      ref->alpha = AlphaIndex(1 + rel % Fm1);
      return;
    }
  throw std::logic_error("pair index out of range");
}

double check_wilson(const GridSpec& g) {
  double violations = 0.0;
  const int F = g.fanout();
  for (int l = 0; l < g.L; ++l)
    for (int64_t m = 0; m < g.cubes_at(l); ++m) {
      Cube c = cube_from_morton(g, l, uint64_t(m));
      std::vector<WilsonSet> sets = build_wilson_sets(g, c);
      if (int(sets.size()) != F - 1) {
        violations += 1.0;
        continue;
      }
      std::vector<std::vector<uint32_t>> offs(sets.size());
      for (size_t i = 0; i < sets.size(); ++i) {
        const WilsonSet& s = sets[i];
        if (s.alpha != AlphaIndex(i + 1)) violations += 1.0;
        if (s.e1.empty() || s.e2.empty() || s.e1.size() != s.e2.size()) violations += 1.0;
        offs[i] = s.e1;
        offs[i].insert(offs[i].end(), s.e2.begin(), s.e2.end());
        std::sort(offs[i].begin(), offs[i].end());
        if (std::adjacent_find(offs[i].begin(), offs[i].end()) != offs[i].end())
          violations += 1.0;
        if (s.measure != double(offs[i].size()) * cube_measure(g, l + 1)) violations += 1.0;
      }
      if (offs[0].size() != size_t(F)) violations += 1.0;
      for (size_t i = 0; i < offs.size(); ++i)
        for (size_t j = i + 1; j < offs.size(); ++j) {
          std::vector<uint32_t> inter;
          std::set_intersection(offs[i].begin(), offs[i].end(), offs[j].begin(),
                                offs[j].end(), std::back_inserter(inter));
          size_t k = inter.size();
          if (k != 0 && k != std::min(offs[i].size(), offs[j].size())) violations += 1.0;
        }
    }
  if (g.cell_count() > 256) return violations;
  // small grids: exhaustive four-way trichotomy against painted supports
  std::vector<PairRef> refs;
  std::vector<std::vector<char>> supp;
  for (int l = 0; l < g.L; ++l)
    for (int64_t m = 0; m < g.cubes_at(l); ++m)
      for (AlphaIndex a = 1; a < AlphaIndex(F); ++a) {
        StepFunction s = constant_function(g, 0.0);
        paint_set(g, l, uint64_t(m), a, 1.0, 1.0, s);
        std::vector<char> bits(s.cells.size());
        for (size_t i = 0; i < bits.size(); ++i) bits[i] = s.cells[i] != 0.0;
        refs.push_back({l, uint64_t(m), a});
        supp.push_back(std::move(bits));
      }
  for (size_t i = 0; i < refs.size(); ++i)
    for (size_t j = i + 1; j < refs.size(); ++j) {
      size_t ci = 0, cj = 0, inter = 0;
      for (size_t k = 0; k < supp[i].size(); ++k) {
        ci += size_t(supp[i][k]);
        cj += size_t(supp[j][k]);
        inter += size_t(supp[i][k] && supp[j][k]);
      }
      bool p_sub = inter == ci && ci < cj;   // i strictly inside j
      bool p_sup = inter == cj && cj < ci;
      bool p_dis = inter == 0;
      bool p_eq = inter == ci && inter == cj;
      if (int(p_sub) + int(p_sup) + int(p_dis) + int(p_eq) != 1) violations += 1.0;
      if (p_eq) violations += 1.0;  // distinct pairs may never share the set
      if (p_sub != set_strictly_contains(g, refs[j], refs[i])) violations += 1.0;
      if (p_sup != set_strictly_contains(g, refs[i], refs[j])) violations += 1.0;
    }
  return violations;
}

double check_orthonormality(const GridSpec& g) {
  const GridTables& t = grid_tables(g);
  HaarSpectrum unit = analyze(constant_function(g, 1.0));
  double err = std::abs(unit.mean - 1.0);
  for (double c : unit.coeffs) err = std::max(err, std::abs(c));
  for (int l = 0; l < g.L; ++l)
    for (int64_t m = 0; m < g.cubes_at(l); ++m) {
      Cube c = cube_from_morton(g, l, uint64_t(m));
      for (AlphaIndex a = 1; a < AlphaIndex(g.fanout()); ++a) {
        HaarSpectrum sp = analyze(haar_function(g, c, a));
        size_t self = size_t(pair_index(t, l, uint64_t(m), a));
        err = std::max(err, std::abs(sp.mean));
        for (size_t p = 0; p < sp.coeffs.size(); ++p)
          err = std::max(err, std::abs(sp.coeffs[p] - (p == self ? 1.0 : 0.0)));
      }
    }
  return err;
}

double check_disbalanced(const ExperimentConfig& cfg) {
  const GridSpec& g = cfg.grid;
  const GridTables& t = grid_tables(g);
  double err = 0.0;
  for (int i = 0; i < cfg.cases; ++i) {
    Weight w = generate_weight(
        g, {"v" + std::to_string(i), "cascade", 3.0, mix_seed(cfg.seed, 0xD15B, uint64_t(i))});
    HaarSpectrum ws = analyze(w.cw);
    for (int l = 0; l < g.L; ++l)
      for (int64_t m = 0; m < g.cubes_at(l); ++m) {
        Cube c = cube_from_morton(g, l, uint64_t(m));
        for (AlphaIndex a = 1; a < AlphaIndex(g.fanout()); ++a) {
          Disbalance db = disbalanced_coeffs(w.cw, c, a);
          StepFunction h = haar_function(g, c, a);
          StepFunction hw = haar_function(w.cw, c, a);
          StepFunction ind = set_indicator_l1(g, c, a);
          double scale = std::max(1.0, sup_abs(h));
          for (size_t k = 0; k < h.cells.size(); ++k) {
            double want = db.C * hw.cells[k] + db.D * ind.cells[k];
            err = std::max(err, std::abs(h.cells[k] - want) / scale);
          }
          double ae = average(w.cw, c, a);
          double what = ws.at(t, l, uint64_t(m), a);
          double c2alt = (ae * ae - what * what / set_measure(g, l, a)) / ae;
          err = std::max(err, std::abs(db.C * db.C - c2alt) / std::max(1.0, c2alt));
        }
      }
  }
  return err;
}

double check_product_formula(const ExperimentConfig& cfg) {
  const GridSpec& g = cfg.grid;
  double err = 0.0;
  const int64_t P = g.pair_count();
  for (int i = 0; i < cfg.cases; ++i) {
    StepFunction f = random_function(g, mix_seed(cfg.seed, 0xF0A, uint64_t(i)), -1.0, 1.0);
    StepFunction h = random_function(g, mix_seed(cfg.seed, 0xF0B, uint64_t(i)), -1.0, 1.0);
    HaarSpectrum direct = analyze(cellwise_product(f, h));
    HaarSpectrum fast = product_formula_spectrum(f, h);
    double scale = std::max(1.0, std::abs(direct.mean));
    for (double c : direct.coeffs) scale = std::max(scale, std::abs(c));
    err = std::max(err, std::abs(direct.mean - fast.mean) / scale);
    for (size_t p = 0; p < direct.coeffs.size(); ++p)
      err = std::max(err, std::abs(direct.coeffs[p] - fast.coeffs[p]) / scale);
    if (i < 4) {
      for (int k = 0; k < 8; ++k) {
        int64_t p = (P - 1) * k / 7;
        PairRef ref;
        pair_from_index(g, p, &ref);
        double brute = product_formula_coefficient(f, h, ref);
        err = std::max(err, std::abs(direct.coeffs[size_t(p)] - brute) / scale);
      }
    }
  }
  return err;
}

double check_multiplication(const ExperimentConfig& cfg) {
  const GridSpec& g = cfg.grid;
  double err = 0.0;
  for (int i = 0; i < cfg.cases; ++i) {
    StepFunction m = random_function(g, mix_seed(cfg.seed, 0xA0A, uint64_t(i)), -2.0, 2.0);
    StepFunction f = random_function(g, mix_seed(cfg.seed, 0xA0B, uint64_t(i)), -1.0, 1.0);
    StepFunction got = multiplication_as_paraproducts(m).fwd(f);
    StepFunction want = cellwise_product(m, f);
    double scale = std::max(1.0, sup_abs(want));
    for (size_t k = 0; k < got.cells.size(); ++k)
      err = std::max(err, std::abs(got.cells[k] - want.cells[k]) / scale);
  }
  return err;
}

double check_nine_term(const ExperimentConfig& cfg) {
  const GridSpec& g = cfg.grid;
  double err = 0.0;
  for (int i = 0; i < cfg.cases; ++i) {
    Weight w = generate_weight(
        g, {"n" + std::to_string(i), "cascade", 3.0, mix_seed(cfg.seed, 0x91A, uint64_t(i))});
    SymbolSequence sigma = random_sign_symbol(g, mix_seed(cfg.seed, 0x517, uint64_t(i)));
    StepFunction f = random_function(g, mix_seed(cfg.seed, 0x91B, uint64_t(i)), -1.0, 1.0);
    NineTermResolution res = nine_term_resolution(w, sigma);
    StepFunction a = res.sum.fwd(f);
    StepFunction b = res.conjugated.fwd(f);
    double scale = std::max(1.0, sup_abs(b));
    for (size_t k = 0; k < a.cells.size(); ++k)
      err = std::max(err, std::abs(a.cells[k] - b.cells[k]) / scale);
  }
  return err;
}

double check_adjoints(const ExperimentConfig& cfg) {
  const GridSpec& g = cfg.grid;
  double err = 0.0;
  for (int i = 0; i < cfg.cases; ++i) {
    SymbolSequence sym = coefficient_symbol(
        random_function(g, mix_seed(cfg.seed, 0xAD0, uint64_t(i)), -1.0, 1.0));
    StepFunction f = random_function(g, mix_seed(cfg.seed, 0xAD1, uint64_t(i)), -1.0, 1.0);
    StepFunction h = random_function(g, mix_seed(cfg.seed, 0xAD2, uint64_t(i)), -1.0, 1.0);
    double scale = std::max(1.0, l2_norm(f) * l2_norm(h));
    for (ParaKind kind : {ParaKind::P00, ParaKind::P01, ParaKind::P10}) {
      LinearOperator op = paraproduct(kind, sym);
      err = std::max(err, std::abs(inner_product(op.fwd(f), h) -
                                   inner_product(f, op.adj(h))) /
                              scale);
    }
  }
  return err;
}

double check_weighted_parseval(const ExperimentConfig& cfg) {
  Weight w = generate_weight(cfg.grid, {"p0", "cascade", 3.0, mix_seed(cfg.seed, 0x9A)});
  return audit_weighted_haar_parseval(w, cfg.cases, mix_seed(cfg.seed, 0x9B));
}

}  // namespace

std::vector<CheckResult> run_verify_suite(const ExperimentConfig& cfg) {
  const double kIdTol = 1e-10;
  std::vector<CheckResult> out;
  auto push = [&out](const std::string& name, double err, double tol) {
    out.push_back({name, err <= tol, err, tol});
  };
  push("wilson_properties", check_wilson(cfg.grid), 0.0);
  push("orthonormality", check_orthonormality(cfg.grid), kIdTol);
  push("disbalanced_reconstruction", check_disbalanced(cfg), kIdTol);
  push("product_formula", check_product_formula(cfg), kIdTol);
  push("multiplication_split", check_multiplication(cfg), kIdTol);
  push("nine_term_exactness", check_nine_term(cfg), kIdTol);
  push("paraproduct_adjoints", check_adjoints(cfg), kIdTol);
  push("weighted_parseval", check_weighted_parseval(cfg), kIdTol);
  return out;
}

// ----------------------------------------------------------------- sweep --

SweepRow measure_nine_norms(const Weight& w, const SymbolSequence& sigma,
                            const NormOptions& opt) {
  SweepRow row;
  row.weight_id = w.recipe.id;
  row.family = w.recipe.family;
  row.seed = w.recipe.seed;
  row.a2 = w.a2;
  row.sigma_norm = sigma.sup_norm();
  NineTermResolution res = nine_term_resolution(w, sigma);
  try {
    for (int i = 0; i < 9; ++i) row.q[size_t(i)] = operator_norm(res.terms[size_t(i)], opt).value;
    row.conjugated = operator_norm(res.conjugated, opt).value;
  } catch (const std::exception& e) {
    row.converged = false;
    row.note = e.what();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    row.q.fill(nan);
    row.conjugated = nan;
  }
  return row;
}

std::vector<FitLine> fit_sweep(const std::vector<SweepRow>& rows) {
  std::vector<FitLine> fits;
  for (int i = 0; i < 9; ++i) {
    FitLine fit;
    fit.label = kNineLabels[size_t(i)];
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (const SweepRow& r : rows) {
      if (!r.converged || r.a2 < 2.0 || !(r.sigma_norm > 0.0)) continue;
      double v = r.q[size_t(i)] / r.sigma_norm;
      if (!(v > 0.0) || !std::isfinite(v)) continue;
      double x = std::log(r.a2), y = std::log(v);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++n;
    }
    fit.points = n;
    double denom = n * sxx - sx * sx;
    if (n >= 2 && denom > 0.0) {
      fit.slope = (n * sxy - sx * sy) / denom;
      fit.intercept = (sy - fit.slope * sx) / n;
    }
    fits.push_back(fit);
  }
  return fits;
}

// ------------------------------------------------------------- emission --

namespace {

std::string now_utc() {
  std::time_t tt = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_prelude(std::ostream& out, const ExperimentConfig& cfg, const char* command) {
  out << "# command = " << command << "\n";
  out << "# timestamp = " << now_utc() << "\n";
  out << "# grid = d " << cfg.grid.d << " L " << cfg.grid.L << "\n";
  for (const auto& kv : cfg.raw.entries)
    out << "# config: " << kv.first << " = " << kv.second << "\n";
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error(p.string() + ": cannot open for writing");
  return out;
}

std::string csv_num(double v) {
  if (std::isnan(v)) return "nan";
  return format_double(v);
}

// triangle inequality with room for eigensolver tolerance only
bool triangle_holds(const SweepRow& r) {
  if (!r.converged) return true;
  double sum = 0.0;
  for (double v : r.q) sum += v;
  return r.conjugated <= sum * (1.0 + 1e-9) + 1e-12;
}

double sum_nine(const SweepRow& r) {
  double s = 0.0;
  for (double v : r.q) s += v;
  return s;
}

void write_sweep_row(std::ostream& out, const SweepRow& r) {
  out << r.weight_id << "," << r.family << "," << r.seed << "," << csv_num(r.a2) << ","
      << csv_num(r.sigma_norm);
  for (double v : r.q) out << "," << csv_num(v);
  out << "," << csv_num(r.conjugated) << "\n";
}

const char* kSweepHeader =
    "weight_id,family,seed,A2,sigma_norm,q_01_01,q_01_10,q_01_00,q_10_01,q_10_10,"
    "q_10_00,q_00_01,q_00_10,q_00_00,norm_conjugated";

std::string sweep_svg(const std::vector<SweepRow>& rows, const std::vector<FitLine>& fits);

int cmd_verify(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& log) {
  std::vector<CheckResult> results = run_verify_suite(cfg);
  std::ofstream out = open_out(fs::path(out_dir) / "verify.csv");
  write_prelude(out, cfg, "verify");
  out << "check,status,max_err,tol\n";
  bool ok = true;
  for (const CheckResult& r : results) {
    out << r.name << "," << (r.pass ? "pass" : "fail") << "," << csv_num(r.max_err) << ","
        << csv_num(r.tol) << "\n";
    log << (r.pass ? "pass" : "FAIL") << "  " << r.name << "  max_err=" << r.max_err
        << " tol=" << r.tol << "\n";
    ok = ok && r.pass;
  }
  return ok ? 0 : 1;
}

int cmd_generate(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& log) {
  CorpusResult corpus =
      weight_corpus(cfg.grid, cfg.corpus_count, cfg.corpus_a2_max, cfg.seed);
  std::ofstream man = open_out(fs::path(out_dir) / "corpus.csv");
  write_prelude(man, cfg, "generate");
  if (!corpus.warning.empty()) {
    man << "# warning = " << corpus.warning << "\n";
    log << "warning: " << corpus.warning << "\n";
  }
  man << "weight_id,family,param,seed,a2,file\n";
  for (const CorpusEntry& e : corpus.entries) {
    Weight w = generate_weight(cfg.grid, e.recipe);
    std::string file = e.recipe.id + ".txt";
    save_weight((fs::path(out_dir) / file).string(), w);
    man << e.recipe.id << "," << e.recipe.family << "," << csv_num(e.recipe.param) << ","
        << e.recipe.seed << "," << csv_num(w.a2) << "," << file << "\n";
    log << "wrote " << file << "  family=" << e.recipe.family << "  a2=" << w.a2 << "\n";
  }
  return 0;
}

int cmd_audit(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& log) {
  CorpusResult corpus =
      weight_corpus(cfg.grid, cfg.corpus_count, cfg.corpus_a2_max, cfg.seed);
  std::set<std::string> filter;
  {
    std::istringstream ss(cfg.inequalities);
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (!tok.empty()) filter.insert(tok);
  }
  NormOptions opt;
  opt.tol = cfg.tol;
  opt.seed = cfg.seed;
  std::vector<std::string> id_order;
  std::vector<std::vector<AuditRecord>> by_id;
  std::vector<CarlesonResult> carleson;
  std::vector<SquareFunctionResult> square;
  std::vector<const CorpusEntry*> entries;
  bool ok = true;
  for (const CorpusEntry& e : corpus.entries) {
    Weight w = generate_weight(cfg.grid, e.recipe);
    entries.push_back(&e);
    for (AuditRecord& rec : audit_lemma_sums(w)) {
      if (!filter.empty() && !filter.count(rec.inequality_id)) continue;
      size_t slot = 0;
      for (; slot < id_order.size(); ++slot)
        if (id_order[slot] == rec.inequality_id) break;
      if (slot == id_order.size()) {
        id_order.push_back(rec.inequality_id);
        by_id.emplace_back();
      }
      if (!std::isfinite(rec.ratio)) ok = false;
      by_id[slot].push_back(std::move(rec));
    }
    carleson.push_back(carleson_constants(w, corpus_carleson_sequence(w), opt));
    square.push_back(square_function_constants(w, opt));
    log << "audited " << e.recipe.id << "  a2=" << w.a2 << "\n";
  }
  for (size_t s = 0; s < id_order.size(); ++s) {
    std::ofstream out = open_out(fs::path(out_dir) / ("audit_" + id_order[s] + ".csv"));
    write_prelude(out, cfg, "audit");
    out << "inequality_id,weight_id,d,L,A2,lhs_max,rhs_base,ratio,witness_cube,witness_alpha\n";
    for (const AuditRecord& r : by_id[s])
      out << r.inequality_id << "," << r.weight_id << "," << r.d << "," << r.L << ","
          << csv_num(r.a2) << "," << csv_num(r.lhs_max) << "," << csv_num(r.rhs_base) << ","
          << csv_num(r.ratio) << "," << r.witness_cube << "," << r.witness_alpha << "\n";
  }
  {
    std::ofstream out = open_out(fs::path(out_dir) / "audit_summary.csv");
    write_prelude(out, cfg, "audit");
    out << "inequality_id,records,max_ratio,witness_weight\n";
    for (size_t s = 0; s < id_order.size(); ++s) {
      double best = -1.0;
      std::string wid;
      for (const AuditRecord& r : by_id[s])
        if (r.ratio > best) {
          best = r.ratio;
          wid = r.weight_id;
        }
      out << id_order[s] << "," << by_id[s].size() << "," << csv_num(best) << "," << wid
          << "\n";
      // the pointwise bounds are exact statements, not growth envelopes
      if ((id_order[s].rfind("disbalance_sq_vs_setavg", 0) == 0 ||
           id_order[s].rfind("setavg_vs_cubeavg", 0) == 0 ||
           id_order[s] == "set_a2_product") &&
          best > 1.0 + 1e-9)
        ok = false;
    }
  }
  {
    std::ofstream out = open_out(fs::path(out_dir) / "carleson.csv");
    write_prelude(out, cfg, "audit");
    out << "weight_id,d,L,A2,testing_A,embedding_B,ratio,witness_cube,witness_alpha\n";
    for (size_t i = 0; i < carleson.size(); ++i) {
      const CarlesonResult& c = carleson[i];
      out << entries[i]->recipe.id << "," << cfg.grid.d << "," << cfg.grid.L << ","
          << csv_num(entries[i]->a2) << "," << csv_num(c.testing_A) << ","
          << csv_num(c.embedding_B) << "," << csv_num(c.ratio) << "," << c.witness_cube
          << "," << c.witness_alpha << "\n";
    }
  }
  {
    std::ofstream out = open_out(fs::path(out_dir) / "square_function.csv");
    write_prelude(out, cfg, "audit");
    out << "weight_id,d,L,A2,c_plus,c_minus\n";
    for (size_t i = 0; i < square.size(); ++i)
      out << entries[i]->recipe.id << "," << cfg.grid.d << "," << cfg.grid.L << ","
          << csv_num(entries[i]->a2) << "," << csv_num(square[i].c_plus) << ","
          << csv_num(square[i].c_minus) << "\n";
  }
  if (!ok) log << "audit found violated exact bounds or non-finite ratios\n";
  return ok ? 0 : 1;
}

int cmd_norms(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& log) {
  Weight w = weight_from_spec(cfg.weight_spec, cfg.grid);
  SymbolSequence sigma = sigma_from_spec(cfg.sigma_spec, cfg.grid, cfg.seed);
  NormOptions opt;
  opt.tol = cfg.tol;
  opt.seed = cfg.seed;
  SweepRow row = measure_nine_norms(w, sigma, opt);
  bool tri = triangle_holds(row);
  std::ofstream out = open_out(fs::path(out_dir) / "norms.csv");
  write_prelude(out, cfg, "norms");
  out << kSweepHeader << ",sum_nine,triangle_ok\n";
  out << row.weight_id << "," << row.family << "," << row.seed << "," << csv_num(row.a2)
      << "," << csv_num(row.sigma_norm);
  for (double v : row.q) out << "," << csv_num(v);
  out << "," << csv_num(row.conjugated) << "," << csv_num(sum_nine(row)) << ","
      << (tri ? "1" : "0") << "\n";
  if (!row.converged) out << "# flagged " << row.weight_id << " = " << row.note << "\n";
  for (int i = 0; i < 9; ++i)
    log << kNineLabels[size_t(i)] << " = " << row.q[size_t(i)] << "\n";
  log << "norm_conjugated = " << row.conjugated << "  sum_nine = " << sum_nine(row)
      << "  triangle_ok = " << (tri ? 1 : 0) << "\n";
  return row.converged && tri ? 0 : 1;
}

int cmd_sweep(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& log) {
  CorpusResult corpus =
      weight_corpus(cfg.grid, cfg.corpus_count, cfg.corpus_a2_max, cfg.seed);
  SymbolSequence sigma = sigma_from_spec(cfg.sigma_spec, cfg.grid, cfg.seed);
  NormOptions opt;
  opt.tol = cfg.tol;
  opt.seed = cfg.seed;
  std::vector<SweepRow> rows;
  bool triangles = true;
  for (const CorpusEntry& e : corpus.entries) {
    Weight w = generate_weight(cfg.grid, e.recipe);
    SweepRow row = measure_nine_norms(w, sigma, opt);
    triangles = triangles && triangle_holds(row);
    log << "sweep " << row.weight_id << "  family=" << row.family << "  a2=" << row.a2
        << "  conj=" << row.conjugated << "\n";
    rows.push_back(std::move(row));
  }
  std::vector<FitLine> fits = fit_sweep(rows);
  {
    std::ofstream out = open_out(fs::path(out_dir) / "sweep.csv");
    write_prelude(out, cfg, "sweep");
    if (!corpus.warning.empty()) out << "# warning = " << corpus.warning << "\n";
    out << kSweepHeader << "\n";
    for (const SweepRow& r : rows) write_sweep_row(out, r);
    for (const SweepRow& r : rows)
      if (!r.converged) out << "# flagged " << r.weight_id << " = " << r.note << "\n";
    double cap = 0.0;
    for (const SweepRow& r : rows)
      if (r.converged && r.sigma_norm > 0.0)
        cap = std::max(cap, r.conjugated / (r.sigma_norm * r.a2));
    for (const FitLine& f : fits)
      out << "# fit " << f.label << ": slope = " << csv_num(f.slope)
          << " intercept = " << csv_num(f.intercept) << " points = " << f.points << "\n";
    out << "# max_conj_over_sigma_a2 = " << csv_num(cap) << "\n";
    out << "# triangle_ok = " << (triangles ? 1 : 0) << "\n";
  }
  if (cfg.svg) {
    std::ofstream out = open_out(fs::path(out_dir) / "sweep.svg");
    out << sweep_svg(rows, fits);
  }
  for (const FitLine& f : fits)
    log << "fit " << f.label << "  slope=" << f.slope << "  points=" << f.points << "\n";
  if (!triangles) log << "triangle inequality violated in at least one row\n";
  return triangles ? 0 : 1;
}

}  // namespace

int run_command(const std::string& command, const ExperimentConfig& cfg,
                const std::string& out_dir, std::ostream& log) {
  validate_grid(cfg.grid);
  std::string dir = out_dir.empty() ? "." : out_dir;
  fs::create_directories(dir);
  if (command == "verify") return cmd_verify(cfg, dir, log);
  if (command == "audit") return cmd_audit(cfg, dir, log);
  if (command == "norms") return cmd_norms(cfg, dir, log);
  if (command == "sweep") return cmd_sweep(cfg, dir, log);
  if (command == "generate") return cmd_generate(cfg, dir, log);
  log << "unknown command: " << command << "\n";
  return 2;
}

// ------------------------------------------------------------------ svg --

namespace {

std::string sweep_svg(const std::vector<SweepRow>& rows, const std::vector<FitLine>& fits) {
  static const char* kColors[9] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                   "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22"};
  const double W = 960, H = 640, ml = 80, mr = 220, mt = 50, mb = 60;
  double xmax = 0.0, ymin = 0.0, ymax = 0.0;
  bool any = false;
  for (const SweepRow& r : rows) {
    if (!r.converged || !(r.sigma_norm > 0.0)) continue;
    xmax = std::max(xmax, std::log10(std::max(r.a2, 1.0)));
    for (double v : r.q) {
      if (!(v > 0.0)) continue;
      double y = std::log10(v / r.sigma_norm);
      if (!any) {
        ymin = ymax = y;
        any = true;
      }
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (!any) {
    ymin = -1;
    ymax = 1;
  }
  if (xmax <= 0.0) xmax = 1.0;
  ymin -= 0.2;
  ymax += 0.2;
  auto px = [&](double x) { return ml + (W - ml - mr) * (x / xmax); };
  auto py = [&](double y) { return H - mb - (H - mt - mb) * ((y - ymin) / (ymax - ymin)); };
  char buf[256];
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
  s << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  s << "<text x=\"" << W / 2 << "\" y=\"28\" text-anchor=\"middle\" font-family=\"monospace\" "
       "font-size=\"16\">operator norm growth vs A2 characteristic (log-log)</text>\n";
  // axes
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n",
                ml, H - mb, W - mr, H - mb);
  s << buf;
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n",
                ml, mt, ml, H - mb);
  s << buf;
  for (int k = 0; k <= int(std::floor(xmax)); ++k) {
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#ccc\"/>"
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\" font-family=\"monospace\""
                  " font-size=\"12\">1e%d</text>\n",
                  px(k), mt, px(k), H - mb, px(k), H - mb + 18, k);
    s << buf;
  }
  for (int k = int(std::ceil(ymin)); k <= int(std::floor(ymax)); ++k) {
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#ccc\"/>"
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\" font-family=\"monospace\""
                  " font-size=\"12\">1e%d</text>\n",
                  ml, py(k), W - mr, py(k), ml - 6, py(k) + 4, k);
    s << buf;
  }
  s << "<text x=\"" << (ml + (W - ml - mr) / 2) << "\" y=\"" << H - 14
    << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"13\">"
       "A2 characteristic</text>\n";
  // fitted lines over [2, max]
  const double lg2 = std::log10(2.0);
  for (int i = 0; i < 9; ++i) {
    const FitLine& f = fits[size_t(i)];
    if (f.points < 2) continue;
    const double ln10 = std::log(10.0);
    auto yfit = [&](double x10) { return (f.slope * (x10 * ln10) + f.intercept) / ln10; };
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"%s\" "
                  "stroke-dasharray=\"5 3\"/>\n",
                  px(lg2), py(yfit(lg2)), px(xmax), py(yfit(xmax)), kColors[i]);
    s << buf;
  }
  // points
  for (const SweepRow& r : rows) {
    if (!r.converged || !(r.sigma_norm > 0.0)) continue;
    double x = std::log10(std::max(r.a2, 1.0));
    for (int i = 0; i < 9; ++i) {
      double v = r.q[size_t(i)];
      if (!(v > 0.0)) continue;
      std::snprintf(buf, sizeof buf,
                    "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"3\" fill=\"%s\" fill-opacity=\"0.8\"/>\n",
                    px(x), py(std::log10(v / r.sigma_norm)), kColors[i]);
      s << buf;
    }
  }
  // legend
  for (int i = 0; i < 9; ++i) {
    double y = mt + 20 + 22 * i;
    std::snprintf(buf, sizeof buf,
                  "<rect x=\"%.1f\" y=\"%.1f\" width=\"12\" height=\"12\" fill=\"%s\"/>"
                  "<text x=\"%.1f\" y=\"%.1f\" font-family=\"monospace\" font-size=\"13\">"
                  "%s slope=%.3f</text>\n",
                  W - mr + 20, y, kColors[i], W - mr + 40, y + 11, kNineLabels[size_t(i)],
                  fits[size_t(i)].slope);
    s << buf;
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace

}  // namespace dyadlab
