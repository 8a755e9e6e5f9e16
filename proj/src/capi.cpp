#include "dyadlab.h"

#include <cstring>
#include <exception>
#include <new>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <streambuf>
#include <string>

#include "dyadlab/lab.hpp"

using namespace dyadlab;

struct dyadlab_func {
  StepFunction f;
};
struct dyadlab_weight {
  Weight w;
};
struct dyadlab_symbols {
  SymbolSequence s;
  explicit dyadlab_symbols(SymbolSequence v) : s(std::move(v)) {}
};
struct dyadlab_config {
  ConfigMap cm;
};

namespace {

thread_local std::string g_error;

dyadlab_status fail(dyadlab_status st, const char* msg) {
  g_error = msg ? msg : "";
  return st;
}

// Exceptions map onto the status enum by type; io.cpp throws runtime_error
// with the path prefixed, the solvers throw runtime_error mentioning
// convergence, everything else is argument validation.
dyadlab_status from_exception(const std::exception& e, dyadlab_status io_default) {
  const char* what = e.what();
  if (dynamic_cast<const std::bad_alloc*>(&e))
    return fail(DYADLAB_ERR_INTERNAL, what);
  if (dynamic_cast<const std::invalid_argument*>(&e) ||
      dynamic_cast<const std::length_error*>(&e) ||
      dynamic_cast<const std::logic_error*>(&e))
    return fail(DYADLAB_ERR_INVALID, what);
  if (std::strstr(what, "did not converge") != nullptr)
    return fail(DYADLAB_ERR_NUMERIC, what);
  return fail(io_default, what);
}

template <typename Fn>
dyadlab_status guarded(Fn&& fn, dyadlab_status io_default = DYADLAB_ERR_INVALID) {
  try {
    fn();
    g_error.clear();
    return DYADLAB_OK;
  } catch (const std::exception& e) {
    return from_exception(e, io_default);
  } catch (...) {
    return fail(DYADLAB_ERR_INTERNAL, "unknown error");
  }
}

dyadlab_status require(bool ok, const char* msg) {
  return ok ? DYADLAB_OK : fail(DYADLAB_ERR_INVALID, msg);
}

// Forwards whole lines to the C callback, newline stripped.
class CallbackBuf : public std::streambuf {
 public:
  CallbackBuf(dyadlab_log_fn fn, void* user) : fn_(fn), user_(user) {}
  ~CallbackBuf() override { flush_partial(); }

 protected:
  int overflow(int ch) override {
    if (ch == traits_type::eof()) return 0;
    if (ch == '\n') {
      emit();
    } else {
      line_.push_back(char(ch));
    }
    return ch;
  }

 private:
  void emit() {
    if (fn_) fn_(line_.c_str(), user_);
    line_.clear();
  }
  void flush_partial() {
    if (!line_.empty()) emit();
  }
  dyadlab_log_fn fn_;
  void* user_;
  std::string line_;
};

}  // namespace

extern "C" {

const char* dyadlab_last_error(void) { return g_error.c_str(); }

const char* dyadlab_version(void) { return "0.1.0"; }

dyadlab_status dyadlab_func_create(int d, int L, const double* cells, int64_t n,
                                   dyadlab_func** out) {
  if (dyadlab_status st = require(cells && out, "null argument")) return st;
  return guarded([&] {
    GridSpec g = make_grid(d, L);
    if (n != g.cell_count()) throw std::invalid_argument("cell count does not match grid");
    StepFunction f{g, std::vector<double>(cells, cells + n)};
    *out = new dyadlab_func{std::move(f)};
  });
}

dyadlab_status dyadlab_func_load(const char* path, dyadlab_func** out) {
  if (dyadlab_status st = require(path && out, "null argument")) return st;
  return guarded([&] { *out = new dyadlab_func{load_step_function(path)}; },
                 DYADLAB_ERR_IO);
}

dyadlab_status dyadlab_func_save(const dyadlab_func* f, const char* path) {
  if (dyadlab_status st = require(f && path, "null argument")) return st;
  return guarded([&] { save_step_function(path, f->f); }, DYADLAB_ERR_IO);
}

dyadlab_status dyadlab_func_dims(const dyadlab_func* f, int* d, int* L, int64_t* cells) {
  if (dyadlab_status st = require(f != nullptr, "null argument")) return st;
  if (d) *d = f->f.grid.d;
  if (L) *L = f->f.grid.L;
  if (cells) *cells = f->f.grid.cell_count();
  g_error.clear();
  return DYADLAB_OK;
}

dyadlab_status dyadlab_func_values(const dyadlab_func* f, double* out, int64_t n) {
  if (dyadlab_status st = require(f && out, "null argument")) return st;
  if (n != int64_t(f->f.cells.size()))
    return fail(DYADLAB_ERR_INVALID, "cell count does not match grid");
  std::memcpy(out, f->f.cells.data(), size_t(n) * sizeof(double));
  g_error.clear();
  return DYADLAB_OK;
}

void dyadlab_func_free(dyadlab_func* f) { delete f; }

dyadlab_status dyadlab_analyze(const dyadlab_func* f, double* mean, double* coeffs,
                               int64_t n) {
  if (dyadlab_status st = require(f && mean && coeffs, "null argument")) return st;
  if (n != f->f.grid.pair_count())
    return fail(DYADLAB_ERR_INVALID, "coefficient count does not match grid");
  return guarded([&] {
    HaarSpectrum sp = analyze(f->f);
    *mean = sp.mean;
    std::memcpy(coeffs, sp.coeffs.data(), size_t(n) * sizeof(double));
  });
}

dyadlab_status dyadlab_synthesize(int d, int L, double mean, const double* coeffs,
                                  int64_t n, dyadlab_func** out) {
  if (dyadlab_status st = require(coeffs && out, "null argument")) return st;
  return guarded([&] {
    GridSpec g = make_grid(d, L);
    if (n != g.pair_count())
      throw std::invalid_argument("coefficient count does not match grid");
    HaarSpectrum sp{g, mean, std::vector<double>(coeffs, coeffs + n)};
    *out = new dyadlab_func{synthesize(sp)};
  });
}

dyadlab_status dyadlab_weight_generate(int d, int L, const char* family, double param,
                                       uint64_t seed, dyadlab_weight** out) {
  if (dyadlab_status st = require(family && out, "null argument")) return st;
  return guarded([&] {
    GridSpec g = make_grid(d, L);
    WeightRecipe r{family, family, param, seed};
    *out = new dyadlab_weight{generate_weight(g, r)};
  });
}

dyadlab_status dyadlab_weight_from_func(const dyadlab_func* cells, dyadlab_weight** out) {
  if (dyadlab_status st = require(cells && out, "null argument")) return st;
  return guarded([&] { *out = new dyadlab_weight{make_weight(cells->f)}; });
}

dyadlab_status dyadlab_weight_load(const char* path, dyadlab_weight** out) {
  if (dyadlab_status st = require(path && out, "null argument")) return st;
  return guarded([&] { *out = new dyadlab_weight{load_weight(path)}; }, DYADLAB_ERR_IO);
}

dyadlab_status dyadlab_weight_save(const dyadlab_weight* w, const char* path) {
  if (dyadlab_status st = require(w && path, "null argument")) return st;
  return guarded([&] { save_weight(path, w->w); }, DYADLAB_ERR_IO);
}

dyadlab_status dyadlab_weight_a2(const dyadlab_weight* w, double* out) {
  if (dyadlab_status st = require(w && out, "null argument")) return st;
  *out = w->w.a2;
  g_error.clear();
  return DYADLAB_OK;
}

void dyadlab_weight_free(dyadlab_weight* w) { delete w; }

dyadlab_status dyadlab_symbols_constant(int d, int L, double value,
                                        dyadlab_symbols** out) {
  if (dyadlab_status st = require(out != nullptr, "null argument")) return st;
  return guarded([&] {
    *out = new dyadlab_symbols(constant_symbol(make_grid(d, L), value));
  });
}

dyadlab_status dyadlab_symbols_random_signs(int d, int L, uint64_t seed,
                                            dyadlab_symbols** out) {
  if (dyadlab_status st = require(out != nullptr, "null argument")) return st;
  return guarded([&] {
    *out = new dyadlab_symbols(random_sign_symbol(make_grid(d, L), seed));
  });
}

dyadlab_status dyadlab_symbols_load(const char* path, int d, int L,
                                    dyadlab_symbols** out) {
  if (dyadlab_status st = require(path && out, "null argument")) return st;
  return guarded([&] { *out = new dyadlab_symbols(load_symbols(path, make_grid(d, L))); },
                 DYADLAB_ERR_IO);
}

void dyadlab_symbols_free(dyadlab_symbols* s) { delete s; }

dyadlab_status dyadlab_nine_term_norms(const dyadlab_weight* w,
                                       const dyadlab_symbols* sigma, double tol,
                                       uint64_t seed, double* out10) {
  if (dyadlab_status st = require(w && sigma && out10, "null argument")) return st;
  return guarded(
      [&] {
        NormOptions opt;
        if (tol > 0.0) opt.tol = tol;
        opt.seed = seed;
        SweepRow row = measure_nine_norms(w->w, sigma->s, opt);
        if (!row.converged) throw std::runtime_error(row.note);
        for (int i = 0; i < 9; ++i) out10[i] = row.q[size_t(i)];
        out10[9] = row.conjugated;
      },
      DYADLAB_ERR_NUMERIC);
}

const char* dyadlab_nine_term_label(int i) {
  if (i < 0 || i >= 9) return nullptr;
  return kNineLabels[size_t(i)];
}

dyadlab_status dyadlab_config_create(dyadlab_config** out) {
  if (dyadlab_status st = require(out != nullptr, "null argument")) return st;
  *out = new (std::nothrow) dyadlab_config{};
  if (!*out) return fail(DYADLAB_ERR_INTERNAL, "out of memory");
  g_error.clear();
  return DYADLAB_OK;
}

dyadlab_status dyadlab_config_load(const char* path, dyadlab_config** out) {
  if (dyadlab_status st = require(path && out, "null argument")) return st;
  return guarded(
      [&] {
        ConfigMap cm = load_config(path);
        config_from_map(cm);  // validate keys and grid before handing back
        *out = new dyadlab_config{std::move(cm)};
      },
      DYADLAB_ERR_IO);
}

dyadlab_status dyadlab_config_set(dyadlab_config* c, const char* key,
                                  const char* value) {
  if (dyadlab_status st = require(c && key && value, "null argument")) return st;
  return guarded([&] {
    ConfigMap next = c->cm;
    next.set(key, value);
    config_from_map(next);  // reject unknown keys and bad values atomically
    c->cm = std::move(next);
  });
}

void dyadlab_config_free(dyadlab_config* c) { delete c; }

dyadlab_status dyadlab_run(const dyadlab_config* c, const char* command,
                           const char* out_dir, dyadlab_log_fn log_fn, void* user,
                           int* out_exit) {
  if (dyadlab_status st = require(c && command && out_exit, "null argument")) return st;
  return guarded(
      [&] {
        ExperimentConfig cfg = config_from_map(c->cm);
        CallbackBuf buf(log_fn, user);
        std::ostream log(&buf);
        int code = run_command(command, cfg, out_dir ? out_dir : ".", log);
        if (code == 2) throw std::invalid_argument("unknown command: " + std::string(command));
        *out_exit = code;
      },
      DYADLAB_ERR_IO);
}

}  // extern "C"
